//! A massless 1+1 field assembled from a Gaussian mode profile in a box,
//! and the same field a little later: the right-moving part just translates.

use focuswave::dynamics::{Axis, Coord};
use focuswave::spectral::{reconstruct_field_d2, ModeGrid, SpectralProfile};

fn main() -> focuswave::Result<()> {
    let profile = SpectralProfile::gaussian(1.0, 1.0, 0.0)?.right_moving();
    let modes = ModeGrid::new(80.0, 401, 0.0)?;
    let z = Axis::closed(Coord::Z, -10.0, 10.0, 201)?;

    let before = reconstruct_field_d2(&profile, &modes, &z, 0.0)?;
    let after = reconstruct_field_d2(&profile, &modes, &z, 3.0)?;
    let peak = |s: &focuswave::dynamics::FieldSlice| {
        let (i, _) = s
            .samples
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .expect("non-empty");
        z.at(i)
    };
    println!("Δk = {:.5}, {} modes", modes.dk(), modes.len());
    println!("peak at t = 0: z = {:.2}", peak(&before));
    println!("peak at t = 3: z = {:.2}", peak(&after));
    println!("max |φ|: {:.6} -> {:.6}", before.max_abs(), after.max_abs());
    Ok(())
}
