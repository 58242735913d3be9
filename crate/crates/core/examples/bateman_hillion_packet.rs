//! Evaluates a Gaussian Bateman–Hillion packet and shows that its shape
//! along the axis travels with the light cone while only the 1/D prefactor
//! changes.

use std::f64::consts::SQRT_2;

use focuswave::dynamics::{Axis, Coord, GridSpec};
use focuswave::packets::{eval_bateman_hillion, sample_bateman_hillion, PacketParams};
use focuswave::{Envelope, LightConePoint};

fn main() -> focuswave::Result<()> {
    let packet = PacketParams::massless(0.5, Envelope::gaussian(1.0)?)?;

    println!("on axis: |u|·|D| against |f(√2 ξ-)| as ξ+ grows");
    for &xi_plus in &[0.0, 1.0, 10.0, 100.0] {
        let mut worst = 0.0f64;
        for i in -8..=8 {
            let xi_minus = 0.25 * i as f64;
            let p = LightConePoint::from_light_cone(0.0, 0.0, xi_plus, xi_minus)?;
            let shape = eval_bateman_hillion(&packet, &p)?.norm() * packet.denominator(xi_plus).norm();
            let f = packet.envelope.eval_real(SQRT_2 * xi_minus)?.norm();
            worst = worst.max((shape - f).abs());
        }
        println!("  ξ+ = {xi_plus:6.1}: max deviation {worst:.2e}");
    }

    let grid = GridSpec::new(
        vec![Axis::closed(Coord::X, 0.0, 1.0, 5)?, Axis::closed(Coord::Z, -1.0, 1.0, 9)?],
        [0.0; 3],
    )?;
    for &t in &[0.0, 2.0] {
        let slice = sample_bateman_hillion(&packet, &grid, t, false)?;
        println!("t = {t}: max |u| on the (x, z) slice = {:.6}", slice.max_abs());
    }
    Ok(())
}
