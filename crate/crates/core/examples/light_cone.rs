//! Light-cone coordinates ξ± = (z ± t)/√2 and the events built from them.

use focuswave::{from_light_cone, to_light_cone, LightConePoint};

fn main() -> focuswave::Result<()> {
    for &(z, t) in &[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (-2.5, 4.0)] {
        let (xp, xm) = to_light_cone(z, t)?;
        let (z2, t2) = from_light_cone(xp, xm)?;
        println!("z={z:5.2} t={t:5.2}  ->  ξ+={xp:8.5} ξ-={xm:8.5}  ->  z={z2:5.2} t={t2:5.2}");
    }

    // the interval −t² + z² equals 2 ξ+ ξ−
    let p = LightConePoint::new(0.3, -0.4, 1.7, 0.9)?;
    let interval = p.z * p.z - p.t * p.t;
    println!("2 ξ+ ξ- = {:.12}, z² - t² = {interval:.12}", 2.0 * p.xi_plus() * p.xi_minus());
    println!("ρ² = {}", p.rho_sq());
    Ok(())
}
