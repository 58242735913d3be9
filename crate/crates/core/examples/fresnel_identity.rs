//! The Gaussian Fresnel integral ∫ e^{ikx² − ik_x x} dx: closed form against
//! damped quadrature extrapolated to zero damping, and the transverse product.

use focuswave::fresnel::{fresnel_gaussian_1d, fresnel_gaussian_1d_numeric, fresnel_transverse_2d};
use focuswave::Complex64;

fn main() -> focuswave::Result<()> {
    println!("{:>6} {:>6} {:>26} {:>10}", "k", "k_x", "closed form", "rel err");
    for &(k, kx) in &[(1.0, 0.0), (-0.7, 1.2), (2.5, -0.4), (0.3, 2.0)] {
        let kc = Complex64::new(k, 0.0);
        let closed = fresnel_gaussian_1d(kc, kx, 1e-3)?;
        let numeric = fresnel_gaussian_1d_numeric(kc, kx, 0.004)?;
        let rel = (numeric.value - closed).norm() / closed.norm();
        println!("{k:6.2} {kx:6.2} {:>12.8}{:>+12.8}i {rel:10.2e}", closed.re, closed.im);
    }

    let (k, kx, ky) = (Complex64::new(1.3, 0.0), 0.5, -0.8);
    let product = fresnel_gaussian_1d(k, kx, 1e-3)? * fresnel_gaussian_1d(k, ky, 1e-3)?;
    let transverse = fresnel_transverse_2d(k, kx, ky, 1e-3)?;
    println!("product of 1D integrals {product:.10}");
    println!("transverse closed form  {transverse:.10}");

    // undamped real curvature has no limit to take
    match fresnel_gaussian_1d(Complex64::new(1.0, 0.0), 0.0, 0.0) {
        Err(e) => println!("η = 0: {e}"),
        Ok(v) => println!("η = 0 unexpectedly gave {v}"),
    }
    Ok(())
}
