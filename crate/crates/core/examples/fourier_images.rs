//! Space-time Fourier coefficients of the massless and massive packets,
//! including the numerical pipeline for the massive one.

use focuswave::spectral::{massive_coefficient_pipeline, massive_fourier_coefficient, massless_fourier_coefficient};
use focuswave::Envelope;

fn main() -> focuswave::Result<()> {
    let env = Envelope::gaussian(1.0)?;
    let m = 0.7;
    println!("{:>6} {:>30} {:>30}", "k+", "massless", "massive (m = 0.7)");
    for &k in &[-2.0, -0.5, 0.5, 1.0, 2.0] {
        let a = massless_fourier_coefficient(&env, k)?;
        let b = massive_fourier_coefficient(&env, k, m)?;
        println!("{k:6.2} {:>14.6e}{:>+14.6e}i {:>14.6e}{:>+14.6e}i", a.re, a.im, b.re, b.im);
    }

    let k = 1.0;
    let p = massive_coefficient_pipeline(&env, k, (0.3, -0.2), m, 0.004)?;
    let closed = massive_fourier_coefficient(&env, k, m)?;
    println!("pipeline at k+ = {k}: {:.8}", p.value);
    println!("closed form:        {closed:.8}");
    println!(
        "relative difference {:.2e}, ξ+ spread {:.2e}, error bound {:.2e}",
        (p.value - closed).norm() / closed.norm(),
        p.xi_plus_spread,
        p.error_bound
    );
    Ok(())
}
