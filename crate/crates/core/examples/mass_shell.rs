//! The k₋ dependence of the damped transform concentrates on the mass shell
//! k₋ = −k⊥²/(2k₊) as the damping η is removed.

use std::f64::consts::SQRT_2;

use focuswave::spectral::verify_mass_shell_delta;
use focuswave::Envelope;

fn main() -> focuswave::Result<()> {
    let env = Envelope::gaussian(1.0)?;
    for &(kp, kperp) in &[(2.0, SQRT_2), (-1.0, 0.5)] {
        let r = verify_mass_shell_delta(&env, kp, kperp, &[0.2, 0.1, 0.05])?;
        println!("k+ = {kp}, k⊥ = {kperp:.4}: expected peak at k- = {}", r.expected_peak);
        for l in &r.levels {
            println!(
                "  η = {:<5} peak {:+.4}  rms width {:.4}  weight {:.6}",
                l.eta, l.peak_location, l.rms_width, l.weight
            );
        }
        println!("  coefficient {:.6}, weight error {:.2e}, passed {}", r.coefficient, r.weight_error, r.passed);
    }
    Ok(())
}
