//! The equal-time commutator [Q, P] of the smeared field operators,
//! evaluated in truncated Fock spaces, converging as the truncation grows.

use focuswave::packets::Dimension;
use focuswave::quantization::{fock_commutator_check, QuantizationConfig};
use focuswave::spectral::SpectralProfile;

fn main() -> focuswave::Result<()> {
    let profile = SpectralProfile::gaussian(1.0, 1.0, 0.0)?;
    for n_max in [8, 12, 16] {
        let cfg = QuantizationConfig::new(profile.clone(), Dimension::D4, 20.0, 41, n_max)?;
        let r = fock_commutator_check(&cfg)?;
        println!("n_max = {n_max:2}: value {:.12}, truncation bound {:.2e}", r.value, r.truncation_bound.unwrap_or(f64::NAN));
        let worst = r
            .states
            .iter()
            .max_by(|a, b| (a.value - 1.0).abs().total_cmp(&(b.value - 1.0).abs()))
            .expect("states are reported");
        println!("    {} states, worst {} at {:.12}", r.states.len(), worst.state, worst.value);
    }
    Ok(())
}
