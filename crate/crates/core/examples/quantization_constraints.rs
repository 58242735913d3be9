//! Amplitude constraints that make a Gaussian mode profile canonically
//! normalized, in 1+1 and 3+1 dimensions.

use focuswave::packets::Dimension;
use focuswave::quantization::{constraint_d2, constraint_d4, default_cutoffs, lambda_kernel, solve_amplitude};
use focuswave::spectral::SpectralProfile;

fn main() -> focuswave::Result<()> {
    let sigma = 1.0;
    let a2 = solve_amplitude(sigma, 0.0, Dimension::D2)?;
    let profile = SpectralProfile::gaussian(a2, sigma, 0.0)?;
    println!("1+1, σ = {sigma}: A = {a2}");
    for &z in &[0.0, 1.0, 2.0] {
        println!("  Λ({z}) = {:.6}", lambda_kernel(&profile, z)?.re);
    }
    let r = constraint_d2(&profile, &default_cutoffs(sigma))?;
    for p in &r.ladder {
        println!("  ∫Λ up to {:>4}: {:.12}", p.cutoff, p.value);
    }
    println!("  residual {:.2e}, passed {}", r.residual, r.passed);

    println!("3+1: A = e^(σ²m²/2) makes g(m) g(-m) = 1");
    for &m in &[0.0, 0.5, 1.0, 2.0] {
        let a = solve_amplitude(sigma, m, Dimension::D4)?;
        let r = constraint_d4(&SpectralProfile::gaussian(a, sigma, m)?)?;
        println!("  m = {m}: A = {a:.10}, constraint {:.15}", r.value);
    }
    Ok(())
}
