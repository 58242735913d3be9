//! Gaussian–Fresnel integrals `∫ e^{i k x² − i k_x x} dx`.
//!
//! Square roots are taken on the principal branch. For `Im k > 0` the
//! integral converges absolutely; for real `k` the value is the `η → 0⁺`
//! limit of the damped integral, which the principal branch reproduces.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lightcone::finite;
use crate::quadrature::{Domain, QuadResult, Quadrature};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Closed form of `∫ e^{i k x² − i k_x x} dx`.
///
/// `eta > 0` declares that a real `k` is meant as the limit of the damped
/// integral. `Im k < 0` has no convergent limit.
pub fn fresnel_gaussian_1d(k: Complex64, k_x: f64, eta: f64) -> Result<Complex64> {
    check_curvature(k, eta)?;
    if !k_x.is_finite() {
        return Err(Error::Domain(format!("non-finite wavenumber k_x={k_x}")));
    }
    // ∫ e^{−a x² − b x} dx = √(π/a) e^{b²/(4a)} with a = −ik, b = i k_x
    let a = -I * k;
    let value = (Complex64::new(PI, 0.0) / a).sqrt() * (-(k_x * k_x) / (4.0 * a)).exp();
    finite(value, "Fresnel integral")
}

/// The transverse product `(iπ/k) e^{−i(k_x² + k_y²)/(4k)}`.
pub fn fresnel_transverse_2d(k: Complex64, k_x: f64, k_y: f64, eta: f64) -> Result<Complex64> {
    check_curvature(k, eta)?;
    let value = I * PI / k * (-I * (k_x * k_x + k_y * k_y) / (4.0 * k)).exp();
    finite(value, "transverse Fresnel product")
}

fn check_curvature(k: Complex64, eta: f64) -> Result<()> {
    if !k.re.is_finite() || !k.im.is_finite() {
        return Err(Error::Domain(format!("non-finite curvature k={k}")));
    }
    if k.norm() == 0.0 {
        return Err(Error::Singularity("Fresnel curvature k = 0".into()));
    }
    if k.im < 0.0 {
        return Err(Error::NonConvergent(format!("Im k = {} < 0 grows without bound", k.im)));
    }
    if k.im == 0.0 && !(eta > 0.0) {
        return Err(Error::NonConvergent(format!(
            "real curvature k = {} needs a damping η > 0",
            k.re
        )));
    }
    Ok(())
}

/// The same integral by damped quadrature extrapolated to `η → 0⁺`.
///
/// `eta0` is taken relative to `|k|` so the extrapolation error is
/// independent of the curvature scale.
pub fn fresnel_gaussian_1d_numeric(k: Complex64, k_x: f64, eta0: f64) -> Result<QuadResult> {
    check_curvature(k, eta0)?;
    let integrand = move |x: f64| (I * k * x * x - I * k_x * x).exp();
    let quad = Quadrature::with_tolerance(1e-11, 1e-15);
    if k.im > 0.0 {
        quad.integrate_line(integrand)
    } else {
        quad.integrate_limit(integrand, Domain::Line, eta0 * k.norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gaussian_reductions() {
        let v = fresnel_gaussian_1d(I, 0.0, 0.0).unwrap();
        assert!((v - PI.sqrt()).norm() < 1e-15);
        let v = fresnel_gaussian_1d(I, 2.0, 0.0).unwrap();
        assert!((v - PI.sqrt() * (-1.0f64).exp()).norm() < 1e-15);
    }

    #[test]
    fn weakly_damped_curvature_against_adaptive_quadrature() {
        let k = Complex64::new(1.0, 0.01);
        let closed = fresnel_gaussian_1d(k, 1.0, 0.0).unwrap();
        let oracle = Quadrature::with_tolerance(1e-13, 1e-16)
            .integrate(|x| (I * k * x * x - I * x).exp(), -70.0, 70.0)
            .unwrap();
        let rel = (closed - oracle.value).norm() / closed.norm();
        assert!(rel < 1e-8, "rel {rel:e}");
        let alt = (I * PI / k).sqrt() * (-I / (4.0 * k)).exp();
        assert!((closed - alt).norm() / closed.norm() < 1e-14);
    }

    #[test]
    fn non_convergent_cases() {
        assert!(matches!(
            fresnel_gaussian_1d(Complex64::new(1.0, -0.1), 0.0, 1.0),
            Err(Error::NonConvergent(_))
        ));
        assert!(matches!(
            fresnel_gaussian_1d(Complex64::new(1.0, 0.0), 0.0, 0.0),
            Err(Error::NonConvergent(_))
        ));
        assert!(matches!(fresnel_gaussian_1d(Complex64::new(0.0, 0.0), 0.0, 1.0), Err(Error::Singularity(_))));
    }

    #[test]
    fn numeric_limit_matches_closed_form_for_real_curvature() {
        let closed = fresnel_gaussian_1d(Complex64::new(1.0, 0.0), 2.0, 1e-3).unwrap();
        let num = fresnel_gaussian_1d_numeric(Complex64::new(1.0, 0.0), 2.0, 0.01).unwrap();
        assert!((num.value - closed).norm() < 1e-6, "{} vs {}", num.value, closed);
    }

    proptest! {
        #[test]
        fn product_of_two_matches_transverse_form(
            kr in -3.0f64..3.0, ki in 0.05f64..3.0, kx in -3.0f64..3.0, ky in -3.0f64..3.0
        ) {
            let k = Complex64::new(kr, ki);
            let prod = fresnel_gaussian_1d(k, kx, 0.0).unwrap() * fresnel_gaussian_1d(k, ky, 0.0).unwrap();
            let pair = fresnel_transverse_2d(k, kx, ky, 0.0).unwrap();
            prop_assert!((prod - pair).norm() <= 1e-8 * pair.norm());
        }
    }
}
