//! Adaptive Gauss–Kronrod quadrature for complex integrands on the real line.
//!
//! Conditionally convergent oscillatory integrals (Fresnel type) are handled
//! by Gaussian damping `e^{−η x²}` and, when the undamped limit is wanted,
//! three-point Richardson extrapolation in `η → 0⁺`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

// G10/K21 abscissae on [-1, 1], positive half; index 10 is the centre node.
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7, 9).
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// `η·L²` at which the Gaussian damping factor has dropped below 1e-18.
const DAMPING_EXPONENT_CUTOFF: f64 = 41.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Finite(f64, f64),
    /// The whole real line.
    Line,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Damping {
    None,
    /// Multiply the integrand by `e^{−η x²}` and return the damped value.
    Fixed(f64),
    /// Damp with `η, η/2, η/4` and extrapolate to `η → 0⁺`.
    Extrapolate(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    /// Reported bound on `|value − exact|`.
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_panels: usize,
    pub max_panels: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-15,
            initial_panels: 16,
            max_panels: 400_000,
        }
    }
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    /// The error estimate sits at the roundoff floor; splitting cannot help.
    at_floor: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut fv = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 10];
    for (j, slot) in fv.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let (f1, f2) = (f(centre - dx), f(centre + dx));
        kronrod += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
        *slot = (f1, f2);
    }
    let mean = kronrod * 0.5;
    let mut asc = WGK[10] * (fc - mean).norm();
    let mut abs = WGK[10] * fc.norm();
    for (j, (f1, f2)) in fv.iter().enumerate() {
        asc += WGK[j] * ((f1 - mean).norm() + (f2 - mean).norm());
        abs += WGK[j] * (f1.norm() + f2.norm());
    }
    let scale = half.abs();
    let (value, res_abs, res_asc) = (kronrod * half, abs * scale, asc * scale);
    let mut error = ((kronrod - gauss) * half).norm();
    // QUADPACK error rescaling
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let mut at_floor = false;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let floor = 50.0 * f64::EPSILON * res_abs;
        if floor >= error {
            error = floor;
            at_floor = true;
        }
    }
    if !value.re.is_finite() || !value.im.is_finite() {
        error = f64::INFINITY;
        at_floor = false;
    }
    Panel {
        a,
        b,
        value,
        error,
        at_floor,
    }
}

impl Quadrature {
    pub fn with_tolerance(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    /// Adaptive integration over a finite interval.
    pub fn integrate<F: Fn(f64) -> Complex64>(&self, f: F, a: f64, b: f64) -> Result<QuadResult> {
        self.integrate_ranges(&f, &[(a, b)])
    }

    pub fn integrate_ranges<F: Fn(f64) -> Complex64>(
        &self,
        f: &F,
        ranges: &[(f64, f64)],
    ) -> Result<QuadResult> {
        for &(a, b) in ranges {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::Domain(format!("non-finite integration bound [{a}, {b}]")));
            }
        }
        let mut heap = BinaryHeap::new();
        let mut total = Complex64::new(0.0, 0.0);
        let mut total_err = 0.0;
        let mut evaluations = 0;
        let per_range = self.initial_panels.max(1);
        for &(a, b) in ranges {
            if a == b {
                continue;
            }
            let width = (b - a) / per_range as f64;
            for i in 0..per_range {
                let lo = a + width * i as f64;
                let hi = if i + 1 == per_range { b } else { lo + width };
                let p = gk21(f, lo, hi);
                evaluations += 21;
                total += p.value;
                total_err += p.error;
                heap.push(p);
            }
        }
        let mut retired: Vec<Panel> = Vec::new();
        let mut refreshed = 0usize;
        loop {
            let tol = self.abs_tol.max(self.rel_tol * total.norm());
            if total_err <= tol {
                break;
            }
            if heap.len() >= self.max_panels {
                return Err(Error::Accuracy {
                    estimate_re: total.re,
                    estimate_im: total.im,
                    bound: total_err,
                    detail: format!("panel budget {} exhausted", self.max_panels),
                });
            }
            let worst = match heap.pop() {
                Some(p) => p,
                None => break,
            };
            let mid = 0.5 * (worst.a + worst.b);
            if worst.at_floor || mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
                retired.push(worst);
                if heap.is_empty() {
                    break;
                }
                continue;
            }
            let left = gk21(f, worst.a, mid);
            let right = gk21(f, mid, worst.b);
            evaluations += 42;
            total += left.value + right.value - worst.value;
            total_err += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
            // the running sums drift; rebuild them now and then
            refreshed += 1;
            if refreshed % 4096 == 0 {
                total = heap.iter().chain(&retired).map(|p| p.value).sum();
                total_err = heap.iter().chain(&retired).map(|p| p.error).sum();
            }
        }
        let mut panels = heap.into_vec();
        panels.extend(retired);
        panels.sort_by(|p, q| p.a.total_cmp(&q.a));
        let value = panels.iter().map(|p| p.value).sum::<Complex64>();
        let error = panels.iter().map(|p| p.error).sum::<f64>();
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::Domain("integrand produced non-finite values".into()));
        }
        Ok(QuadResult {
            value,
            error,
            evaluations,
        })
    }

    /// `∫_{−∞}^{∞} f` for an integrand that decays on its own, through the
    /// map `x = s/(1 − s²)`.
    pub fn integrate_line<F: Fn(f64) -> Complex64>(&self, f: F) -> Result<QuadResult> {
        let mapped = |s: f64| {
            let d = 1.0 - s * s;
            let x = s / d;
            let jac = (1.0 + s * s) / (d * d);
            let v = f(x);
            if v.re == 0.0 && v.im == 0.0 {
                v
            } else {
                v * jac
            }
        };
        self.integrate_ranges(&mapped, &[(-1.0, 0.0), (0.0, 1.0)])
    }

    /// `∫ f(x) e^{−η x²} dx` over `domain`.
    pub fn integrate_damped<F: Fn(f64) -> Complex64>(
        &self,
        f: F,
        domain: Domain,
        eta: f64,
    ) -> Result<QuadResult> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::param("eta", format!("damping must be positive, got {eta}")));
        }
        let damped = |x: f64| f(x) * (-eta * x * x).exp();
        match domain {
            Domain::Finite(a, b) => self.integrate_ranges(&damped, &[(a, b)]),
            Domain::Line => {
                let l = (DAMPING_EXPONENT_CUTOFF / eta).sqrt();
                self.integrate_ranges(&damped, &[(-l, 0.0), (0.0, l)])
            }
        }
    }

    /// Three-point Richardson extrapolation of the damped integral to `η → 0⁺`.
    pub fn integrate_limit<F: Fn(f64) -> Complex64>(
        &self,
        f: F,
        domain: Domain,
        eta0: f64,
    ) -> Result<QuadResult> {
        let f1 = self.integrate_damped(&f, domain, eta0)?;
        let f2 = self.integrate_damped(&f, domain, eta0 / 2.0)?;
        let f4 = self.integrate_damped(&f, domain, eta0 / 4.0)?;
        Ok(richardson3(f1, f2, f4))
    }
}

/// Eliminates the `O(η)` and `O(η²)` terms from `F(η), F(η/2), F(η/4)`.
pub fn richardson3(f1: QuadResult, f2: QuadResult, f4: QuadResult) -> QuadResult {
    let value = (f4.value * 8.0 - f2.value * 6.0 + f1.value) / 3.0;
    let two_point = f4.value * 2.0 - f2.value;
    let quad = (8.0 * f4.error + 6.0 * f2.error + f1.error) / 3.0;
    QuadResult {
        value,
        error: (value - two_point).norm() + quad,
        evaluations: f1.evaluations + f2.evaluations + f4.evaluations,
    }
}

/// Integrates `f` over `domain` with the requested damping policy using the
/// default tolerances.
pub fn oscillatory_quadrature<F: Fn(f64) -> Complex64>(
    f: F,
    domain: Domain,
    damping: Damping,
) -> Result<QuadResult> {
    let q = Quadrature::default();
    match (domain, damping) {
        (Domain::Finite(a, b), Damping::None) => q.integrate(f, a, b),
        (Domain::Line, Damping::None) => q.integrate_line(f),
        (d, Damping::Fixed(eta)) => q.integrate_damped(f, d, eta),
        (d, Damping::Extrapolate(eta)) => q.integrate_limit(f, d, eta),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kronrod_weights_integrate_polynomials() {
        let sum: f64 = WGK.iter().take(10).sum::<f64>() * 2.0 + WGK[10];
        assert!((sum - 2.0).abs() < 1e-15);
        let gsum: f64 = WG.iter().sum::<f64>() * 2.0;
        assert!((gsum - 2.0).abs() < 1e-15);
        // degree 30 is inside the K21 exactness range
        let r = Quadrature::default()
            .integrate(|x| c(x.powi(30), 0.0), -1.0, 1.0)
            .unwrap();
        assert!((r.value.re - 2.0 / 31.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_on_the_line() {
        let r = oscillatory_quadrature(|x| c((-x * x).exp(), 0.0), Domain::Line, Damping::None).unwrap();
        assert!((r.value - c(PI.sqrt(), 0.0)).norm() < 1e-10);
        assert!(r.error < 1e-10);
    }

    #[test]
    fn fresnel_limit() {
        let r = oscillatory_quadrature(
            |x| Complex64::from_polar(1.0, x * x),
            Domain::Line,
            Damping::Extrapolate(0.01),
        )
        .unwrap();
        let exact = Complex64::from_polar(PI.sqrt(), PI / 4.0);
        let err = (r.value - exact).norm();
        assert!(err < 1e-6, "err {err:e}");
        assert!(err <= r.error, "bound {:e} below actual {err:e}", r.error);
    }

    #[test]
    fn damped_value_matches_closed_form() {
        // ∫ e^{ix²} e^{-ηx²} dx = √(π/(η − i))
        let eta = 0.3;
        let r = oscillatory_quadrature(|x| Complex64::from_polar(1.0, x * x), Domain::Line, Damping::Fixed(eta))
            .unwrap();
        let exact = (c(PI, 0.0) / c(eta, -1.0)).sqrt();
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let q = Quadrature {
            max_panels: 8,
            initial_panels: 1,
            ..Quadrature::default()
        };
        match q.integrate(|x| Complex64::from_polar(1.0, 400.0 * x * x), -5.0, 5.0) {
            Err(Error::Accuracy { bound, .. }) => assert!(bound > 0.0),
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }

    #[test]
    fn bad_damping_is_rejected() {
        assert!(oscillatory_quadrature(|_| c(1.0, 0.0), Domain::Line, Damping::Fixed(0.0)).is_err());
    }
}
