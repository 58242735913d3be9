//! Closed-form localized solutions: the Bateman–Hillion packet
//! `u = f(θ)/(√2 ξ₊ − iε)`, the 1+1 traveling waves, and the parabolic
//! building block `û(x, y, β)` from which the packet is synthesized.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::grid::{FieldSlice, GridSpec};
use crate::dynamics::residual::{fit_convergence, ConvergenceReport};
use crate::envelope::Envelope;
use crate::error::{Error, Result};
use crate::lightcone::{finite, LightConePoint};
use crate::quadrature::Quadrature;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Smallest `|√2 ξ₊ − iε|` accepted before reporting a singularity.
pub const DENOMINATOR_GUARD: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    D2,
    D4,
}

impl Dimension {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "2" | "d2" => Ok(Dimension::D2),
            "4" | "d4" => Ok(Dimension::D4),
            other => Err(Error::param("dim", format!("expected 2 or 4, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacketParams {
    pub epsilon: f64,
    pub envelope: Envelope,
    pub mass: f64,
    pub dimension: Dimension,
}

impl PacketParams {
    pub fn new(epsilon: f64, envelope: Envelope, mass: f64, dimension: Dimension) -> Result<Self> {
        let p = Self {
            epsilon,
            envelope,
            mass,
            dimension,
        };
        p.validate()?;
        Ok(p)
    }

    /// The massless 3+1 packet.
    pub fn massless(epsilon: f64, envelope: Envelope) -> Result<Self> {
        Self::new(epsilon, envelope, 0.0, Dimension::D4)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::param("epsilon", format!("must be > 0, got {}", self.epsilon)));
        }
        if !(self.mass >= 0.0) || !self.mass.is_finite() {
            return Err(Error::param("mass", format!("must be ≥ 0, got {}", self.mass)));
        }
        if self.dimension == Dimension::D2 && self.mass != 0.0 {
            return Err(Error::param("mass", "2d packets are massless"));
        }
        Ok(())
    }

    /// `√2 ξ₊ − iε`.
    pub fn denominator(&self, xi_plus: f64) -> Complex64 {
        Complex64::new(std::f64::consts::SQRT_2 * xi_plus, -self.epsilon)
    }

    fn check_closed_form(&self) -> Result<()> {
        self.validate()?;
        if self.dimension != Dimension::D4 {
            return Err(Error::Unsupported("the Bateman–Hillion form is a 3+1 solution".into()));
        }
        if self.mass != 0.0 {
            return Err(Error::Unsupported("the Bateman–Hillion closed form is massless".into()));
        }
        Ok(())
    }

    /// `(D, θ)` at a point, with the singularity guard applied.
    fn phase(&self, pt: &LightConePoint) -> Result<(Complex64, Complex64)> {
        let d = self.denominator(pt.xi_plus());
        if d.norm() <= DENOMINATOR_GUARD {
            return Err(Error::Singularity(format!(
                "|√2ξ₊ − iε| = {:e} at ξ₊ = {}",
                d.norm(),
                pt.xi_plus()
            )));
        }
        let theta = std::f64::consts::SQRT_2 * pt.xi_minus() + pt.rho_sq() / d;
        Ok((d, theta))
    }
}

/// `u = f(θ)/(√2 ξ₊ − iε)` with `θ = √2 ξ₋ + (x² + y²)/(√2 ξ₊ − iε)`.
pub fn eval_bateman_hillion(p: &PacketParams, pt: &LightConePoint) -> Result<Complex64> {
    p.check_closed_form()?;
    let (d, theta) = p.phase(pt)?;
    finite(p.envelope.eval(theta)? / d, "Bateman–Hillion packet")
}

/// `∂u/∂t` of the packet, used as Cauchy velocity data.
pub fn bateman_hillion_velocity(p: &PacketParams, pt: &LightConePoint) -> Result<Complex64> {
    p.check_closed_form()?;
    let (d, theta) = p.phase(pt)?;
    let dtheta = -1.0 - pt.rho_sq() / (d * d);
    let value = p.envelope.derivative(theta)? * dtheta / d - p.envelope.eval(theta)? / (d * d);
    finite(value, "Bateman–Hillion velocity")
}

/// Samples the packet (or its time derivative) on a grid at time `t`.
pub fn sample_bateman_hillion(p: &PacketParams, grid: &GridSpec, t: f64, velocity: bool) -> Result<FieldSlice> {
    p.check_closed_form()?;
    let mut slice = FieldSlice::from_fn(grid.clone(), t, |[x, y, z]| {
        let pt = LightConePoint::new(x, y, z, t)?;
        if velocity {
            bateman_hillion_velocity(p, &pt)
        } else {
            eval_bateman_hillion(p, &pt)
        }
    })?;
    slice.meta.insert("epsilon".into(), p.epsilon.to_string());
    slice.meta.insert(
        "field".into(),
        if velocity { "bateman_hillion_velocity" } else { "bateman_hillion" }.into(),
    );
    Ok(slice)
}

/// `f((z − t)/√2) + g((z + t)/√2)`.
pub fn eval_traveling_1p1(f: &Envelope, g: &Envelope, z: f64, t: f64) -> Result<Complex64> {
    let (xi_plus, xi_minus) = crate::lightcone::to_light_cone(z, t)?;
    finite(f.eval_real(xi_minus)? + g.eval_real(xi_plus)?, "traveling wave")
}

/// One spectral component `û = β⁻¹ exp(ia(x² + y²)/β) f̂(a)` of the packet.
///
/// `beta` is complex so that the packet's regularizer can ride along:
/// `β = z + t − iε` reproduces the Bateman–Hillion denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct ParabolicSolution {
    pub a: f64,
    pub alpha: f64,
    pub beta: Complex64,
    pub envelope_hat: Envelope,
}

impl ParabolicSolution {
    pub fn new(a: f64, alpha: f64, beta: Complex64, envelope_hat: Envelope) -> Result<Self> {
        if !a.is_finite() || !alpha.is_finite() || !beta.re.is_finite() || !beta.im.is_finite() {
            return Err(Error::Domain("parabolic parameters must be finite".into()));
        }
        Ok(Self {
            a,
            alpha,
            beta,
            envelope_hat,
        })
    }

    /// `α = z − t`, `β = z + t − iε`.
    pub fn at_event(a: f64, z: f64, t: f64, epsilon: f64, envelope_hat: Envelope) -> Result<Self> {
        Self::new(a, z - t, Complex64::new(z + t, -epsilon), envelope_hat)
    }

    pub fn with_beta(&self, beta: Complex64) -> Self {
        Self { beta, ..self.clone() }
    }
}

pub fn eval_parabolic(sol: &ParabolicSolution, x: f64, y: f64) -> Result<Complex64> {
    if sol.beta.norm() <= DENOMINATOR_GUARD {
        return Err(Error::Singularity("β = 0 in the parabolic solution".into()));
    }
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain("non-finite transverse coordinate".into()));
    }
    let phase = (I * sol.a * (x * x + y * y) / sol.beta).exp();
    finite(phase * sol.envelope_hat.eval_real(sol.a)? / sol.beta, "parabolic solution")
}

/// Central-difference residual of `∂²ₓû + ∂²_yû + 4ia ∂_βû` at the nodes
/// `(x, y)` for spacings `h, h/2, h/4`, with the fitted convergence order.
pub fn parabolic_residual(sol: &ParabolicSolution, nodes: &[(f64, f64)], h: f64) -> Result<ConvergenceReport> {
    if !(h > 0.0) {
        return Err(Error::param("h", "spacing must be positive"));
    }
    let mut spacings = Vec::new();
    let mut residuals = Vec::new();
    let mut floors = Vec::new();
    let mut scale = 0.0f64;
    for level in 0..3 {
        let h = h / f64::from(1 << level);
        let rows = nodes
            .par_iter()
            .map(|&(x, y)| -> Result<(f64, f64)> {
                let u = |dx: f64, dy: f64, db: f64| eval_parabolic(&sol.with_beta(sol.beta + db), x + dx, y + dy);
                let c = u(0.0, 0.0, 0.0)?;
                let lap = (u(h, 0.0, 0.0)? + u(-h, 0.0, 0.0)? + u(0.0, h, 0.0)? + u(0.0, -h, 0.0)? - 4.0 * c) / (h * h);
                let dbeta = (u(0.0, 0.0, h)? - u(0.0, 0.0, -h)?) / (2.0 * h);
                Ok(((lap + 4.0 * I * sol.a * dbeta).norm(), c.norm()))
            })
            .collect::<Result<Vec<_>>>()?;
        let res = rows.iter().map(|r| r.0).fold(0.0, f64::max);
        scale = scale.max(rows.iter().map(|r| r.1).fold(0.0, f64::max));
        spacings.push(h);
        residuals.push(res);
        floors.push(64.0 * f64::EPSILON * (4.0 + sol.a.abs() * h) / (h * h));
    }
    let floors: Vec<f64> = floors.iter().map(|f| f * scale).collect();
    Ok(fit_convergence(&spacings, &residuals, &floors, scale))
}

/// Evaluates `u = ∫ û e^{iαa} da` on `grid` at time `t` by adaptive
/// quadrature over the support of `f̂`.
///
/// For a Gaussian-type `f̂` the integrand `f̂(a) e^{iaθ}` with `Im θ > 0` has
/// its modulus peak pulled toward negative `a`; the window follows it.
pub fn synthesize_from_parabolic(f_hat: &Envelope, epsilon: f64, grid: &GridSpec, t: f64) -> Result<FieldSlice> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::param("epsilon", format!("must be > 0, got {epsilon}")));
    }
    if f_hat.is_zero() {
        return FieldSlice::zeros(grid.clone(), t);
    }
    let Some((lo, hi)) = f_hat.real_window() else {
        return Err(Error::Domain("f̂ must be localized (compact support or Gaussian decay)".into()));
    };
    let width = f_hat.gaussian_width();
    FieldSlice::from_fn(grid.clone(), t, |[x, y, z]| {
        let beta = Complex64::new(z + t, -epsilon);
        if beta.norm() <= DENOMINATOR_GUARD {
            return Err(Error::Singularity("β = 0 during synthesis".into()));
        }
        let theta = (z - t) + (x * x + y * y) / beta;
        let lo = match width {
            Some(w) => lo - w * w * theta.im,
            None => lo,
        };
        let peak = f_hat.amplitude.norm() * (hi - lo) / beta.norm();
        let q = Quadrature::with_tolerance(1e-11, 1e-14 * peak.max(f64::MIN_POSITIVE));
        let r = q.integrate(
            |a| {
                let v = f_hat.eval_real(a).unwrap_or(Complex64::new(f64::NAN, 0.0));
                v * (I * a * theta).exp()
            },
            lo,
            hi,
        )?;
        finite(r.value / beta, "synthesized packet")
    })
}
