//! Localized profiles `f(θ)` carried by the packets, with their spectral
//! transforms `f̃(κ) = ∫ f(θ) e^{−iκθ} dθ`.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lightcone::finite;
use crate::quadrature::{QuadResult, Quadrature};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Half-width, in units of the Gaussian width, beyond which a Gaussian
/// factor is treated as zero by the quadrature windows.
pub(crate) const GAUSSIAN_WINDOW: f64 = 12.0;

/// Complex samples on a strictly increasing abscissa, interpolated by a
/// natural cubic spline and clamped to zero outside the sampled range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    abscissa: Vec<f64>,
    values: Vec<Complex64>,
    curvature: Vec<Complex64>,
}

impl SampledFunction {
    /// Builds the spline. The first and last samples must vanish (compact
    /// support) to within `1e-12` of the largest sample.
    pub fn new(abscissa: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if abscissa.len() != values.len() {
            return Err(Error::Parse(format!(
                "{} abscissae but {} values",
                abscissa.len(),
                values.len()
            )));
        }
        if abscissa.len() < 3 {
            return Err(Error::Parse("a tabulated function needs at least 3 samples".into()));
        }
        if abscissa.iter().any(|x| !x.is_finite()) || values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Parse("non-finite sample".into()));
        }
        if abscissa.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parse("abscissae must be strictly increasing".into()));
        }
        let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let edge = values[0].norm().max(values[values.len() - 1].norm());
        if edge > 1e-12 * peak {
            return Err(Error::Domain(format!(
                "tabulated function lacks compact support: edge value {edge:e} vs peak {peak:e}"
            )));
        }
        let curvature = natural_spline(&abscissa, &values);
        Ok(Self {
            abscissa,
            values,
            curvature,
        })
    }

    /// Reads whitespace-separated `x re [im]` rows; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<f64> = line
                .split_whitespace()
                .map(|c| c.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let (x, re, im) = match cols.as_slice() {
                [x, re] => (*x, *re, 0.0),
                [x, re, im] => (*x, *re, *im),
                _ => {
                    return Err(Error::Parse(format!(
                        "line {}: expected 2 or 3 columns, found {}",
                        lineno + 1,
                        cols.len()
                    )))
                }
            };
            xs.push(x);
            vs.push(Complex64::new(re, im));
        }
        Self::new(xs, vs)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.abscissa[0], self.abscissa[self.abscissa.len() - 1])
    }

    pub fn abscissa(&self) -> &[f64] {
        &self.abscissa
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn locate(&self, x: f64) -> Option<usize> {
        let (lo, hi) = self.support();
        if !(x >= lo && x <= hi) {
            return None;
        }
        let i = self.abscissa.partition_point(|&a| a <= x);
        Some(i.clamp(1, self.abscissa.len() - 1) - 1)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let Some(i) = self.locate(x) else {
            return Complex64::new(0.0, 0.0);
        };
        let h = self.abscissa[i + 1] - self.abscissa[i];
        let a = (self.abscissa[i + 1] - x) / h;
        let b = 1.0 - a;
        self.values[i] * a
            + self.values[i + 1] * b
            + (self.curvature[i] * (a * a * a - a) + self.curvature[i + 1] * (b * b * b - b)) * (h * h / 6.0)
    }

    pub fn derivative(&self, x: f64) -> Complex64 {
        let Some(i) = self.locate(x) else {
            return Complex64::new(0.0, 0.0);
        };
        let h = self.abscissa[i + 1] - self.abscissa[i];
        let a = (self.abscissa[i + 1] - x) / h;
        let b = 1.0 - a;
        (self.values[i + 1] - self.values[i]) / h - self.curvature[i] * ((3.0 * a * a - 1.0) * h / 6.0)
            + self.curvature[i + 1] * ((3.0 * b * b - 1.0) * h / 6.0)
    }

    /// `∫ g(x) e^{−iκx} dx` over the support.
    pub fn transform(&self, kappa: f64) -> Result<QuadResult> {
        let ranges: Vec<(f64, f64)> = self.abscissa.windows(2).map(|w| (w[0], w[1])).collect();
        let q = Quadrature {
            initial_panels: 1,
            ..Quadrature::with_tolerance(1e-13, 1e-16)
        };
        q.integrate_ranges(&|x: f64| self.eval(x) * Complex64::from_polar(1.0, -kappa * x), &ranges)
    }
}

fn natural_spline(x: &[f64], y: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let mut m = vec![Complex64::new(0.0, 0.0); n];
    if n < 3 {
        return m;
    }
    // Thomas algorithm on the interior equations
    let mut diag = vec![0.0; n];
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    let mut upper = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        diag[i] = 2.0 * (h0 + h1);
        upper[i] = h1;
        rhs[i] = ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0) * 6.0;
        if i > 1 {
            let w = h0 / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] = rhs[i] - rhs[i - 1] * w;
        }
    }
    for i in (1..n - 1).rev() {
        m[i] = (rhs[i] - m[i + 1] * upper[i]) / diag[i];
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum EnvelopeFamily {
    /// `exp(−(θ − center)²/(2 width²))`.
    Gaussian { width: f64, center: f64 },
    /// The quasiphoton `e^{iqθ}`, optionally multiplied by
    /// `exp(−θ²/(2 damping²))` so that a transform exists.
    FocusWave { wavenumber: f64, damping: Option<f64> },
    /// `(1 − iθ/scale)^{−order}`: the superposition of quasiphotons
    /// `e^{iqθ}` with weight `q^{order−1} e^{−q·scale}` over `q > 0`.
    /// Bounded by 1 on the closed upper half-plane.
    Splash { scale: f64, order: u32 },
    Tabulated(SampledFunction),
}

/// A localized profile `amplitude · family(θ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub family: EnvelopeFamily,
    pub amplitude: Complex64,
}

impl Envelope {
    pub fn gaussian(width: f64) -> Result<Self> {
        Self::gaussian_centered(width, 0.0)
    }

    pub fn gaussian_centered(width: f64, center: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::param("width", format!("must be positive, got {width}")));
        }
        if !center.is_finite() {
            return Err(Error::param("center", "must be finite"));
        }
        Ok(Self::from_family(EnvelopeFamily::Gaussian { width, center }))
    }

    pub fn focus_wave(wavenumber: f64, damping: Option<f64>) -> Result<Self> {
        if !wavenumber.is_finite() {
            return Err(Error::param("wavenumber", "must be finite"));
        }
        if let Some(s) = damping {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::param("damping", format!("must be positive, got {s}")));
            }
        }
        Ok(Self::from_family(EnvelopeFamily::FocusWave { wavenumber, damping }))
    }

    pub fn splash(scale: f64, order: u32) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::param("scale", format!("must be positive, got {scale}")));
        }
        if order == 0 {
            return Err(Error::param("order", "must be at least 1"));
        }
        Ok(Self::from_family(EnvelopeFamily::Splash { scale, order }))
    }

    pub fn tabulated(samples: SampledFunction) -> Self {
        Self::from_family(EnvelopeFamily::Tabulated(samples))
    }

    /// The identically vanishing envelope.
    pub fn zero() -> Self {
        Self {
            family: EnvelopeFamily::Gaussian {
                width: 1.0,
                center: 0.0,
            },
            amplitude: Complex64::new(0.0, 0.0),
        }
    }

    fn from_family(family: EnvelopeFamily) -> Self {
        Self {
            family,
            amplitude: Complex64::new(1.0, 0.0),
        }
    }

    pub fn with_amplitude(mut self, amplitude: Complex64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == Complex64::new(0.0, 0.0)
    }

    /// Evaluates `f(θ)` for complex `θ`. Tabulated envelopes only accept
    /// real arguments.
    pub fn eval(&self, theta: Complex64) -> Result<Complex64> {
        if self.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let shape = match &self.family {
            EnvelopeFamily::Gaussian { width, center } => {
                let d = theta - center;
                (-(d * d) / (2.0 * width * width)).exp()
            }
            EnvelopeFamily::FocusWave { wavenumber, damping } => {
                let phase = (I * *wavenumber * theta).exp();
                match damping {
                    Some(s) => phase * (-(theta * theta) / (2.0 * s * s)).exp(),
                    None => phase,
                }
            }
            EnvelopeFamily::Splash { scale, order } => {
                let base = Complex64::new(1.0, 0.0) - I * theta / *scale;
                if base.norm() == 0.0 {
                    return Err(Error::Singularity(format!("splash envelope pole at θ = {theta}")));
                }
                base.powi(-(*order as i32))
            }
            EnvelopeFamily::Tabulated(table) => {
                if theta.im != 0.0 {
                    return Err(Error::Domain(format!(
                        "tabulated envelope needs a real argument, got {theta}"
                    )));
                }
                table.eval(theta.re)
            }
        };
        finite(self.amplitude * shape, "envelope")
    }

    pub fn eval_real(&self, theta: f64) -> Result<Complex64> {
        self.eval(Complex64::new(theta, 0.0))
    }

    /// `f'(θ)`.
    pub fn derivative(&self, theta: Complex64) -> Result<Complex64> {
        if self.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let value = match &self.family {
            EnvelopeFamily::Gaussian { width, center } => -(theta - center) / (width * width) * self.eval(theta)?,
            EnvelopeFamily::FocusWave { wavenumber, damping } => {
                let mut rate = I * *wavenumber;
                if let Some(s) = damping {
                    rate -= theta / (s * s);
                }
                rate * self.eval(theta)?
            }
            EnvelopeFamily::Splash { scale, order } => {
                let base = Complex64::new(1.0, 0.0) - I * theta / *scale;
                if base.norm() == 0.0 {
                    return Err(Error::Singularity(format!("splash envelope pole at θ = {theta}")));
                }
                self.amplitude * I * (*order as f64 / scale) * base.powi(-(*order as i32) - 1)
            }
            EnvelopeFamily::Tabulated(table) => {
                if theta.im != 0.0 {
                    return Err(Error::Domain(format!(
                        "tabulated envelope needs a real argument, got {theta}"
                    )));
                }
                self.amplitude * table.derivative(theta.re)
            }
        };
        finite(value, "envelope derivative")
    }

    /// Closed-form `f̃(κ) = ∫ f(θ) e^{−iκθ} dθ` (quadrature for tabulated data).
    pub fn transform(&self, kappa: f64) -> Result<Complex64> {
        if !kappa.is_finite() {
            return Err(Error::Domain(format!("non-finite spectral argument {kappa}")));
        }
        if self.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let root_two_pi = (2.0 * PI).sqrt();
        let value = match &self.family {
            EnvelopeFamily::Gaussian { width, center } => {
                Complex64::from_polar(width * root_two_pi * (-0.5 * width * width * kappa * kappa).exp(), -kappa * center)
            }
            EnvelopeFamily::FocusWave { wavenumber, damping } => match damping {
                Some(s) => {
                    let d = kappa - wavenumber;
                    Complex64::new(s * root_two_pi * (-0.5 * s * s * d * d).exp(), 0.0)
                }
                None => {
                    return Err(Error::Domain(
                        "an undamped focus wave has no function-valued transform".into(),
                    ))
                }
            },
            EnvelopeFamily::Splash { scale, order } => {
                if kappa <= 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    let n = *order as i32;
                    let factorial: f64 = (1..n).map(f64::from).product();
                    Complex64::new(
                        2.0 * PI * scale.powi(n) / factorial * kappa.powi(n - 1) * (-scale * kappa).exp(),
                        0.0,
                    )
                }
            }
            EnvelopeFamily::Tabulated(table) => table.transform(kappa)?.value,
        };
        finite(self.amplitude * value, "envelope transform")
    }

    /// `f̃(κ)` by direct quadrature of `f` on the real line; independent of
    /// the closed forms in [`Envelope::transform`].
    pub fn transform_numeric(&self, kappa: f64) -> Result<QuadResult> {
        if let EnvelopeFamily::FocusWave { damping: None, .. } = self.family {
            if !self.is_zero() {
                return Err(Error::Domain("an undamped focus wave is not integrable".into()));
            }
        }
        if let EnvelopeFamily::Tabulated(table) = &self.family {
            let mut r = table.transform(kappa)?;
            r.value *= self.amplitude;
            r.error *= self.amplitude.norm();
            return Ok(r);
        }
        // envelopes are O(1) in shape; exact zeros need an absolute floor
        let q = Quadrature::with_tolerance(1e-13, 1e-12 * self.amplitude.norm().max(f64::MIN_POSITIVE));
        let integrand = |theta: f64| {
            self.eval_real(theta).unwrap_or(Complex64::new(f64::NAN, 0.0)) * Complex64::from_polar(1.0, -kappa * theta)
        };
        match self.real_window() {
            Some((a, b)) => q.integrate(integrand, a, b),
            None => q.integrate_line(integrand),
        }
    }

    /// A finite interval outside which `|f|` on the real axis is negligible,
    /// when one exists.
    pub fn real_window(&self) -> Option<(f64, f64)> {
        match &self.family {
            EnvelopeFamily::Gaussian { width, center } => {
                Some((center - GAUSSIAN_WINDOW * width, center + GAUSSIAN_WINDOW * width))
            }
            EnvelopeFamily::FocusWave { damping: Some(s), .. } => Some((-GAUSSIAN_WINDOW * s, GAUSSIAN_WINDOW * s)),
            EnvelopeFamily::FocusWave { damping: None, .. } => None,
            EnvelopeFamily::Splash { .. } => None,
            EnvelopeFamily::Tabulated(t) => Some(t.support()),
        }
    }

    /// Width of the Gaussian factor, if the profile has one.
    pub(crate) fn gaussian_width(&self) -> Option<f64> {
        match &self.family {
            EnvelopeFamily::Gaussian { width, .. } => Some(*width),
            EnvelopeFamily::FocusWave { damping, .. } => *damping,
            _ => None,
        }
    }

    /// The amplitude `f̂(a)` with `f(θ) = ∫ f̂(a) e^{iaθ} da`, i.e.
    /// `f̂ = f̃/(2π)`, for families closed under the transform.
    pub fn inverse_pair(&self) -> Result<Envelope> {
        let root_two_pi = (2.0 * PI).sqrt();
        match &self.family {
            EnvelopeFamily::Gaussian { width, center } => {
                // e^{−iac} e^{−a² width²/2}: a damped quasiphoton in a
                Ok(Envelope::focus_wave(-center, Some(1.0 / width))?
                    .with_amplitude(self.amplitude * (width / root_two_pi)))
            }
            EnvelopeFamily::FocusWave {
                wavenumber,
                damping: Some(s),
            } => Ok(Envelope::gaussian_centered(1.0 / s, *wavenumber)?.with_amplitude(self.amplitude * (s / root_two_pi))),
            _ => Err(Error::Unsupported(
                "inverse pair is only closed-form for gaussian and damped focus-wave envelopes".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gaussian_is_bounded_and_unit_at_origin() {
        let g = Envelope::gaussian(1.3).unwrap();
        assert_eq!(g.eval_real(0.0).unwrap(), c(1.0, 0.0));
        for i in -50..50 {
            assert!(g.eval_real(i as f64 * 0.17).unwrap().norm() <= 1.0);
        }
    }

    #[test]
    fn undamped_focus_wave_is_unimodular() {
        let f = Envelope::focus_wave(2.5, None).unwrap();
        for i in -50..50 {
            assert!((f.eval_real(i as f64 * 0.31).unwrap().norm() - 1.0).abs() < 1e-15);
        }
        assert!(f.transform(1.0).is_err());
    }

    #[test]
    fn splash_is_bounded_in_upper_half_plane() {
        let f = Envelope::splash(0.7, 3).unwrap();
        for i in -20..20 {
            for j in 0..10 {
                let theta = c(i as f64 * 0.4, j as f64 * 0.3);
                assert!(f.eval(theta).unwrap().norm() <= 1.0 + 1e-15);
            }
        }
    }

    #[test]
    fn closed_transforms_match_quadrature() {
        let cases = [
            Envelope::gaussian(1.0).unwrap(),
            Envelope::gaussian_centered(0.6, 0.4).unwrap(),
            Envelope::focus_wave(1.5, Some(2.0)).unwrap(),
            Envelope::splash(1.0, 4).unwrap(),
        ];
        for env in &cases {
            for &kappa in &[-1.2, 0.0, 0.3, 1.0, 2.4] {
                let closed = env.transform(kappa).unwrap();
                let num = env.transform_numeric(kappa).unwrap();
                assert!(
                    (closed - num.value).norm() < 1e-9,
                    "{env:?} κ={kappa}: {closed} vs {}",
                    num.value
                );
            }
        }
    }

    #[test]
    fn inverse_pair_resynthesizes_envelope() {
        for env in [
            Envelope::gaussian_centered(0.8, 0.3).unwrap(),
            Envelope::focus_wave(2.0, Some(1.5)).unwrap(),
        ] {
            let hat = env.inverse_pair().unwrap();
            for &theta in &[-1.0, 0.0, 0.7] {
                let (a, b) = hat.real_window().unwrap();
                let r = Quadrature::default()
                    .integrate(
                        |x| hat.eval_real(x).unwrap() * Complex64::from_polar(1.0, x * theta),
                        a,
                        b,
                    )
                    .unwrap();
                assert!((r.value - env.eval_real(theta).unwrap()).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let cases = [
            Envelope::gaussian_centered(0.9, 0.2).unwrap(),
            Envelope::focus_wave(1.5, Some(2.0)).unwrap(),
            Envelope::splash(1.0, 3).unwrap(),
        ];
        let h = 1e-5;
        for env in &cases {
            let theta = c(0.4, 0.3);
            let fd = (env.eval(theta + h).unwrap() - env.eval(theta - h).unwrap()) / (2.0 * h);
            assert!((fd - env.derivative(theta).unwrap()).norm() < 1e-8);
        }
    }

    #[test]
    fn tabulated_text_and_spline() {
        let mut text = String::from("# theta re im\n");
        for i in 0..=80 {
            let x = -8.0 + 0.2 * i as f64;
            let v = if i == 0 || i == 80 { 0.0 } else { (-x * x / 2.0).exp() };
            text.push_str(&format!("{x} {v} 0.0\n"));
        }
        let table = SampledFunction::parse(&text).unwrap();
        let env = Envelope::tabulated(table);
        assert!((env.eval_real(0.1).unwrap().re - (-0.005f64).exp()).abs() < 1e-4);
        assert_eq!(env.eval_real(9.0).unwrap(), c(0.0, 0.0));
        assert_eq!(env.eval_real(-8.5).unwrap(), c(0.0, 0.0));
        assert!(env.eval(c(0.0, 0.1)).is_err());
        let t = env.transform(1.0).unwrap();
        let exact = (2.0 * PI).sqrt() * (-0.5f64).exp();
        assert!((t.re - exact).abs() < 1e-4);
    }

    #[test]
    fn tabulated_rejects_bad_input() {
        assert!(SampledFunction::parse("0 1\n1 1\n2 1\n").is_err()); // no compact support
        assert!(SampledFunction::parse("0 0\n2 1\n1 0\n").is_err()); // not increasing
        assert!(SampledFunction::parse("0 0 0 0\n").is_err());
        assert!(SampledFunction::parse("0 x\n").is_err());
    }

    proptest! {
        #[test]
        fn spline_reproduces_knots(vals in proptest::collection::vec(-5.0f64..5.0, 3..20)) {
            let n = vals.len() + 2;
            let xs: Vec<f64> = (0..n).map(|i| i as f64 * 0.5).collect();
            let mut ys = vec![c(0.0, 0.0)];
            ys.extend(vals.iter().map(|&v| c(v, -v)));
            ys.push(c(0.0, 0.0));
            let s = SampledFunction::new(xs.clone(), ys.clone()).unwrap();
            for (x, y) in xs.iter().zip(&ys) {
                prop_assert!((s.eval(*x) - y).norm() < 1e-12);
            }
        }
    }
}
