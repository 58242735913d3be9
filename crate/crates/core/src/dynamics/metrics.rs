use serde::{Deserialize, Serialize};

use super::grid::{Coord, FieldSlice};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionMetrics {
    pub centroid: f64,
    pub rms_width: f64,
    pub peak: f64,
    /// Normalized overlap of the `|φ|` profile with a reference, after
    /// aligning centroids. Present only when a reference was supplied.
    pub overlap: Option<f64>,
}

struct Marginal {
    weights: Vec<f64>,
    centroid: f64,
    rms_width: f64,
    peak: f64,
}

/// `|φ|²` summed over every axis but `coord`.
fn marginal(slice: &FieldSlice, coord: Coord) -> Result<Marginal> {
    let (d, axis) = slice
        .grid
        .axis(coord)
        .ok_or_else(|| Error::GridMismatch(format!("slice has no {} axis", coord.name())))?;
    let shape = slice.grid.shape();
    let stride: usize = shape[d + 1..].iter().product();
    let mut weights = vec![0.0; axis.len];
    let mut peak = 0.0f64;
    for (i, v) in slice.samples.iter().enumerate() {
        weights[(i / stride) % axis.len] += v.norm_sqr();
        peak = peak.max(v.norm());
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::Domain("metrics are undefined for an all-zero slice".into()));
    }
    let coords: Vec<f64> = (0..axis.len).map(|i| axis.at(i)).collect();
    let centroid = coords.iter().zip(&weights).map(|(x, w)| x * w).sum::<f64>() / total;
    let var = coords.iter().zip(&weights).map(|(x, w)| (x - centroid).powi(2) * w).sum::<f64>() / total;
    Ok(Marginal {
        weights,
        centroid,
        rms_width: var.max(0.0).sqrt(),
        peak,
    })
}

pub fn dispersion_metrics(slice: &FieldSlice, coord: Coord) -> Result<DispersionMetrics> {
    let m = marginal(slice, coord)?;
    Ok(DispersionMetrics {
        centroid: m.centroid,
        rms_width: m.rms_width,
        peak: m.peak,
        overlap: None,
    })
}

/// Metrics of `slice` plus the overlap of its profile `(Σ_⊥ |φ|²)^{1/2}`
/// with that of `reference`, shifted by linear interpolation so both
/// centroids coincide.
pub fn dispersion_metrics_against(slice: &FieldSlice, coord: Coord, reference: &FieldSlice) -> Result<DispersionMetrics> {
    let m = marginal(slice, coord)?;
    let r = marginal(reference, coord)?;
    let a = slice.grid.axis(coord).map(|(_, a)| *a);
    let b = reference.grid.axis(coord).map(|(_, a)| *a);
    if a != b {
        return Err(Error::GridMismatch(format!("reference samples axis {} differently", coord.name())));
    }
    let axis = a.expect("axis exists");
    let shift = (m.centroid - r.centroid) / axis.spacing;
    let n = r.weights.len();
    let profile: Vec<f64> = m.weights.iter().map(|w| w.sqrt()).collect();
    let reference_profile: Vec<f64> = r.weights.iter().map(|w| w.sqrt()).collect();
    let at = |j: i64| -> f64 {
        if axis.periodic {
            reference_profile[j.rem_euclid(n as i64) as usize]
        } else if j >= 0 && (j as usize) < n {
            reference_profile[j as usize]
        } else {
            0.0
        }
    };
    let shifted: Vec<f64> = (0..n)
        .map(|i| {
            let x = i as f64 - shift;
            let j = x.floor();
            let frac = x - j;
            (1.0 - frac) * at(j as i64) + frac * at(j as i64 + 1)
        })
        .collect();
    let dot: f64 = profile.iter().zip(&shifted).map(|(p, q)| p * q).sum();
    let norm = profile.iter().map(|p| p * p).sum::<f64>().sqrt() * shifted.iter().map(|q| q * q).sum::<f64>().sqrt();
    Ok(DispersionMetrics {
        centroid: m.centroid,
        rms_width: m.rms_width,
        peak: m.peak,
        overlap: Some(if norm > 0.0 { (dot / norm).min(1.0) } else { 0.0 }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::grid::{Axis, GridSpec};
    use num_complex::Complex64;

    fn line() -> GridSpec {
        GridSpec::new(vec![Axis::closed(Coord::Z, -10.0, 10.0, 2001).unwrap()], [0.0; 3]).unwrap()
    }

    #[test]
    fn spike_has_zero_width() {
        let g = line();
        let s = FieldSlice::from_fn(g, 0.0, |p| Ok(Complex64::new(if p[2].abs() < 1e-9 { 3.0 } else { 0.0 }, 0.0))).unwrap();
        let m = dispersion_metrics_against(&s, Coord::Z, &s).unwrap();
        assert_eq!(m.rms_width, 0.0);
        assert_eq!(m.peak, 3.0);
        assert!((m.overlap.unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_width_matches_moment_oracle() {
        let s_width = 1.3;
        let s = FieldSlice::from_fn(line(), 0.0, |p| {
            Ok(Complex64::new((-(p[2] - 0.5).powi(2) / (4.0 * s_width * s_width)).exp(), 0.0))
        })
        .unwrap();
        let m = dispersion_metrics(&s, Coord::Z).unwrap();
        assert!((m.rms_width - s_width).abs() < 1e-6);
        assert!((m.centroid - 0.5).abs() < 1e-9);
    }

    #[test]
    fn overlap_ignores_translation_but_sees_shape() {
        let g = line();
        let a = FieldSlice::from_fn(g.clone(), 0.0, |p| Ok(Complex64::new((-p[2] * p[2]).exp(), 0.0))).unwrap();
        let b = FieldSlice::from_fn(g.clone(), 0.0, |p| Ok(Complex64::new((-(p[2] - 2.0).powi(2)).exp(), 0.0))).unwrap();
        let wide = FieldSlice::from_fn(g, 0.0, |p| Ok(Complex64::new((-p[2] * p[2] / 4.0).exp(), 0.0))).unwrap();
        assert!(dispersion_metrics_against(&b, Coord::Z, &a).unwrap().overlap.unwrap() > 1.0 - 1e-9);
        assert!(dispersion_metrics_against(&wide, Coord::Z, &a).unwrap().overlap.unwrap() < 0.95);
    }

    #[test]
    fn zero_slice_is_an_error() {
        let s = FieldSlice::zeros(line(), 0.0).unwrap();
        assert!(dispersion_metrics(&s, Coord::Z).is_err());
        assert!(dispersion_metrics(&s, Coord::X).is_err());
    }
}
