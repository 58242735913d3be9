use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coord {
    X,
    Y,
    Z,
}

impl Coord {
    pub fn index(self) -> usize {
        match self {
            Coord::X => 0,
            Coord::Y => 1,
            Coord::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            0 => Some(Coord::X),
            1 => Some(Coord::Y),
            2 => Some(Coord::Z),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Coord::X => "x",
            Coord::Y => "y",
            Coord::Z => "z",
        }
    }
}

/// A uniform axis. Periodic axes do not repeat the seam node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub coord: Coord,
    pub start: f64,
    pub spacing: f64,
    pub len: usize,
    pub periodic: bool,
}

impl Axis {
    pub fn new(coord: Coord, start: f64, spacing: f64, len: usize, periodic: bool) -> Result<Self> {
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::GridMismatch(format!("axis {} spacing must be positive, got {spacing}", coord.name())));
        }
        if !start.is_finite() {
            return Err(Error::GridMismatch(format!("axis {} start must be finite", coord.name())));
        }
        if len == 0 {
            return Err(Error::GridMismatch(format!("axis {} has no nodes", coord.name())));
        }
        Ok(Self {
            coord,
            start,
            spacing,
            len,
            periodic,
        })
    }

    /// `len` nodes covering the closed interval `[lo, hi]`.
    pub fn closed(coord: Coord, lo: f64, hi: f64, len: usize) -> Result<Self> {
        if len < 2 || !(hi > lo) {
            return Err(Error::GridMismatch(format!(
                "closed axis {} needs len ≥ 2 and hi > lo (got {len}, [{lo}, {hi}])",
                coord.name()
            )));
        }
        Self::new(coord, lo, (hi - lo) / (len - 1) as f64, len, false)
    }

    /// `len` nodes on the periodic interval `[−half_width, half_width)`.
    pub fn periodic(coord: Coord, half_width: f64, len: usize) -> Result<Self> {
        Self::new(coord, -half_width, 2.0 * half_width / len as f64, len, true)
    }

    pub fn at(&self, i: usize) -> f64 {
        self.start + self.spacing * i as f64
    }

    /// Length of the periodic cell (or of the closed interval).
    pub fn extent(&self) -> f64 {
        if self.periodic {
            self.spacing * self.len as f64
        } else {
            self.spacing * (self.len - 1) as f64
        }
    }

    /// Same span with `2^levels` times finer spacing.
    pub fn refined(&self, levels: u32) -> Self {
        let factor = 1usize << levels;
        let len = if self.periodic {
            self.len * factor
        } else {
            (self.len - 1) * factor + 1
        };
        Self {
            spacing: self.spacing / factor as f64,
            len,
            ..*self
        }
    }
}

/// Row-major grid over one to three spatial axes; coordinates not spanned
/// by an axis take their value from `fixed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
    pub fixed: [f64; 3],
}

impl GridSpec {
    pub fn new(axes: Vec<Axis>, fixed: [f64; 3]) -> Result<Self> {
        if axes.is_empty() || axes.len() > 3 {
            return Err(Error::GridMismatch(format!("grid needs 1 to 3 axes, got {}", axes.len())));
        }
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.coord == a.coord) {
                return Err(Error::GridMismatch(format!("axis {} repeated", a.coord.name())));
            }
        }
        if fixed.iter().any(|v| !v.is_finite()) {
            return Err(Error::GridMismatch("fixed coordinates must be finite".into()));
        }
        let total = axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.len));
        if total.is_none() {
            return Err(Error::Resource("grid node count overflows".into()));
        }
        Ok(Self { axes, fixed })
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.len).collect()
    }

    pub fn axis(&self, coord: Coord) -> Option<(usize, &Axis)> {
        self.axes.iter().enumerate().find(|(_, a)| a.coord == coord)
    }

    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (d, a) in self.axes.iter().enumerate().rev() {
            idx[d] = flat % a.len;
            flat /= a.len;
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        self.axes.iter().zip(idx).fold(0, |acc, (a, &i)| acc * a.len + i)
    }

    /// Spatial position `[x, y, z]` of a node.
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let mut p = self.fixed;
        for (a, i) in self.axes.iter().zip(self.unravel(flat)) {
            p[a.coord.index()] = a.at(i);
        }
        p
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.spacing).product()
    }

    pub fn refined(&self, levels: u32) -> Self {
        Self {
            axes: self.axes.iter().map(|a| a.refined(levels)).collect(),
            fixed: self.fixed,
        }
    }

    pub fn same_layout(&self, other: &GridSpec) -> bool {
        self == other
    }
}

/// Complex field samples on a [`GridSpec`] at time `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSlice {
    pub grid: GridSpec,
    pub samples: Vec<Complex64>,
    pub time: f64,
    pub meta: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

impl FieldSlice {
    pub fn new(grid: GridSpec, samples: Vec<Complex64>, time: f64) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {} nodes",
                samples.len(),
                grid.len()
            )));
        }
        if !time.is_finite() {
            return Err(Error::Domain("slice time must be finite".into()));
        }
        let mut slice = Self {
            grid,
            samples,
            time,
            meta: BTreeMap::new(),
            warnings: Vec::new(),
        };
        slice.check_seams();
        Ok(slice)
    }

    pub fn zeros(grid: GridSpec, time: f64) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![Complex64::new(0.0, 0.0); n], time)
    }

    /// Samples `f([x, y, z])` at every node, in parallel; the result does
    /// not depend on scheduling.
    pub fn from_fn<F>(grid: GridSpec, time: f64, f: F) -> Result<Self>
    where
        F: Fn([f64; 3]) -> Result<Complex64> + Sync,
    {
        let samples = (0..grid.len())
            .into_par_iter()
            .map(|i| f(grid.point(i)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid, samples, time)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Flags periodic axes whose seam jump exceeds `1e−6·max|φ|` plus the
    /// largest interior step along that axis.
    fn check_seams(&mut self) {
        let peak = self.max_abs();
        if peak == 0.0 {
            return;
        }
        let shape = self.grid.shape();
        for (d, axis) in self.grid.axes.iter().enumerate() {
            if !axis.periodic || axis.len < 3 {
                continue;
            }
            let stride: usize = shape[d + 1..].iter().product();
            let mut seam = 0.0f64;
            let mut interior = 0.0f64;
            for flat in 0..self.samples.len() {
                let i = (flat / stride) % axis.len;
                if i + 1 < axis.len {
                    interior = interior.max((self.samples[flat + stride] - self.samples[flat]).norm());
                } else {
                    let first = flat - i * stride;
                    seam = seam.max((self.samples[first] - self.samples[flat]).norm());
                }
            }
            if seam > 1e-6 * peak + interior {
                self.warnings.push(format!(
                    "periodic seam discontinuity on axis {}: jump {seam:.3e} (max |φ| {peak:.3e})",
                    axis.coord.name()
                ));
            }
        }
    }

    pub fn same_grid(&self, other: &FieldSlice) -> Result<()> {
        if self.grid.same_layout(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch("slices live on different grids".into()))
        }
    }

    /// `(Σ |a − b|² / Σ |b|²)^{1/2}` against a reference slice.
    pub fn relative_l2_error(&self, reference: &FieldSlice) -> Result<f64> {
        self.same_grid(reference)?;
        let num: f64 = self.samples.iter().zip(&reference.samples).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = reference.samples.iter().map(|b| b.norm_sqr()).sum();
        Ok((num / den).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ravel_round_trip_and_points() {
        let g = GridSpec::new(
            vec![
                Axis::closed(Coord::X, 0.0, 1.0, 3).unwrap(),
                Axis::periodic(Coord::Z, 2.0, 4).unwrap(),
            ],
            [0.0, 0.5, 0.0],
        )
        .unwrap();
        assert_eq!(g.len(), 12);
        for i in 0..g.len() {
            assert_eq!(g.ravel(&g.unravel(i)), i);
        }
        assert_eq!(g.point(5), [0.5, 0.5, -1.0]);
    }

    #[test]
    fn sample_count_must_match() {
        let g = GridSpec::new(vec![Axis::closed(Coord::Z, 0.0, 1.0, 5).unwrap()], [0.0; 3]).unwrap();
        assert!(matches!(FieldSlice::new(g, vec![Complex64::new(0.0, 0.0); 4], 0.0), Err(Error::GridMismatch(_))));
        assert!(Axis::new(Coord::X, 0.0, 0.0, 3, false).is_err());
    }

    #[test]
    fn seam_jump_is_flagged() {
        let axis = Axis::periodic(Coord::Z, 1.0, 16).unwrap();
        let g = GridSpec::new(vec![axis], [0.0; 3]).unwrap();
        let ramp = FieldSlice::from_fn(g.clone(), 0.0, |p| Ok(Complex64::new(p[2], 0.0))).unwrap();
        assert_eq!(ramp.warnings.len(), 1);
        let smooth = FieldSlice::from_fn(g, 0.0, |p| Ok(Complex64::new((std::f64::consts::PI * p[2]).cos(), 0.0))).unwrap();
        assert!(smooth.warnings.is_empty());
    }

    #[test]
    fn refinement_nests() {
        let a = Axis::closed(Coord::Z, -1.0, 3.0, 33).unwrap();
        let r = a.refined(2);
        assert_eq!(r.len, 129);
        assert!((r.at(128) - 3.0).abs() < 1e-12);
        let p = Axis::periodic(Coord::X, 2.0, 16).unwrap().refined(1);
        assert_eq!(p.len, 32);
    }
}
