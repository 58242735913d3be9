//! Central-difference residuals of `□ − m²` on nested grids.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{Coord, GridSpec};
use crate::error::{Error, Result};
use crate::lightcone::LightConePoint;

/// Accepted window for a second-order scheme.
pub const ORDER_WINDOW: (f64, f64) = (1.8, 2.2);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub spacings: Vec<f64>,
    /// Max-norm residual per spacing.
    pub residuals: Vec<f64>,
    /// Estimated rounding floor per spacing.
    pub floors: Vec<f64>,
    /// Largest `|u|` seen, for scale.
    pub scale: f64,
    pub pairwise_orders: Vec<f64>,
    /// Least-squares slope of `log r` against `log h`.
    pub fitted_order: f64,
    /// Every residual sits below its rounding floor (the stencil is exact
    /// for this field).
    pub at_rounding_floor: bool,
    pub passed: bool,
}

pub fn fit_convergence(spacings: &[f64], residuals: &[f64], floors: &[f64], scale: f64) -> ConvergenceReport {
    let pairwise_orders = spacings
        .windows(2)
        .zip(residuals.windows(2))
        .map(|(h, r)| (r[0] / r[1]).ln() / (h[0] / h[1]).ln())
        .collect();
    let n = spacings.len() as f64;
    let xs: Vec<f64> = spacings.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = residuals.iter().map(|r| r.max(f64::MIN_POSITIVE).ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let fitted_order = sxy / sxx;
    let at_rounding_floor = residuals.iter().zip(floors).all(|(r, f)| r <= f);
    let decreasing = residuals.windows(2).all(|r| r[1] < r[0]);
    let passed = at_rounding_floor
        || (decreasing && fitted_order >= ORDER_WINDOW.0 && fitted_order <= ORDER_WINDOW.1);
    ConvergenceReport {
        spacings: spacings.to_vec(),
        residuals: residuals.to_vec(),
        floors: floors.to_vec(),
        scale,
        pairwise_orders,
        fitted_order,
        at_rounding_floor,
        passed,
    }
}

/// `(residual, rounding floor)` at a node, or the failing point.
type NodeResidual = std::result::Result<(f64, f64), ([f64; 3], Error)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualOptions {
    /// Spatial directions in the operator; `[Z]` for 1+1 fields.
    pub operator_axes: Vec<Coord>,
    /// Time step as a fraction of the spatial step. A ratio of one would
    /// make the stencil exact for every 1+1 traveling wave.
    pub time_ratio: f64,
    /// Boundary cells excluded from the max-norm.
    pub frame: usize,
    pub levels: u32,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        Self {
            operator_axes: vec![Coord::X, Coord::Y, Coord::Z],
            time_ratio: 0.5,
            frame: 2,
            levels: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub convergence: ConvergenceReport,
    pub mass: f64,
    /// Interior nodes at which the residual was measured.
    pub nodes: usize,
    /// Node counts per axis of the finest grid in the ladder.
    pub finest_shape: Vec<usize>,
}

/// Residual of `Σ ∂²_c u − ∂²_t u − m² u` at the interior nodes of `grid`,
/// with stencil spacing `h, h/2, …` where `h` is the smallest axis spacing.
///
/// The nodes stay fixed across levels so the max-norms are comparable; the
/// finest level matches a grid refined `levels − 1` times.
pub fn residual_wave_operator<F>(
    field: F,
    grid: &GridSpec,
    t: f64,
    mass: f64,
    opts: &ResidualOptions,
) -> Result<ResidualReport>
where
    F: Fn(&LightConePoint) -> Result<Complex64> + Sync,
{
    if !(mass >= 0.0) || !mass.is_finite() {
        return Err(Error::param("mass", format!("must be ≥ 0, got {mass}")));
    }
    if !(opts.time_ratio > 0.0) || opts.levels < 2 || opts.operator_axes.is_empty() {
        return Err(Error::param("residual", "need time_ratio > 0, levels ≥ 2 and at least one operator axis"));
    }
    let shape = grid.shape();
    let nodes: Vec<usize> = (0..grid.len())
        .filter(|&i| {
            grid.unravel(i)
                .iter()
                .zip(&shape)
                .all(|(&j, &n)| j >= opts.frame && j + opts.frame < n)
        })
        .collect();
    if nodes.is_empty() {
        return Err(Error::GridMismatch("no interior nodes inside the boundary frame".into()));
    }
    let h0 = grid.axes.iter().map(|a| a.spacing).fold(f64::INFINITY, f64::min);
    let weight = 2.0 * opts.operator_axes.len() as f64 + 2.0 / (opts.time_ratio * opts.time_ratio) + 1.0;

    let mut spacings = Vec::new();
    let mut residuals = Vec::new();
    let mut floors = Vec::new();
    let mut scale = 0.0f64;
    for level in 0..opts.levels {
        let h = h0 / f64::from(1u32 << level);
        let tau = opts.time_ratio * h;
        let rows: Vec<NodeResidual> = nodes
            .par_iter()
            .map(|&i| {
                let p = grid.point(i);
                let eval = |dp: [f64; 3], dt: f64| {
                    LightConePoint::new(p[0] + dp[0], p[1] + dp[1], p[2] + dp[2], t + dt).and_then(|q| field(&q))
                };
                let run = || -> Result<(f64, f64)> {
                    let u = eval([0.0; 3], 0.0)?;
                    let mut box_u = -(eval([0.0; 3], tau)? + eval([0.0; 3], -tau)? - 2.0 * u) / (tau * tau) - mass * mass * u;
                    for c in &opts.operator_axes {
                        let mut d = [0.0; 3];
                        d[c.index()] = h;
                        let fwd = eval(d, 0.0)?;
                        d[c.index()] = -h;
                        box_u += (fwd + eval(d, 0.0)? - 2.0 * u) / (h * h);
                    }
                    Ok((box_u.norm(), u.norm()))
                };
                run().map_err(|e| (p, e))
            })
            .collect();
        let bad: Vec<String> = rows
            .iter()
            .filter_map(|r| r.as_ref().err())
            .take(8)
            .map(|(p, e)| format!("({:.4}, {:.4}, {:.4}): {e}", p[0], p[1], p[2]))
            .collect();
        if !bad.is_empty() {
            let total = rows.iter().filter(|r| r.is_err()).count();
            return Err(Error::Domain(format!(
                "field singular at {total} node(s) near t = {t}: {}",
                bad.join("; ")
            )));
        }
        let ok: Vec<(f64, f64)> = rows.into_iter().map(|r| r.unwrap_or((0.0, 0.0))).collect();
        residuals.push(ok.iter().map(|r| r.0).fold(0.0, f64::max));
        scale = scale.max(ok.iter().map(|r| r.1).fold(0.0, f64::max));
        spacings.push(h);
        floors.push(16.0 * f64::EPSILON * weight / (h * h));
    }
    let floors: Vec<f64> = floors.iter().map(|f| f * scale).collect();
    let finest = grid.refined(opts.levels - 1);
    Ok(ResidualReport {
        convergence: fit_convergence(&spacings, &residuals, &floors, scale),
        mass,
        nodes: nodes.len(),
        finest_shape: finest.shape(),
    })
}
