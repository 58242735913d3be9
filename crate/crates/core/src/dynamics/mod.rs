//! Grids, exact-in-time spectral propagation, finite-difference residuals
//! and dispersion diagnostics.

pub mod grid;
pub mod io;
pub mod metrics;
pub mod propagate;
pub mod residual;

pub use grid::{Axis, Coord, FieldSlice, GridSpec};
pub use metrics::{dispersion_metrics, dispersion_metrics_against, DispersionMetrics};
pub use propagate::{energy, one_way_data, propagate_spectral, PropagationRun, SpectralPropagator};
pub use residual::{fit_convergence, residual_wave_operator, ConvergenceReport, ResidualOptions, ResidualReport};
