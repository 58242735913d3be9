//! Verification suites behind `focuswave verify <suite>`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{Command, RunConfig};
use super::report::{Check, Provenance, VerifyReport};
use crate::dynamics::{
    dispersion_metrics, dispersion_metrics_against, one_way_data, propagate_spectral, residual_wave_operator, Axis,
    Coord, FieldSlice, GridSpec, PropagationRun, ResidualOptions,
};
use crate::error::{Error, Result};
use crate::fresnel::{fresnel_gaussian_1d_numeric, fresnel_transverse_2d};
use crate::lightcone::LightConePoint;
use crate::packets::{eval_bateman_hillion, parabolic_residual, sample_bateman_hillion, synthesize_from_parabolic, ParabolicSolution};
use crate::spectral::{massive_coefficient_pipeline, massive_fourier_coefficient, verify_mass_shell_delta};

pub const SUITES: [&str; 5] = ["residual", "parabolic", "fresnel", "mass-shell", "nondispersive"];

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn run_suite(suite: &str, config: &RunConfig) -> Result<VerifyReport> {
    let checks = match suite {
        "residual" => residual_suite(config)?,
        "parabolic" => parabolic_suite(config)?,
        "fresnel" => fresnel_suite(config)?,
        "mass-shell" => mass_shell_suite(config)?,
        "nondispersive" => nondispersive_suite(config)?,
        other => {
            return Err(Error::Parse(format!("unknown suite `{other}`; expected one of {}", SUITES.join(", "))));
        }
    };
    Ok(VerifyReport {
        suite: suite.into(),
        passed: checks.iter().all(Check::ok),
        checks,
        provenance: Provenance::new(Command::Verify, config),
        config: config.clone(),
    })
}

/// The `(x, z)` half-plane at `y = 0.3`, 33 × 33 nodes; three levels of
/// refinement reach 129 nodes per axis.
///
/// A Gaussian envelope grows like `e^{ρ²/(2ε)}` near `z + t = 0`, so the
/// window stays at `ρ ≲ 1`.
pub fn residual_grid() -> Result<GridSpec> {
    GridSpec::new(
        vec![Axis::closed(Coord::X, 0.0, 1.0, 33)?, Axis::closed(Coord::Z, -2.0, 2.0, 33)?],
        [0.0, 0.3, 0.0],
    )
}

fn residual_suite(config: &RunConfig) -> Result<Vec<Check>> {
    let packet = config.packet()?;
    let grid = residual_grid()?;
    let r = residual_wave_operator(|p| eval_bateman_hillion(&packet, p), &grid, config.time, 0.0, &ResidualOptions::default())?;
    let c = &r.convergence;
    let mut checks = vec![Check::new(
        "bateman_hillion_order",
        c.passed,
        c.fitted_order,
        0.2,
        format!("residuals {:?} at spacings {:?}", c.residuals, c.spacings),
    )];
    if config.negative_control {
        let (k, w) = (2.0, 1.5);
        let opts = ResidualOptions {
            operator_axes: vec![Coord::Z],
            ..ResidualOptions::default()
        };
        let off = residual_wave_operator(|p| Ok((I * (k * p.z - w * p.t)).exp()), &grid, config.time, 0.0, &opts)?;
        checks.push(Check::negative(
            "off_shell_plane_wave",
            !off.convergence.passed,
            off.convergence.fitted_order,
            0.2,
            format!("ω² − k² = {}; residuals {:?}", w * w - k * k, off.convergence.residuals),
        ));
    }
    Ok(checks)
}

/// A 32 × 32 `(x, z)` slice at `y = 0`.
pub fn synthesis_grid() -> Result<GridSpec> {
    GridSpec::new(
        vec![Axis::closed(Coord::X, 0.0, 2.0, 32)?, Axis::closed(Coord::Z, -2.0, 2.0, 32)?],
        [0.0; 3],
    )
}

fn parabolic_suite(config: &RunConfig) -> Result<Vec<Check>> {
    let env = config.envelope()?;
    let hat = env.inverse_pair()?;
    let sol = ParabolicSolution::at_event(1.3, 0.4, 0.3, config.epsilon, hat.clone())?;
    let nodes: Vec<(f64, f64)> = (0..5).flat_map(|i| (0..5).map(move |j| (0.2 * i as f64, 0.15 * j as f64))).collect();
    let r = parabolic_residual(&sol, &nodes, 0.05)?;
    let grid = synthesis_grid()?;
    let synth = synthesize_from_parabolic(&hat, config.epsilon, &grid, config.time)?;
    let exact = sample_bateman_hillion(&config.packet()?, &grid, config.time, false)?;
    let err = synth.relative_l2_error(&exact)?;
    Ok(vec![
        Check::new(
            "parabolic_order",
            r.passed,
            r.fitted_order,
            0.2,
            format!("residuals {:?}", r.residuals),
        ),
        Check::new("synthesis_vs_closed_form", err < 1e-6, err, 1e-6, "relative L2 over a 32×32 slice"),
    ])
}

/// `(k, k_x, k_y)` triples from a seeded generator, `|k| ∈ [0.3, 3]`.
pub fn fresnel_samples(seed: u64, n: usize) -> Vec<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            (sign * rng.gen_range(0.3..3.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
        })
        .collect()
}

/// Worst relative error of the product of two damped, extrapolated 1D
/// quadratures against the closed transverse form.
pub fn fresnel_worst_error(samples: &[(f64, f64, f64)], eta0: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    for &(k, kx, ky) in samples {
        let kc = Complex64::new(k, 0.0);
        let num = fresnel_gaussian_1d_numeric(kc, kx, eta0)?.value * fresnel_gaussian_1d_numeric(kc, ky, eta0)?.value;
        let closed = fresnel_transverse_2d(kc, kx, ky, eta0)?;
        worst = worst.max((num - closed).norm() / closed.norm());
    }
    Ok(worst)
}

fn fresnel_suite(config: &RunConfig) -> Result<Vec<Check>> {
    let samples = fresnel_samples(config.seed, 24);
    let worst = fresnel_worst_error(&samples, 0.004)?;
    Ok(vec![Check::new(
        "transverse_product",
        worst < 1e-6,
        worst,
        1e-6,
        format!("{} random (k, k_x, k_y), seed {}", samples.len(), config.seed),
    )])
}

fn mass_shell_suite(config: &RunConfig) -> Result<Vec<Check>> {
    let env = config.envelope()?;
    let mut checks = Vec::new();
    for &(kp, kperp) in &[(2.0, SQRT_2), (-1.0, 0.5)] {
        let r = verify_mass_shell_delta(&env, kp, kperp, &[0.2, 0.1, 0.05])?;
        let last = r.levels.last().map(|l| l.peak_location).unwrap_or(f64::NAN);
        checks.push(Check::new(
            &format!("mass_shell_k_plus_{kp}"),
            r.passed,
            last - r.expected_peak,
            r.grid_step,
            format!(
                "expected peak {}, widths {:?}, weight error {:.2e}",
                r.expected_peak,
                r.levels.iter().map(|l| l.rms_width).collect::<Vec<_>>(),
                r.weight_error
            ),
        ));
    }
    let (kp, m) = (1.0, 0.7);
    let p = massive_coefficient_pipeline(&env, kp, (0.3, -0.2), m, 0.004)?;
    let closed = massive_fourier_coefficient(&env, kp, m)?;
    let rel = (p.value - closed).norm() / closed.norm();
    checks.push(Check::new(
        "massive_pipeline",
        rel < 1e-6,
        rel,
        1e-6,
        format!("k₊ = {kp}, m = {m}, ξ₊ spread {:.2e}", p.xi_plus_spread),
    ));
    Ok(checks)
}

/// Largest deviation of `|u|·|√2ξ₊ − iε|` from `|f(√2ξ₋)|` over a lattice
/// of light-cone events on the axis.
pub fn shape_invariance_defect(config: &RunConfig) -> Result<f64> {
    let p = config.packet()?;
    let mut worst = 0.0f64;
    for i in -10..=10 {
        let xi_minus = 0.2 * i as f64;
        let reference = p.envelope.eval_real(SQRT_2 * xi_minus)?.norm();
        for &xi_plus in &[-3.0, -0.1, 0.0, 0.4, 7.5, 40.0] {
            let q = LightConePoint::from_light_cone(0.0, 0.0, xi_plus, xi_minus)?;
            let shape = eval_bateman_hillion(&p, &q)?.norm() * p.denominator(xi_plus).norm();
            worst = worst.max((shape - reference).abs());
        }
    }
    Ok(worst)
}

/// Periodic cube with `points` nodes per axis and half-width `extent`.
pub fn periodic_cube(points: usize, extent: f64) -> Result<GridSpec> {
    GridSpec::new(
        vec![
            Axis::periodic(Coord::X, extent, points)?,
            Axis::periodic(Coord::Y, extent, points)?,
            Axis::periodic(Coord::Z, extent, points)?,
        ],
        [0.0; 3],
    )
}

/// Outcome of propagating a Bateman–Hillion packet and comparing with the
/// closed form at the final time.
#[derive(Debug, Clone)]
pub struct PacketRun {
    pub run: PropagationRun,
    pub exact: FieldSlice,
    pub overlap: f64,
    pub relative_l2: f64,
}

pub fn propagate_packet(config: &RunConfig) -> Result<PacketRun> {
    let p = config.packet()?;
    let grid = periodic_cube(config.points, config.extent)?;
    let phi = sample_bateman_hillion(&p, &grid, config.time, false)?;
    let vel = sample_bateman_hillion(&p, &grid, config.time, true)?;
    let run = propagate_spectral(&phi, &vel, 0.0, config.dt, config.steps, config.save_every)?;
    let last = run.frames.last().expect("at least one frame");
    let exact = sample_bateman_hillion(&p, &grid, last.time, false)?;
    let overlap = dispersion_metrics_against(last, Coord::Z, &exact)?.overlap.unwrap_or(0.0);
    let relative_l2 = last.relative_l2_error(&exact)?;
    Ok(PacketRun {
        run,
        exact,
        overlap,
        relative_l2,
    })
}

/// A massive Gaussian `e^{−z²/(4w²)} e^{iqz}` made one-way, on a periodic
/// line with `points` nodes and half-width `extent`.
pub fn massive_gaussian_data(config: &RunConfig) -> Result<(FieldSlice, FieldSlice)> {
    let grid = GridSpec::new(vec![Axis::periodic(Coord::Z, config.extent, config.points)?], [0.0; 3])?;
    let (w, q) = (config.width, config.wavenumber);
    let phi = FieldSlice::from_fn(grid, config.time, |[_, _, z]| {
        Ok((-z * z / (4.0 * w * w)).exp() * Complex64::from_polar(1.0, q * z))
    })?;
    one_way_data(&phi, config.mass, Coord::Z)
}

/// `e^{ikz}` at the box wavenumber nearest `wavenumber`, with its exact
/// velocity.
pub fn plane_wave_data(config: &RunConfig) -> Result<(FieldSlice, FieldSlice)> {
    let grid = GridSpec::new(vec![Axis::periodic(Coord::Z, config.extent, config.points)?], [0.0; 3])?;
    let length = 2.0 * config.extent;
    let k = (config.wavenumber * length / (2.0 * PI)).round() * 2.0 * PI / length;
    let w = (k * k + config.mass * config.mass).sqrt();
    let phi = FieldSlice::from_fn(grid.clone(), config.time, |[_, _, z]| Ok(Complex64::from_polar(1.0, k * z)))?;
    let vel = FieldSlice::from_fn(grid, config.time, |[_, _, z]| Ok(-I * w * Complex64::from_polar(1.0, k * z)))?;
    Ok((phi, vel))
}

/// Defaults for the massive, non-Bateman control run.
pub fn massive_control_config(base: &RunConfig) -> RunConfig {
    RunConfig {
        mass: 1.0,
        width: 1.0,
        wavenumber: 2.0,
        points: 512,
        extent: 64.0,
        dt: 1.0,
        steps: 20,
        save_every: 5,
        time: 0.0,
        ..base.clone()
    }
}

/// rms widths along `z` of every saved frame of the massive control.
pub fn massive_control_widths(config: &RunConfig) -> Result<Vec<f64>> {
    let (phi, vel) = massive_gaussian_data(config)?;
    let run = propagate_spectral(&phi, &vel, config.mass, config.dt, config.steps, config.save_every)?;
    run.frames
        .iter()
        .map(|f| dispersion_metrics(f, Coord::Z).map(|m| m.rms_width))
        .collect()
}

/// Settings for the propagated packet check.
pub fn packet_propagation_config(base: &RunConfig) -> RunConfig {
    RunConfig {
        envelope: "splash".into(),
        splash_scale: 4.0,
        splash_order: 4,
        epsilon: 4.0,
        points: 64,
        extent: 24.0,
        dt: 0.2,
        steps: 10,
        save_every: 10,
        time: 0.0,
        ..base.clone()
    }
}

fn nondispersive_suite(config: &RunConfig) -> Result<Vec<Check>> {
    let defect = shape_invariance_defect(config)?;
    let packet = propagate_packet(&packet_propagation_config(config))?;
    let widths = massive_control_widths(&massive_control_config(config))?;
    let growing = widths.windows(2).all(|w| w[1] > w[0]);
    Ok(vec![
        Check::new("shape_invariance", defect < 1e-12, defect, 1e-12, "max over 21 × 6 light-cone events"),
        Check::new(
            "propagated_overlap",
            packet.overlap >= 1.0 - 1e-3,
            packet.overlap,
            1e-3,
            format!(
                "64³ periodic box to t = {}, relative L2 {:.2e}, energy drift {:.1e}",
                packet.exact.time, packet.relative_l2, packet.run.energy_drift
            ),
        ),
        Check::new(
            "massive_control_spreads",
            growing,
            widths.last().copied().unwrap_or(f64::NAN) - widths[0],
            0.0,
            format!("rms widths {widths:?}"),
        ),
    ])
}
