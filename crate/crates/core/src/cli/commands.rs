use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use super::config::{Command, RunConfig};
use super::report::{write_json, Provenance, VerifyReport};
use super::verify::{self, massive_gaussian_data, periodic_cube, plane_wave_data};
use crate::dynamics::io::{atomic_write, slice_to_csv, table_to_csv, write_slice};
use crate::dynamics::{dispersion_metrics, dispersion_metrics_against, propagate_spectral, Axis, Coord, FieldSlice, GridSpec};
use crate::error::{Error, Result};
use crate::packets::sample_bateman_hillion;
use crate::quantization::{
    constraint_d2, constraint_d4, default_cutoffs, fock_commutator_check, solve_amplitude, ConstraintReport,
    QuantizationConfig,
};
use crate::spectral::{massive_fourier_coefficient, massless_fourier_coefficient};

/// Whether the command's own checks passed, and the files it wrote.
pub struct Outcome {
    pub passed: bool,
    pub files: Vec<PathBuf>,
}

fn out_dir(config: &RunConfig) -> Result<&Path> {
    fs::create_dir_all(&config.out)?;
    Ok(&config.out)
}

#[derive(Serialize)]
struct AxisInfo {
    coord: &'static str,
    start: f64,
    spacing: f64,
    len: usize,
    periodic: bool,
}

fn axes(grid: &GridSpec) -> Vec<AxisInfo> {
    grid.axes
        .iter()
        .map(|a| AxisInfo {
            coord: a.coord.name(),
            start: a.start,
            spacing: a.spacing,
            len: a.len,
            periodic: a.periodic,
        })
        .collect()
}

#[derive(Serialize)]
struct EvalMeta<'a> {
    provenance: Provenance,
    config: &'a RunConfig,
    time: f64,
    fixed: [f64; 3],
    axes: Vec<AxisInfo>,
    min_abs: f64,
    max_abs: f64,
    files: Vec<String>,
}

fn names(files: &[PathBuf]) -> Vec<String> {
    files
        .iter()
        .map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default())
        .collect()
}

/// The packet on the `(x, z)` half-plane `x ∈ [0, extent]`, `z ∈ [−extent, extent]`.
pub fn eval(config: &RunConfig) -> Result<Outcome> {
    let packet = config.packet()?;
    let n = config.points;
    let grid = GridSpec::new(
        vec![
            Axis::closed(Coord::X, 0.0, config.extent, n)?,
            Axis::closed(Coord::Z, -config.extent, config.extent, n)?,
        ],
        [0.0; 3],
    )?;
    let slice = sample_bateman_hillion(&packet, &grid, config.time, false)?;
    let dir = out_dir(config)?;
    let prov = Provenance::new(Command::Eval, config);
    let mut files = vec![dir.join("eval.fwslice")];
    write_slice(&files[0], &slice)?;
    if config.csv {
        let path = dir.join("eval.csv");
        atomic_write(&path, &slice_to_csv(&slice, &prov.comments())?)?;
        files.push(path);
    }
    let meta_path = dir.join("eval.json");
    let meta = EvalMeta {
        provenance: prov,
        config,
        time: slice.time,
        fixed: grid.fixed,
        axes: axes(&grid),
        min_abs: slice.samples.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min),
        max_abs: slice.max_abs(),
        files: names(&files),
    };
    write_json(&meta_path, &meta)?;
    files.push(meta_path);
    Ok(Outcome { passed: true, files })
}

#[derive(Serialize)]
struct PropagateReport<'a> {
    provenance: Provenance,
    config: &'a RunConfig,
    initial: &'a str,
    energy_initial: f64,
    energy_drift: f64,
    final_time: f64,
    final_centroid: f64,
    final_rms_width: f64,
    /// Against the closed form, for Bateman–Hillion runs.
    final_overlap: Option<f64>,
    final_relative_l2: Option<f64>,
    warnings: Vec<String>,
    files: Vec<String>,
}

pub fn propagate(config: &RunConfig) -> Result<Outcome> {
    let (phi, vel) = match config.initial.as_str() {
        "bateman_hillion" => {
            let p = config.packet()?;
            let grid = periodic_cube(config.points, config.extent)?;
            (
                sample_bateman_hillion(&p, &grid, config.time, false)?,
                sample_bateman_hillion(&p, &grid, config.time, true)?,
            )
        }
        "plane_wave" => plane_wave_data(config)?,
        "gaussian" => massive_gaussian_data(config)?,
        other => return Err(Error::param("initial", format!("unknown initial data `{other}`"))),
    };
    let run = propagate_spectral(&phi, &vel, config.mass, config.dt, config.steps, config.save_every)?;
    let exact = |t: f64| -> Result<Option<FieldSlice>> {
        if config.initial == "bateman_hillion" {
            Ok(Some(sample_bateman_hillion(&config.packet()?, &run.frames[0].grid, t, false)?))
        } else {
            Ok(None)
        }
    };
    let dir = out_dir(config)?;
    let prov = Provenance::new(Command::Propagate, config);
    let mut files = Vec::new();
    let mut rows = Vec::new();
    let mut last_exact = None;
    for (i, frame) in run.frames.iter().enumerate() {
        let path = dir.join(format!("frame_{i:04}.fwslice"));
        write_slice(&path, frame)?;
        files.push(path);
        let reference = exact(frame.time)?;
        let m = match &reference {
            Some(r) => dispersion_metrics_against(frame, Coord::Z, r)?,
            None => dispersion_metrics(frame, Coord::Z)?,
        };
        rows.push(vec![frame.time, m.centroid, m.rms_width, m.peak, m.overlap.unwrap_or(f64::NAN)]);
        last_exact = reference;
    }
    let comments = prov.comments();
    let metrics = dir.join("metrics.csv");
    atomic_write(&metrics, &table_to_csv(&["time", "centroid", "rms_width", "peak", "overlap"], &rows, &comments)?)?;
    let energy_rows: Vec<Vec<f64>> = run
        .energy
        .iter()
        .enumerate()
        .map(|(n, e)| vec![n as f64, config.time + config.dt * n as f64, *e])
        .collect();
    let energy = dir.join("energy.csv");
    atomic_write(&energy, &table_to_csv(&["step", "time", "energy"], &energy_rows, &comments)?)?;
    files.push(metrics);
    files.push(energy);
    let last = run.frames.last().expect("frames are never empty");
    let fin = rows.last().expect("one row per frame");
    let report_path = dir.join("propagate.json");
    let report = PropagateReport {
        provenance: prov,
        config,
        initial: &config.initial,
        energy_initial: run.energy[0],
        energy_drift: run.energy_drift,
        final_time: last.time,
        final_centroid: fin[1],
        final_rms_width: fin[2],
        final_overlap: last_exact.as_ref().map(|_| fin[4]),
        final_relative_l2: match &last_exact {
            Some(r) => Some(last.relative_l2_error(r)?),
            None => None,
        },
        warnings: run.warnings.clone(),
        files: names(&files),
    };
    write_json(&report_path, &report)?;
    files.push(report_path);
    Ok(Outcome { passed: true, files })
}

pub fn verify(config: &RunConfig) -> Result<(Outcome, VerifyReport)> {
    let suite = config.suite.as_deref().ok_or_else(|| Error::param("suite", "no suite named"))?;
    let report = verify::run_suite(suite, config)?;
    let dir = out_dir(config)?;
    let path = dir.join(format!("verify_{suite}.json"));
    write_json(&path, &report)?;
    Ok((
        Outcome {
            passed: report.passed,
            files: vec![path],
        },
        report,
    ))
}

#[derive(Serialize)]
struct ConstrainOutput {
    #[serde(flatten)]
    report: ConstraintReport,
    solved_amplitude: Option<f64>,
    provenance: Provenance,
}

/// With `solve`, the report is evaluated at the solved amplitude.
pub fn constrain(config: &RunConfig) -> Result<(Outcome, Option<f64>)> {
    let dim = config.dimension()?;
    let solved = if config.solve {
        Some(solve_amplitude(config.sigma, config.mass, dim)?)
    } else {
        None
    };
    let profile = config.profile()?.with_amplitude(solved.unwrap_or(config.amplitude));
    let report = if config.fock {
        fock_commutator_check(&QuantizationConfig::new(profile, dim, config.volume, config.modes, config.n_max)?)?
    } else {
        match dim {
            crate::packets::Dimension::D2 => constraint_d2(&profile, &default_cutoffs(config.sigma))?,
            crate::packets::Dimension::D4 => constraint_d4(&profile)?,
        }
    };
    let passed = report.passed;
    let dir = out_dir(config)?;
    let path = dir.join("constraint.json");
    write_json(
        &path,
        &ConstrainOutput {
            report,
            solved_amplitude: solved,
            provenance: Provenance::new(Command::Constrain, config),
        },
    )?;
    Ok((
        Outcome {
            passed,
            files: vec![path],
        },
        solved,
    ))
}

#[derive(Serialize)]
struct SpectrumReport<'a> {
    provenance: Provenance,
    config: &'a RunConfig,
    k_plus: Vec<f64>,
    /// Location of the delta, `−(k⊥² + m²)/(2k₊)`.
    k_minus_on_shell: Vec<f64>,
    massless: Vec<Complex64>,
    massive: Vec<Complex64>,
    skipped: Vec<f64>,
    files: Vec<String>,
}

/// Massless and massive Fourier coefficients on a uniform `k₊` grid;
/// `k₊ = 0`, where the parametrization degenerates, is skipped.
pub fn spectrum(config: &RunConfig) -> Result<Outcome> {
    let env = config.envelope()?;
    let n = config.k_plus_count;
    let ks: Vec<f64> = (0..n)
        .map(|i| {
            if n == 1 {
                config.k_plus_min
            } else {
                config.k_plus_min + (config.k_plus_max - config.k_plus_min) * i as f64 / (n - 1) as f64
            }
        })
        .collect();
    let (kept, skipped): (Vec<f64>, Vec<f64>) = ks.into_iter().partition(|k| *k != 0.0);
    let mut massless = Vec::new();
    let mut massive = Vec::new();
    let mut rows = Vec::new();
    let shell = config.k_perp * config.k_perp + config.mass * config.mass;
    let k_minus: Vec<f64> = kept.iter().map(|k| -shell / (2.0 * k)).collect();
    for (&k, &km) in kept.iter().zip(&k_minus) {
        let a = massless_fourier_coefficient(&env, k)?;
        let b = massive_fourier_coefficient(&env, k, config.mass)?;
        rows.push(vec![k, km, a.re, a.im, b.re, b.im]);
        massless.push(a);
        massive.push(b);
    }
    let dir = out_dir(config)?;
    let prov = Provenance::new(Command::Spectrum, config);
    let csv_path = dir.join("spectrum.csv");
    atomic_write(
        &csv_path,
        &table_to_csv(&["k_plus", "k_minus_on_shell", "massless_re", "massless_im", "massive_re", "massive_im"], &rows, &prov.comments())?,
    )?;
    let mut files = vec![csv_path];
    let json_path = dir.join("spectrum.json");
    write_json(
        &json_path,
        &SpectrumReport {
            provenance: prov,
            config,
            k_plus: kept,
            k_minus_on_shell: k_minus,
            massless,
            massive,
            skipped,
            files: names(&files),
        },
    )?;
    files.push(json_path);
    Ok(Outcome { passed: true, files })
}
