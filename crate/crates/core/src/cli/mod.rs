//! The `focuswave` command line.
//!
//! Exit codes: 0 success, 1 a verification or constraint check failed,
//! 2 configuration or usage error, 3 resource, accuracy or I/O failure.

pub mod commands;
pub mod config;
pub mod report;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::Error;
pub use config::{Command, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Caps the worker pool when set.
pub const THREADS_ENV: &str = "FOCUSWAVE_THREADS";

#[derive(Parser, Debug)]
#[command(name = "focuswave", version, about = "Nondispersive wave packets: evaluation, propagation, verification and quantization constraints")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Evaluate the packet on an (x, z) half-plane.
    #[command(allow_negative_numbers = true)]
    Eval(Keys),
    /// Propagate initial data with the spectral integrator.
    #[command(allow_negative_numbers = true)]
    Propagate(Keys),
    /// Run a verification suite: residual, parabolic, fresnel, mass-shell, nondispersive.
    #[command(allow_negative_numbers = true)]
    Verify {
        #[arg(value_name = "SUITE")]
        suite_name: Option<String>,
        #[command(flatten)]
        keys: Keys,
    },
    /// Evaluate a quantization constraint.
    #[command(allow_negative_numbers = true)]
    Constrain(Keys),
    /// Tabulate massless and massive Fourier coefficients over k₊.
    #[command(allow_negative_numbers = true)]
    Spectrum(Keys),
}

/// Every configuration key, also accepted in the `--config` file.
#[derive(Args, Debug, Default, Serialize)]
struct Keys {
    /// TOML file of `key = value` settings; flags take precedence.
    #[arg(long = "config", value_name = "PATH")]
    #[serde(skip)]
    config_file: Option<PathBuf>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write CSV cuts.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    csv: Option<bool>,

    /// Regularizer ε of the denominator √2ξ₊ − iε.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Envelope family: gaussian, focus_wave or splash.
    #[arg(long)]
    envelope: Option<String>,
    /// Gaussian envelope width.
    #[arg(long)]
    width: Option<f64>,
    /// Focus-wave carrier q (also the plane-wave and control carrier).
    #[arg(long)]
    wavenumber: Option<f64>,
    /// Optional Gaussian damping width of the focus wave.
    #[arg(long)]
    damping: Option<f64>,
    /// Splash envelope scale a in (1 − iθ/a)^{−n}.
    #[arg(long)]
    splash_scale: Option<f64>,
    /// Splash envelope order n.
    #[arg(long)]
    splash_order: Option<u32>,
    /// Evaluation or start time.
    #[arg(long)]
    time: Option<f64>,

    /// Samples per axis.
    #[arg(long)]
    points: Option<usize>,
    /// Half-width of every axis.
    #[arg(long)]
    extent: Option<f64>,

    /// Initial data: bateman_hillion, plane_wave or gaussian.
    #[arg(long)]
    initial: Option<String>,
    /// Number of time steps.
    #[arg(long)]
    steps: Option<usize>,
    /// Time step.
    #[arg(long)]
    dt: Option<f64>,
    /// Keep every n-th frame.
    #[arg(long)]
    save_every: Option<usize>,

    /// Spacetime dimension for constraints: 2 or 4.
    #[arg(long)]
    dim: Option<u8>,
    /// Profile amplitude A.
    #[arg(long)]
    amplitude: Option<f64>,
    /// Profile width σ.
    #[arg(long)]
    sigma: Option<f64>,
    /// Mass m of the field.
    #[arg(long)]
    mass: Option<f64>,
    /// Print the admissible amplitude and evaluate the constraint there.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    solve: Option<bool>,
    /// Check [Q, P] in a truncated Fock space instead of the c-number form.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    fock: Option<bool>,
    /// Box length or volume V for the Fock check.
    #[arg(long)]
    volume: Option<f64>,
    /// Number of box modes M (odd).
    #[arg(long)]
    modes: Option<usize>,
    /// Occupation cap per mode.
    #[arg(long)]
    n_max: Option<usize>,

    /// First k₊ of the spectrum table.
    #[arg(long)]
    k_plus_min: Option<f64>,
    /// Last k₊ of the spectrum table.
    #[arg(long)]
    k_plus_max: Option<f64>,
    /// Number of k₊ values; k₊ = 0 is skipped.
    #[arg(long)]
    k_plus_count: Option<usize>,
    /// Transverse wavenumber for spectrum tables.
    #[arg(long)]
    k_perp: Option<f64>,

    /// Verification suite (also accepted positionally).
    #[arg(long)]
    suite: Option<String>,
    /// Add the off-shell negative control to the residual suite.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    negative_control: Option<bool>,
    /// Seed for randomized sample points.
    #[arg(long)]
    seed: Option<u64>,
}

impl Keys {
    fn overrides(&self) -> Map<String, Value> {
        match serde_json::to_value(self) {
            Ok(Value::Object(m)) => m.into_iter().filter(|(_, v)| !v.is_null()).collect(),
            _ => Map::new(),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parameter { .. }
        | Error::Parse(_)
        | Error::Domain(_)
        | Error::Unsupported(_)
        | Error::SymmetryViolation(_)
        | Error::GridMismatch(_) => EXIT_CONFIG,
        Error::Singularity(_)
        | Error::NonConvergent(_)
        | Error::Accuracy { .. }
        | Error::Resource(_)
        | Error::Io(_) => EXIT_RESOURCE,
    }
}

fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| format!("{THREADS_ENV}: expected a positive integer, got `{raw}`"))?;
    // a pool built earlier in this process wins
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return EXIT_CONFIG;
    }
    let (cmd, keys, positional) = match cli.command {
        Sub::Eval(k) => (Command::Eval, k, None),
        Sub::Propagate(k) => (Command::Propagate, k, None),
        Sub::Verify { suite_name, keys } => (Command::Verify, keys, suite_name),
        Sub::Constrain(k) => (Command::Constrain, k, None),
        Sub::Spectrum(k) => (Command::Spectrum, k, None),
    };
    let mut overrides = keys.overrides();
    if let Some(s) = positional {
        overrides.insert("suite".into(), s.into());
    }
    let config = match config::resolve(cmd, keys.config_file.as_deref(), overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: invalid configuration: {e}");
            return EXIT_CONFIG;
        }
    };
    match dispatch(cmd, &config) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, config: &RunConfig) -> crate::Result<bool> {
    let outcome = match cmd {
        Command::Eval => commands::eval(config)?,
        Command::Propagate => commands::propagate(config)?,
        Command::Spectrum => commands::spectrum(config)?,
        Command::Verify => {
            let (outcome, report) = commands::verify(config)?;
            for c in &report.checks {
                println!("{:<14} {} = {:.6e} (tol {:.1e})", format!("{:?}", c.status), c.name, c.value, c.tolerance);
            }
            outcome
        }
        Command::Constrain => {
            let (outcome, solved) = commands::constrain(config)?;
            if let Some(a) = solved {
                println!("A = {a:.17}");
            }
            outcome
        }
    };
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(outcome.passed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn argument_table_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_become_overrides() {
        let cli = Cli::try_parse_from(["focuswave", "constrain", "--dim", "4", "--fock", "--mass=-0"]).unwrap();
        let Sub::Constrain(keys) = cli.command else { panic!("wrong subcommand") };
        let o = keys.overrides();
        assert_eq!(o["dim"], 4);
        assert_eq!(o["fock"], true);
        assert!(!o.contains_key("sigma"));
    }
}
