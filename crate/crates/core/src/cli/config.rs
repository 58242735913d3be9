//! Run configuration: built-in defaults, then an optional TOML file, then
//! command-line flags, in increasing precedence.
//!
//! The file is flat `key = value` text. Tables may be used to group keys
//! (`[packet]`, `[grid]`, …) but are purely cosmetic: every key lives in a
//! single namespace and matches the flag of the same name, with `-` and `_`
//! interchangeable.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::envelope::Envelope;
use crate::error::{Error, Result};
use crate::packets::{Dimension, PacketParams};
use crate::spectral::SpectralProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eval,
    Propagate,
    Verify,
    Constrain,
    Spectrum,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Propagate => "propagate",
            Command::Verify => "verify",
            Command::Constrain => "constrain",
            Command::Spectrum => "spectrum",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Output directory.
    pub out: PathBuf,
    /// Also write CSV cuts.
    pub csv: bool,

    pub epsilon: f64,
    /// `gaussian`, `focus_wave` or `splash`.
    pub envelope: String,
    pub width: f64,
    pub wavenumber: f64,
    pub damping: Option<f64>,
    pub splash_scale: f64,
    pub splash_order: u32,
    pub time: f64,

    /// Samples per axis.
    pub points: usize,
    /// Half-width of every axis.
    pub extent: f64,

    /// `bateman_hillion`, `plane_wave` or `gaussian`.
    pub initial: String,
    pub steps: usize,
    pub dt: f64,
    pub save_every: usize,

    pub dim: u8,
    pub amplitude: f64,
    pub sigma: f64,
    pub mass: f64,
    pub solve: bool,
    pub fock: bool,
    pub volume: f64,
    pub modes: usize,
    pub n_max: usize,

    pub k_plus_min: f64,
    pub k_plus_max: f64,
    pub k_plus_count: usize,
    pub k_perp: f64,

    pub suite: Option<String>,
    pub negative_control: bool,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            out: PathBuf::from("focuswave-out"),
            csv: false,
            epsilon: 0.5,
            envelope: "gaussian".into(),
            width: 1.0,
            wavenumber: 1.0,
            damping: None,
            splash_scale: 4.0,
            splash_order: 4,
            time: 0.0,
            points: 64,
            extent: 4.0,
            initial: "bateman_hillion".into(),
            steps: 10,
            dt: 0.2,
            save_every: 5,
            dim: 2,
            amplitude: 1.0,
            sigma: 1.0,
            mass: 0.0,
            solve: false,
            fock: false,
            volume: 10.0,
            modes: 9,
            n_max: 8,
            k_plus_min: 0.25,
            k_plus_max: 4.0,
            k_plus_count: 16,
            k_perp: 0.0,
            suite: None,
            negative_control: false,
            seed: 7,
        }
    }
}

/// Defaults that differ by command, applied under the file and flags.
fn command_defaults(cmd: Command) -> Map<String, Value> {
    let mut m = Map::new();
    if cmd == Command::Propagate {
        // the splash tail keeps the packet finite-energy on a periodic box
        m.insert("envelope".into(), "splash".into());
        m.insert("epsilon".into(), 4.0.into());
        m.insert("extent".into(), 24.0.into());
    }
    m
}

fn normalize_key(k: &str) -> String {
    k.replace('-', "_")
}

/// Flattens one level of tables and normalizes key spelling.
fn flatten_toml(table: toml::Table) -> Result<Map<String, Value>> {
    let mut out = Map::new();
    for (k, v) in table {
        match v {
            toml::Value::Table(inner) => {
                for (k2, v2) in inner {
                    if matches!(v2, toml::Value::Table(_)) {
                        return Err(Error::Parse(format!("nested table `{k}.{k2}`: only one level of grouping is allowed")));
                    }
                    insert_unique(&mut out, &k2, toml_to_json(v2)?)?;
                }
            }
            other => insert_unique(&mut out, &k, toml_to_json(other)?)?,
        }
    }
    Ok(out)
}

fn insert_unique(out: &mut Map<String, Value>, key: &str, v: Value) -> Result<()> {
    let key = normalize_key(key);
    if out.insert(key.clone(), v).is_some() {
        return Err(Error::Parse(format!("key `{key}` is set more than once")));
    }
    Ok(())
}

fn toml_to_json(v: toml::Value) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Parse(e.to_string()))
}

pub fn load_file(path: &Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read config {}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Parse(format!("{}: {}", path.display(), e.message())))?;
    flatten_toml(table)
}

/// Merges defaults, file and flag overrides and validates the result. All
/// violations are reported together.
pub fn resolve(cmd: Command, file: Option<&Path>, flags: Map<String, Value>) -> Result<RunConfig> {
    let mut merged = match serde_json::to_value(RunConfig::default()) {
        Ok(Value::Object(m)) => m,
        _ => unreachable!("RunConfig serializes to an object"),
    };
    merged.extend(command_defaults(cmd));
    let mut problems = Vec::new();
    let mut layers = Vec::new();
    if let Some(p) = file {
        layers.push(load_file(p)?);
    }
    layers.push(flags.into_iter().map(|(k, v)| (normalize_key(&k), v)).collect());
    for layer in layers {
        for (k, v) in layer {
            if merged.contains_key(&k) {
                merged.insert(k, v);
            } else {
                problems.push(format!("{k}: unknown key"));
            }
        }
    }
    let config: RunConfig = match serde_json::from_value(Value::Object(merged.clone())) {
        Ok(c) => c,
        Err(_) => {
            // report each mistyped key, not just the first
            let reference = serde_json::to_value(RunConfig::default()).expect("serializable");
            for (k, v) in &merged {
                let mut probe = reference.clone();
                probe[k] = v.clone();
                if let Err(e) = serde_json::from_value::<RunConfig>(probe) {
                    problems.push(format!("{k}: {e}"));
                }
            }
            return Err(Error::Parse(problems.join("; ")));
        }
    };
    problems.extend(config.violations(cmd));
    if problems.is_empty() {
        Ok(config)
    } else {
        Err(Error::Parse(problems.join("; ")))
    }
}

impl RunConfig {
    /// Every constraint the command needs, as `key: reason` strings.
    pub fn violations(&self, cmd: Command) -> Vec<String> {
        let mut v = Vec::new();
        let mut need = |ok: bool, key: &str, reason: String| {
            if !ok {
                v.push(format!("{key}: {reason}"));
            }
        };
        let pos = |x: f64| x > 0.0 && x.is_finite();
        match cmd {
            Command::Eval | Command::Propagate => {
                need(pos(self.epsilon), "epsilon", format!("must be > 0, got {}", self.epsilon));
                need(pos(self.extent), "extent", format!("must be > 0, got {}", self.extent));
                need(self.points >= 4, "points", format!("need at least 4, got {}", self.points));
                need(self.time.is_finite(), "time", "must be finite".into());
                self.envelope_violations(&mut need);
            }
            _ => {}
        }
        match cmd {
            Command::Propagate => {
                need(self.steps >= 1, "steps", "must be at least 1".into());
                need(pos(self.dt), "dt", format!("must be > 0, got {}", self.dt));
                need(self.save_every >= 1, "save_every", "must be at least 1".into());
                need(self.mass >= 0.0 && self.mass.is_finite(), "mass", format!("must be ≥ 0, got {}", self.mass));
                need(
                    ["bateman_hillion", "plane_wave", "gaussian"].contains(&self.initial.as_str()),
                    "initial",
                    format!("unknown initial data `{}`", self.initial),
                );
                need(
                    !(self.initial == "bateman_hillion" && self.mass != 0.0),
                    "mass",
                    "the Bateman–Hillion packet is massless".into(),
                );
                need(
                    self.points.saturating_pow(3) <= 1 << 24 || self.initial != "bateman_hillion",
                    "points",
                    format!("{}³ samples exceed the 2^24 budget", self.points),
                );
            }
            Command::Constrain => {
                need(matches!(self.dim, 2 | 4), "dim", format!("must be 2 or 4, got {}", self.dim));
                need(pos(self.sigma), "sigma", format!("must be > 0, got {}", self.sigma));
                need(self.amplitude.is_finite(), "amplitude", "must be finite".into());
                need(self.mass >= 0.0 && self.mass.is_finite(), "mass", format!("must be ≥ 0, got {}", self.mass));
                if self.fock {
                    need(pos(self.volume), "volume", format!("must be > 0, got {}", self.volume));
                    need(self.modes % 2 == 1, "modes", format!("must be odd, got {}", self.modes));
                    need(self.n_max >= 2, "n_max", format!("must be ≥ 2, got {}", self.n_max));
                }
            }
            Command::Spectrum => {
                self.envelope_violations(&mut need);
                need(self.k_plus_count >= 1, "k_plus_count", "must be at least 1".into());
                need(
                    self.k_plus_min.is_finite() && self.k_plus_max.is_finite() && self.k_plus_min <= self.k_plus_max,
                    "k_plus_min",
                    "need a finite range with k_plus_min ≤ k_plus_max".into(),
                );
                need(self.mass >= 0.0 && self.mass.is_finite(), "mass", format!("must be ≥ 0, got {}", self.mass));
            }
            Command::Verify => {
                need(self.suite.is_some(), "suite", "name one of residual, parabolic, fresnel, mass-shell, nondispersive".into());
            }
            Command::Eval => {}
        }
        v
    }

    fn envelope_violations(&self, need: &mut impl FnMut(bool, &str, String)) {
        let pos = |x: f64| x > 0.0 && x.is_finite();
        match self.envelope.as_str() {
            "gaussian" => need(pos(self.width), "width", format!("must be > 0, got {}", self.width)),
            "focus_wave" => {
                need(self.wavenumber.is_finite(), "wavenumber", "must be finite".into());
                if let Some(d) = self.damping {
                    need(pos(d), "damping", format!("must be > 0, got {d}"));
                }
            }
            "splash" => {
                need(pos(self.splash_scale), "splash_scale", format!("must be > 0, got {}", self.splash_scale));
                need(self.splash_order >= 1, "splash_order", "must be at least 1".into());
            }
            other => need(false, "envelope", format!("unknown family `{other}`")),
        }
    }

    pub fn envelope(&self) -> Result<Envelope> {
        match self.envelope.as_str() {
            "gaussian" => Envelope::gaussian(self.width),
            "focus_wave" => Envelope::focus_wave(self.wavenumber, self.damping),
            "splash" => Envelope::splash(self.splash_scale, self.splash_order),
            other => Err(Error::param("envelope", format!("unknown family `{other}`"))),
        }
    }

    pub fn packet(&self) -> Result<PacketParams> {
        PacketParams::massless(self.epsilon, self.envelope()?)
    }

    pub fn dimension(&self) -> Result<Dimension> {
        match self.dim {
            2 => Ok(Dimension::D2),
            4 => Ok(Dimension::D4),
            d => Err(Error::param("dim", format!("must be 2 or 4, got {d}"))),
        }
    }

    pub fn profile(&self) -> Result<SpectralProfile> {
        SpectralProfile::gaussian(self.amplitude, self.sigma, self.mass)
    }

    /// SHA-256 of the canonical JSON form (fields in declaration order),
    /// leaving out the output directory.
    pub fn hash(&self) -> String {
        let canonical = RunConfig {
            out: PathBuf::new(),
            ..self.clone()
        };
        let bytes = serde_json::to_vec(&canonical).expect("RunConfig serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(pairs: &[(&str, Value)]) -> Map<String, Value> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn flags_override_file_and_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "[packet]\nepsilon = 0.25\nwidth = 2.0\n[grid]\npoints = 16\n").unwrap();
        let c = resolve(Command::Eval, Some(&path), flags(&[("points", 8.into())])).unwrap();
        assert_eq!(c.epsilon, 0.25);
        assert_eq!(c.width, 2.0);
        assert_eq!(c.points, 8);
    }

    #[test]
    fn violations_are_aggregated() {
        let e = resolve(
            Command::Eval,
            None,
            flags(&[("epsilon", 0.0.into()), ("points", 2.into()), ("bogus", 1.into())]),
        )
        .unwrap_err()
        .to_string();
        assert!(e.contains("epsilon") && e.contains("points") && e.contains("bogus"), "{e}");
    }

    #[test]
    fn type_errors_name_every_key() {
        let e = resolve(Command::Eval, None, flags(&[("epsilon", "x".into()), ("points", (-1).into())]))
            .unwrap_err()
            .to_string();
        assert!(e.contains("epsilon") && e.contains("points"), "{e}");
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.out = PathBuf::from("elsewhere");
        assert_eq!(a.hash(), b.hash());
        b.epsilon = 0.6;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn dashed_keys_are_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "n-max = 4\nfock = true\n").unwrap();
        let c = resolve(Command::Constrain, Some(&path), Map::new()).unwrap();
        assert_eq!(c.n_max, 4);
        assert!(c.fock);
    }
}
