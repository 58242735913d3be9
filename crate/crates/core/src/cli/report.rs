use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{Command, RunConfig};
use crate::dynamics::io::atomic_write;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub command: String,
    pub config_hash: String,
    pub version: String,
}

impl Provenance {
    pub fn new(cmd: Command, config: &RunConfig) -> Self {
        Self {
            command: cmd.name().into(),
            config_hash: config.hash(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }

    /// `#`-comment lines for CSV headers.
    pub fn comments(&self) -> Vec<String> {
        vec![
            format!("focuswave {} {}", self.version, self.command),
            format!("config_hash {}", self.config_hash),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Status {
    Pass,
    Fail,
    /// A negative control that failed, as it should.
    ExpectedFail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, ok: bool, value: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            value,
            tolerance,
            detail: detail.into(),
        }
    }

    /// A check that is supposed to fail; failing is the good outcome.
    pub fn negative(name: &str, failed: bool, value: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            status: if failed { Status::ExpectedFail } else { Status::Fail },
            ..Self::new(name, true, value, tolerance, detail)
        }
    }

    pub fn ok(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub provenance: Provenance,
    pub config: RunConfig,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    bytes.push(b'\n');
    atomic_write(path, &bytes)
}
