//! Configuration documents: a flat table of ladder parameters plus an
//! optional `[sweep]` section.
//!
//! ```toml
//! M = 3.0
//! r = 1.0
//! theta = 1.5707963267948966
//! L = 60
//!
//! [sweep]
//! axis1 = { name = "r1", min = 0.0, max = 2.0, count = 40 }
//! axis2 = { name = "m", min = 0.0, max = 6.0, count = 40 }
//! outputs = ["gapclass", "edge", "boundaries"]
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use creutz_core::{LadderParams, ParamKey};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// One swept parameter: `count` evenly spaced values from `min` to `max`
/// inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn key(&self) -> Result<ParamKey, CliError> {
        let key = ParamKey::from_str(&self.name).map_err(|_| CliError::config(format!("unknown sweep axis {:?}", self.name)))?;
        match key {
            ParamKey::EnergyUnit | ParamKey::Boundary => {
                Err(CliError::config(format!("parameter {key} cannot be swept")))
            }
            _ => Ok(key),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    /// Largest spacing between consecutive values.
    pub fn step(&self) -> f64 {
        (self.max - self.min).abs() / (self.count.max(2) - 1) as f64
    }

    fn validate(&self) -> Result<(), CliError> {
        self.key()?;
        if self.count < 2 {
            return Err(CliError::config(format!("axis {} needs count >= 2, got {}", self.name, self.count)));
        }
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(CliError::config(format!("axis {} has non-finite bounds", self.name)));
        }
        Ok(())
    }
}

/// Diagnostics a sweep can request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Diagnostic {
    Bands,
    Winding,
    Gapclass,
    Edge,
    Dipr,
    Boundaries,
    Bbc,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Bands => "bands",
            Self::Winding => "winding",
            Self::Gapclass => "gapclass",
            Self::Edge => "edge",
            Self::Dipr => "dipr",
            Self::Boundaries => "boundaries",
            Self::Bbc => "bbc",
        };
        f.write_str(s)
    }
}

pub const DEFAULT_OUTPUTS: [Diagnostic; 4] =
    [Diagnostic::Gapclass, Diagnostic::Edge, Diagnostic::Dipr, Diagnostic::Boundaries];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis1: Axis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis2: Option<Axis>,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<Diagnostic>,
}

fn default_outputs() -> Vec<Diagnostic> {
    DEFAULT_OUTPUTS.to_vec()
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        self.axis1.validate()?;
        if let Some(a2) = &self.axis2 {
            a2.validate()?;
            if a2.key()? == self.axis1.key()? {
                return Err(CliError::config(format!("sweep axes must differ, both are {}", a2.name)));
            }
        }
        Ok(())
    }

    pub fn wants(&self, d: Diagnostic) -> bool {
        self.outputs.contains(&d)
    }
}

/// A parsed configuration document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config {
    pub params: LadderParams,
    pub sweep: Option<SweepSpec>,
}

/// Smallest ladder the real-space builders accept.
pub const MIN_CELLS: usize = 2;

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        let sweep = match table.remove("sweep") {
            Some(v) => Some(v.try_into::<SweepSpec>().map_err(|e| CliError::config(format!("[sweep]: {e}")))?),
            None => None,
        };
        let params: LadderParams =
            toml::Value::Table(table).try_into().map_err(|e| CliError::config(e.to_string()))?;
        let cfg = Self { params, sweep };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params.validate()?;
        if self.params.cells < MIN_CELLS {
            return Err(CliError::config(format!("L must be at least {MIN_CELLS}, got {}", self.params.cells)));
        }
        if let Some(s) = &self.sweep {
            s.validate()?;
        }
        Ok(())
    }

    pub fn require_sweep(&self) -> Result<&SweepSpec, CliError> {
        self.sweep.as_ref().ok_or_else(|| CliError::config("this command needs a [sweep] section"))
    }
}
