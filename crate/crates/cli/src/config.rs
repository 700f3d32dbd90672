//! Experiment configuration. A TOML document with the sections below; any
//! key outside the schema is rejected before computation starts.
//!
//! ```toml
//! experiment = "reflectionless-phase"
//!
//! [constants]          # optional, hbar = c = 1 by default
//! hbar = 1.0
//! c = 1.0
//!
//! [reflectionless]     # reflectionless-phase, smatrix-compare
//! k1 = 1.0
//! mass = 1.0
//! direction = "increasing"
//! half_length = 16.0
//!
//! [dirac]              # dirac-circuit
//! omega = 1.0
//! period = 1.0
//! k = 0.0
//! branch = "lower"
//! sector = "plus"
//! thetas = [0.5235987755982988, 1.0471975511965976, 1.5707963267948966]
//!
//! [sweep]              # k sweep for the reflectionless experiments
//! k_lo = 1.5
//! k_hi = 10.0
//! n_points = 18
//!
//! [verify]             # oracle-verify
//! tier = "fast"
//!
//! [scheme]             # optional quadrature override, all fields required
//!
//! [output]             # optional
//! path = "out.csv"
//! format = "csv"
//! ```

use std::f64::consts::PI;
use std::path::PathBuf;

use geophase::models::dirac::{Branch, Sigma3Sector};
use geophase::{PhysicalConstants, QuadratureScheme, SpectralBand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    DiracCircuit,
    ReflectionlessPhase,
    SmatrixCompare,
    OracleVerify,
}

impl Experiment {
    pub fn id(self) -> &'static str {
        match self {
            Experiment::DiracCircuit => "dirac-circuit",
            Experiment::ReflectionlessPhase => "reflectionless-phase",
            Experiment::SmatrixCompare => "smatrix-compare",
            Experiment::OracleVerify => "oracle-verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TierName {
    #[default]
    Fast,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReflectionlessSection {
    pub k1: f64,
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default)]
    pub direction: Direction,
    #[serde(default = "default_half_length")]
    pub half_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiracSection {
    #[serde(default = "one")]
    pub omega: f64,
    #[serde(default = "one")]
    pub period: f64,
    #[serde(default)]
    pub k: f64,
    #[serde(default = "lower")]
    pub branch: Branch,
    #[serde(default)]
    pub sector: Sigma3Sector,
    #[serde(default = "default_thetas")]
    pub thetas: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    #[serde(default)]
    pub tier: TierName,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub constants: PhysicalConstants,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reflectionless: Option<ReflectionlessSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dirac: Option<DiracSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SpectralBand>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<QuadratureScheme>,
    #[serde(default)]
    pub output: OutputSection,
}

fn one() -> f64 {
    1.0
}

fn default_half_length() -> f64 {
    16.0
}

fn lower() -> Branch {
    Branch::Lower
}

fn default_thetas() -> Vec<f64> {
    vec![PI / 6.0, PI / 3.0, PI / 2.0]
}

fn field(name: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{name}: {e}"))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| field(&path.display().to_string(), e))?;
        Self::parse(&text)
    }

    /// Canonical TOML form: fields in schema order with defaults filled in.
    pub fn emit(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Hex SHA-256 of the canonical form.
    pub fn digest(&self) -> Result<String, CliError> {
        let bytes = Sha256::digest(self.emit()?.as_bytes());
        Ok(bytes.iter().map(|b| format!("{b:02x}")).collect())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.constants.validate().map_err(|e| field("constants", e))?;
        if let Some(scheme) = &self.scheme {
            scheme.validate().map_err(|e| field("scheme", e))?;
        }
        if let Some(sweep) = &self.sweep {
            sweep.validate().map_err(|e| field("sweep", e))?;
        }
        match self.experiment {
            Experiment::DiracCircuit => {
                let d = self.dirac.as_ref().ok_or_else(|| field("dirac", "section required for dirac-circuit"))?;
                if !(d.omega.is_finite() && d.omega > 0.0) {
                    return Err(field("dirac.omega", "must be finite and > 0"));
                }
                if !(d.period.is_finite() && d.period > 0.0) {
                    return Err(field("dirac.period", "must be finite and > 0"));
                }
                if !d.k.is_finite() {
                    return Err(field("dirac.k", "must be finite"));
                }
                if d.thetas.is_empty() {
                    return Err(field("dirac.thetas", "must not be empty"));
                }
                if let Some(bad) = d.thetas.iter().find(|t| !(**t > 0.0 && **t <= 0.5 * PI)) {
                    return Err(field("dirac.thetas", format!("{bad} outside (0, pi/2], where the mass stays positive")));
                }
                if d.thetas.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(field("dirac.thetas", "must be strictly ascending"));
                }
            }
            Experiment::ReflectionlessPhase | Experiment::SmatrixCompare => {
                let r = self
                    .reflectionless
                    .as_ref()
                    .ok_or_else(|| field("reflectionless", format!("section required for {}", self.experiment.id())))?;
                if !(r.k1.is_finite() && r.k1 > 0.0) {
                    return Err(field("reflectionless.k1", "must be finite and > 0"));
                }
                if !(r.mass.is_finite() && r.mass > 0.0) {
                    return Err(field("reflectionless.mass", "must be finite and > 0"));
                }
                if !(r.half_length.is_finite() && r.half_length > 0.0) {
                    return Err(field("reflectionless.half_length", "must be finite and > 0"));
                }
                let sweep = self.sweep.ok_or_else(|| field("sweep", "section required for k sweeps"))?;
                if sweep.k_lo <= 0.0 {
                    return Err(field("sweep.k_lo", "must be > 0"));
                }
            }
            Experiment::OracleVerify => {}
        }
        Ok(())
    }
}
