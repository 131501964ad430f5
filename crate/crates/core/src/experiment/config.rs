use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::attack::AttackKind;
use crate::classify::Classifier;
use crate::error::{Error, Result};

pub const MIN_TRIALS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidInput(format!("unknown output format {other:?}"))),
        }
    }
}

/// Finite-dimension pass/fail thresholds. The underlying statements are
/// asymptotic, so these are settings, and they are echoed into every JSON
/// report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Allowed excess of the robust error over the asymptotic standard error
    /// in the small-budget regime.
    pub achievability_slack: f64,
    /// Minimum error expected in the large-budget regime.
    pub converse_floor: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            achievability_slack: 0.02,
            converse_floor: 0.45,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub poly: Vec<f64>,
    pub c: f64,
    pub dims: Vec<usize>,
    /// Budget exponents; `k = floor(d^alpha)`. Takes precedence over `ks`.
    #[serde(default)]
    pub alphas: Vec<f64>,
    /// Explicit budgets, used when `alphas` is empty.
    #[serde(default)]
    pub ks: Vec<usize>,
    pub attacks: Vec<AttackKind>,
    pub classifier: Classifier,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub thresholds: Thresholds,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            poly: vec![0.0, 0.0, -0.5],
            c: 1.0,
            dims: vec![1024],
            alphas: Vec::new(),
            ks: vec![0],
            attacks: vec![AttackKind::None],
            classifier: Classifier::Ml,
            trials: 10_000,
            master_seed: 0,
            out: None,
            format: OutputFormat::Csv,
            thresholds: Thresholds::default(),
        }
    }
}

impl ExperimentConfig {
    /// Checks everything that is not tied to a single cell. Budgets that are
    /// too large for a dimension surface as failed cells instead.
    pub fn validate(&self) -> Result<()> {
        if self.trials < MIN_TRIALS {
            return Err(Error::InvalidInput(format!(
                "trials must be at least {MIN_TRIALS}, got {}",
                self.trials
            )));
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::InvalidInput("dims must be a nonempty list of positive integers".into()));
        }
        if self.alphas.is_empty() && self.ks.is_empty() {
            return Err(Error::InvalidInput("need at least one alpha or k".into()));
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return Err(Error::InvalidInput(format!("alpha {a} outside (0, 1)")));
        }
        if self.attacks.is_empty() {
            return Err(Error::InvalidInput("need at least one attack".into()));
        }
        if !(self.c.is_finite() && self.c != 0.0) {
            return Err(Error::InvalidInput(format!("c must be finite and nonzero, got {}", self.c)));
        }
        Ok(())
    }
}
