//! Sparse adversaries that may overwrite at most `k` samples with arbitrary
//! values.
//!
//! Two families live here. The worst-case adversary sees everything and
//! pushes the classifier statistic as far as the budget allows; against the
//! truncated sum this has a closed form, cross-checked by an exhaustive
//! oracle on small inputs. The coupling adversary is randomized: it replaces
//! each sample by a label-free surrogate drawn through a maximal coupling of
//! the two class-conditional laws, and gives up (reverts) whenever that
//! would exceed its budget.

mod coupling;
mod worst_case;

pub use coupling::{coupling_attack, coupling_with_shift, keep_probability};
pub use worst_case::{
    brute_force_attack, realize_in_x_space, realize_worst_case, worst_case_sum,
    worst_case_tsum, worst_case_tsum_sorted,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which way the adversary pushes the statistic. Against a sample with label
/// `+1` it minimizes, against `-1` it maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    None,
    WorstCase,
    Coupling,
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackKind::None => "none",
            AttackKind::WorstCase => "worst_case",
            AttackKind::Coupling => "coupling",
        })
    }
}

impl FromStr for AttackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(AttackKind::None),
            "worst_case" | "worst-case" => Ok(AttackKind::WorstCase),
            "coupling" => Ok(AttackKind::Coupling),
            other => Err(Error::InvalidInput(format!("unknown attack {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AttackBudget {
    pub k: usize,
    pub alpha: Option<f64>,
}

impl AttackBudget {
    pub fn fixed(k: usize) -> Self {
        AttackBudget { k, alpha: None }
    }
}

/// `k = floor(d^alpha)`. Powers that land within rounding of an integer
/// (`4096^0.5`) are snapped to it before flooring.
pub fn budget_from_alpha(d: usize, alpha: f64) -> Result<AttackBudget> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let p = (d as f64).powf(alpha);
    let r = p.round();
    let k = if (p - r).abs() <= 1e-9 * r.max(1.0) { r } else { p.floor() };
    Ok(AttackBudget {
        k: k as usize,
        alpha: Some(alpha),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackOutcome {
    /// Attacked vector (scores for score-space attacks, samples otherwise).
    pub perturbed: Vec<f64>,
    /// Indices where `perturbed` differs from the input, ascending.
    pub changed_indices: Vec<usize>,
    /// Coupling attack only: the surrogate needed more than `k` changes, so
    /// the input was returned untouched.
    pub reverted: bool,
    /// Worst-case attacks only: the extremal statistic.
    pub worst_statistic: Option<f64>,
    /// Coupling attack only: coordinates where the coupled pair disagreed,
    /// counted before any revert.
    pub mismatches: usize,
}

impl AttackOutcome {
    /// `||perturbed - original||_0`.
    pub fn l0_distance(&self, original: &[f64]) -> usize {
        self.perturbed
            .iter()
            .zip(original)
            .filter(|(a, b)| a != b)
            .count()
    }
}
