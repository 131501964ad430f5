//! Log-likelihood scores and the two sign-test classifiers built on them.
//!
//! For a sample `x` the score is `log q(x - mu) - log q(x + mu)`, evaluated
//! as `psi(x - mu) - psi(x + mu)` so the normalizer never enters. The
//! maximum-likelihood classifier tests the sign of the plain score sum; the
//! truncated classifier first drops the `k` largest and `k` smallest scores.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Label, ProblemInstance};
use crate::noise::ExpPolyNoise;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classifier {
    Ml,
    Truncated,
}

impl fmt::Display for Classifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classifier::Ml => "ml",
            Classifier::Truncated => "truncated",
        })
    }
}

impl FromStr for Classifier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ml" => Ok(Classifier::Ml),
            "truncated" => Ok(Classifier::Truncated),
            other => Err(Error::InvalidInput(format!("unknown classifier {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodScores {
    pub scores: Vec<f64>,
    pub mu: f64,
}

impl LikelihoodScores {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.scores.iter().sum()
    }
}

/// Score of one sample under shift `mu`.
#[inline]
pub fn score(noise: &ExpPolyNoise, mu: f64, x: f64) -> f64 {
    noise.psi(x - mu) - noise.psi(x + mu)
}

pub fn loglik_transform(instance: &ProblemInstance, x: &[f64]) -> Result<LikelihoodScores> {
    if x.len() != instance.d() {
        return Err(Error::InvalidInput(format!(
            "expected {} samples, got {}",
            instance.d(),
            x.len()
        )));
    }
    loglik_with_shift(instance.noise(), instance.mu_d(), x)
}

/// Scores for an arbitrary shift; `loglik_transform` uses `mu_d`.
pub fn loglik_with_shift(noise: &ExpPolyNoise, mu: f64, x: &[f64]) -> Result<LikelihoodScores> {
    reject_nan(x)?;
    Ok(LikelihoodScores {
        scores: x.iter().map(|&xi| score(noise, mu, xi)).collect(),
        mu,
    })
}

fn reject_nan(u: &[f64]) -> Result<()> {
    match u.iter().position(|v| v.is_nan()) {
        Some(i) => Err(Error::NonFinite {
            at: i as f64,
            value: f64::NAN,
        }),
        None => Ok(()),
    }
}

pub(crate) fn check_budget(k: usize, d: usize) -> Result<()> {
    if 2 * k >= d {
        Err(Error::BudgetTooLarge { k, d })
    } else {
        Ok(())
    }
}

/// Copy of `u` sorted in descending order.
pub fn sorted_desc(u: &[f64]) -> Vec<f64> {
    let mut s = u.to_vec();
    s.sort_unstable_by(|a, b| b.total_cmp(a));
    s
}

/// Sum of `s[lo..hi]` of an already descending-sorted slice, largest first.
#[inline]
pub(crate) fn sum_range(sorted: &[f64], lo: usize, hi: usize) -> f64 {
    sorted[lo..hi].iter().sum()
}

/// Truncated sum: drop the `k` largest and `k` smallest entries and add the
/// rest in descending order. `k = 0` is the ordinary sum.
pub fn tsum(u: &[f64], k: usize) -> Result<f64> {
    check_budget(k, u.len())?;
    reject_nan(u)?;
    let s = sorted_desc(u);
    Ok(sum_range(&s, k, s.len() - k))
}

/// Ties go to -1.
#[inline]
pub fn decide(statistic: f64) -> Label {
    if statistic > 0.0 {
        Label::Pos
    } else {
        Label::Neg
    }
}

pub fn classify_ml(instance: &ProblemInstance, x: &[f64]) -> Result<Label> {
    Ok(decide(loglik_transform(instance, x)?.sum()))
}

pub fn classify_truncated(instance: &ProblemInstance, x: &[f64], k: usize) -> Result<Label> {
    check_budget(k, instance.d())?;
    let scores = loglik_transform(instance, x)?;
    Ok(decide(tsum(&scores.scores, k)?))
}
