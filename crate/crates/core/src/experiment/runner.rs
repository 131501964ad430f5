use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::wilson::wilson_interval;
use crate::attack::{
    budget_from_alpha, coupling_attack, worst_case_sum, worst_case_tsum_sorted, AttackBudget,
    AttackKind, Direction,
};
use crate::classify::{check_budget, decide, loglik_transform, sorted_desc, sum_range, Classifier};
use crate::error::{Error, Result};
use crate::model::{generate, Label, LabelChoice, ProblemInstance};
use crate::noise::ExpPolyNoise;
use crate::numerics::{derive_seed, derive_stream};

pub const WORKERS_ENV: &str = "L0LAB_WORKERS";
const CONFIDENCE: f64 = 0.95;

/// Thread budget for trial execution. Results never depend on it.
#[derive(Debug)]
pub struct Executor {
    pool: Option<rayon::ThreadPool>,
}

impl Executor {
    /// `workers = 0` uses every available core; `1` runs inline.
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 1 {
            return Ok(Executor { pool: None });
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
        Ok(Executor { pool: Some(pool) })
    }

    /// Reads the worker cap from `L0LAB_WORKERS` (unset or `0` means auto).
    pub fn from_env() -> Result<Self> {
        let workers = match std::env::var(WORKERS_ENV) {
            Ok(v) => v.trim().parse::<usize>().map_err(|_| {
                Error::InvalidInput(format!("{WORKERS_ENV} must be a nonnegative integer, got {v:?}"))
            })?,
            Err(_) => 0,
        };
        Self::new(workers)
    }

    pub fn sequential() -> Self {
        Executor { pool: None }
    }

    /// Counts `(errors, reverts)` over trials `0..trials`.
    fn count<F>(&self, trials: usize, trial: F) -> Result<(u64, u64)>
    where
        F: Fn(u64) -> Result<(bool, bool)> + Sync,
    {
        let fold = |acc: (u64, u64), (e, r): (bool, bool)| (acc.0 + e as u64, acc.1 + r as u64);
        match &self.pool {
            None => (0..trials as u64).try_fold((0, 0), |acc, t| Ok(fold(acc, trial(t)?))),
            Some(pool) => pool.install(|| {
                (0..trials as u64)
                    .into_par_iter()
                    .map(|t| trial(t).map(|o| fold((0, 0), o)))
                    .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))
            }),
        }
    }
}

/// One point of an experiment grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellSpec {
    pub d: usize,
    pub k: usize,
    pub alpha: Option<f64>,
    pub classifier: Classifier,
    pub attack: AttackKind,
}

/// One output row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellRecord {
    pub d: usize,
    pub k: usize,
    pub alpha: Option<f64>,
    pub classifier: Classifier,
    pub attack: AttackKind,
    pub trials: usize,
    pub errors: Option<u64>,
    pub error_rate: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub revert_rate: Option<f64>,
    pub seed: u64,
    pub status: String,
    pub wall_time_s: f64,
}

impl CellRecord {
    fn failed(spec: &CellSpec, trials: usize, seed: u64, err: &Error) -> Self {
        CellRecord {
            d: spec.d,
            k: spec.k,
            alpha: spec.alpha,
            classifier: spec.classifier,
            attack: spec.attack,
            trials,
            errors: None,
            error_rate: None,
            ci_low: None,
            ci_high: None,
            revert_rate: None,
            seed,
            status: err.name().to_string(),
            wall_time_s: 0.0,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    /// Error rate of a successful cell.
    pub fn rate(&self) -> f64 {
        self.error_rate.unwrap_or(f64::NAN)
    }
}

fn attack_direction(label: Label) -> Direction {
    match label {
        Label::Pos => Direction::Minimize,
        Label::Neg => Direction::Maximize,
    }
}

/// Statistic the configured classifier thresholds at zero.
#[inline]
fn statistic(classifier: Classifier, scores: &[f64], k: usize) -> f64 {
    match classifier {
        Classifier::Ml => scores.iter().sum(),
        Classifier::Truncated => {
            let s = sorted_desc(scores);
            sum_range(&s, k, s.len() - k)
        }
    }
}

/// Runs one trial: uniform label, data, optional attack, classification.
/// Returns `(misclassified, reverted)`.
pub fn run_trial(
    instance: &ProblemInstance,
    spec: &CellSpec,
    cell_seed: u64,
    trial: u64,
) -> Result<(bool, bool)> {
    let mut stream = derive_stream(cell_seed, trial);
    let ds = generate(instance, LabelChoice::Uniform, &mut stream);
    let label = ds.label;
    let k = spec.k;
    let (stat, reverted) = match spec.attack {
        AttackKind::None => {
            let scores = loglik_transform(instance, &ds.samples)?.scores;
            (statistic(spec.classifier, &scores, k), false)
        }
        AttackKind::WorstCase => {
            let scores = loglik_transform(instance, &ds.samples)?.scores;
            let dir = attack_direction(label);
            let stat = match spec.classifier {
                Classifier::Ml => worst_case_sum(&scores, k, dir),
                Classifier::Truncated => worst_case_tsum_sorted(&sorted_desc(&scores), k, dir),
            };
            (stat, false)
        }
        AttackKind::Coupling => {
            let out = coupling_attack(instance, &ds, k, &mut stream);
            let scores = loglik_transform(instance, &out.perturbed)?.scores;
            (statistic(spec.classifier, &scores, k), out.reverted)
        }
    };
    Ok((decide(stat) != label, reverted))
}

/// Monte Carlo error estimate for one cell; trial `t` draws from the stream
/// `(seed, t)`.
pub fn run_cell(
    instance: &ProblemInstance,
    spec: &CellSpec,
    trials: usize,
    seed: u64,
    exec: &Executor,
) -> Result<CellRecord> {
    if spec.d != instance.d() {
        return Err(Error::InvalidInput(format!(
            "cell dimension {} does not match instance dimension {}",
            spec.d,
            instance.d()
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidInput("need at least one trial".into()));
    }
    if spec.classifier == Classifier::Truncated {
        check_budget(spec.k, spec.d)?;
    }
    if spec.k > spec.d {
        return Err(Error::BudgetTooLarge { k: spec.k, d: spec.d });
    }
    let start = Instant::now();
    let (errors, reverts) = exec.count(trials, |t| run_trial(instance, spec, seed, t))?;
    let (ci_low, ci_high) = wilson_interval(errors, trials as u64, CONFIDENCE);
    Ok(CellRecord {
        d: spec.d,
        k: spec.k,
        alpha: spec.alpha,
        classifier: spec.classifier,
        attack: spec.attack,
        trials,
        errors: Some(errors),
        error_rate: Some(errors as f64 / trials as f64),
        ci_low: Some(ci_low),
        ci_high: Some(ci_high),
        revert_rate: (spec.attack == AttackKind::Coupling).then(|| reverts as f64 / trials as f64),
        seed,
        status: "ok".into(),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Error of the maximum-likelihood classifier without an adversary.
pub fn estimate_standard_error(
    instance: &ProblemInstance,
    trials: usize,
    seed: u64,
    exec: &Executor,
) -> Result<CellRecord> {
    let spec = CellSpec {
        d: instance.d(),
        k: 0,
        alpha: None,
        classifier: Classifier::Ml,
        attack: AttackKind::None,
    };
    run_cell(instance, &spec, trials, seed, exec)
}

/// Error under a worst-case or coupling adversary with the given budget.
pub fn estimate_robust_error(
    instance: &ProblemInstance,
    classifier: Classifier,
    attack: AttackKind,
    budget: AttackBudget,
    trials: usize,
    seed: u64,
    exec: &Executor,
) -> Result<CellRecord> {
    if attack == AttackKind::None {
        return Err(Error::InvalidInput("robust error needs an attack".into()));
    }
    let spec = CellSpec {
        d: instance.d(),
        k: budget.k,
        alpha: budget.alpha,
        classifier,
        attack,
    };
    run_cell(instance, &spec, trials, seed, exec)
}

/// Echo of the configuration plus derived constants, stored with results.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub config: ExperimentConfig,
    pub fisher_information: f64,
    pub asymptotic_standard_error: f64,
    pub crate_version: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub provenance: Provenance,
    pub rows: Vec<CellRecord>,
}

/// Grid cells in output order: dimension ascending, then budget ascending,
/// then attacks in configuration order.
pub fn sweep_cells(config: &ExperimentConfig) -> Vec<(CellSpec, Option<Error>)> {
    let mut dims = config.dims.clone();
    dims.sort_unstable();
    dims.dedup();
    let mut cells = Vec::new();
    for &d in &dims {
        let budgets: Vec<Result<AttackBudget>> = if !config.alphas.is_empty() {
            let mut alphas = config.alphas.clone();
            alphas.sort_by(f64::total_cmp);
            alphas.dedup();
            alphas.into_iter().map(|a| budget_from_alpha(d, a)).collect()
        } else {
            let mut ks = config.ks.clone();
            ks.sort_unstable();
            ks.dedup();
            ks.into_iter().map(|k| Ok(AttackBudget::fixed(k))).collect()
        };
        for b in budgets {
            for &attack in &config.attacks {
                match &b {
                    Ok(b) => cells.push((
                        CellSpec {
                            d,
                            k: b.k,
                            alpha: b.alpha,
                            classifier: config.classifier,
                            attack,
                        },
                        None,
                    )),
                    Err(e) => cells.push((
                        CellSpec {
                            d,
                            k: 0,
                            alpha: None,
                            classifier: config.classifier,
                            attack,
                        },
                        Some(e.clone()),
                    )),
                }
            }
        }
    }
    cells
}

/// Full grid over dims x budgets x attacks. Cell `i` uses the seed
/// `derive_seed(master_seed, i)`; failing cells are recorded, not fatal.
pub fn phase_sweep(config: &ExperimentConfig, exec: &Executor) -> Result<ExperimentResult> {
    config.validate()?;
    let noise = Arc::new(ExpPolyNoise::new(&config.poly)?);
    let mut rows = Vec::new();
    for (i, (spec, pre_err)) in sweep_cells(config).into_iter().enumerate() {
        let seed = derive_seed(config.master_seed, i as u64);
        let outcome = match pre_err {
            Some(e) => Err(e),
            None => ProblemInstance::new(spec.d, config.c, noise.clone())
                .and_then(|inst| run_cell(&inst, &spec, config.trials, seed, exec)),
        };
        rows.push(outcome.unwrap_or_else(|e| CellRecord::failed(&spec, config.trials, seed, &e)));
    }
    let fisher = noise.fisher_information();
    Ok(ExperimentResult {
        provenance: Provenance {
            config: config.clone(),
            fisher_information: fisher,
            asymptotic_standard_error: crate::numerics::normal_upper_tail(
                config.c.abs() * fisher.sqrt(),
            ),
            crate_version: env!("CARGO_PKG_VERSION"),
        },
        rows,
    })
}
