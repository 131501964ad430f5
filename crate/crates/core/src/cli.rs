//! Command-line front end.
//!
//! Exit codes: `0` success, `2` bad arguments (the message names the flag),
//! `1` numerical failure (the message starts with the error name).

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::attack::{
    budget_from_alpha, coupling_attack, realize_worst_case, AttackBudget, AttackKind, Direction,
};
use crate::classify::{decide, loglik_transform, tsum, Classifier};
use crate::error::Error;
use crate::experiment::{
    estimate_robust_error, estimate_standard_error, phase_sweep, write_csv, write_json,
    CellRecord, ExperimentConfig, ExperimentResult, Executor, OutputFormat, Provenance,
    Thresholds,
};
use crate::model::{generate, LabelChoice, ProblemInstance};
use crate::noise::{audit_assumptions, parse_coefficients, ExpPolyNoise};
use crate::numerics::{derive_seed, derive_stream, normal_upper_tail};

#[derive(Debug, Parser)]
#[command(name = "l0lab", version, about = "Sparse-adversary classification laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print Fisher information, normalizer and truncation radius.
    Fisher(Common),
    /// Numerically audit the regularity conditions of the noise (JSON).
    Audit {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        zeta: Option<f64>,
        #[arg(long = "d-probe")]
        d_probe: Option<usize>,
    },
    /// Monte Carlo error of the maximum-likelihood classifier, no adversary.
    StandardError {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        d: Option<usize>,
    },
    /// Monte Carlo error under a worst-case or coupling adversary.
    Robust {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        d: Option<usize>,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        attack: Option<String>,
        #[arg(long)]
        classifier: Option<String>,
    },
    /// Grid over dimensions x budgets x attacks.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        dims: Option<String>,
        #[arg(long)]
        alphas: Option<String>,
        #[arg(long)]
        ks: Option<String>,
        /// Comma-separated list of attacks.
        #[arg(long)]
        attack: Option<String>,
        #[arg(long)]
        classifier: Option<String>,
    },
    /// Single-trial trace of the worst-case and coupling attacks.
    AttackDemo {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        d: Option<usize>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Coefficients b0,b1,...,bm of psi (lowest order first).
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    /// JSON file with default values; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BudgetArgs {
    #[arg(long, conflicts_with = "alpha")]
    k: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
}

/// Keys accepted in a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    poly: Option<Vec<f64>>,
    c: Option<f64>,
    seed: Option<u64>,
    master_seed: Option<u64>,
    trials: Option<usize>,
    out: Option<PathBuf>,
    format: Option<OutputFormat>,
    d: Option<usize>,
    dims: Option<Vec<usize>>,
    k: Option<usize>,
    alpha: Option<f64>,
    alphas: Option<Vec<f64>>,
    ks: Option<Vec<usize>>,
    attack: Option<AttackKind>,
    attacks: Option<Vec<AttackKind>>,
    classifier: Option<Classifier>,
    zeta: Option<f64>,
    d_probe: Option<usize>,
    thresholds: Option<Thresholds>,
}

#[derive(Debug)]
enum CliError {
    /// Bad argument; exit 2.
    Usage(String),
    /// Library failure; exit 1.
    Run(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Run(e.into())
    }
}

fn usage(flag: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("invalid value for --{flag}: {msg}"))
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Run(e)) => {
            eprintln!("error: {}: {e}", e.name());
            1
        }
    }
}

/// Flag values merged over an optional config file.
struct Resolved {
    file: FileConfig,
    noise_coeffs: Vec<f64>,
    c: f64,
    seed: u64,
    trials: Option<usize>,
    out: Option<PathBuf>,
    format: OutputFormat,
}

impl Resolved {
    fn new(common: &Common) -> Result<Self, CliError> {
        let file = match &common.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| usage("config", format!("{}: {e}", path.display())))?;
                serde_json::from_str::<FileConfig>(&text)
                    .map_err(|e| usage("config", format!("{}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let noise_coeffs = match &common.poly {
            Some(s) => parse_coefficients(s).map_err(|e| usage("poly", e))?,
            None => file.poly.clone().unwrap_or_else(|| vec![0.0, 0.0, -0.5]),
        };
        let c = common.c.or(file.c).unwrap_or(1.0);
        if !(c.is_finite() && c != 0.0) {
            return Err(usage("c", "must be finite and nonzero"));
        }
        let seed = common.seed.or(file.seed).or(file.master_seed).unwrap_or(0);
        let format = match &common.format {
            Some(s) => s.parse().map_err(|e| usage("format", e))?,
            None => file.format.unwrap_or_default(),
        };
        Ok(Resolved {
            trials: common.trials.or(file.trials),
            out: common.out.clone().or_else(|| file.out.clone()),
            file,
            noise_coeffs,
            c,
            seed,
            format,
        })
    }

    fn noise(&self) -> Result<Arc<ExpPolyNoise>, CliError> {
        Ok(Arc::new(ExpPolyNoise::new(&self.noise_coeffs)?))
    }

    fn trials(&self, default: usize) -> Result<usize, CliError> {
        match self.trials.unwrap_or(default) {
            0 => Err(usage("trials", "must be positive")),
            t => Ok(t),
        }
    }

    fn writer(&self) -> Result<Box<dyn Write>, CliError> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn config(&self, trials: usize) -> ExperimentConfig {
        ExperimentConfig {
            poly: self.noise_coeffs.clone(),
            c: self.c,
            trials,
            master_seed: self.seed,
            out: self.out.clone(),
            format: self.format,
            thresholds: self.file.thresholds.unwrap_or_default(),
            ..ExperimentConfig::default()
        }
    }
}

fn create(path: &Path) -> Result<File, CliError> {
    File::create(path).map_err(|e| usage("out", format!("{}: {e}", path.display())))
}

fn parse_list<T: std::str::FromStr>(flag: &str, s: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|t| t.trim().parse::<T>().map_err(|e| usage(flag, format!("{t:?}: {e}"))))
        .collect()
}

fn resolve_budget(
    budget: &BudgetArgs,
    file: &FileConfig,
    d: usize,
    default_k: usize,
) -> Result<AttackBudget, CliError> {
    if let Some(k) = budget.k {
        return Ok(AttackBudget::fixed(k));
    }
    if let Some(alpha) = budget.alpha {
        return budget_from_alpha(d, alpha).map_err(|e| usage("alpha", e));
    }
    match (file.k, file.alpha) {
        (Some(k), _) => Ok(AttackBudget::fixed(k)),
        (None, Some(a)) => budget_from_alpha(d, a).map_err(|e| usage("alpha", e)),
        (None, None) => Ok(AttackBudget::fixed(default_k)),
    }
}

fn emit_rows(
    r: &Resolved,
    trials: usize,
    rows: Vec<CellRecord>,
    noise: &ExpPolyNoise,
) -> Result<(), CliError> {
    let mut w = r.writer()?;
    match r.format {
        OutputFormat::Csv => write_csv(&mut w, &rows)?,
        OutputFormat::Json => {
            let result = ExperimentResult {
                provenance: Provenance {
                    config: r.config(trials),
                    fisher_information: noise.fisher_information(),
                    asymptotic_standard_error: normal_upper_tail(
                        r.c.abs() * noise.fisher_information().sqrt(),
                    ),
                    crate_version: env!("CARGO_PKG_VERSION"),
                },
                rows,
            };
            write_json(&mut w, &result)?
        }
    }
    w.flush()?;
    Ok(())
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Fisher(common) => {
            let r = Resolved::new(&common)?;
            let noise = r.noise()?;
            let mut w = r.writer()?;
            match r.format {
                OutputFormat::Json => {
                    serde_json::to_writer_pretty(&mut w, &noise.summary())
                        .map_err(|e| Error::Io(e.to_string()))?;
                    writeln!(w)?;
                }
                OutputFormat::Csv => {
                    writeln!(w, "I_q = {:.6}", noise.fisher_information())?;
                    writeln!(w, "A = {:.10}", noise.normalizer())?;
                    writeln!(w, "log_A = {:.10}", noise.log_normalizer())?;
                    writeln!(w, "R = {:.6}", noise.truncation_radius())?;
                }
            }
            w.flush()?;
            Ok(())
        }
        Command::Audit {
            common,
            zeta,
            d_probe,
        } => {
            let r = Resolved::new(&common)?;
            let zeta = zeta.or(r.file.zeta).unwrap_or(0.5);
            if !(zeta.is_finite() && zeta > 0.0) {
                return Err(usage("zeta", "must be positive"));
            }
            let d_probe = d_probe.or(r.file.d_probe).unwrap_or(4096);
            if d_probe < 3 {
                return Err(usage("d-probe", "must be at least 3"));
            }
            let noise = r.noise()?;
            let report = audit_assumptions(&noise, zeta, d_probe, r.trials(1000)?, r.seed)?;
            let mut w = r.writer()?;
            serde_json::to_writer_pretty(&mut w, &report).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(w)?;
            w.flush()?;
            Ok(())
        }
        Command::StandardError { common, d } => {
            let r = Resolved::new(&common)?;
            let d = d.or(r.file.d).unwrap_or(4096);
            if d == 0 {
                return Err(usage("d", "must be positive"));
            }
            let trials = r.trials(10_000)?;
            let noise = r.noise()?;
            let inst = ProblemInstance::new(d, r.c, noise.clone())?;
            let exec = Executor::from_env()?;
            let row = estimate_standard_error(&inst, trials, derive_seed(r.seed, 0), &exec)?;
            emit_rows(&r, trials, vec![row], &noise)
        }
        Command::Robust {
            common,
            d,
            budget,
            attack,
            classifier,
        } => {
            let r = Resolved::new(&common)?;
            let d = d.or(r.file.d).unwrap_or(4096);
            if d == 0 {
                return Err(usage("d", "must be positive"));
            }
            let attack = match attack {
                Some(s) => s.parse().map_err(|e| usage("attack", e))?,
                None => r.file.attack.unwrap_or(AttackKind::WorstCase),
            };
            if attack == AttackKind::None {
                return Err(usage("attack", "robust error needs worst_case or coupling"));
            }
            let classifier = match classifier {
                Some(s) => s.parse().map_err(|e| usage("classifier", e))?,
                None => r.file.classifier.unwrap_or(Classifier::Truncated),
            };
            let budget = resolve_budget(&budget, &r.file, d, 1)?;
            let trials = r.trials(10_000)?;
            let noise = r.noise()?;
            let inst = ProblemInstance::new(d, r.c, noise.clone())?;
            let exec = Executor::from_env()?;
            let row = estimate_robust_error(
                &inst,
                classifier,
                attack,
                budget,
                trials,
                derive_seed(r.seed, 0),
                &exec,
            )?;
            emit_rows(&r, trials, vec![row], &noise)
        }
        Command::Sweep {
            common,
            dims,
            alphas,
            ks,
            attack,
            classifier,
        } => {
            let r = Resolved::new(&common)?;
            let mut cfg = r.config(r.trials(10_000)?);
            cfg.dims = match dims {
                Some(s) => parse_list("dims", &s)?,
                None => r.file.dims.clone().unwrap_or_else(|| vec![1024, 4096]),
            };
            match (alphas, ks) {
                (Some(_), Some(_)) => return Err(usage("ks", "cannot be combined with --alphas")),
                (Some(a), None) => {
                    cfg.alphas = parse_list("alphas", &a)?;
                    cfg.ks.clear();
                }
                (None, Some(k)) => {
                    cfg.ks = parse_list("ks", &k)?;
                    cfg.alphas.clear();
                }
                (None, None) => {
                    cfg.alphas = r.file.alphas.clone().unwrap_or_default();
                    cfg.ks = r.file.ks.clone().unwrap_or_default();
                    if cfg.alphas.is_empty() && cfg.ks.is_empty() {
                        cfg.alphas = vec![0.2, 0.5, 0.8];
                    }
                }
            }
            cfg.attacks = match attack {
                Some(s) => parse_list("attack", &s)?,
                None => r
                    .file
                    .attacks
                    .clone()
                    .or_else(|| r.file.attack.map(|a| vec![a]))
                    .unwrap_or_else(|| vec![AttackKind::Coupling]),
            };
            cfg.classifier = match classifier {
                Some(s) => s.parse().map_err(|e| usage("classifier", e))?,
                None => r.file.classifier.unwrap_or(Classifier::Truncated),
            };
            if let Err(e) = cfg.validate() {
                return Err(CliError::Usage(e.to_string()));
            }
            let exec = Executor::from_env()?;
            let result = phase_sweep(&cfg, &exec)?;
            let mut w = r.writer()?;
            match r.format {
                OutputFormat::Csv => write_csv(&mut w, &result.rows)?,
                OutputFormat::Json => write_json(&mut w, &result)?,
            }
            w.flush()?;
            Ok(())
        }
        Command::AttackDemo { common, d, budget } => {
            let r = Resolved::new(&common)?;
            let d = d.or(r.file.d).unwrap_or(16);
            let budget = resolve_budget(&budget, &r.file, d, 1)?;
            let noise = r.noise()?;
            let inst = ProblemInstance::new(d, r.c, noise)?;
            let trace = attack_trace(&inst, budget.k, r.seed)?;
            let mut w = r.writer()?;
            match r.format {
                OutputFormat::Json => {
                    serde_json::to_writer_pretty(&mut w, &trace)
                        .map_err(|e| Error::Io(e.to_string()))?;
                    writeln!(w)?;
                }
                OutputFormat::Csv => trace.write_text(&mut w)?,
            }
            w.flush()?;
            Ok(())
        }
    }
}

/// Everything `attack-demo` shows for one trial.
#[derive(Debug, Serialize)]
pub struct AttackTrace {
    pub d: usize,
    pub k: usize,
    pub mu_d: f64,
    pub label: String,
    pub samples: Vec<f64>,
    pub scores: Vec<f64>,
    pub tsum_before: f64,
    pub decision_before: String,
    pub worst_case_changed: Vec<usize>,
    pub worst_case_samples: Vec<f64>,
    pub worst_case_scores: Vec<f64>,
    pub tsum_after_worst_case: f64,
    pub decision_after_worst_case: String,
    pub coupling_mismatches: usize,
    pub coupling_reverted: bool,
    pub coupling_changed: Vec<usize>,
    pub tsum_after_coupling: f64,
    pub decision_after_coupling: String,
}

/// Generates trial 0 of `seed` and attacks it both ways with budget `k`
/// against the truncated classifier.
pub fn attack_trace(inst: &ProblemInstance, k: usize, seed: u64) -> crate::Result<AttackTrace> {
    let mut stream = derive_stream(seed, 0);
    let ds = generate(inst, LabelChoice::Uniform, &mut stream);
    let scores = loglik_transform(inst, &ds.samples)?.scores;
    let before = tsum(&scores, k)?;
    let dir = match ds.label {
        crate::model::Label::Pos => Direction::Minimize,
        crate::model::Label::Neg => Direction::Maximize,
    };
    let wc = realize_worst_case(inst, &ds.samples, k, dir)?;
    let wc_scores = loglik_transform(inst, &wc.perturbed)?.scores;
    let after = tsum(&wc_scores, k)?;
    let cp = coupling_attack(inst, &ds, k, &mut stream);
    let cp_after = tsum(&loglik_transform(inst, &cp.perturbed)?.scores, k)?;
    Ok(AttackTrace {
        d: inst.d(),
        k,
        mu_d: inst.mu_d(),
        label: ds.label.to_string(),
        samples: ds.samples,
        scores,
        tsum_before: before,
        decision_before: decide(before).to_string(),
        worst_case_changed: wc.changed_indices,
        worst_case_samples: wc.perturbed,
        worst_case_scores: wc_scores,
        tsum_after_worst_case: after,
        decision_after_worst_case: decide(after).to_string(),
        coupling_mismatches: cp.mismatches,
        coupling_reverted: cp.reverted,
        coupling_changed: cp.changed_indices,
        tsum_after_coupling: cp_after,
        decision_after_coupling: decide(cp_after).to_string(),
    })
}

impl AttackTrace {
    fn write_text<W: Write>(&self, w: &mut W) -> io::Result<()> {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ");
        writeln!(w, "label {}  d {}  k {}  mu_d {:.6}", self.label, self.d, self.k, self.mu_d)?;
        writeln!(w, "samples: [{}]", list(&self.samples))?;
        writeln!(w, "scores:  [{}]", list(&self.scores))?;
        writeln!(w, "truncated sum: {:.6} -> decision {}", self.tsum_before, self.decision_before)?;
        writeln!(w, "worst case: changed {:?}", self.worst_case_changed)?;
        writeln!(w, "  samples: [{}]", list(&self.worst_case_samples))?;
        writeln!(w, "  scores:  [{}]", list(&self.worst_case_scores))?;
        writeln!(
            w,
            "  truncated sum: {:.6} -> decision {}",
            self.tsum_after_worst_case, self.decision_after_worst_case
        )?;
        writeln!(
            w,
            "coupling: {} mismatches, reverted {}, changed {:?}",
            self.coupling_mismatches, self.coupling_reverted, self.coupling_changed
        )?;
        writeln!(
            w,
            "  truncated sum: {:.6} -> decision {}",
            self.tsum_after_coupling, self.decision_after_coupling
        )
    }
}
