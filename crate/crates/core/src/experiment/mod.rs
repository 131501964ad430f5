//! Monte Carlo estimation of standard and robust errors, budget sweeps and
//! their CSV/JSON reports.
//!
//! Every random draw of trial `t` in a cell comes from the stream
//! `(cell_seed, t)`, and cells get seeds derived from the master seed and
//! their grid position. Worker count therefore never changes a result.

mod config;
mod report;
mod runner;
mod wilson;

pub use config::{ExperimentConfig, OutputFormat, Thresholds, MIN_TRIALS};
pub use report::{csv_row, write_csv, write_json, CSV_HEADER};
pub use runner::{
    estimate_robust_error, estimate_standard_error, phase_sweep, run_cell, run_trial,
    sweep_cells, CellRecord, CellSpec, ExperimentResult, Executor, Provenance, WORKERS_ENV,
};
pub use wilson::wilson_interval;
