use std::io::Write;

use super::runner::{CellRecord, ExperimentResult};
use crate::error::Result;

pub const CSV_HEADER: &str =
    "d,k,alpha,classifier,attack,trials,errors,error_rate,ci_low,ci_high,revert_rate,seed,status";

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One CSV line (no trailing newline). Wall time is deliberately absent so
/// that reruns produce identical bytes.
pub fn csv_row(r: &CellRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.d,
        r.k,
        opt(r.alpha),
        r.classifier,
        r.attack,
        r.trials,
        opt(r.errors),
        opt(r.error_rate),
        opt(r.ci_low),
        opt(r.ci_high),
        opt(r.revert_rate),
        r.seed,
        r.status
    )
}

pub fn write_csv<W: Write>(mut out: W, rows: &[CellRecord]) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", csv_row(r))?;
    }
    Ok(())
}

pub fn write_json<W: Write>(mut out: W, result: &ExperimentResult) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, result)
        .map_err(|e| crate::error::Error::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}
