//! Report emission: pretty JSON envelope plus one CSV table per run.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub seed: u64,
    pub config_hash: &'a str,
    pub config: &'a crate::config::RunConfig,
    pub result: &'a T,
}

/// CSV table with string cells; numbers go through [`num`].
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Table cell for a number. Non-finite values become `inf` / `-inf`; an undefined (NaN)
/// residual is reported as `inf`.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        "inf".to_string()
    }
}

pub fn nums(v: &[f64]) -> String {
    v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(";")
}

pub fn write_json<T: Serialize>(path: &Path, env: &Envelope<'_, T>) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(env)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_csv(path: &Path, table: &Table) -> anyhow::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .with_context(|| format!("writing {}", path.display()))?;
    w.write_record(&table.header)?;
    for r in &table.rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `<stem>.json` and `<stem>.csv` under `dir` and returns both paths.
pub fn emit<T: Serialize>(dir: &Path, stem: &str, env: &Envelope<'_, T>, table: &Table) -> anyhow::Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let json = dir.join(format!("{stem}.json"));
    let csv = dir.join(format!("{stem}.csv"));
    write_json(&json, env)?;
    write_csv(&csv, table)?;
    Ok((json, csv))
}
