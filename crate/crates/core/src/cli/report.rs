//! JSON and CSV writers for suite reports, search results and sweeps.
//!
//! CSV numbers are written with 17 significant digits so that every double
//! round-trips. Columns:
//!
//! * verify: `cell,lemma,dim,p,q,theta,alpha,trial,trial_seed,block_dims,lhs,rhs_structural,constant,ratio,verdict,identity_residual`
//! * sweep: `p,q,best_ratio,seed,iters`
//! * search: `restart,iteration,ratio` (the improvement history)

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::lemmas::SuiteReport;
use crate::record::{CheckRecord, Constant};
use crate::search::{SearchResult, SweepRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    /// `csv` for a `.csv` extension, JSON otherwise.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        }
    }
}

/// 17 significant digits; empty for missing values.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub type WriteResult = std::result::Result<(), Box<dyn std::error::Error>>;

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> WriteResult {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn record_row(r: &CheckRecord) -> Vec<String> {
    let d = r.digest.as_ref();
    vec![
        d.map(|d| d.cell.to_string()).unwrap_or_default(),
        r.lemma.name().to_string(),
        d.map(|d| d.dims.iter().sum::<usize>().to_string()).unwrap_or_default(),
        opt(r.params.p),
        opt(r.params.q),
        opt(r.params.theta),
        opt(r.params.alpha),
        d.map(|d| d.trial.to_string()).unwrap_or_default(),
        d.map(|d| d.trial_seed.to_string()).unwrap_or_default(),
        d.map(|d| d.dims.iter().map(usize::to_string).collect::<Vec<_>>().join("+")).unwrap_or_default(),
        num(r.lhs),
        num(r.rhs_structural),
        match r.constant {
            Constant::Explicit(c) => num(c),
            Constant::Empirical => "empirical".into(),
        },
        opt(r.ratio),
        r.verdict.name().to_string(),
        opt(r.identity_residual),
    ]
}

pub const VERIFY_COLUMNS: [&str; 16] = [
    "cell",
    "lemma",
    "dim",
    "p",
    "q",
    "theta",
    "alpha",
    "trial",
    "trial_seed",
    "block_dims",
    "lhs",
    "rhs_structural",
    "constant",
    "ratio",
    "verdict",
    "identity_residual",
];

pub fn write_suite(path: &Path, format: Format, report: &SuiteReport) -> WriteResult {
    match format {
        Format::Json => write_json(path, report),
        Format::Csv => {
            let mut w = csv::Writer::from_path(path)?;
            w.write_record(VERIFY_COLUMNS)?;
            for r in &report.records {
                w.write_record(record_row(r))?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

pub const SWEEP_COLUMNS: [&str; 5] = ["p", "q", "best_ratio", "seed", "iters"];

pub fn write_sweep(path: &Path, format: Format, rows: &[SweepRow]) -> WriteResult {
    match format {
        Format::Json => write_json(path, &rows),
        Format::Csv => {
            let mut w = csv::Writer::from_path(path)?;
            w.write_record(SWEEP_COLUMNS)?;
            for r in rows {
                w.write_record([num(r.p), num(r.q), num(r.best_ratio), r.seed.to_string(), r.iters.to_string()])?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

pub fn write_search(path: &Path, format: Format, res: &SearchResult) -> WriteResult {
    match format {
        Format::Json => write_json(path, res),
        Format::Csv => {
            let mut w = csv::Writer::from_path(path)?;
            w.write_record(["restart", "iteration", "ratio"])?;
            for h in &res.history {
                w.write_record([h.restart.to_string(), h.iteration.to_string(), num(h.ratio)])?;
            }
            w.flush()?;
            Ok(())
        }
    }
}
