//! Result rows and the versioned CSV format shared with the plotting side.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

pub const COLUMNS: [&str; 16] = [
    "row_kind",
    "experiment",
    "protocol",
    "recipe",
    "trial",
    "seed",
    "n",
    "t",
    "n1",
    "n2",
    "lambda",
    "estimate",
    "truth",
    "abs_error",
    "stddev",
    "runtime_ms",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    Trial,
    /// Aggregate over the trials of one grid point: mean estimate, mean
    /// absolute error and the across-seed standard deviation of the estimate.
    Summary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub row_kind: RowKind,
    pub experiment: String,
    pub protocol: String,
    pub recipe: String,
    pub trial: Option<u64>,
    pub seed: Option<u64>,
    pub n: usize,
    pub t: Option<usize>,
    pub n1: Option<usize>,
    pub n2: Option<u64>,
    pub lambda: Option<f64>,
    pub estimate: Option<f64>,
    pub truth: Option<f64>,
    pub abs_error: Option<f64>,
    pub stddev: Option<f64>,
    pub runtime_ms: Option<f64>,
}

impl ResultRow {
    /// Summary row over trial rows of one grid point; copies the grid fields
    /// from the first row.
    pub fn summarize(trials: &[ResultRow]) -> ResultRow {
        let first = &trials[0];
        let est: Vec<f64> = trials.iter().filter_map(|r| r.estimate).collect();
        let err: Vec<f64> = trials.iter().filter_map(|r| r.abs_error).collect();
        let runtime: f64 = trials.iter().filter_map(|r| r.runtime_ms).sum();
        ResultRow {
            row_kind: RowKind::Summary,
            trial: None,
            seed: None,
            estimate: mean(&est),
            abs_error: mean(&err),
            stddev: std_dev(&est),
            runtime_ms: Some(runtime),
            ..first.clone()
        }
    }
}

pub fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Sample standard deviation (N - 1 denominator).
pub fn std_dev(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    Some((xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt())
}

pub fn write_csv<W: Write>(mut w: W, rows: &[ResultRow]) -> Result<()> {
    writeln!(w, "#schema={SCHEMA_VERSION}")?;
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    out.write_record(COLUMNS)?;
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn to_csv_string(rows: &[ResultRow]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).expect("in-memory write");
    String::from_utf8(buf).expect("utf-8")
}

/// Parses a results file; rejects a missing or unknown `#schema=` line and
/// headers that differ from `COLUMNS`.
pub fn read_csv<R: BufRead>(mut r: R) -> Result<Vec<ResultRow>> {
    let mut first = String::new();
    r.read_line(&mut first)?;
    let version = first
        .trim_end()
        .strip_prefix("#schema=")
        .ok_or_else(|| CliError::Schema(format!("missing #schema line, found {:?}", first.trim_end())))?;
    if version != SCHEMA_VERSION.to_string() {
        return Err(CliError::Schema(format!("version {version}, expected {SCHEMA_VERSION}")));
    }
    let mut rd = csv::Reader::from_reader(r);
    let headers = rd.headers()?.clone();
    if headers.iter().ne(COLUMNS) {
        return Err(CliError::Schema(format!("unexpected columns {:?}", headers.iter().collect::<Vec<_>>())));
    }
    rd.deserialize().map(|row| row.map_err(CliError::from)).collect()
}

/// SHA-256 of the CSV rendering with the runtime column blanked.
pub fn digest(rows: &[ResultRow]) -> String {
    let stripped: Vec<ResultRow> = rows.iter().map(|r| ResultRow { runtime_ms: None, ..r.clone() }).collect();
    hex::encode(Sha256::digest(to_csv_string(&stripped).as_bytes()))
}
