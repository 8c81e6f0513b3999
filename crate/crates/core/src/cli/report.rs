use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::verify::CheckRecord;

use super::{CliError, RunConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// One self-describing output line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub schema_version: u32,
    pub command: String,
    pub config_hash: String,
    pub config: RunConfig,
    pub records: Vec<Value>,
    /// Seconds; excluded from reproducibility comparisons with `runtime_ms`.
    pub wall_time: f64,
}

impl ReportRecord {
    pub fn new(command: &str, config: &RunConfig, records: Vec<Value>, wall_time: f64) -> Self {
        let mut config = config.clone();
        config.out = None;
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config_hash: config.hash(),
            config,
            records,
            wall_time,
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn write_jsonl(path: &Path, reports: &[ReportRecord]) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    for r in reports {
        let line = serde_json::to_string(r).expect("reports serialize");
        writeln!(w, "{line}").map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// `<out>.csv` beside the JSONL file.
pub fn csv_path(out: &Path) -> PathBuf {
    out.with_extension("csv")
}

/// One row per asserted bound, or per observation for report-only records.
pub fn write_csv(path: &Path, records: &[CheckRecord]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let err = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    w.write_record(["check_id", "case", "verdict", "name", "value", "lower", "upper", "runtime_ms"]).map_err(err)?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    for (i, r) in records.iter().enumerate() {
        let verdict = serde_json::to_value(r.verdict).expect("verdict serializes");
        let verdict = verdict.as_str().unwrap_or_default().to_string();
        let rows: Vec<(String, f64, Option<f64>, Option<f64>)> = if r.bounds.is_empty() {
            r.observed.iter().map(|o| (o.name.clone(), o.value, None, None)).collect()
        } else {
            r.bounds.iter().map(|b| (b.name.clone(), b.value, b.lower, b.upper)).collect()
        };
        for (name, value, lo, hi) in rows {
            w.write_record([
                r.check_id.clone(),
                i.to_string(),
                verdict.clone(),
                name,
                value.to_string(),
                opt(lo),
                opt(hi),
                format!("{:.1}", r.runtime_ms),
            ])
            .map_err(err)?;
        }
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Right-aligned numeric columns under left-aligned headers.
pub fn format_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let head: Vec<String> = headers.iter().zip(&widths).map(|(h, w)| format!("{h:<w$}")).collect();
    out.push_str(head.join("  ").trim_end());
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

pub fn format_matrix(rows: &[Vec<f64>]) -> String {
    let cells: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|v| format!("{v:.6}")).collect()).collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(0);
    cells
        .iter()
        .map(|r| r.iter().map(|c| format!("{c:>width$}")).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("\n")
}
