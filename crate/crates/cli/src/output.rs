//! Tables and their CSV/JSON serialization.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// Exact integer, kept as its decimal digits.
    Int(String),
    Real(f64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v.to_string())
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v.to_string())
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(s) | Cell::Text(s) => s.clone(),
            Cell::Real(v) => format_real(*v),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(s) | Cell::Text(s) => Value::String(s.clone()),
            Cell::Real(v) if v.is_finite() => json!(v),
            Cell::Real(v) => Value::String(format_real(*v)),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Metadata written with every run.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    /// The claim the subcommand probes.
    pub anchor: String,
    pub seed: u64,
    pub format: Format,
    pub parameters: BTreeMap<String, Value>,
    pub results: BTreeMap<String, Value>,
    pub checks: Vec<CheckOutcome>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_secs: Option<f64>,
}

pub struct Report {
    pub table: Table,
    /// Extra top-level JSON members.
    pub extra: BTreeMap<String, Value>,
    pub manifest: Manifest,
}

fn csv_bytes(table: &Table) -> Result<Vec<u8>, String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(&table.columns).map_err(|e| e.to_string())?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::text)).map_err(|e| e.to_string())?;
    }
    w.into_inner().map_err(|e| e.to_string())
}

fn json_bytes(report: &Report) -> Result<Vec<u8>, String> {
    let mut doc = serde_json::Map::new();
    doc.insert("manifest".into(), serde_json::to_value(&report.manifest).map_err(|e| e.to_string())?);
    doc.insert("columns".into(), json!(report.table.columns));
    doc.insert(
        "rows".into(),
        Value::Array(
            report
                .table
                .rows
                .iter()
                .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                .collect(),
        ),
    );
    for (k, v) in &report.extra {
        doc.insert(k.clone(), v.clone());
    }
    let mut out = serde_json::to_vec_pretty(&Value::Object(doc)).map_err(|e| e.to_string())?;
    out.push(b'\n');
    Ok(out)
}

/// Resolves `--out`: a directory receives `<subcommand>.<ext>`.
pub fn resolve_path(out: &Path, subcommand: &str, format: Format) -> PathBuf {
    if out.is_dir() {
        out.join(format!("{subcommand}.{}", format.extension()))
    } else {
        out.to_path_buf()
    }
}

/// Writes the report. CSV goes with a `<path>.manifest.json` sidecar; on
/// standard output the CSV manifest goes to standard error.
pub fn emit(report: &Report, out: Option<&Path>) -> Result<(), String> {
    if report.table.rows.is_empty() {
        return Err("refusing to emit an empty table".into());
    }
    let format = report.manifest.format;
    let body = match format {
        Format::Csv => csv_bytes(&report.table)?,
        Format::Json => json_bytes(report)?,
    };
    let manifest = || -> Result<Vec<u8>, String> {
        let mut m = serde_json::to_vec_pretty(&report.manifest).map_err(|e| e.to_string())?;
        m.push(b'\n');
        Ok(m)
    };
    match out {
        Some(path) => {
            let path = resolve_path(path, &report.manifest.subcommand, format);
            fs::write(&path, body).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            if format == Format::Csv {
                let mut side = path.clone().into_os_string();
                side.push(".manifest.json");
                fs::write(&side, manifest()?)
                    .map_err(|e| format!("cannot write {}: {e}", Path::new(&side).display()))?;
            }
        }
        None => {
            std::io::stdout().write_all(&body).map_err(|e| e.to_string())?;
            if format == Format::Csv {
                std::io::stderr().write_all(&manifest()?).map_err(|e| e.to_string())?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 6.02e23, -2.5, 1e-7] {
            assert_eq!(format_real(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_real(1.0), "1.0");
    }

    #[test]
    fn csv_has_header_and_quotes() {
        let mut t = Table::new(&["name", "value"]);
        t.push(vec!["a,b".into(), 0.5.into()]);
        let s = String::from_utf8(csv_bytes(&t).unwrap()).unwrap();
        assert_eq!(s, "name,value\n\"a,b\",0.5\n");
    }
}
