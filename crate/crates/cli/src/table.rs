//! Tabular artifacts and their CSV and JSON encodings.

use std::io::Write;

use serde_json::{json, Map, Value};

use crate::config::Format;
use crate::CliError;

/// Bumped whenever columns or the JSON layout change.
pub const ARTIFACT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Bool(bool),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

/// Shortest representation that parses back to the same f64.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Bool(v) => v.to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            // Non-finite values become null.
            Cell::Float(v) => json!(v),
            Cell::Bool(v) => json!(v),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Scalar results: the JSON `meta.summary` object, and stderr lines for CSV.
    pub summary: Vec<(&'static str, Cell)>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new(), summary: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &'static str, value: impl Into<Cell>) {
        self.summary.push((key, value.into()));
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns).map_err(io_error)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv)).map_err(io_error)?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn to_json(&self, command: &str, config: Value, dt: f64) -> Value {
        let mut summary = Map::new();
        for (k, v) in &self.summary {
            summary.insert((*k).to_string(), v.to_json());
        }
        let data: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::to_json).collect()))
            .collect();
        json!({
            "meta": {
                "command": command,
                "artifact_version": ARTIFACT_VERSION,
                "version": env!("CARGO_PKG_VERSION"),
                "dt": dt,
                "config": config,
                "summary": summary,
            },
            "columns": self.columns,
            "data": data,
        })
    }

    pub fn emit<W: Write>(
        &self,
        mut out: W,
        format: Format,
        command: &str,
        config: Value,
        dt: f64,
    ) -> Result<(), CliError> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => {
                let v = self.to_json(command, config, dt);
                serde_json::to_writer_pretty(&mut out, &v).map_err(|e| CliError::Io(e.to_string()))?;
                out.write_all(b"\n").map_err(|e| CliError::Io(e.to_string()))
            }
        }
    }
}

fn io_error(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}
