//! Tabular results and their CSV / JSON serialization.

use std::io::Write;

use serde_json::{json, Map, Value};

use crate::config::Format;
use crate::error::CliResult;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(n) => Some(*n as f64),
            Cell::Text(_) => None,
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => csv_quote(s),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(_) => Value::Null,
            Cell::Int(n) => json!(n),
            Cell::Text(s) => json!(s),
        }
    }
}

/// Twelve significant digits in scientific notation.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        x.to_string()
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: impl Into<String>, unit: impl Into<String>) -> Self {
        Self { name: name.into(), unit: unit.into() }
    }

    fn header(&self) -> String {
        if self.unit.is_empty() {
            self.name.clone()
        } else {
            format!("{} [{}]", self.name, self.unit)
        }
    }
}

/// Which columns to draw when `--plot` is given.
#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub x: usize,
    pub x_scale: f64,
    pub x_label: String,
    pub series: Vec<usize>,
    pub y_label: String,
    pub log_x: bool,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub meta: Vec<(String, String)>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    pub plot: Option<PlotSpec>,
}

impl Report {
    pub fn new(command: &str, meta: Vec<(String, String)>, columns: Vec<Column>) -> Self {
        Self { command: command.to_string(), meta, columns, rows: Vec::new(), plot: None }
    }

    pub fn write_csv(&self, w: &mut dyn Write) -> std::io::Result<()> {
        writeln!(w, "# casimir-cyl {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(w, "# command = {}", self.command)?;
        for (k, v) in &self.meta {
            writeln!(w, "# {k} = {v}")?;
        }
        let header: Vec<String> = self.columns.iter().map(|c| csv_quote(&c.header())).collect();
        writeln!(w, "{}", header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let config: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let columns: Vec<Value> =
            self.columns.iter().map(|c| json!({ "name": c.name, "unit": c.unit })).collect();
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
        json!({ "command": self.command, "config": config, "columns": columns, "rows": rows })
    }

    pub fn write(&self, format: Format, w: &mut dyn Write) -> CliResult<()> {
        match format {
            Format::Csv => self.write_csv(w)?,
            Format::Json => {
                serde_json::to_writer_pretty(&mut *w, &self.to_json()).map_err(std::io::Error::from)?;
                writeln!(w)?;
            }
        }
        Ok(())
    }
}
