//! CSV and JSON table emission.
//!
//! Numbers render with 17 significant digits in scientific notation, which
//! round-trips every f64 and keeps output byte-stable across runs. JSON
//! mirrors the CSV columns as one array per column; NaN markers become null.

use std::io::Write;

use serde_json::{json, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(CliError::config(format!(
                "format must be csv or json, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Fixed 17-significant-digit decimal rendering.
pub fn format_num(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn cell_csv(cell: &Cell) -> String {
    match cell {
        Cell::Int(v) => v.to_string(),
        Cell::Num(v) => format_num(*v),
        Cell::Text(v) => v.clone(),
    }
}

fn cell_json(cell: &Cell) -> Value {
    match cell {
        Cell::Int(v) => json!(v),
        Cell::Num(v) if v.is_nan() => Value::Null,
        Cell::Num(v) => json!(v),
        Cell::Text(v) => json!(v),
    }
}

pub fn write_table(table: &Table, format: Format, out: Option<&str>) -> Result<(), CliError> {
    let rendered = match format {
        Format::Csv => {
            let mut text = table.columns.join(",");
            text.push('\n');
            for row in &table.rows {
                let line: Vec<String> = row.iter().map(cell_csv).collect();
                text.push_str(&line.join(","));
                text.push('\n');
            }
            text
        }
        Format::Json => {
            let mut object = serde_json::Map::new();
            for (i, column) in table.columns.iter().enumerate() {
                let values: Vec<Value> = table.rows.iter().map(|row| cell_json(&row[i])).collect();
                object.insert((*column).to_string(), Value::Array(values));
            }
            let mut text = serde_json::to_string_pretty(&Value::Object(object))
                .expect("tables serialize");
            text.push('\n');
            text
        }
    };
    match out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| CliError::config(format!("cannot write {path}: {e}"))),
        None => {
            std::io::stdout()
                .write_all(rendered.as_bytes())
                .map_err(|e| CliError::config(format!("cannot write to stdout: {e}")))
        }
    }
}
