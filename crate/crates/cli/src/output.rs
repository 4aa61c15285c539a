//! Tabular output: one row per input point, CSV or JSON, identical keys on every row.

use anyhow::{Context, Result};
use serde_json::{Map, Value};
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // 17 significant digits round-trip every f64
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(v) => serde_json::Number::from_f64(*v)
                .map(Value::Number)
                .unwrap_or(Value::Null),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map(Into::into).unwrap_or(Cell::Empty)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Row(pub Vec<(&'static str, Cell)>);

impl Row {
    pub fn new() -> Self {
        Row(Vec::new())
    }

    pub fn push(&mut self, key: &'static str, cell: impl Into<Cell>) -> &mut Self {
        self.0.push((key, cell.into()));
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn render(rows: &[Row], format: Format) -> Result<Vec<u8>> {
    if let Some(first) = rows.first() {
        let keys: Vec<_> = first.0.iter().map(|(k, _)| *k).collect();
        for r in rows {
            let these: Vec<_> = r.0.iter().map(|(k, _)| *k).collect();
            anyhow::ensure!(these == keys, "internal error: rows with differing columns");
        }
    }
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            if let Some(first) = rows.first() {
                w.write_record(first.0.iter().map(|(k, _)| *k))?;
            }
            for r in rows {
                w.write_record(r.0.iter().map(|(_, c)| c.csv()))?;
            }
            Ok(w.into_inner().map_err(|e| anyhow::anyhow!(e.to_string()))?)
        }
        Format::Json => {
            let arr: Vec<Value> = rows
                .iter()
                .map(|r| {
                    Value::Object(
                        r.0.iter()
                            .map(|(k, c)| (k.to_string(), c.json()))
                            .collect::<Map<_, _>>(),
                    )
                })
                .collect();
            let mut out = serde_json::to_vec_pretty(&arr)?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

pub fn write(rows: &[Row], format: Format, out: Option<&Path>) -> Result<()> {
    let bytes = render(rows, format)?;
    match out {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(&bytes)?;
            so.flush()?;
            Ok(())
        }
    }
}
