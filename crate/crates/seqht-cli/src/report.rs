use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            // -0.0000 and 0.0000 must print the same for stable diffs.
            Cell::Float(f) => {
                let s = format!("{f:.4}");
                if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
                    s.trim_start_matches('-').to_owned()
                } else {
                    s
                }
            }
            Cell::Text(t) => t.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(f) => json!(f),
            Cell::Text(t) => json!(t),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn with_columns(name: &str, columns: Vec<String>) -> Self {
        Self { name: name.into(), columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// What a subcommand produces: summary scalars plus tables.
#[derive(Debug, Default)]
pub struct Report {
    pub summary: Map<String, Value>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn set(&mut self, key: &str, v: impl Serialize) {
        self.summary.insert(key.into(), serde_json::to_value(v).expect("serializable"));
    }
}

fn header_value(v: &Value) -> String {
    match v {
        Value::Null => "none".into(),
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(header_value).collect::<Vec<_>>().join(","),
        other => other.to_string(),
    }
}

pub fn render(cfg: &RunConfig, report: &Report) -> anyhow::Result<Vec<u8>> {
    let config = serde_json::to_value(cfg)?;
    let mut out = Vec::new();
    match cfg.format {
        Format::Json => {
            let mut top = Map::new();
            top.insert("command".into(), json!(cfg.command));
            top.insert("config".into(), config);
            top.insert("warnings".into(), json!(cfg.warnings));
            for (k, v) in &report.summary {
                top.insert(k.clone(), v.clone());
            }
            let mut tables = Map::new();
            for t in &report.tables {
                let rows: Vec<Value> = t
                    .rows
                    .iter()
                    .map(|r| Value::Object(t.columns.iter().cloned().zip(r.iter().map(Cell::json)).collect()))
                    .collect();
                tables.insert(t.name.clone(), Value::Array(rows));
            }
            if !tables.is_empty() {
                top.insert("tables".into(), Value::Object(tables));
            }
            serde_json::to_writer_pretty(&mut out, &Value::Object(top))?;
            out.push(b'\n');
        }
        Format::Csv => {
            writeln!(out, "# seqht {}", cfg.command)?;
            if let Value::Object(m) = &config {
                for (k, v) in m {
                    writeln!(out, "# {k} = {}", header_value(v))?;
                }
            }
            for w in &cfg.warnings {
                writeln!(out, "# warning: {w}")?;
            }
            for (k, v) in &report.summary {
                let v = match v {
                    Value::Number(n) => n.as_f64().map_or_else(|| n.to_string(), |f| Cell::Float(f).csv()),
                    other => header_value(other),
                };
                writeln!(out, "# {k} = {v}")?;
            }
            for (i, t) in report.tables.iter().enumerate() {
                if i > 0 {
                    writeln!(out)?;
                }
                if report.tables.len() > 1 {
                    writeln!(out, "# table: {}", t.name)?;
                }
                let mut w = csv::Writer::from_writer(&mut out);
                w.write_record(&t.columns)?;
                for r in &t.rows {
                    w.write_record(r.iter().map(Cell::csv))?;
                }
                w.flush()?;
            }
        }
    }
    Ok(out)
}
