//! Tabular output in CSV or JSON.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use dicke_witness::Rational;
use serde_json::{json, Map, Value};

/// Bumped whenever a column set changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Exact(Option<Rational>),
    Text(String),
    Bool(bool),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
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

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<Option<Rational>> for Cell {
    fn from(v: Option<Rational>) -> Self {
        Cell::Exact(v)
    }
}

pub fn rational_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn float_string(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(x) => float_string(*x),
            Cell::Exact(Some(q)) => rational_string(q),
            Cell::Exact(None) => String::new(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(x) => json!(x),
            Cell::Exact(Some(q)) => json!(rational_string(q)),
            Cell::Exact(None) => Value::Null,
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub schema: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub seed: Option<u64>,
    /// Extra `key: value` metadata (e.g. a verification verdict).
    pub notes: Vec<(&'static str, String)>,
}

impl Table {
    pub fn new(schema: &'static str, columns: &[&'static str]) -> Self {
        Self {
            schema,
            columns: columns.to_vec(),
            rows: Vec::new(),
            seed: None,
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, command: &str) -> String {
        match format {
            Format::Csv => self.to_csv(command),
            Format::Json => self.to_json(command),
        }
    }

    fn to_csv(&self, command: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# dicke-witness {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "# schema: {} v{SCHEMA_VERSION}", self.schema);
        let _ = writeln!(out, "# command: {command}");
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "# seed: {seed}");
        }
        for (k, v) in &self.notes {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self, command: &str) -> String {
        let mut meta = Map::new();
        meta.insert("tool".into(), json!("dicke-witness"));
        meta.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        meta.insert("schema".into(), json!(self.schema));
        meta.insert("schema_version".into(), json!(SCHEMA_VERSION));
        meta.insert("command".into(), json!(command));
        if let Some(seed) = self.seed {
            meta.insert("seed".into(), json!(seed));
        }
        for (k, v) in &self.notes {
            meta.insert((*k).into(), json!(v));
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, cell)| ((*c).to_owned(), cell.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut text = serde_json::to_string_pretty(&json!({ "meta": meta, "rows": rows }))
            .expect("JSON values always serialize");
        text.push('\n');
        text
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_round_trips() {
        for x in [0.1, 1.0 / 3.0, 8.0 / 17.0, 1e-300, 0.0] {
            let s = float_string(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(float_string(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new("demo", &["a", "b"]);
        t.push(vec![Cell::from(1usize), Cell::Exact(None)]);
        let csv = t.render(Format::Csv, "demo --x");
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[1], "# schema: demo v1");
        assert_eq!(lines[2], "# command: demo --x");
        assert_eq!(lines[3], "a,b");
        assert_eq!(lines[4], "1,");
    }

    #[test]
    fn json_layout() {
        let mut t = Table::new("demo", &["q"]);
        t.push(vec![Cell::Exact(Some(Rational::new(8.into(), 17.into())))]);
        let v: Value = serde_json::from_str(&t.render(Format::Json, "x")).unwrap();
        assert_eq!(v["rows"][0]["q"], "8/17");
        assert_eq!(v["meta"]["schema"], "demo");
    }
}
