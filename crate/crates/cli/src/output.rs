//! Tabular output: fixed CSV schemas and their JSON mirror.
//!
//! Floats render via Rust's shortest round-trip formatting, so identical
//! configuration and seed produce byte-identical files. Non-finite values
//! appear as `inf`, `-inf`, and `nan` in CSV; the JSON mirror encodes them
//! as those strings (JSON has no infinity literal).

use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Clone, Debug)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(v) => fmt_f64(*v),
            Cell::I(v) => v.to_string(),
            Cell::S(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(v) if v.is_finite() => json!(v),
            Cell::F(v) => json!(fmt_f64(*v)),
            Cell::I(v) => json!(v),
            Cell::S(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

/// One command's result table plus scalar metadata (JSON output only;
/// CSV carries the bare columns).
#[derive(Debug)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: Vec<(&'static str, Value)>,
}

impl Table {
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        Table {
            command,
            columns,
            rows: Vec::new(),
            meta: Vec::new(),
        }
    }

    pub fn push_meta(&mut self, key: &'static str, value: Value) {
        self.meta.push((key, value));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn render_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            schema: &'static str,
            command: &'static str,
            #[serde(skip_serializing_if = "Map::is_empty")]
            meta: Map<String, Value>,
            columns: &'a [&'static str],
            rows: Vec<Vec<Value>>,
        }
        let mut meta = Map::new();
        for (k, v) in &self.meta {
            meta.insert((*k).to_string(), v.clone());
        }
        let doc = Doc {
            schema: "projlog.v1",
            command: self.command,
            meta,
            columns: &self.columns,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(Cell::json).collect())
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("plain data serializes");
        text.push('\n');
        text
    }
}
