//! Report model and its CSV / JSON renderings.

use std::fmt;

use num_rational::BigRational;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("format must be csv or json, got {other:?}")),
        }
    }
}

/// One output field. Exact values render as `p/q` strings in both formats.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Exact(String),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    pub fn int(v: impl Into<i128>) -> Self {
        Cell::Int(v.into())
    }

    pub fn exact(r: &BigRational) -> Self {
        Cell::Exact(r.to_string())
    }

    /// Unreduced fraction `p/q`.
    pub fn fraction(p: impl fmt::Display, q: impl fmt::Display) -> Self {
        Cell::Exact(format!("{p}/{q}"))
    }

    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn verdict(passed: bool) -> Self {
        Cell::Text(if passed { "PASS" } else { "FAIL" }.into())
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => i64::try_from(*v).map_or_else(|_| json!(v.to_string()), |v| json!(v)),
            Cell::Exact(s) | Cell::Text(s) => json!(s),
            Cell::Float(v) => json!(v),
            Cell::Bool(b) => json!(b),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Exact(s) | Cell::Text(s) => {
                if s.contains([',', '"', '\n']) {
                    write!(f, "\"{}\"", s.replace('"', "\"\""))
                } else {
                    f.write_str(s)
                }
            }
            Cell::Float(v) => write!(f, "{v}"),
            Cell::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: Vec<&'static str>) -> Self {
        Self {
            name: name.into(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Everything a command prints.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub tables: Vec<Table>,
    pub passed: bool,
}

pub const NUMBER_CONVENTION: &str =
    "exact values are rationals written p/q (integers without /); other values are decimals";

impl Report {
    pub fn new(command: &str, config: Value) -> Self {
        Self {
            command: command.to_string(),
            config,
            tables: Vec::new(),
            passed: true,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
                s.push('\n');
                s
            }
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# ssga {} {}\n", self.command, self.config));
        out.push_str(&format!("# numbers: {NUMBER_CONVENTION}\n"));
        for (k, table) in self.tables.iter().enumerate() {
            if k > 0 {
                out.push('\n');
            }
            out.push_str(&format!("# {}\n", table.name));
            out.push_str(&table.header.join(","));
            out.push('\n');
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        out
    }

    fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("command".into(), json!(self.command));
        obj.insert("config".into(), self.config.clone());
        obj.insert("numbers".into(), json!(NUMBER_CONVENTION));
        obj.insert("passed".into(), json!(self.passed));
        for table in &self.tables {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let mut m = Map::new();
                    for (h, c) in table.header.iter().zip(row) {
                        m.insert((*h).to_string(), c.to_json());
                    }
                    Value::Object(m)
                })
                .collect();
            obj.insert(table.name.clone(), Value::Array(rows));
        }
        Value::Object(obj)
    }
}
