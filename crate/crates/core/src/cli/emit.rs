//! Table, CSV and JSON rendering of result rows.

use std::fmt;
use std::str::FromStr;

use serde_json::{Map, Value as Json};

use crate::hilbert::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format '{s}' (table | csv | json)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Table => "table",
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Text,
    Real,
    Complex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: Kind,
}

impl Column {
    pub fn text(name: &str) -> Self {
        Self { name: name.into(), kind: Kind::Text }
    }
    pub fn real(name: &str) -> Self {
        Self { name: name.into(), kind: Kind::Real }
    }
    pub fn complex(name: &str) -> Self {
        Self { name: name.into(), kind: Kind::Complex }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Text(String),
    Num(f64),
    Int(i64),
    Complex(C64),
    Missing,
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<Option<f64>> for Value {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Value::Missing, Value::Num)
    }
}

impl From<C64> for Value {
    fn from(z: C64) -> Self {
        Value::Complex(z)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl From<usize> for Value {
    fn from(n: usize) -> Self {
        Value::Int(n as i64)
    }
}

/// Homogeneous rows plus free-form summary lines.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Value>>,
    /// Render JSON as one object instead of an array of one.
    pub single: bool,
    pub notes: Vec<String>,
    /// Set when the rows themselves document a failed check.
    pub failure: Option<String>,
}

impl Report {
    pub fn new(columns: Vec<Column>) -> Self {
        Self { columns, ..Default::default() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Name of the first column holding a NaN or infinite number.
    pub fn first_non_finite(&self) -> Option<&str> {
        for row in &self.rows {
            for (col, v) in self.columns.iter().zip(row) {
                let bad = match v {
                    Value::Num(x) => !x.is_finite(),
                    Value::Complex(z) => !z.re.is_finite() || !z.im.is_finite(),
                    _ => false,
                };
                if bad {
                    return Some(&col.name);
                }
            }
        }
        None
    }

    fn flat_header(&self) -> Vec<String> {
        self.columns
            .iter()
            .flat_map(|c| match c.kind {
                Kind::Complex => vec![format!("{}_re", c.name), format!("{}_im", c.name)],
                _ => vec![c.name.clone()],
            })
            .collect()
    }

    fn flat_row(&self, row: &[Value], num: impl Fn(f64) -> String) -> Vec<String> {
        self.columns
            .iter()
            .zip(row)
            .flat_map(|(c, v)| match (c.kind, v) {
                (Kind::Complex, Value::Complex(z)) => vec![num(z.re), num(z.im)],
                (Kind::Complex, _) => vec![String::new(), String::new()],
                (_, Value::Num(x)) => vec![num(*x)],
                (_, Value::Int(n)) => vec![n.to_string()],
                (_, Value::Text(s)) => vec![s.clone()],
                (_, Value::Complex(z)) => vec![complex_text(*z)],
                (_, Value::Missing) => vec![String::new()],
            })
            .collect()
    }
}

/// `%.12g`: twelve significant digits, trailing zeros trimmed.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mant}e{sign}{:02}", exp.abs());
    }
    trim_zeros(&format!("{x:.*}", (11 - exp) as usize)).to_string()
}

/// `a+bi` with both parts at twelve significant digits.
pub fn complex_text(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{sign}{}i", sig12(z.re), sig12(z.im.abs()))
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Six decimals, switching to scientific notation for tiny magnitudes.
fn table_num(x: f64) -> String {
    if !x.is_finite() {
        x.to_string()
    } else if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:.3e}")
    } else {
        format!("{x:.6}")
    }
}

/// Rounds to twelve significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("round trip of formatted float")
}

fn json_num(x: f64) -> Json {
    serde_json::Number::from_f64(round12(x)).map_or(Json::Null, Json::Number)
}

fn json_value(v: &Value) -> Json {
    match v {
        Value::Text(s) => Json::String(s.clone()),
        Value::Num(x) => json_num(*x),
        Value::Int(n) => Json::from(*n),
        Value::Complex(z) => {
            let mut m = Map::new();
            m.insert("re".into(), json_num(z.re));
            m.insert("im".into(), json_num(z.im));
            Json::Object(m)
        }
        Value::Missing => Json::Null,
    }
}

pub fn to_json(report: &Report) -> String {
    let objects: Vec<Json> = report
        .rows
        .iter()
        .map(|row| {
            let m: Map<String, Json> =
                report.columns.iter().zip(row).map(|(c, v)| (c.name.clone(), json_value(v))).collect();
            Json::Object(m)
        })
        .collect();
    let doc = match (report.single, objects.len()) {
        (true, 1) => objects.into_iter().next().expect("one object"),
        _ => Json::Array(objects),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("serializable");
    out.push('\n');
    out
}

pub fn to_csv(report: &Report) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(report.flat_header()).expect("in-memory write");
    for row in &report.rows {
        w.write_record(report.flat_row(row, sig12)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 fields")
}

pub fn to_table(report: &Report) -> String {
    let header = report.flat_header();
    let body: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| report.flat_row(r, table_num).into_iter().map(|s| if s.is_empty() { "-".into() } else { s }).collect())
        .collect();
    let numeric: Vec<bool> = report
        .columns
        .iter()
        .flat_map(|c| match c.kind {
            Kind::Complex => vec![true, true],
            Kind::Real => vec![true],
            Kind::Text => vec![false],
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|i| body.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(
                |(i, s)| if numeric[i] { format!("{s:>w$}", w = widths[i]) } else { format!("{s:<w$}", w = widths[i]) },
            )
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = line(&header);
    out.push('\n');
    for r in &body {
        out.push_str(&line(r));
        out.push('\n');
    }
    if !report.notes.is_empty() {
        out.push('\n');
        for n in &report.notes {
            out.push_str(n);
            out.push('\n');
        }
    }
    out
}

/// Rendered data stream; summary notes are only part of the table form.
pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Table => to_table(report),
        Format::Csv => to_csv(report),
        Format::Json => to_json(report),
    }
}
