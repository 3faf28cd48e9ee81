//! Rendering of command results as JSON, CSV or aligned text.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// What a command produced: a JSON document, a flat table for CSV and text
/// output, and whether the verdict was negative (exit status 2).
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub negative: bool,
    /// Replaces the table in text mode (raw bit strings).
    pub raw_text: Option<String>,
}

impl Report {
    pub fn new(json: Value) -> Self {
        Report {
            json,
            headers: Vec::new(),
            rows: Vec::new(),
            negative: false,
            raw_text: None,
        }
    }

    pub fn table(mut self, headers: &[&str], rows: Vec<Vec<String>>) -> Self {
        self.headers = headers.iter().map(|h| h.to_string()).collect();
        self.rows = rows;
        self
    }

    /// A two-column `key,value` table.
    pub fn pairs(self, pairs: Vec<(&str, String)>) -> Self {
        let rows = pairs.into_iter().map(|(k, v)| vec![k.to_string(), v]).collect();
        self.table(&["key", "value"], rows)
    }

    pub fn negative(mut self, negative: bool) -> Self {
        self.negative = negative;
        self
    }

    pub fn raw_text(mut self, text: String) -> Self {
        self.raw_text = Some(text);
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("JSON values serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = String::new();
                writeln!(s, "{}", self.headers.iter().map(|h| csv_field(h)).collect::<Vec<_>>().join(",")).unwrap();
                for row in &self.rows {
                    writeln!(s, "{}", row.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(",")).unwrap();
                }
                s
            }
            Format::Text => match &self.raw_text {
                Some(t) => format!("{t}\n"),
                None => aligned(&self.headers, &self.rows),
            },
        }
    }
}

fn csv_field(f: &str) -> String {
    if f.contains([',', '"', '\n']) {
        format!("\"{}\"", f.replace('"', "\"\""))
    } else {
        f.to_string()
    }
}

fn aligned(headers: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, f) in widths.iter_mut().zip(row) {
            *w = (*w).max(f.chars().count());
        }
    }
    let line = |fields: &[String]| {
        let mut s = String::new();
        for (i, (f, w)) in fields.iter().zip(&widths).enumerate() {
            if i + 1 == fields.len() {
                s.push_str(f);
            } else {
                let pad = w - f.chars().count();
                write!(s, "{f}{}  ", " ".repeat(pad)).unwrap();
            }
        }
        s.push('\n');
        s
    };
    let mut out = line(headers);
    for row in rows {
        out.push_str(&line(row));
    }
    out
}

/// Shortest round-trip decimal form.
pub fn num(v: f64) -> String {
    format!("{v}")
}
