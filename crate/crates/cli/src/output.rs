use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::Format;

/// Command result: a JSON document plus a fixed-column table for CSV.
pub struct Report {
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// A verification check failed; the report is still written.
    pub failed: bool,
}

impl Report {
    pub fn new(json: Value, header: Vec<String>, rows: Vec<Vec<String>>) -> Self {
        Report { json, header, rows, failed: false }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = self.header.join(",");
                s.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(|c| escape(c)).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
        }
    }

    pub fn write(&self, format: Format, out: Option<&Path>) -> std::io::Result<()> {
        let text = self.render(format);
        match out {
            Some(p) => std::fs::write(p, text),
            None => std::io::stdout().lock().write_all(text.as_bytes()),
        }
    }
}

fn escape(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// Shortest round-trip representation.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Coordinate columns `prefix1..prefixn`.
pub fn coords(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("{prefix}{k}")).collect()
}
