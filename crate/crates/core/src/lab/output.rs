//! CSV emission.
//!
//! Files start with `#` comment lines (tool version, config hash, timestamp),
//! then a header row, then data rows. Floats are written with 17 significant
//! digits; non-finite values as `inf`, `-inf` or `nan`.

use std::fmt::Write as _;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}
impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}
impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}
impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Provenance written as comment lines above the header.
#[derive(Debug, Clone)]
pub struct Metadata {
    pub command: String,
    pub config_sha256: String,
    /// Seconds since the Unix epoch; `None` omits the line.
    pub timestamp: Option<u64>,
}

impl Metadata {
    pub fn now(command: &str, config_sha256: &str) -> Self {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs());
        Metadata { command: command.to_string(), config_sha256: config_sha256.to_string(), timestamp }
    }
}

pub const TIMESTAMP_PREFIX: &str = "# generated_unix_s ";

pub fn render(meta: &Metadata, table: &Table) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# imlab {} {}", env!("CARGO_PKG_VERSION"), meta.command);
    let _ = writeln!(out, "# config_sha256 {}", meta.config_sha256);
    if let Some(ts) = meta.timestamp {
        let _ = writeln!(out, "{TIMESTAMP_PREFIX}{ts}");
    }
    out.push_str(&table.header.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::render).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv(path: &Path, meta: &Metadata, table: &Table) -> Result<()> {
    std::fs::write(path, render(meta, table))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 1.2732395447351628, 6.02e23] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            assert_eq!(mantissa.len(), 17);
        }
        assert_eq!(format_float(f64::INFINITY), "inf");
        assert_eq!(format_float(f64::NAN), "nan");
    }

    #[test]
    fn layout() {
        let mut t = Table::new(&["x", "n", "ok"]);
        t.push(vec![1.5.into(), 3usize.into(), true.into()]);
        let meta = Metadata { command: "test".into(), config_sha256: "ab".into(), timestamp: Some(7) };
        let text = render(&meta, &t);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# imlab "));
        assert_eq!(lines[1], "# config_sha256 ab");
        assert_eq!(lines[2], "# generated_unix_s 7");
        assert_eq!(lines[3], "x,n,ok");
        assert_eq!(lines[4], "1.5000000000000000e0,3,true");
    }
}
