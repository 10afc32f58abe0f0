//! CSV and summary output.
//!
//! CSVs are UTF-8, comma-separated, LF line endings, one header row, and
//! every float carries 17 significant digits so reruns are byte-identical.
//! The master seed is the first column of every row. Any non-finite value
//! aborts the run as a numerical failure before anything is written.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::HarnessError;

/// A float cell with full round-trip precision.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// One CSV cell.
#[derive(Debug, Clone)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
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

/// Accumulates rows and writes the file in one shot.
pub struct CsvReport {
    header: Vec<&'static str>,
    body: String,
    rows: usize,
}

impl CsvReport {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, body: String::new(), rows: 0 }
    }

    pub fn push_row(&mut self, cells: Vec<Cell>) -> Result<(), HarnessError> {
        assert_eq!(cells.len(), self.header.len(), "row width must match header");
        let mut first = true;
        for cell in cells {
            if !first {
                self.body.push(',');
            }
            first = false;
            match cell {
                Cell::Int(v) => {
                    let _ = write!(self.body, "{v}");
                }
                Cell::Float(v) => {
                    if !v.is_finite() {
                        return Err(HarnessError::Numerical(format!(
                            "refusing to write non-finite value {v} (row {})",
                            self.rows + 1
                        )));
                    }
                    self.body.push_str(&fmt_float(v));
                }
                Cell::Text(v) => {
                    debug_assert!(!v.contains(',') && !v.contains('\n'));
                    self.body.push_str(&v);
                }
            }
        }
        self.body.push('\n');
        self.rows += 1;
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn write(&self, path: &Path) -> Result<(), HarnessError> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let mut text = self.header.join(",");
        text.push('\n');
        text.push_str(&self.body);
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Human-readable run summary; echoes every effective parameter.
pub struct Summary {
    lines: Vec<String>,
}

impl Summary {
    pub fn new(title: &str) -> Self {
        Self { lines: vec![format!("experiment: {title}")] }
    }

    pub fn push(&mut self, key: &str, value: impl std::fmt::Display) {
        self.lines.push(format!("{key}: {value}"));
    }

    pub fn text(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }

    pub fn write_next_to(&self, csv_path: &Path) -> Result<PathBuf, HarnessError> {
        let path = summary_path(csv_path);
        std::fs::write(&path, self.text())?;
        Ok(path)
    }
}

pub fn summary_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("summary.txt")
}
