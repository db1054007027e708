//! CSV tables and JSON summaries.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so the
//! text is locale-free and bit-exact across runs.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::{LabError, Result};

/// Bumped whenever a summary layout changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_f64(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&v| num(v)).collect());
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
        w.write_record(&self.header).map_err(|e| csv_err(path, e))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| csv_err(path, e))?;
        }
        w.flush().map_err(|e| LabError::io(path, e))
    }
}

pub fn num(v: f64) -> String {
    format!("{v}")
}

fn csv_err(path: &Path, e: csv::Error) -> LabError {
    LabError::io(path, std::io::Error::other(e))
}

/// Reads a headed CSV of numbers into rows.
pub fn read_numeric_csv(path: &Path, columns: usize) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
        if rec.len() != columns {
            return Err(LabError::Config(format!(
                "{}: row {} has {} fields, expected {columns}",
                path.display(),
                line + 2,
                rec.len()
            )));
        }
        let row = rec
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| LabError::Config(format!("{}: row {}: {e}", path.display(), line + 2)))?;
        out.push(row);
    }
    Ok(out)
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    fs::write(path, text).map_err(|e| LabError::io(path, e))
}

/// Output directory with a record of what was written into it.
#[derive(Debug)]
pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| LabError::io(&root, e))?;
        Ok(OutDir { root, written: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn table(&mut self, name: &str, t: &Table) -> Result<()> {
        t.write(&self.root.join(name))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn json(&mut self, name: &str, v: &Value) -> Result<()> {
        write_json(&self.root.join(name), v)?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn file(&mut self, name: &str) -> PathBuf {
        self.written.push(name.to_string());
        self.root.join(name)
    }

    pub fn artifacts(&self) -> &[String] {
        &self.written
    }
}
