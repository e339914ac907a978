//! Output directory handling and validation of emitted files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::CliError;

pub struct OutDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn subdir(&self, name: &str) -> Result<OutDir, CliError> {
        OutDir::create(&self.root.join(name))
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Writes `name` through `f` and returns its path.
    pub fn write<F>(&mut self, name: &str, f: F) -> Result<PathBuf, CliError>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<(), CliError>,
    {
        let p = self.path(name);
        let mut w = BufWriter::new(File::create(&p)?);
        f(&mut w)?;
        w.flush()?;
        self.written.push(p.clone());
        Ok(p)
    }

    /// Writes a numeric CSV and checks it against `columns`.
    ///
    /// `columns` lists the exact header; a trailing `*` entry accepts any
    /// further columns.
    pub fn csv<F>(&mut self, name: &str, columns: &[&str], f: F) -> Result<PathBuf, CliError>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<(), CliError>,
    {
        let p = self.write(name, f)?;
        validate_csv(&p, columns)?;
        Ok(p)
    }

    /// Writes pretty JSON and checks that `required` top-level keys exist.
    pub fn json(&mut self, name: &str, value: &Value, required: &[&str]) -> Result<PathBuf, CliError> {
        let p = self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value).map_err(std::io::Error::from)?;
            writeln!(w)?;
            Ok(())
        })?;
        validate_json(&p, required)?;
        Ok(p)
    }

    pub fn record(&mut self, p: PathBuf) {
        self.written.push(p);
    }
}

fn schema(p: &Path, msg: impl Into<String>) -> CliError {
    CliError::Schema { path: p.display().to_string(), msg: msg.into() }
}

/// Header match, rectangular rows, every field a finite or infinite float.
pub fn validate_csv(p: &Path, columns: &[&str]) -> Result<(), CliError> {
    let mut rd = csv::Reader::from_path(p).map_err(|e| schema(p, e.to_string()))?;
    let header: Vec<String> = rd.headers().map_err(|e| schema(p, e.to_string()))?.iter().map(String::from).collect();
    let open = columns.last() == Some(&"*");
    let fixed = if open { &columns[..columns.len() - 1] } else { columns };
    if header.len() < fixed.len() || (!open && header.len() != fixed.len()) {
        return Err(schema(p, format!("header {header:?} does not match {columns:?}")));
    }
    for (h, c) in header.iter().zip(fixed) {
        if h != c {
            return Err(schema(p, format!("column {h:?} where {c:?} was expected")));
        }
    }
    for (k, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| schema(p, e.to_string()))?;
        if rec.len() != header.len() {
            return Err(schema(p, format!("row {} has {} fields", k + 1, rec.len())));
        }
        for field in rec.iter() {
            if field.parse::<f64>().map_or(true, f64::is_nan) {
                return Err(schema(p, format!("row {}: {field:?} is not a number", k + 1)));
            }
        }
    }
    Ok(())
}

pub fn validate_json(p: &Path, required: &[&str]) -> Result<(), CliError> {
    let text = fs::read_to_string(p)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| schema(p, e.to_string()))?;
    let obj = v.as_object().ok_or_else(|| schema(p, "top level is not an object"))?;
    for key in required {
        if !obj.contains_key(*key) {
            return Err(schema(p, format!("missing key {key:?}")));
        }
    }
    Ok(())
}

/// Columns of a numeric CSV, by header name.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn read(p: &Path) -> Result<Self, CliError> {
        let mut rd = csv::Reader::from_path(p).map_err(|e| schema(p, e.to_string()))?;
        let header = rd.headers().map_err(|e| schema(p, e.to_string()))?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec.map_err(|e| schema(p, e.to_string()))?;
            rows.push(rec.iter().map(|f| f.parse::<f64>().unwrap_or(f64::NAN)).collect());
        }
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}
