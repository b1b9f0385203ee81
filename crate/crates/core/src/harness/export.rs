//! CSV and JSON writers. Numbers in CSV carry 17 significant digits, enough
//! to reproduce every `f64` exactly.

use std::fmt::Write as _;
use std::path::Path;

use serde::{de::DeserializeOwned, Serialize};

use crate::error::{Error, Result};

/// A table of named columns; cells are already formatted.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Float cell: 17 significant digits in scientific notation.
pub fn num(x: f64) -> String {
    let mut s = String::new();
    write!(s, "{x:.16e}").expect("writing to a String");
    s
}

pub fn int(x: impl std::fmt::Display) -> String {
    x.to_string()
}

/// Parses a cell written by [`num`].
pub fn parse_num(cell: &str) -> Option<f64> {
    cell.trim().parse().ok()
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_csv(path: &Path, table: &Table) -> Result<()> {
    write_text(path, &table.to_csv())
}

/// Pretty JSON with a trailing newline; field order follows the type.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json(value)?)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}
