//! Plain tabular output: every exported artifact is a CSV with a header row.

use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// An in-memory table with a header row, rendered as plot-ready CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self::from_headers(headers.iter().map(|h| h.to_string()).collect())
    }

    pub fn from_headers(headers: Vec<String>) -> Self {
        Self {
            headers,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: &[String]) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row.to_vec());
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.headers.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        file.write_all(self.to_csv_string().as_bytes())?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
        let headers = reader.headers()?.iter().map(|h| h.to_string()).collect();
        let mut table = Self::from_headers(headers);
        for row in reader.records() {
            let row = row?;
            table.rows.push(row.iter().map(|v| v.to_string()).collect());
        }
        Ok(table)
    }

    /// Position of a header, or an invalid-argument error naming it.
    pub fn column(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| {
                crate::error::CoreError::InvalidArgument(format!("table has no column `{name}`"))
            })
    }
}
