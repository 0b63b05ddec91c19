//! Result records and their on-disk form.

use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ResultRecord {
    pub config_hash: String,
    pub command: String,
    pub outputs: BTreeMap<String, Value>,
    pub provenance_note: String,
}

impl ResultRecord {
    pub fn new(config_hash: String, command: &str) -> Self {
        Self { config_hash, command: command.to_string(), outputs: BTreeMap::new(), provenance_note: String::new() }
    }

    pub fn put(&mut self, key: &str, value: impl Into<Value>) {
        self.outputs.insert(key.to_string(), value.into());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record serializes");
        s.push('\n');
        s
    }
}

/// A CSV table with preformatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.to_string(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}

fn io(e: impl std::fmt::Display) -> CliError {
    CliError::Io(e.to_string())
}

/// Round-trip decimal with 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Record plus tables from one command.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub record: ResultRecord,
    pub tables: Vec<Table>,
    /// False when an iterative solver stopped before its tolerance.
    pub converged: bool,
}

impl CommandOutput {
    /// Write `<command>.json` and `<table>.csv` files into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        std::fs::create_dir_all(dir).map_err(io)?;
        let stem = self.record.command.replace('-', "_");
        std::fs::write(dir.join(format!("{stem}.json")), self.record.to_json()).map_err(io)?;
        for t in &self.tables {
            std::fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv()?).map_err(io)?;
        }
        Ok(())
    }
}
