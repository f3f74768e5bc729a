//! CSV and JSON artifacts with deterministic names, plus a manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    /// Floats carry 17 significant digits.
    fn to_csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Num(x) => json!(x),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(b.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub schema: &'static str,
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(schema: &'static str, columns: &'static [&'static str]) -> Self {
        Self { schema, columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Everything one command produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub command: String,
    /// Hash of the command, its arguments and the canonical configuration.
    pub hash: String,
    pub metadata: Value,
    pub tables: Vec<Table>,
}

pub fn config_hash(command: &str, args: &str, canonical_config: &str) -> String {
    let digest = Sha256::digest(format!("{command}|{args}|{canonical_config}").as_bytes());
    hex::encode(&digest[..6])
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Artifact {
    pub file: String,
    pub schema: String,
    pub schema_version: u32,
    pub rows: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Manifest {
    pub command: String,
    pub config_hash: String,
    pub artifacts: Vec<Artifact>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// Writes `<command>-<hash>.<schema>.csv` per table, a `<command>-<hash>.json`
/// mirror, and `<command>-<hash>.manifest.json`.
pub fn write_outputs(out: &RunOutput, dir: &Path) -> Result<(PathBuf, Manifest)> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let stem = format!("{}-{}", out.command, out.hash);
    let mut artifacts = Vec::new();
    let mut mirror = serde_json::Map::new();
    for table in &out.tables {
        let name = format!("{stem}.{}.csv", table.schema);
        let path = dir.join(&name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(table.columns)?;
        for row in &table.rows {
            w.write_record(row.iter().map(Cell::to_csv))?;
        }
        w.flush().map_err(io_err(&path))?;
        artifacts.push(Artifact { file: name, schema: table.schema.to_string(), schema_version: SCHEMA_VERSION, rows: table.rows.len() });
        let rows: Vec<Value> = table
            .rows
            .iter()
            .map(|r| Value::Object(table.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.to_json())).collect()))
            .collect();
        mirror.insert(table.schema.to_string(), Value::Array(rows));
    }
    let json_name = format!("{stem}.json");
    let doc = json!({
        "command": out.command,
        "config_hash": out.hash,
        "schema_version": SCHEMA_VERSION,
        "metadata": out.metadata,
        "tables": Value::Object(mirror),
    });
    let json_path = dir.join(&json_name);
    fs::write(&json_path, serde_json::to_string_pretty(&doc)?).map_err(io_err(&json_path))?;
    artifacts.push(Artifact { file: json_name, schema: "mirror".into(), schema_version: SCHEMA_VERSION, rows: 0 });
    let manifest = Manifest { command: out.command.clone(), config_hash: out.hash.clone(), artifacts };
    let manifest_path = dir.join(format!("{stem}.manifest.json"));
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?).map_err(io_err(&manifest_path))?;
    Ok((manifest_path, manifest))
}
