use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Method;

pub const MANIFEST_FILE: &str = "manifest.json";

/// One row of an estimation report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    /// Query point, coordinates joined by `;`.
    pub x: String,
    pub n_eff: usize,
    pub p_hat: f64,
    pub xi_hat: Option<f64>,
    pub point: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub level: f64,
    pub method: Method,
    /// `OK` or `SKIPPED: <reason>`.
    pub status: String,
}

impl ReportRow {
    pub fn is_ok(&self) -> bool {
        self.status == "OK"
    }

    /// First coordinate of the query point.
    pub fn x_first(&self) -> Option<f64> {
        self.x.split(';').next()?.parse().ok()
    }
}

/// Method-specific details kept next to the CSV report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SidecarRow {
    pub x: String,
    pub status: String,
    pub diagnostics: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub manifest: String,
    pub report: String,
    pub notes: Vec<String>,
    pub rows: Vec<SidecarRow>,
}

/// Record of how an output directory was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name; enough to replay the run.
    pub args: Vec<String>,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub runtime_seconds: f64,
    pub outputs: Vec<String>,
    pub notes: Vec<String>,
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("{}: {e}", path.display()))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io_error(path, e))?;
    r.deserialize()
        .map(|row| row.map_err(|e| io_error(path, e)))
        .collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_error(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| io_error(path, e))
}

pub fn read_report(path: &Path) -> Result<Vec<ReportRow>> {
    read_csv(path)
}
