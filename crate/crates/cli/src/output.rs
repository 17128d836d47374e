//! Output helpers: number formatting, CSV writers and the run manifest.

use anyhow::{Context, Result};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

/// Formats a float with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a CSV file with a header row and returns its path.
pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<PathBuf> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush().with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path.to_path_buf())
}

/// Writes `contents` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).with_context(|| format!("cannot write {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("cannot move {} into place", tmp.display()))?;
    Ok(())
}

/// Pretty JSON file written atomically.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<PathBuf> {
    let text = serde_json::to_string_pretty(value)?;
    write_atomic(path, text.as_bytes())?;
    Ok(path.to_path_buf())
}

/// Summary of the observables over a run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ObservableSummary {
    pub steps: usize,
    pub initial_mass: f64,
    pub final_mass: f64,
    pub min_density: f64,
    pub max_density: f64,
    pub max_sup_norm: f64,
}

/// Record of one command invocation, written at the end of every run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: String,
    /// Verbatim configuration text.
    pub config: String,
    pub status: String,
    pub error: Option<String>,
    pub schedule: Option<serde_json::Value>,
    pub wall_time_seconds: f64,
    pub outputs: Vec<String>,
    pub observables: Option<ObservableSummary>,
}

impl RunManifest {
    pub fn new(command: &str, config_path: &Path, config: &str) -> Self {
        Self {
            command: command.to_string(),
            config_path: config_path.display().to_string(),
            config: config.to_string(),
            status: "running".into(),
            error: None,
            schedule: None,
            wall_time_seconds: 0.0,
            outputs: Vec::new(),
            observables: None,
        }
    }

    pub fn add_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }
}
