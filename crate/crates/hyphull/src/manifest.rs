//! Run manifests: enough to replay a run and confirm it reproduces bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::figure::FigureConfig;
use crate::report::ResultRow;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> Result<Self> {
        let data = std::fs::read(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
        let hash = Sha256::digest(&data);
        Ok(Self {
            name: path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned()),
            bytes: data.len() as u64,
            sha256: hash.iter().map(|b| format!("{b:02x}")).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RunRecord {
    Estimate { config: RunConfig, results: Vec<ResultRow> },
    Figure { config: FigureConfig, files: Vec<FileDigest> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub version: String,
    pub root_seed: u64,
    pub started_unix_ms: u64,
    pub wall_clock_secs: f64,
    pub run: RunRecord,
}

impl RunManifest {
    pub fn new(run: RunRecord, root_seed: u64, started: std::time::SystemTime, wall: std::time::Duration) -> Self {
        Self {
            command_line: std::env::args().collect(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            root_seed,
            started_unix_ms: started
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_millis() as u64),
            wall_clock_secs: wall.as_secs_f64(),
            run,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| CliError::io(path.display().to_string(), e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Compares the CSV fields of two result tables; returns a description of the first difference.
pub fn diff_rows(expected: &[ResultRow], actual: &[ResultRow]) -> Option<String> {
    if expected.len() != actual.len() {
        return Some(format!("{} rows recorded, {} reproduced", expected.len(), actual.len()));
    }
    for (i, (e, a)) in expected.iter().zip(actual).enumerate() {
        let (fe, fa) = (e.fields(), a.fields());
        for (col, (x, y)) in crate::report::CSV_HEADER.iter().zip(fe.iter().zip(&fa)) {
            if x != y {
                return Some(format!("row {i} column {col}: recorded {x}, reproduced {y}"));
            }
        }
    }
    None
}
