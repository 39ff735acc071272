//! Results table: one row per estimator and horizon.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const CSV_HEADER: [&str; 9] = ["label", "horizon", "n", "dt", "seed", "mean", "stderr", "target", "target_source"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub label: String,
    pub horizon: f64,
    pub n: u64,
    pub dt: f64,
    pub seed: u64,
    pub mean: f64,
    pub stderr: f64,
    pub target: Option<f64>,
    pub target_source: Option<String>,
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl ResultRow {
    pub fn fields(&self) -> [String; 9] {
        [
            self.label.clone(),
            fmt_float(self.horizon),
            self.n.to_string(),
            fmt_float(self.dt),
            self.seed.to_string(),
            fmt_float(self.mean),
            fmt_float(self.stderr),
            self.target.map(fmt_float).unwrap_or_default(),
            self.target_source.clone().unwrap_or_default(),
        ]
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush().map_err(|e| crate::error::CliError::io("csv output", e))?;
    Ok(())
}

pub fn csv_string(rows: &[ResultRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}
