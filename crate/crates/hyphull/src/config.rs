//! Run configuration: defaults, an optional `key = value` file, then flags.

use std::path::Path;

use clap::ValueEnum;
use hyphull_core::estimate::{default_dt, GridCorrection};
use hyphull_core::quadrature::QuadratureSpec;
use hyphull_core::simulate::PolarOptions;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DEFAULT_SEED: u64 = 20240229;
pub const SEED_ENV: &str = "HYPHULL_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    /// Convex hull of the simulated trajectory.
    Direct,
    /// Running maximum of the horizontal coordinate (times 2π is the perimeter).
    Xstar,
    /// sqrt(8π ξ_t), needs only the vertical noise.
    Rb,
    /// Perimeter at an independent exponential time.
    ExpTime,
    /// Geodesic radius from half-plane paths.
    Radius,
    /// Geodesic radius from the polar scheme.
    RadiusPolar,
    /// Moment E[ξ_t^p].
    XiMoment,
}

impl EstimatorKind {
    /// The command-line spelling, also used as the CSV label.
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Direct => "direct",
            EstimatorKind::Xstar => "xstar",
            EstimatorKind::Rb => "rb",
            EstimatorKind::ExpTime => "exp-time",
            EstimatorKind::Radius => "radius",
            EstimatorKind::RadiusPolar => "radius-polar",
            EstimatorKind::XiMoment => "xi-moment",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Correction {
    None,
    Richardson,
}

impl From<Correction> for GridCorrection {
    fn from(c: Correction) -> Self {
        match c {
            Correction::None => GridCorrection::None,
            Correction::Richardson => GridCorrection::Richardson,
        }
    }
}

/// Everything that determines the numbers an `estimate` run prints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub estimator: EstimatorKind,
    pub horizons: Vec<f64>,
    pub lambda: f64,
    pub p: f64,
    pub n: u64,
    /// Grid step; `None` picks the per-horizon default.
    pub dt: Option<f64>,
    pub seed: u64,
    pub threads: usize,
    pub abs_tol: f64,
    pub max_panels: usize,
    pub correction: Correction,
    pub r_floor: f64,
    pub s_entrance: f64,
    pub reflect_first: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let polar = PolarOptions::default();
        let q = QuadratureSpec::default();
        Self {
            estimator: EstimatorKind::Rb,
            horizons: vec![1.0],
            lambda: 1.0,
            p: 0.5,
            n: 10_000,
            dt: None,
            seed: DEFAULT_SEED,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            abs_tol: q.abs_tol(),
            max_panels: q.max_panels(),
            correction: Correction::Richardson,
            r_floor: polar.r_floor,
            s_entrance: polar.s_entrance,
            reflect_first: polar.reflect_first,
        }
    }
}

/// Seed from the environment, if set and well-formed.
pub fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}={s} is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("bad value for {key}: {value:?}")))
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> Result<T> {
    T::from_str(value, true).map_err(|_| CliError::Usage(format!("bad value for {key}: {value:?}")))
}

/// Parses comma-separated horizons such as `0.5,1,2`.
pub fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|s| parse(key, s.trim())).collect()
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "estimator" => self.estimator = parse_enum(key, value)?,
            "t" | "horizons" => self.horizons = parse_list(key, value)?,
            "lambda" => self.lambda = parse(key, value)?,
            "p" => self.p = parse(key, value)?,
            "n" => self.n = parse(key, value)?,
            "dt" => self.dt = Some(parse(key, value)?),
            "seed" => self.seed = parse(key, value)?,
            "threads" => self.threads = parse(key, value)?,
            "abs_tol" => self.abs_tol = parse(key, value)?,
            "max_panels" => self.max_panels = parse(key, value)?,
            "correction" => self.correction = parse_enum(key, value)?,
            "r_floor" => self.r_floor = parse(key, value)?,
            "s_entrance" => self.s_entrance = parse(key, value)?,
            "reflect_first" => self.reflect_first = parse(key, value)?,
            _ => return Err(CliError::Usage(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text`; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", lineno + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
        self.apply_text(&text)
    }

    pub fn dt_for(&self, t: f64) -> f64 {
        self.dt.unwrap_or_else(|| default_dt(t))
    }

    pub fn quadrature(&self) -> Result<QuadratureSpec> {
        Ok(QuadratureSpec::new(self.abs_tol, self.max_panels)?)
    }

    pub fn polar(&self) -> PolarOptions {
        PolarOptions {
            r_floor: self.r_floor,
            s_entrance: self.s_entrance,
            reflect_first: self.reflect_first,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(CliError::Usage("n must be at least 2".into()));
        }
        if self.estimator != EstimatorKind::ExpTime {
            if self.horizons.is_empty() {
                return Err(CliError::Usage("at least one horizon is needed".into()));
            }
            if let Some(t) = self.horizons.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
                return Err(CliError::Usage(format!("horizon {t} is not positive")));
            }
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return Err(CliError::Usage(format!("dt {dt} is not positive")));
            }
        }
        if self.threads == 0 {
            return Err(CliError::Usage("threads must be at least 1".into()));
        }
        Ok(())
    }
}
