use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Correction, EstimatorKind};

/// Convex hulls of hyperbolic Brownian motion: simulation, reference values and figures.
#[derive(Debug, Parser)]
#[command(name = "hyphull", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo estimates, written as CSV.
    Estimate(EstimateArgs),
    /// Closed-form and quadrature reference values.
    Exact(ExactArgs),
    /// Four SVG panels and a CSV dump of one polar trajectory.
    Figure(FigureArgs),
    /// Quick internal consistency checks.
    Selftest(SelftestArgs),
}

/// Accepts plain integers and scientific notation such as `1e5`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < 1.8e19 => Ok(x as u64),
        _ => Err(format!("{s:?} is not a non-negative integer")),
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long, value_enum)]
    pub estimator: Option<EstimatorKind>,
    /// Horizons, comma separated.
    #[arg(long = "t", value_delimiter = ',', allow_negative_numbers = true)]
    pub t: Option<Vec<f64>>,
    /// Rate of the exponential horizon.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Moment order.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, value_parser = parse_count)]
    pub n: Option<u64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub max_panels: Option<usize>,
    #[arg(long, value_enum)]
    pub correction: Option<Correction>,
    #[arg(long)]
    pub r_floor: Option<f64>,
    #[arg(long)]
    pub s_entrance: Option<f64>,
    #[arg(long)]
    pub reflect_first: Option<bool>,
    /// `key = value` file; flags take precedence over it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// CSV destination (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "hyphull-manifest.json")]
    pub manifest: PathBuf,
    /// Compare every row that has a reference against its tolerance; exit 2 on failure.
    #[arg(long)]
    pub check: bool,
    /// Re-run the configuration stored in a manifest and compare with its results.
    #[arg(long, conflicts_with = "config")]
    pub replay: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(subcommand)]
    pub quantity: ExactQuantity,
}

#[derive(Debug, Subcommand)]
pub enum ExactQuantity {
    /// G(x), x > 1.
    G {
        #[arg(long)]
        x: f64,
    },
    /// Expected perimeter at an exponential time of rate lambda.
    ExpTime {
        #[arg(long)]
        lambda: f64,
    },
    /// Expected perimeter of the planar Brownian hull.
    Euclid {
        #[arg(long)]
        t: f64,
    },
    /// Large-time behaviour of E[xi_t^p].
    Moment {
        #[arg(long)]
        p: f64,
    },
    /// The oscillatory kernel psi_u(t).
    Psi {
        #[arg(long)]
        u: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1e-9)]
        abs_tol: f64,
    },
    /// Expected hyperbolic perimeter at fixed t >= 0.5, by quadrature.
    Perimeter {
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1e-6)]
        abs_tol: f64,
        #[arg(long, default_value_t = 1 << 14)]
        max_panels: usize,
    },
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(long, default_value_t = 10.0)]
    pub t: f64,
    #[arg(long, default_value = "1000000", value_parser = parse_count)]
    pub steps: u64,
    /// Time from which the winding is tracked.
    #[arg(long, default_value_t = 0.001)]
    pub s: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub r_floor: Option<f64>,
    #[arg(long, default_value_t = 20_000)]
    pub max_points: usize,
    #[arg(long, default_value_t = 1)]
    pub dump_stride: usize,
    #[arg(long, default_value = "figure")]
    pub out_dir: PathBuf,
    /// Manifest path (default: manifest.json inside the output directory).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Regenerate from a manifest and compare file digests.
    #[arg(long)]
    pub replay: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
}
