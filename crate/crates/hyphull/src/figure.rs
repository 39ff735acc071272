//! Four-panel picture of one trajectory: radius, winding, and the hull in both disk models.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use hyphull_core::geometry::{klein_to_poincare, KleinPoint};
use hyphull_core::hull::convex_hull_points;
use hyphull_core::simulate::{simulate_polar, PolarOptions, PolarPath, SimConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::svg::{Frame, Svg};

/// Points per hull edge when drawing geodesic arcs in the Poincaré disk.
pub const ARC_POINTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureConfig {
    pub t: f64,
    pub steps: u64,
    pub s: f64,
    pub seed: u64,
    pub r_floor: f64,
    pub reflect_first: bool,
    /// Upper bound on polyline points per panel (hull vertices are always kept).
    pub max_points: usize,
    /// Write every `dump_stride`-th grid point to the path CSV.
    pub dump_stride: usize,
}

impl Default for FigureConfig {
    fn default() -> Self {
        let polar = PolarOptions::default();
        Self {
            t: 10.0,
            steps: 1_000_000,
            s: 0.001,
            seed: crate::config::DEFAULT_SEED,
            r_floor: polar.r_floor,
            reflect_first: polar.reflect_first,
            max_points: 20_000,
            dump_stride: 1,
        }
    }
}

pub struct Figure {
    pub path: PolarPath,
    pub klein: Vec<KleinPoint>,
    /// Trajectory indices of the hull vertices, in hull order.
    pub hull_indices: Vec<usize>,
}

pub fn simulate(cfg: &FigureConfig) -> Result<Figure> {
    if cfg.steps == 0 {
        return Err(CliError::Usage("steps must be positive".into()));
    }
    let sim = SimConfig::new(cfg.t, cfg.t / cfg.steps as f64, cfg.seed, 0)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let opts = PolarOptions {
        r_floor: cfg.r_floor,
        s_entrance: cfg.s,
        reflect_first: cfg.reflect_first,
    };
    let path = simulate_polar(&sim, &opts)?;
    let klein = path.to_klein()?;
    let hull = convex_hull_points(&klein)?;
    let mut index: HashMap<(u64, u64), usize> = HashMap::with_capacity(klein.len());
    for (i, k) in klein.iter().enumerate() {
        index.entry((k.u().to_bits(), k.v().to_bits())).or_insert(i);
    }
    let hull_indices = hull
        .vertices()
        .iter()
        .map(|k| index[&(k.u().to_bits(), k.v().to_bits())])
        .collect();
    Ok(Figure {
        path,
        klein,
        hull_indices,
    })
}

/// Every `k`-th index plus the hull vertices and the endpoints.
fn decimate(len: usize, max_points: usize, keep: &[usize]) -> Vec<usize> {
    let stride = len.div_ceil(max_points.max(2)).max(1);
    let mut idx: Vec<usize> = (0..len).step_by(stride).chain(keep.iter().copied()).collect();
    idx.push(len - 1);
    idx.sort_unstable();
    idx.dedup();
    idx
}

const SIZE: f64 = 640.0;
const MARGIN: f64 = 48.0;

fn trace(fig: &Figure, idx: &[usize], from: f64, y: impl Fn(usize) -> f64, x_label: &str, y_label: &str) -> String {
    let p = &fig.path;
    let idx: Vec<usize> = idx.iter().copied().filter(|&i| p.times[i] >= from).collect();
    let (lo, hi) = idx
        .iter()
        .map(|&i| y(i))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let t_end = *p.times.last().unwrap_or(&1.0);
    let frame = Frame::new(SIZE, 0.6 * SIZE, MARGIN, (from, t_end), (lo, hi));
    let mut svg = Svg::new(frame.width, frame.height);
    svg.axes(&frame, x_label, y_label);
    svg.polyline(&frame, idx.iter().map(|&i| (p.times[i], y(i))), "#1f4e9c", 1.0);
    svg.finish()
}

fn disk(fig: &Figure, idx: &[usize], poincare: bool) -> String {
    let frame = Frame::new(SIZE, SIZE, MARGIN / 2.0, (-1.0, 1.0), (-1.0, 1.0));
    let mut svg = Svg::new(SIZE, SIZE);
    svg.circle(&frame, 0.0, 0.0, 1.0, "black");
    let map = |k: KleinPoint| {
        if poincare {
            let p = klein_to_poincare(k);
            (p.u(), p.v())
        } else {
            (k.u(), k.v())
        }
    };
    svg.polyline(&frame, idx.iter().map(|&i| map(fig.klein[i])), "#7a7a7a", 0.6);
    let verts: Vec<KleinPoint> = fig.hull_indices.iter().map(|&i| fig.klein[i]).collect();
    if poincare {
        let m = verts.len();
        for e in 0..m {
            let (a, b) = (verts[e], verts[(e + 1) % m]);
            let arc = (0..ARC_POINTS).map(|j| {
                let s = j as f64 / (ARC_POINTS - 1) as f64;
                // straight chords in the Klein disk are geodesics
                let u = a.u() + s * (b.u() - a.u());
                let v = a.v() + s * (b.v() - a.v());
                map(KleinPoint::new(u, v).unwrap_or(a))
            });
            svg.polyline(&frame, arc, "#c0392b", 1.5);
        }
    } else {
        svg.polygon(&frame, verts.iter().map(|&k| map(k)), "#c0392b", 1.5);
    }
    for &k in &verts {
        let (x, y) = map(k);
        svg.dot(&frame, x, y, 2.5, "#c0392b");
    }
    svg.dot(&frame, 0.0, 0.0, 2.5, "black");
    svg.finish()
}

/// The four SVG documents, named by file.
pub fn render(fig: &Figure, cfg: &FigureConfig) -> Vec<(&'static str, String)> {
    let idx = decimate(fig.klein.len(), cfg.max_points, &fig.hull_indices);
    let p = &fig.path;
    vec![
        ("radius.svg", trace(fig, &idx, 0.0, |i| p.r[i], "t", "R_t")),
        (
            "winding.svg",
            trace(fig, &idx, cfg.s, |i| p.theta_winding[i], "t", "winding since s"),
        ),
        ("klein.svg", disk(fig, &idx, false)),
        ("poincare.svg", disk(fig, &idx, true)),
    ]
}

pub fn write_path_csv<W: Write>(out: W, path: &PolarPath, stride: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "r", "theta"])?;
    for i in (0..path.times.len()).step_by(stride.max(1)) {
        w.write_record([
            crate::report::fmt_float(path.times[i]),
            crate::report::fmt_float(path.r[i]),
            crate::report::fmt_float(path.theta(i)),
        ])?;
    }
    w.flush().map_err(|e| CliError::io("path csv", e))?;
    Ok(())
}

/// Simulates, renders and writes every output into `dir`. Returns the written paths.
pub fn emit(cfg: &FigureConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display().to_string(), e))?;
    let fig = simulate(cfg)?;
    let mut written = Vec::new();
    for (name, doc) in render(&fig, cfg) {
        let path = dir.join(name);
        std::fs::write(&path, doc).map_err(|e| CliError::io(path.display().to_string(), e))?;
        written.push(path);
    }
    let csv_path = dir.join("path.csv");
    let file = std::fs::File::create(&csv_path).map_err(|e| CliError::io(csv_path.display().to_string(), e))?;
    write_path_csv(std::io::BufWriter::new(file), &fig.path, cfg.dump_stride)?;
    written.push(csv_path);
    Ok(written)
}
