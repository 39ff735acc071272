//! Monte Carlo estimators for the hull perimeter and related path functionals.
//!
//! Each path is a pure function of `(seed, path_index, config)`. Per-path values are
//! stored by index and reduced in a fixed pairwise order, so every estimate is
//! bit-identical whatever the number of worker threads.

use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use crate::cauchy::cauchy_perimeter;
use crate::error::{Error, Result};
use crate::geometry::{halfplane_radius, halfplane_to_poincare, poincare_to_klein, HalfPlanePoint, KleinPoint};
use crate::hull::{edge_sum_perimeter, HullBuilder};
use crate::math;
use crate::quadrature::QuadratureSpec;
use crate::simulate::{path_exp_time, simulate_polar, simulate_xi, HalfPlaneState, HalfPlaneWalk, PolarOptions, SimConfig};
use crate::stats::{ks_statistic, ls_slope, mean_stderr, KSResult, Reference};

/// Default grid step for horizon `t`: `1e-3` up to `t = 2`, `2e-3` beyond, and never
/// more than `t / 1000`.
pub fn default_dt(t: f64) -> f64 {
    let base: f64 = if t <= 2.0 { 1e-3 } else { 2e-3 };
    base.min(t / 1000.0)
}

/// Worker configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exec {
    threads: usize,
}

impl Exec {
    pub fn new(threads: usize) -> Self {
        Self { threads: threads.max(1) }
    }

    pub fn sequential() -> Self {
        Self::new(1)
    }

    pub fn threads(&self) -> usize {
        self.threads
    }
}

impl Default for Exec {
    fn default() -> Self {
        #[cfg(feature = "std")]
        {
            Self::new(std::thread::available_parallelism().map_or(1, |n| n.get()))
        }
        #[cfg(not(feature = "std"))]
        {
            Self::sequential()
        }
    }
}

#[cfg(feature = "std")]
const BLOCK: u64 = 64;

/// Evaluates `f` on `0..n` and returns the results in index order. The first error
/// by index wins.
pub fn par_map<T, F>(n: u64, exec: &Exec, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    #[cfg(feature = "std")]
    if exec.threads > 1 && n > BLOCK {
        return par_map_threads(n, exec.threads, &f);
    }
    let _ = exec;
    (0..n).map(f).collect()
}

#[cfg(feature = "std")]
fn par_map_threads<T, F>(n: u64, threads: usize, f: &F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    use std::sync::atomic::{AtomicU64, Ordering};

    let next = AtomicU64::new(0);
    let mut blocks: Vec<(u64, Vec<Result<T>>)> = std::thread::scope(|scope| {
        let workers: Vec<_> = (0..threads)
            .map(|_| {
                scope.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let start = next.fetch_add(BLOCK, Ordering::Relaxed);
                        if start >= n {
                            break;
                        }
                        let end = (start + BLOCK).min(n);
                        done.push((start, (start..end).map(f).collect::<Vec<_>>()));
                    }
                    done
                })
            })
            .collect();
        workers
            .into_iter()
            .flat_map(|w| w.join().expect("estimator worker panicked"))
            .collect()
    });
    blocks.sort_unstable_by_key(|b| b.0);
    blocks.into_iter().flat_map(|b| b.1).collect()
}

/// Extra per-run information that some estimators report.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    /// Paths whose perimeter was recomputed by the Cauchy integral.
    pub audited: u64,
    /// Paths whose horizon was capped.
    pub truncated: u64,
    /// Probability mass of the horizon beyond the cap.
    pub truncation_mass: f64,
    /// Smallest radius seen after time 1 (polar runs).
    pub min_radius: Option<f64>,
}

/// Sample mean of a per-path functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    pub seed: u64,
    pub label: &'static str,
    pub horizon: f64,
    pub dt: f64,
    pub diagnostics: Diagnostics,
}

impl MCEstimate {
    pub fn from_samples(label: &'static str, samples: &[f64], sim: &SimConfig, horizon: f64) -> Self {
        let (mean, stderr) = mean_stderr(samples);
        Self {
            mean,
            stderr,
            n: samples.len() as u64,
            seed: sim.seed(),
            label,
            horizon,
            dt: sim.dt(),
            diagnostics: Diagnostics::default(),
        }
    }

    /// Rescales mean and standard error by a constant factor.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.mean *= factor;
        self.stderr *= factor.abs();
        self
    }

    /// `|m_1 - m_2| / sqrt(se_1² + se_2²)`.
    pub fn joint_z(&self, other: &MCEstimate) -> f64 {
        (self.mean - other.mean).abs() / math::hypot(self.stderr, other.stderr)
    }
}

/// How the `O(sqrt dt)` deficit of grid-sampled extremes is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridCorrection {
    /// Use the value on the simulation grid as is.
    None,
    /// Combine the full grid with its every-other-point subgrid,
    /// `v + (v - v_half) / (sqrt 2 - 1)`, which cancels the `sqrt dt` term.
    #[default]
    Richardson,
}

impl GridCorrection {
    #[inline]
    fn apply(self, full: f64, half: f64) -> f64 {
        match self {
            GridCorrection::None => full,
            GridCorrection::Richardson => full + (full - half) / (SQRT_2 - 1.0),
        }
    }
}

fn check_n(n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidConfig("need at least two paths"));
    }
    Ok(())
}

fn horizon(sim: &SimConfig, t: f64) -> Result<SimConfig> {
    if !(t > 0.0) {
        return Err(Error::InvalidConfig("horizon must be positive"));
    }
    sim.with_horizon(t)
}

// grid points 0, 2, 4, ... plus the final one
#[inline]
fn on_half_grid(i: usize, last: usize) -> bool {
    i % 2 == 0 || i == last
}

fn klein(s: &HalfPlaneState) -> Result<KleinPoint> {
    Ok(poincare_to_klein(halfplane_to_poincare(HalfPlanePoint::new(s.x, s.y)?)?))
}

/// Hull perimeter of one half-plane path, with the path's final geodesic radius.
pub fn path_perimeter(cfg: &SimConfig, q: &QuadratureSpec, audit: bool, corr: GridCorrection) -> Result<(f64, f64)> {
    let walk = HalfPlaneWalk::new(cfg);
    let last = walk.steps();
    let mut full = HullBuilder::new();
    let mut half = HullBuilder::new();
    let mut end = None;
    for (i, s) in walk.enumerate() {
        let k = klein(&s)?;
        full.push(k);
        if on_half_grid(i, last) {
            half.push(k);
        }
        end = Some(s);
    }
    let end = end.ok_or(Error::EmptyPath)?;
    let radius = halfplane_radius(HalfPlanePoint::new(end.x, end.y)?);
    let poly = full.finish()?;
    let perimeter = edge_sum_perimeter(&poly);
    if perimeter < 2.0 * radius - 1e-9 {
        return Err(Error::BoundViolated {
            path_index: cfg.path_index(),
            perimeter,
            bound: 2.0 * radius,
        });
    }
    if audit {
        let cauchy = cauchy_perimeter(&poly, q)?;
        if (cauchy - perimeter).abs() > 1e-6 * (1.0 + perimeter) + 10.0 * q.abs_tol() {
            return Err(Error::AuditMismatch {
                path_index: cfg.path_index(),
                edge_sum: perimeter,
                cauchy,
            });
        }
    }
    let coarse = match corr {
        GridCorrection::None => perimeter,
        GridCorrection::Richardson => edge_sum_perimeter(&half.finish()?),
    };
    Ok((corr.apply(perimeter, coarse), radius))
}

/// Mean hull perimeter at time `t` from simulated half-plane paths.
///
/// Every path is checked against `L >= 2 R_t`; paths with index divisible by 100 are
/// also re-measured with the Cauchy integral.
pub fn estimate_l_direct(
    t: f64,
    n: u64,
    sim: &SimConfig,
    q: &QuadratureSpec,
    corr: GridCorrection,
    exec: &Exec,
) -> Result<MCEstimate> {
    check_n(n)?;
    let cfg = horizon(sim, t)?;
    let values = par_map(n, exec, |i| {
        path_perimeter(&cfg.for_path(i), q, i % 100 == 0, corr).map(|v| v.0)
    })?;
    let mut est = MCEstimate::from_samples("direct", &values, &cfg, t);
    est.diagnostics.audited = n.div_ceil(100);
    Ok(est)
}

/// Mean running maximum of the horizontal coordinate, `E sup_{s<=t} X_s`.
pub fn estimate_xstar(t: f64, n: u64, sim: &SimConfig, corr: GridCorrection, exec: &Exec) -> Result<MCEstimate> {
    check_n(n)?;
    let cfg = horizon(sim, t)?;
    let values = par_map(n, exec, |i| {
        let walk = HalfPlaneWalk::new(&cfg.for_path(i));
        let last = walk.steps();
        let (mut full, mut half) = (0.0f64, 0.0f64);
        for (j, s) in walk.enumerate() {
            full = full.max(s.x);
            if on_half_grid(j, last) {
                half = half.max(s.x);
            }
        }
        Ok(corr.apply(full, half))
    })?;
    Ok(MCEstimate::from_samples("xstar", &values, &cfg, t))
}

/// Conditional-expectation estimator `sqrt(8π) E sqrt(ξ_t)`.
pub fn estimate_l_rb(t: f64, n: u64, sim: &SimConfig, exec: &Exec) -> Result<MCEstimate> {
    check_n(n)?;
    let cfg = horizon(sim, t)?;
    let c = math::sqrt(8.0 * PI);
    let values = par_map(n, exec, |i| Ok(c * math::sqrt(simulate_xi(&cfg.for_path(i))?.xi_t)))?;
    Ok(MCEstimate::from_samples("rb", &values, &cfg, t))
}

/// Probability mass beyond which exponential horizons are capped.
pub const EXP_TIME_TAIL: f64 = 1e-8;

/// Perimeter at an independent `Exp(λ)` time, each path run to its own horizon.
pub fn estimate_l_exp_time(lambda: f64, n: u64, sim: &SimConfig, exec: &Exec) -> Result<MCEstimate> {
    check_n(n)?;
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidConfig("exponential rate must be positive"));
    }
    let cap = -math::ln(EXP_TIME_TAIL) / lambda;
    let c = math::sqrt(8.0 * PI);
    let values = par_map(n, exec, |i| {
        let base = sim.for_path(i);
        let drawn = path_exp_time(&base, lambda)?;
        let t = drawn.min(cap);
        let xi = simulate_xi(&base.with_horizon(t)?)?.xi_t;
        Ok((c * math::sqrt(xi), drawn > cap))
    })?;
    let samples: Vec<f64> = values.iter().map(|v| v.0).collect();
    let mut est = MCEstimate::from_samples("exp_time", &samples, sim, 1.0 / lambda);
    est.diagnostics.truncated = values.iter().filter(|v| v.1).count() as u64;
    est.diagnostics.truncation_mass = EXP_TIME_TAIL;
    Ok(est)
}

/// Which scheme supplies the radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiusSource {
    HalfPlane,
    Polar(PolarOptions),
}

/// Mean geodesic distance from the origin at time `t`.
pub fn estimate_radius(t: f64, n: u64, sim: &SimConfig, source: RadiusSource, exec: &Exec) -> Result<MCEstimate> {
    check_n(n)?;
    let cfg = horizon(sim, t)?;
    match source {
        RadiusSource::HalfPlane => {
            let values = par_map(n, exec, |i| {
                let end = HalfPlaneWalk::new(&cfg.for_path(i)).last().ok_or(Error::EmptyPath)?;
                Ok(halfplane_radius(HalfPlanePoint::new(end.x, end.y)?))
            })?;
            Ok(MCEstimate::from_samples("radius", &values, &cfg, t))
        }
        RadiusSource::Polar(opts) => {
            let values = par_map(n, exec, |i| {
                let p = simulate_polar(&cfg.for_path(i), &opts)?;
                let min_late = p
                    .times
                    .iter()
                    .zip(&p.r)
                    .filter(|(s, _)| **s >= 1.0)
                    .map(|(_, r)| *r)
                    .fold(f64::INFINITY, f64::min);
                Ok((*p.r.last().ok_or(Error::EmptyPath)?, min_late))
            })?;
            let samples: Vec<f64> = values.iter().map(|v| v.0).collect();
            let mut est = MCEstimate::from_samples("radius_polar", &samples, &cfg, t);
            let min_r = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
            est.diagnostics.min_radius = min_r.is_finite().then_some(min_r);
            Ok(est)
        }
    }
}

/// `E[ξ_t^p]`.
pub fn estimate_xi_moment(t: f64, p: f64, n: u64, sim: &SimConfig, exec: &Exec) -> Result<MCEstimate> {
    check_n(n)?;
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidConfig("moment order must be positive"));
    }
    let cfg = horizon(sim, t)?;
    let values = par_map(n, exec, |i| Ok(math::powf(simulate_xi(&cfg.for_path(i))?.xi_t, p)))?;
    Ok(MCEstimate::from_samples("xi_moment", &values, &cfg, t))
}

/// Kolmogorov–Smirnov distances of `X_t` to the Cauchy law and of `ξ_t` to the
/// positive 1/2-stable law, both from the same half-plane paths.
pub fn ks_test_limit_laws(t_large: f64, n: u64, sim: &SimConfig, exec: &Exec) -> Result<(KSResult, KSResult)> {
    check_n(n)?;
    if !(t_large >= 30.0) {
        return Err(Error::InvalidConfig("limit-law test needs t >= 30"));
    }
    let cfg = horizon(sim, t_large)?;
    let ends = par_map(n, exec, |i| HalfPlaneWalk::new(&cfg.for_path(i)).last().ok_or(Error::EmptyPath))?;
    let xs: Vec<f64> = ends.iter().map(|s| s.x).collect();
    let xis: Vec<f64> = ends.iter().map(|s| s.xi).collect();
    Ok((ks_statistic(&xs, Reference::Cauchy), ks_statistic(&xis, Reference::HalfStable)))
}

/// Per-path decay rates of the winding and limiting-angle proxies.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularRates {
    /// Slope of `log |Θ_{t_max} - Θ_t|` against `t` over the grid, one per path
    /// (NaN when fewer than two grid times carry a non-zero difference).
    pub slopes: Vec<f64>,
    /// `θ` at `t_max`, standing in for the limiting angle.
    pub theta_limit: Vec<f64>,
}

/// Regresses the log-distance of the winding to its final value on time, path by path.
pub fn angular_convergence_rate(
    n: u64,
    sim: &SimConfig,
    s_entrance: f64,
    t_grid: &[f64],
    opts: &PolarOptions,
    exec: &Exec,
) -> Result<AngularRates> {
    check_n(n)?;
    let t_max = t_grid.iter().copied().fold(f64::NAN, f64::max);
    if !(t_max > s_entrance) {
        return Err(Error::InvalidConfig("time grid must extend past the entrance time"));
    }
    let cfg = horizon(sim, t_max)?;
    let opts = PolarOptions { s_entrance, ..*opts };
    let per_path = par_map(n, exec, |i| {
        let p = simulate_polar(&cfg.for_path(i), &opts)?;
        let last = p.times.len() - 1;
        let end = p.theta_winding[last];
        let (mut ts, mut logs) = (Vec::new(), Vec::new());
        for &t in t_grid {
            if t < s_entrance || t >= t_max {
                continue;
            }
            let j = (math::floor(t / cfg.dt() + 0.5) as usize).min(last);
            let d = (end - p.theta_winding[j]).abs();
            if d > 0.0 {
                ts.push(p.times[j]);
                logs.push(math::ln(d));
            }
        }
        Ok((ls_slope(&ts, &logs), p.theta(last)))
    })?;
    Ok(AngularRates {
        slopes: per_path.iter().map(|v| v.0).collect(),
        theta_limit: per_path.iter().map(|v| v.1).collect(),
    })
}
