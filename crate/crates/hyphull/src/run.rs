//! Estimation runs, reference values and the tolerance checks of `--check`.

use std::f64::consts::PI;

use hyphull_core::estimate::{
    estimate_l_direct, estimate_l_exp_time, estimate_l_rb, estimate_radius, estimate_xi_moment, estimate_xstar, Exec,
    MCEstimate, RadiusSource,
};
use hyphull_core::exact::{
    euclidean_perimeter, exp_time_perimeter, perimeter_exact, xi_moment_limit, ExactValue, MomentLimit,
    PERIMETER_MIN_T,
};
use hyphull_core::quadrature::QuadratureSpec;
use hyphull_core::simulate::SimConfig;

use crate::config::{EstimatorKind, RunConfig};
use crate::error::{CliError, Result};
use crate::report::ResultRow;

/// Below this horizon the planar perimeter serves as the reference.
pub const PLANAR_REGIME_T: f64 = 0.05;
/// Largest horizon at which the fixed-time quadrature is evaluated as a reference.
pub const QUADRATURE_MAX_T: f64 = 20.0;
/// Horizon from which the radius is compared with `t/2`.
pub const RADIAL_REGIME_T: f64 = 50.0;

/// A reference value together with how to judge an estimate against it.
#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub value: f64,
    pub source: String,
    pub rule: Rule,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rule {
    /// `|mean / target - 1| <= tol`.
    Relative(f64),
    /// `|log(mean) / log(target) - 1| <= tol`, for exponentially growing moments.
    LogRelative(f64),
}

impl Target {
    fn new(v: ExactValue, rule: Rule) -> Self {
        Self {
            value: v.value,
            source: v.source.tag().to_string(),
            rule,
        }
    }

    pub fn passes(&self, mean: f64) -> bool {
        match self.rule {
            Rule::Relative(tol) => (mean / self.value - 1.0).abs() <= tol,
            Rule::LogRelative(tol) => (mean.ln() / self.value.ln() - 1.0).abs() <= tol,
        }
    }
}

fn target_tolerance() -> QuadratureSpec {
    QuadratureSpec::new(1e-6, 1 << 14).expect("valid quadrature spec")
}

/// Perimeter reference at fixed time, where one is available.
pub fn perimeter_target(t: f64) -> Result<Option<Target>> {
    if t <= PLANAR_REGIME_T {
        return Ok(Some(Target::new(euclidean_perimeter(t)?, Rule::Relative(0.03))));
    }
    if (PERIMETER_MIN_T..=QUADRATURE_MAX_T).contains(&t) {
        return Ok(Some(Target::new(perimeter_exact(t, &target_tolerance())?, Rule::Relative(0.03))));
    }
    Ok(None)
}

pub fn target_for(cfg: &RunConfig, t: f64) -> Result<Option<Target>> {
    Ok(match cfg.estimator {
        EstimatorKind::Direct | EstimatorKind::Rb => perimeter_target(t)?,
        EstimatorKind::Xstar => perimeter_target(t)?.map(|mut tg| {
            tg.value /= 2.0 * PI;
            tg
        }),
        EstimatorKind::ExpTime => Some(Target::new(exp_time_perimeter(cfg.lambda)?, Rule::Relative(0.02))),
        EstimatorKind::Radius | EstimatorKind::RadiusPolar => (t >= RADIAL_REGIME_T).then(|| Target {
            value: 0.5 * t,
            source: "radial-drift".into(),
            rule: Rule::Relative(0.04),
        }),
        EstimatorKind::XiMoment => match xi_moment_limit(cfg.p)? {
            MomentLimit::Converges(v) => (t >= 50.0).then(|| Target::new(v, Rule::Relative(0.03))),
            MomentLimit::Linear(v) => (t >= 20.0).then(|| Target {
                value: v.value * t,
                source: v.source.tag().to_string(),
                rule: Rule::Relative(0.05),
            }),
            MomentLimit::Exponential { exponent, prefactor } => Some(Target {
                value: prefactor.value * (exponent * t).exp(),
                source: prefactor.source.tag().to_string(),
                rule: Rule::LogRelative(0.15),
            }),
        },
    })
}

fn run_one(cfg: &RunConfig, t: f64, exec: &Exec) -> Result<MCEstimate> {
    let sim = SimConfig::new(t, cfg.dt_for(t), cfg.seed, 0)
        .map_err(|e| CliError::Usage(format!("horizon {t}: {e}")))?;
    let q = cfg.quadrature()?;
    let corr = cfg.correction.into();
    Ok(match cfg.estimator {
        EstimatorKind::Direct => estimate_l_direct(t, cfg.n, &sim, &q, corr, exec)?,
        EstimatorKind::Xstar => estimate_xstar(t, cfg.n, &sim, corr, exec)?,
        EstimatorKind::Rb => estimate_l_rb(t, cfg.n, &sim, exec)?,
        EstimatorKind::ExpTime => estimate_l_exp_time(cfg.lambda, cfg.n, &sim, exec)?,
        EstimatorKind::Radius => estimate_radius(t, cfg.n, &sim, RadiusSource::HalfPlane, exec)?,
        EstimatorKind::RadiusPolar => estimate_radius(t, cfg.n, &sim, RadiusSource::Polar(cfg.polar()), exec)?,
        EstimatorKind::XiMoment => estimate_xi_moment(t, cfg.p, cfg.n, &sim, exec)?,
    })
}

/// Runs every configured horizon; returns the rows and, per row, whether a check passed.
pub fn run_estimate(cfg: &RunConfig) -> Result<Vec<(ResultRow, Option<bool>)>> {
    cfg.validate()?;
    let exec = Exec::new(cfg.threads);
    let horizons = if cfg.estimator == EstimatorKind::ExpTime {
        vec![1.0 / cfg.lambda]
    } else {
        cfg.horizons.clone()
    };
    let mut rows = Vec::with_capacity(horizons.len());
    for t in horizons {
        let est = run_one(cfg, t, &exec)?;
        let target = target_for(cfg, t)?;
        let verdict = target.as_ref().map(|tg| tg.passes(est.mean));
        rows.push((
            ResultRow {
                label: cfg.estimator.name().to_string(),
                horizon: est.horizon,
                n: est.n,
                dt: est.dt,
                seed: est.seed,
                mean: est.mean,
                stderr: est.stderr,
                target: target.as_ref().map(|tg| tg.value),
                target_source: target.map(|tg| tg.source),
            },
            verdict,
        ));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_time_target_is_g_three() {
        let cfg = RunConfig {
            estimator: EstimatorKind::ExpTime,
            ..RunConfig::default()
        };
        let t = target_for(&cfg, 1.0).unwrap().unwrap();
        assert!((t.value - PI * PI / 2.0).abs() < 1e-12);
        assert_eq!(t.source, "g-function");
        assert!(t.passes(4.9));
        assert!(!t.passes(4.8));
    }

    #[test]
    fn perimeter_targets_by_regime() {
        assert_eq!(perimeter_target(0.01).unwrap().unwrap().source, "euclidean");
        assert!(perimeter_target(0.2).unwrap().is_none());
        let t = perimeter_target(1.0).unwrap().unwrap();
        assert!((t.value - 5.40575).abs() < 1e-4);
        assert!(perimeter_target(30.0).unwrap().is_none());
    }

    #[test]
    fn moment_targets() {
        let mut cfg = RunConfig {
            estimator: EstimatorKind::XiMoment,
            p: 1.0,
            ..RunConfig::default()
        };
        let t = target_for(&cfg, 5.0).unwrap().unwrap();
        assert!((t.value - 5f64.exp()).abs() < 1e-9);
        assert!(t.passes(5f64.exp() * 1.5));
        cfg.p = 0.25;
        assert!(target_for(&cfg, 10.0).unwrap().is_none());
        assert!(target_for(&cfg, 50.0).unwrap().is_some());
    }

    #[test]
    fn rows_carry_config() {
        let cfg = RunConfig {
            horizons: vec![0.5, 1.0],
            n: 200,
            seed: 9,
            threads: 2,
            ..RunConfig::default()
        };
        let rows = run_estimate(&cfg).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].0.horizon, 0.5);
        assert_eq!(rows[1].0.seed, 9);
        assert_eq!(rows[1].0.label, "rb");
        assert!(rows[1].0.target.is_some());
    }
}
