//! Subcommand implementations.

use std::io::Write;
use std::time::{Instant, SystemTime};

use hyphull_core::estimate::Exec;
use hyphull_core::exact::{
    euclidean_perimeter, exp_time_perimeter, g_function, perimeter_exact, psi, xi_moment_limit, ExactValue,
    MomentLimit,
};
use hyphull_core::quadrature::QuadratureSpec;

use crate::args::{EstimateArgs, ExactArgs, ExactQuantity, FigureArgs, SelftestArgs};
use crate::config::{env_seed, RunConfig, DEFAULT_SEED};
use crate::error::{CliError, Result};
use crate::figure::{self, FigureConfig};
use crate::manifest::{diff_rows, FileDigest, RunManifest, RunRecord};
use crate::report::{fmt_float, write_csv, ResultRow};

/// Flags over file over environment over defaults.
pub fn resolve_config(args: &EstimateArgs) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(seed) = env_seed()? {
        cfg.seed = seed;
    }
    if let Some(path) = &args.config {
        cfg.apply_file(path)?;
    }
    macro_rules! flag {
        ($($field:ident => $target:ident),* $(,)?) => {
            $(if let Some(v) = args.$field.clone() { cfg.$target = v; })*
        };
    }
    flag! {
        estimator => estimator, t => horizons, lambda => lambda, p => p, n => n, seed => seed,
        threads => threads, abs_tol => abs_tol, max_panels => max_panels, correction => correction,
        r_floor => r_floor, s_entrance => s_entrance, reflect_first => reflect_first,
    }
    if args.dt.is_some() {
        cfg.dt = args.dt;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit_rows(args: &EstimateArgs, rows: &[ResultRow]) -> Result<()> {
    match &args.out {
        Some(path) => {
            let f = std::fs::File::create(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
            write_csv(std::io::BufWriter::new(f), rows)
        }
        None => write_csv(std::io::stdout().lock(), rows),
    }
}

pub fn estimate(args: &EstimateArgs) -> Result<()> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let (cfg, recorded) = match &args.replay {
        Some(path) => match RunManifest::read(path)?.run {
            RunRecord::Estimate { mut config, results } => {
                if let Some(t) = args.threads {
                    config.threads = t;
                }
                (config, Some(results))
            }
            RunRecord::Figure { .. } => {
                return Err(CliError::Usage(format!("{} records a figure run", path.display())));
            }
        },
        None => (resolve_config(args)?, None),
    };
    let outcome = crate::run::run_estimate(&cfg)?;
    let rows: Vec<ResultRow> = outcome.iter().map(|r| r.0.clone()).collect();
    emit_rows(args, &rows)?;
    let manifest = RunManifest::new(
        RunRecord::Estimate {
            config: cfg.clone(),
            results: rows.clone(),
        },
        cfg.seed,
        started,
        clock.elapsed(),
    );
    if recorded.is_none() {
        manifest.write(&args.manifest)?;
    }
    if let Some(expected) = recorded {
        if let Some(d) = diff_rows(&expected, &rows) {
            return Err(CliError::Check(format!("replay differs: {d}")));
        }
        eprintln!("replay reproduced {} rows exactly", rows.len());
    }
    if args.check {
        let mut failed = Vec::new();
        for (row, verdict) in &outcome {
            let status = match verdict {
                Some(true) => "pass",
                Some(false) => "FAIL",
                None => "no reference",
            };
            eprintln!(
                "check {} t={}: mean {} ± {} target {} [{}]",
                row.label,
                row.horizon,
                row.mean,
                row.stderr,
                row.target.map_or("-".into(), |t| t.to_string()),
                status
            );
            if *verdict == Some(false) {
                failed.push(format!("{} at t={}", row.label, row.horizon));
            }
        }
        if !failed.is_empty() {
            return Err(CliError::Check(failed.join(", ")));
        }
    }
    Ok(())
}

fn print_exact(name: &str, v: ExactValue) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "quantity,value,est_abs_err,source");
    let _ = writeln!(out, "{name},{},{},{}", fmt_float(v.value), fmt_float(v.est_abs_err), v.source);
    if v.oscillation_warning {
        eprintln!("warning: integrand oscillates too fast for reliable double-precision quadrature at this t");
    }
}

pub fn exact(args: &ExactArgs) -> Result<()> {
    match args.quantity {
        ExactQuantity::G { x } => print_exact("g", g_function(x)?),
        ExactQuantity::ExpTime { lambda } => print_exact("exp-time", exp_time_perimeter(lambda)?),
        ExactQuantity::Euclid { t } => print_exact("euclid", euclidean_perimeter(t)?),
        ExactQuantity::Moment { p } => match xi_moment_limit(p)? {
            MomentLimit::Converges(v) => print_exact("moment-limit", v),
            MomentLimit::Linear(v) => print_exact("moment-slope", v),
            MomentLimit::Exponential { exponent, prefactor } => {
                print_exact("moment-prefactor", prefactor);
                println!("moment-exponent,{},{},{}", fmt_float(exponent), fmt_float(0.0), prefactor.source);
            }
        },
        ExactQuantity::Psi { u, t, abs_tol } => {
            let q = QuadratureSpec::new(abs_tol, QuadratureSpec::default().max_panels())?;
            print_exact("psi", psi(u, t, &q)?)
        }
        ExactQuantity::Perimeter { t, abs_tol, max_panels } => {
            print_exact("perimeter", perimeter_exact(t, &QuadratureSpec::new(abs_tol, max_panels)?)?)
        }
    }
    Ok(())
}

pub fn figure(args: &FigureArgs) -> Result<()> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let (cfg, recorded) = match &args.replay {
        Some(path) => match RunManifest::read(path)?.run {
            RunRecord::Figure { config, files } => (config, Some(files)),
            RunRecord::Estimate { .. } => {
                return Err(CliError::Usage(format!("{} records an estimate run", path.display())));
            }
        },
        None => {
            let defaults = FigureConfig::default();
            let seed = match args.seed {
                Some(s) => s,
                None => env_seed()?.unwrap_or(DEFAULT_SEED),
            };
            (
                FigureConfig {
                    t: args.t,
                    steps: args.steps,
                    s: args.s,
                    seed,
                    r_floor: args.r_floor.unwrap_or(defaults.r_floor),
                    max_points: args.max_points,
                    dump_stride: args.dump_stride,
                    ..defaults
                },
                None,
            )
        }
    };
    let written = figure::emit(&cfg, &args.out_dir)?;
    let digests = written.iter().map(|p| FileDigest::of(p)).collect::<Result<Vec<_>>>()?;
    for p in &written {
        println!("{}", p.display());
    }
    if let Some(expected) = recorded {
        if expected != digests {
            return Err(CliError::Check("regenerated figure files differ from the manifest".into()));
        }
        eprintln!("replay reproduced {} files exactly", digests.len());
        return Ok(());
    }
    let manifest_path = args.manifest.clone().unwrap_or_else(|| args.out_dir.join("manifest.json"));
    RunManifest::new(
        RunRecord::Figure {
            config: cfg.clone(),
            files: digests,
        },
        cfg.seed,
        started,
        clock.elapsed(),
    )
    .write(&manifest_path)
}

pub fn selftest(args: &SelftestArgs) -> Result<()> {
    let seed = match args.seed {
        Some(s) => s,
        None => env_seed()?.unwrap_or(DEFAULT_SEED),
    };
    let exec = args.threads.map_or_else(Exec::default, Exec::new);
    let outcomes = crate::selftest::run(seed, &exec);
    let mut failed = 0;
    for o in &outcomes {
        println!("{} {}: {}", if o.passed { "ok  " } else { "FAIL" }, o.name, o.detail);
        failed += usize::from(!o.passed);
    }
    if failed > 0 {
        return Err(CliError::Check(format!("{failed} of {} self-tests failed", outcomes.len())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::{Cli, Command};
    use clap::Parser;

    fn estimate_args(argv: &[&str]) -> EstimateArgs {
        let full: Vec<&str> = ["hyphull", "estimate"].iter().chain(argv).copied().collect();
        match Cli::try_parse_from(full).unwrap().command {
            Command::Estimate(a) => a,
            _ => unreachable!(),
        }
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("run.conf");
        std::fs::write(&file, "estimator = xstar\nn = 500\nseed = 3\n").unwrap();
        let cfg = resolve_config(&estimate_args(&["--config", file.to_str().unwrap(), "--n", "700"])).unwrap();
        assert_eq!(cfg.n, 700);
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.estimator.name(), "xstar");
    }

    #[test]
    fn estimate_then_replay() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = dir.path().join("m.json");
        let out = dir.path().join("r.csv");
        let m = manifest.to_str().unwrap();
        let o = out.to_str().unwrap();
        estimate(&estimate_args(&["--estimator", "rb", "--t", "0.5", "--n", "200", "--manifest", m, "--out", o])).unwrap();
        let first = std::fs::read_to_string(&out).unwrap();
        estimate(&estimate_args(&["--replay", m, "--threads", "3", "--out", o])).unwrap();
        assert_eq!(std::fs::read_to_string(&out).unwrap(), first);

        // a tampered manifest is detected
        let text = std::fs::read_to_string(&manifest).unwrap();
        let rows = RunManifest::read(&manifest).unwrap();
        let RunRecord::Estimate { results, .. } = rows.run else { unreachable!() };
        let mean = serde_json::to_string(&results[0].mean).unwrap();
        std::fs::write(&manifest, text.replacen(&mean, "1.0", 1)).unwrap();
        let err = estimate(&estimate_args(&["--replay", m, "--out", o])).unwrap_err();
        assert!(matches!(err, CliError::Check(_)), "{err}");
    }

    #[test]
    fn check_failure_maps_to_exit_two() {
        let dir = tempfile::tempdir().unwrap();
        let m = dir.path().join("m.json");
        // far too coarse a grid for the 3% band at t = 1
        let args = estimate_args(&[
            "--estimator", "direct", "--t", "1", "--n", "200", "--dt", "0.25", "--correction", "none", "--check",
            "--manifest", m.to_str().unwrap(), "--out", dir.path().join("r.csv").to_str().unwrap(),
        ]);
        assert!(matches!(estimate(&args), Err(CliError::Check(_))));
    }
}
