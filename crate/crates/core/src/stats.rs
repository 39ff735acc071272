//! Sample summaries, reference distributions and the Kolmogorov–Smirnov distance.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_PI, PI, TAU};

use crate::math;

/// Sum in a fixed balanced tree, so the rounding depends only on the order of `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Mean and standard error `sd / sqrt(n)` (two-pass, pairwise).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(xs) / n as f64;
    if n < 2 {
        return (mean, f64::NAN);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1) as f64;
    (mean, math::sqrt(var / n as f64))
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return f64::NAN;
    }
    let mx = pairwise_sum(&xs[..n]) / n as f64;
    let my = pairwise_sum(&ys[..n]) / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for i in 0..n {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    sxy / sxx
}

/// Median (average of the two middle values for even length). NaN for empty input.
pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Reference laws for goodness-of-fit checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reference {
    /// Standard Cauchy.
    Cauchy,
    /// Positive 1/2-stable law with density proportional to `s^{-3/2} exp(-1/(2s))`.
    HalfStable,
    /// Uniform on `[0, 2π)`.
    UniformAngle,
}

impl Reference {
    pub fn name(self) -> &'static str {
        match self {
            Reference::Cauchy => "cauchy",
            Reference::HalfStable => "half-stable",
            Reference::UniformAngle => "uniform-angle",
        }
    }

    pub fn cdf(self, x: f64) -> f64 {
        match self {
            Reference::Cauchy => 0.5 + FRAC_1_PI * math::atan(x),
            Reference::HalfStable => {
                if x <= 0.0 {
                    0.0
                } else {
                    math::erfc(1.0 / math::sqrt(2.0 * x))
                }
            }
            Reference::UniformAngle => (x / TAU).clamp(0.0, 1.0),
        }
    }

    /// Inverse CDF, for drawing reference samples.
    pub fn quantile(self, p: f64) -> f64 {
        match self {
            Reference::Cauchy => math::tan(PI * (p - 0.5)),
            Reference::HalfStable => {
                // erfc(1/sqrt(2s)) = p, solved by bisection on 1/sqrt(2s)
                let (mut lo, mut hi) = (0.0f64, 40.0f64);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if math::erfc(mid) > p {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let z = 0.5 * (lo + hi);
                1.0 / (2.0 * z * z)
            }
            Reference::UniformAngle => TAU * p,
        }
    }
}

/// One-sample Kolmogorov–Smirnov outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KSResult {
    pub statistic: f64,
    pub n: usize,
    pub reference: Reference,
}

/// `sup_x |F_n(x) - F(x)|` of `samples` against `reference`.
pub fn ks_statistic(samples: &[f64], reference: Reference) -> KSResult {
    let mut v = samples.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = reference.cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    KSResult {
        statistic: d.clamp(0.0, 1.0),
        n: v.len(),
        reference,
    }
}
