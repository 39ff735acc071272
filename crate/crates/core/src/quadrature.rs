//! Globally adaptive 16-point Gauss–Legendre quadrature.
//!
//! The caller supplies breakpoints (kinks of the integrand); each segment starts
//! as one panel and the panel with the largest error estimate is bisected until
//! the summed estimate falls under `abs_tol`. Splitting order and summation
//! order depend only on the integrand values, so results are reproducible.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

use crate::error::{Error, Result};

/// Tolerance and panel budget for an adaptive integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    abs_tol: f64,
    max_panels: usize,
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, max_panels: usize) -> Result<Self> {
        if !(abs_tol > 0.0) {
            return Err(Error::InvalidConfig("abs_tol must be positive"));
        }
        if max_panels == 0 {
            return Err(Error::InvalidConfig("max_panels must be at least 1"));
        }
        Ok(Self { abs_tol, max_panels })
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    pub fn max_panels(&self) -> usize {
        self.max_panels
    }

    /// Same panel budget, different tolerance.
    pub fn with_abs_tol(self, abs_tol: f64) -> Result<Self> {
        Self::new(abs_tol, self.max_panels)
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            max_panels: 4096,
        }
    }
}

const GL16_NODES: [f64; 8] = [
    0.095_012_509_837_637_45,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_37,
    0.617_876_244_402_643_8,
    0.755_404_408_355_003,
    0.865_631_202_387_831_8,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];
const GL16_WEIGHTS: [f64; 8] = [
    0.189_450_610_455_068_59,
    0.182_603_415_044_923_6,
    0.169_156_519_395_002_62,
    0.149_595_988_816_576_76,
    0.124_628_971_255_534_03,
    0.095_158_511_682_492_59,
    0.062_253_523_938_647_706,
    0.027_152_459_411_754_037,
];

/// Fixed 16-node Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre_16<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL16_NODES.iter().zip(GL16_WEIGHTS.iter()) {
        let dx = half * x;
        acc += w * (f(mid - dx) + f(mid + dx));
    }
    acc * half
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_err: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // largest error first; ties broken by position
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let coarse = gauss_legendre_16(f, a, b);
    let m = 0.5 * (a + b);
    let fine = gauss_legendre_16(f, a, m) + gauss_legendre_16(f, m, b);
    Panel {
        a,
        b,
        value: fine,
        err: (fine - coarse).abs(),
    }
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, treating every interior
/// breakpoint as a panel boundary. Breakpoints must be non-decreasing.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Integral> {
    let mut heap = BinaryHeap::with_capacity(breaks.len());
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(panel(&mut f, w[0], w[1]));
        }
    }
    let mut total_err: f64 = heap.iter().map(|p| p.err).sum();
    while total_err > spec.abs_tol {
        if heap.len() >= spec.max_panels {
            return Err(Error::ToleranceNotMet {
                abs_tol: spec.abs_tol,
                max_panels: spec.max_panels,
                estimate: total_err,
            });
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let m = 0.5 * (worst.a + worst.b);
        if !(m > worst.a && m < worst.b) {
            // interval exhausted at double precision; accept what is there
            heap.push(Panel { err: 0.0, ..worst });
            total_err -= worst.err;
            continue;
        }
        let left = panel(&mut f, worst.a, m);
        let right = panel(&mut f, m, worst.b);
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        if total_err <= spec.abs_tol {
            // re-sum to shed accumulated rounding in the running total
            total_err = heap.iter().map(|p| p.err).sum();
        }
    }
    let mut panels = heap.into_vec();
    panels.sort_unstable_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().map(|p| p.value).sum();
    let abs_err = panels.iter().map(|p| p.err).sum();
    Ok(Integral {
        value,
        abs_err,
        panels: panels.len(),
    })
}

/// Adaptive integral of `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral> {
    integrate_with_breaks(f, &[a, b], spec)
}
