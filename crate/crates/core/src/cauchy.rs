//! Perimeter of a hyperbolic convex polygon as an angular integral.
//!
//! For each direction `φ`, `λ(φ, x)` is the signed position at which the chord
//! from the boundary point `(cos φ, sin φ)` through `x` crosses the diameter
//! orthogonal to that direction. The perimeter of a convex body `K` in the Klein
//! disk is `∫₀^{2π} sup_{x∈K} λ(φ, x) dφ`, and the supremum over a polygon is
//! attained at a vertex.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::error::Result;
use crate::geometry::{poincare_to_klein, KleinPoint, PoincarePoint};
use crate::hull::{convex_hull_points, ConvexPolygon};
use crate::math;
use crate::quadrature::{integrate_with_breaks, QuadratureSpec};

/// Angles sampled when looking for changes of the maximising vertex.
pub const SWITCH_SCAN: usize = 1024;

const BISECTION_STEPS: usize = 64;

#[inline]
pub fn lambda_fn(phi: f64, x: KleinPoint) -> f64 {
    let (s, c) = (math::sin(phi), math::cos(phi));
    (x.v() * c - x.u() * s) / (1.0 - x.u() * c - x.v() * s)
}

#[inline]
fn lambda_sc(s: f64, c: f64, x: &KleinPoint) -> f64 {
    (x.v() * c - x.u() * s) / (1.0 - x.u() * c - x.v() * s)
}

/// Index of the vertex maximising `λ(φ, ·)`; lowest index wins ties.
fn argmax(phi: f64, vertices: &[KleinPoint]) -> (usize, f64) {
    let (s, c) = (math::sin(phi), math::cos(phi));
    let mut best = (0, lambda_sc(s, c, &vertices[0]));
    for (i, x) in vertices.iter().enumerate().skip(1) {
        let l = lambda_sc(s, c, x);
        if l > best.1 {
            best = (i, l);
        }
    }
    best
}

/// `sup_{x ∈ poly} λ(φ, x)`.
pub fn support(phi: f64, poly: &ConvexPolygon) -> f64 {
    argmax(phi, poly.vertices()).1
}

/// Angles in `(0, 2π)` where the maximising vertex changes, sorted, bracketed by 0 and 2π.
pub fn switch_angles(poly: &ConvexPolygon) -> Vec<f64> {
    let v = poly.vertices();
    let mut breaks = Vec::with_capacity(2 * v.len() + 2);
    breaks.push(0.0);
    if v.len() < 2 {
        breaks.push(TAU);
        return breaks;
    }
    let step = TAU / SWITCH_SCAN as f64;
    let mut left = (0.0, argmax(0.0, v).0);
    for k in 1..=SWITCH_SCAN {
        let phi = if k == SWITCH_SCAN { TAU } else { k as f64 * step };
        let right = (phi, argmax(phi, v).0);
        // walk every change inside [left, right]
        let mut lo = left;
        while lo.1 != right.1 {
            let (mut a, mut b) = (lo.0, right.0);
            let mut b_idx = right.1;
            for _ in 0..BISECTION_STEPS {
                let m = 0.5 * (a + b);
                if !(m > a && m < b) {
                    break;
                }
                let idx = argmax(m, v).0;
                if idx == lo.1 {
                    a = m;
                } else {
                    b = m;
                    b_idx = idx;
                }
            }
            if b < TAU {
                breaks.push(b);
            }
            lo = (b, b_idx);
            if b >= right.0 {
                break;
            }
        }
        left = right;
    }
    breaks.push(TAU);
    breaks.sort_unstable_by(f64::total_cmp);
    breaks.dedup();
    breaks
}

/// `∫₀^{2π} support(φ, poly) dφ`, with panels split at the switch angles.
pub fn cauchy_perimeter(poly: &ConvexPolygon, q: &QuadratureSpec) -> Result<f64> {
    if poly.len() < 2 {
        return Ok(0.0);
    }
    let breaks = switch_angles(poly);
    let v = poly.vertices();
    let integral = integrate_with_breaks(|phi| argmax(phi, v).1, &breaks, q)?;
    Ok(integral.value)
}

/// Same perimeter for a point cloud given in the Poincaré disk: map by
/// `f(z) = 2z / (1 + |z|^2)`, hull in the Klein disk, integrate.
pub fn cauchy_perimeter_poincare(points: &[PoincarePoint], q: &QuadratureSpec) -> Result<f64> {
    let klein: Vec<KleinPoint> = points.iter().map(|&p| poincare_to_klein(p)).collect();
    let poly = convex_hull_points(&klein)?;
    cauchy_perimeter(&poly, q)
}
