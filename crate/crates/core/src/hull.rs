//! Convex hulls in the Klein disk, where hyperbolic geodesics are straight chords,
//! so the Euclidean hull of a point set is also its hyperbolic hull.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geometry::{hyp_distance, klein_to_poincare, KleinPoint};

/// Orientation values within this band count as collinear.
pub const COLLINEAR_EPS: f64 = 1e-15;

/// Points buffered before they are folded into the running hull.
pub const HULL_BATCH: usize = 4096;

/// Convex polygon in the Klein disk, counterclockwise, without collinear vertices.
///
/// One vertex is a point, two vertices a segment (whose boundary is traversed
/// twice when measuring perimeter).
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<KleinPoint>,
}

impl ConvexPolygon {
    pub fn vertices(&self) -> &[KleinPoint] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// A sampled trajectory in the Klein disk.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarPath {
    points: Vec<KleinPoint>,
    times: Vec<f64>,
}

impl PlanarPath {
    pub fn new(points: Vec<KleinPoint>, times: Vec<f64>) -> Result<Self> {
        if points.len() != times.len() {
            return Err(Error::InvalidConfig("points and times must have equal length"));
        }
        if times.first().is_some_and(|&t| !(t >= 0.0)) || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidConfig("times must be non-negative and strictly increasing"));
        }
        Ok(Self { points, times })
    }

    pub fn points(&self) -> &[KleinPoint] {
        &self.points
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

#[inline]
fn cross(o: &KleinPoint, a: &KleinPoint, b: &KleinPoint) -> f64 {
    (a.u() - o.u()) * (b.v() - o.v()) - (a.v() - o.v()) * (b.u() - o.u())
}

fn lex(a: &KleinPoint, b: &KleinPoint) -> Ordering {
    a.u().total_cmp(&b.u()).then(a.v().total_cmp(&b.v()))
}

/// Monotone-chain hull of an arbitrary point multiset. `points` is reordered.
fn monotone_chain(points: &mut Vec<KleinPoint>) -> Vec<KleinPoint> {
    points.sort_unstable_by(lex);
    points.dedup();
    let n = points.len();
    if n <= 2 {
        return points.clone();
    }
    let mut hull: Vec<KleinPoint> = Vec::with_capacity(n + 1);
    for p in points.iter() {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= COLLINEAR_EPS {
            hull.pop();
        }
        hull.push(*p);
    }
    let lower = hull.len() + 1;
    for p in points.iter().rev().skip(1) {
        while hull.len() >= lower && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= COLLINEAR_EPS {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();
    if hull.len() == 1 {
        // every point collinear within the band: keep the two extremes
        hull.push(points[n - 1]);
    }
    hull
}

/// Hull of a slice of Klein points.
pub fn convex_hull_points(points: &[KleinPoint]) -> Result<ConvexPolygon> {
    if points.is_empty() {
        return Err(Error::EmptyPath);
    }
    let mut work = points.to_vec();
    Ok(ConvexPolygon {
        vertices: monotone_chain(&mut work),
    })
}

pub fn convex_hull(path: &PlanarPath) -> Result<ConvexPolygon> {
    let mut builder = HullBuilder::new();
    for p in path.points() {
        builder.push(*p);
    }
    builder.finish()
}

/// Streaming hull: points are buffered and merged with the current hull every
/// [`HULL_BATCH`] pushes, so long trajectories are never held in full.
#[derive(Debug, Clone, Default)]
pub struct HullBuilder {
    hull: Vec<KleinPoint>,
    buffer: Vec<KleinPoint>,
}

impl HullBuilder {
    pub fn new() -> Self {
        Self {
            hull: Vec::new(),
            buffer: Vec::with_capacity(HULL_BATCH),
        }
    }

    pub fn push(&mut self, p: KleinPoint) {
        self.buffer.push(p);
        if self.buffer.len() >= HULL_BATCH {
            self.flush();
        }
    }

    fn flush(&mut self) {
        if self.buffer.is_empty() {
            return;
        }
        self.buffer.extend_from_slice(&self.hull);
        self.hull = monotone_chain(&mut self.buffer);
        self.buffer.clear();
    }

    pub fn finish(mut self) -> Result<ConvexPolygon> {
        self.flush();
        if self.hull.is_empty() {
            return Err(Error::EmptyPath);
        }
        Ok(ConvexPolygon { vertices: self.hull })
    }
}

/// Perimeter as the sum of geodesic edge lengths, walking the vertices cyclically.
pub fn edge_sum_perimeter(poly: &ConvexPolygon) -> f64 {
    let v = poly.vertices();
    if v.len() < 2 {
        return 0.0;
    }
    let disk: Vec<_> = v.iter().map(|&q| klein_to_poincare(q)).collect();
    let mut total = 0.0;
    for i in 0..disk.len() {
        total += hyp_distance(disk[i], disk[(i + 1) % disk.len()]);
    }
    total
}
