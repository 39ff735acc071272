//! Coordinate models of the hyperbolic plane and the exact maps between them.
//!
//! Four charts are used: geodesic polar coordinates about the origin, the upper
//! half-plane (origin at `(0, 1)`), the Poincaré disk and the Beltrami–Klein disk.
//! Both disk models share the polar angle of a point, and the Klein disk has
//! straight chords as geodesics, which is why hulls are built there.

use crate::error::{Error, Result};
use crate::math;

/// Points with `|z|^2` at or above `1 - DISK_MARGIN` are treated as boundary points.
pub const DISK_MARGIN: f64 = 1e-14;

/// Geodesic polar coordinates `(r, θ)` about the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicPolar {
    r: f64,
    theta: f64,
}

impl GeodesicPolar {
    /// `theta` is reduced to `[0, 2π)`; at `r = 0` it is stored as 0.
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() || !theta.is_finite() {
            return Err(Error::OutOfDomain("geodesic radius must be finite and non-negative"));
        }
        let theta = if r == 0.0 { 0.0 } else { math::wrap_angle(theta) };
        Ok(Self { r, theta })
    }

    pub fn origin() -> Self {
        Self { r: 0.0, theta: 0.0 }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Poincaré disk image: radius `tanh(r/2)` at the same angle.
    pub fn to_poincare(&self) -> Result<PoincarePoint> {
        let rho = math::tanh(0.5 * self.r);
        PoincarePoint::new(rho * math::cos(self.theta), rho * math::sin(self.theta))
    }

    /// Klein disk image: radius `tanh(r)` at the same angle.
    pub fn to_klein(&self) -> Result<KleinPoint> {
        let rho = math::tanh(self.r);
        KleinPoint::new(rho * math::cos(self.theta), rho * math::sin(self.theta))
    }
}

/// Point `(x, y)` of the upper half-plane, `y > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlanePoint {
    x: f64,
    y: f64,
}

impl HalfPlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::OutOfDomain("half-plane point needs finite x and y > 0"));
        }
        Ok(Self { x, y })
    }

    pub fn origin() -> Self {
        Self { x: 0.0, y: 1.0 }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

macro_rules! disk_point {
    ($(#[$doc:meta])* $name:ident, $what:literal) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub struct $name {
            u: f64,
            v: f64,
        }

        impl $name {
            /// Rejects points on or numerically indistinguishable from the unit circle.
            pub fn new(u: f64, v: f64) -> Result<Self> {
                let n2 = u * u + v * v;
                if !(n2 < 1.0 - DISK_MARGIN) || !u.is_finite() || !v.is_finite() {
                    return Err(Error::OutOfDomain(concat!($what, " point must lie strictly inside the unit disk")));
                }
                Ok(Self { u, v })
            }

            pub fn origin() -> Self {
                Self { u: 0.0, v: 0.0 }
            }

            pub fn u(&self) -> f64 {
                self.u
            }

            pub fn v(&self) -> f64 {
                self.v
            }

            /// Euclidean norm in the disk.
            pub fn norm(&self) -> f64 {
                math::hypot(self.u, self.v)
            }

            pub fn norm_sq(&self) -> f64 {
                self.u * self.u + self.v * self.v
            }

            /// Polar angle in `[0, 2π)` (0 at the centre).
            pub fn angle(&self) -> f64 {
                if self.u == 0.0 && self.v == 0.0 {
                    0.0
                } else {
                    math::wrap_angle(math::atan2(self.v, self.u))
                }
            }
        }
    };
}

disk_point!(
    /// Point `(u, v)` of the Poincaré disk.
    PoincarePoint,
    "Poincaré"
);
disk_point!(
    /// Point `(u, v)` of the Beltrami–Klein disk.
    KleinPoint,
    "Klein"
);

pub fn polar_to_halfplane(p: GeodesicPolar) -> HalfPlanePoint {
    let (sh, ch) = (math::sinh(p.r), math::cosh(p.r));
    let (s, c) = (math::sin(p.theta), math::cos(p.theta));
    // cosh R - sinh R sin θ, rearranged so that R large with sin θ near 1 does not cancel.
    let denom = if s > 0.0 {
        ch * (c * c) / (1.0 + s) + math::exp(-p.r) * s
    } else {
        ch - sh * s
    };
    HalfPlanePoint {
        x: sh * c / denom,
        y: 1.0 / denom,
    }
}

pub fn halfplane_to_poincare(p: HalfPlanePoint) -> Result<PoincarePoint> {
    let (x, y) = (p.x, p.y);
    let d = x * x + (y + 1.0) * (y + 1.0);
    PoincarePoint::new(2.0 * x / d, (x * x + y * y - 1.0) / d)
}

pub fn poincare_to_halfplane(p: PoincarePoint) -> HalfPlanePoint {
    let (u, v) = (p.u, p.v);
    let w = 1.0 - v;
    let d = u * u + w * w;
    HalfPlanePoint {
        x: 2.0 * u / d,
        y: 2.0 * w / d - 1.0,
    }
}

/// `f(z) = 2z / (1 + |z|^2)`.
pub fn poincare_to_klein(p: PoincarePoint) -> KleinPoint {
    let s = 2.0 / (1.0 + p.norm_sq());
    KleinPoint {
        u: s * p.u,
        v: s * p.v,
    }
}

/// `g(z) = z / (1 + sqrt(1 - |z|^2))`.
pub fn klein_to_poincare(q: KleinPoint) -> PoincarePoint {
    let s = 1.0 / (1.0 + math::sqrt(1.0 - q.norm_sq()));
    PoincarePoint {
        u: s * q.u,
        v: s * q.v,
    }
}

/// Hyperbolic distance from the origin, `2 artanh |p|`.
pub fn geodesic_radius(p: PoincarePoint) -> f64 {
    2.0 * math::atanh(p.norm())
}

/// Hyperbolic distance from the origin for a Klein point, `artanh |q|`.
pub fn klein_geodesic_radius(q: KleinPoint) -> f64 {
    math::atanh(q.norm())
}

/// Hyperbolic distance from the origin read off half-plane coordinates,
/// `cosh R = (x^2 + y^2 + 1) / (2y)`.
pub fn halfplane_radius(p: HalfPlanePoint) -> f64 {
    let delta = (p.x * p.x + (p.y - 1.0) * (p.y - 1.0)) / (2.0 * p.y);
    // acosh(1 + δ) without forming 1 + δ
    math::ln_1p(delta + math::sqrt(delta * (delta + 2.0)))
}

/// Hyperbolic distance between two Poincaré-disk points.
///
/// Uses `d = 2 asinh(|a - b| / sqrt((1 - |a|^2)(1 - |b|^2)))`, the half-angle
/// form of `cosh d = 1 + 2|a - b|^2 / ((1 - |a|^2)(1 - |b|^2))`, which stays
/// accurate for short edges.
pub fn hyp_distance(a: PoincarePoint, b: PoincarePoint) -> f64 {
    let du = a.u - b.u;
    let dv = a.v - b.v;
    let chord = math::hypot(du, dv);
    if chord == 0.0 {
        return 0.0;
    }
    let denom = math::sqrt((1.0 - a.norm_sq()) * (1.0 - b.norm_sq()));
    2.0 * math::asinh(chord / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{E, FRAC_PI_2, PI};
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn polar_examples() {
        let p = polar_to_halfplane(GeodesicPolar::origin());
        assert_eq!((p.x(), p.y()), (0.0, 1.0));

        let p = polar_to_halfplane(GeodesicPolar::new(1.0, FRAC_PI_2).unwrap());
        assert!(close(p.x(), 0.0, 1e-15));
        assert!(close(p.y(), E, 1e-14));

        let p = polar_to_halfplane(GeodesicPolar::new(1.0, 0.0).unwrap());
        assert!(close(p.x(), 1f64.tanh(), 1e-15));
        assert!(close(p.y(), 1.0 / 1f64.cosh(), 1e-15));
        assert!(close(p.x(), 0.76159, 1e-5) && close(p.y(), 0.64805, 1e-5));
    }

    #[test]
    fn origin_angle_convention() {
        let p = GeodesicPolar::new(0.0, 2.5).unwrap();
        assert_eq!(p.theta(), 0.0);
        assert!(GeodesicPolar::new(-1.0, 0.0).is_err());
    }

    #[test]
    fn halfplane_poincare_examples() {
        let z = halfplane_to_poincare(HalfPlanePoint::origin()).unwrap();
        assert_eq!((z.u(), z.v()), (0.0, 0.0));

        let z = halfplane_to_poincare(HalfPlanePoint::new(0.0, E).unwrap()).unwrap();
        assert!(close(z.u(), 0.0, 1e-16));
        assert!(close(z.v(), 0.5f64.tanh(), 1e-15));
        assert!(close(z.v(), 0.46212, 1e-5));

        let h = poincare_to_halfplane(PoincarePoint::origin());
        assert_eq!((h.x(), h.y()), (0.0, 1.0));
    }

    #[test]
    fn near_south_pole_maps_to_small_y() {
        let delta = 1e-3;
        let h = poincare_to_halfplane(PoincarePoint::new(0.0, -1.0 + delta).unwrap());
        let expected = (delta / 2.0) / (1.0 - delta / 2.0);
        assert_eq!(h.x(), 0.0);
        assert!(close(h.y(), expected, 1e-12), "{} vs {expected}", h.y());
    }

    #[test]
    fn both_y_forms_agree() {
        // y = (1 - |z|^2) / (u^2 + (1-v)^2) = 2(1-v)/(u^2 + (1-v)^2) - 1
        for &(u, v) in &[(0.3, 0.4), (-0.7, 0.1), (0.0, -0.9), (0.2, 0.97), (0.5, -0.5)] {
            let d = u * u + (1.0 - v) * (1.0 - v);
            let y_alt = (1.0 - (u * u + v * v)) / d;
            let y = poincare_to_halfplane(PoincarePoint::new(u, v).unwrap()).y();
            assert!(close(y, y_alt, 1e-13 * y_alt.max(1.0)), "({u},{v}): {y} vs {y_alt}");
        }
    }

    #[test]
    fn point_03_04_round_trip() {
        let p = PoincarePoint::new(0.3, 0.4).unwrap();
        let back = halfplane_to_poincare(poincare_to_halfplane(p)).unwrap();
        assert!(close(back.u(), 0.3, 1e-15) && close(back.v(), 0.4, 1e-15));
    }

    #[test]
    fn klein_maps() {
        let k = poincare_to_klein(PoincarePoint::origin());
        assert_eq!((k.u(), k.v()), (0.0, 0.0));
        let k = poincare_to_klein(PoincarePoint::new(0.5, 0.0).unwrap());
        assert!(close(k.u(), 0.8, 1e-16) && k.v() == 0.0);
        let p = klein_to_poincare(KleinPoint::new(0.8, 0.0).unwrap());
        assert!(close(p.u(), 0.5, 1e-16) && p.v() == 0.0);
    }

    #[test]
    fn boundary_rejected() {
        assert!(PoincarePoint::new(1.0, 0.0).is_err());
        assert!(KleinPoint::new(0.6, 0.8).is_err());
        assert!(PoincarePoint::new((1.0 - 1e-15f64).sqrt(), 0.0).is_err());
        assert!(PoincarePoint::new(f64::NAN, 0.0).is_err());
        assert!(HalfPlanePoint::new(0.0, 0.0).is_err());
    }

    #[test]
    fn radii() {
        assert_eq!(geodesic_radius(PoincarePoint::origin()), 0.0);
        let p = PoincarePoint::new(0.5f64.tanh(), 0.0).unwrap();
        assert!(close(geodesic_radius(p), 1.0, 1e-15));
        let p = PoincarePoint::new(0.0, 0.5).unwrap();
        assert!(close(geodesic_radius(p), 3f64.ln(), 1e-15));

        assert_eq!(klein_geodesic_radius(KleinPoint::origin()), 0.0);
        let q = KleinPoint::new(-0.5, 0.0).unwrap();
        assert!(close(klein_geodesic_radius(q), 0.5 * 3f64.ln(), 1e-15));
        assert!(close(klein_geodesic_radius(q), 0.54931, 1e-5));
    }

    #[test]
    fn distance_examples() {
        let a = PoincarePoint::new(0.2, -0.3).unwrap();
        assert_eq!(hyp_distance(a, a), 0.0);
        let b = PoincarePoint::new(0.5, 0.0).unwrap();
        assert!(close(hyp_distance(PoincarePoint::origin(), b), 3f64.ln(), 1e-15));
    }

    #[test]
    fn halfplane_radius_matches_polar() {
        for &(r, th) in &[(0.3, 1.0), (2.0, 4.0), (7.5, 1.5), (12.0, 0.2)] {
            let h = polar_to_halfplane(GeodesicPolar::new(r, th).unwrap());
            assert!(close(halfplane_radius(h), r, 1e-10 * r), "r={r}");
        }
    }

    fn disk_point() -> impl Strategy<Value = (f64, f64)> {
        (0.0..0.999f64, 0.0..(2.0 * PI)).prop_map(|(rho, a)| (rho * a.cos(), rho * a.sin()))
    }

    fn halfplane_point() -> impl Strategy<Value = (f64, f64)> {
        (-20.0..20.0f64, -6.0..4.0f64).prop_map(|(x, ly)| (x, 10f64.powf(ly)))
    }

    // Up to hyperbolic radius ~10: beyond that 1 - |z| is below 1e-4 and the disk
    // representation itself no longer carries 12 digits of the radius.
    fn moderate_halfplane_point() -> impl Strategy<Value = (f64, f64)> {
        (-10.0..10.0f64, -3.0..3.0f64).prop_map(|(x, ly)| (x, 10f64.powf(ly)))
    }

    fn moderate_disk_point() -> impl Strategy<Value = (f64, f64)> {
        (0.0..5.0f64, 0.0..(2.0 * PI)).prop_map(|(r, a)| {
            let rho = (0.5 * r).tanh();
            (rho * a.cos(), rho * a.sin())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn poincare_klein_round_trip((u, v) in disk_point()) {
            let p = PoincarePoint::new(u, v).unwrap();
            let k = poincare_to_klein(p);
            let back = klein_to_poincare(k);
            prop_assert!(close(back.u(), u, 1e-12) && close(back.v(), v, 1e-12));
            let k2 = poincare_to_klein(klein_to_poincare(KleinPoint::new(u, v).unwrap()));
            prop_assert!(close(k2.u(), u, 1e-12) && close(k2.v(), v, 1e-12));
            if u != 0.0 || v != 0.0 {
                prop_assert!(close(k.angle(), p.angle(), 1e-15) || close((k.angle() - p.angle()).abs(), 2.0 * PI, 1e-15));
            }
        }

        #[test]
        fn halfplane_round_trip((x, y) in halfplane_point()) {
            let h = HalfPlanePoint::new(x, y).unwrap();
            if let Ok(p) = halfplane_to_poincare(h) {
                let back = poincare_to_halfplane(p);
                let scale = x.abs().max(y).max(1.0);
                // absolute error grows with distance from the disk centre
                prop_assert!(close(back.x(), x, 1e-12 * scale * scale), "{} vs {}", back.x(), x);
                prop_assert!(close(back.y(), y, 1e-12 * scale * scale / y.min(1.0)), "{} vs {}", back.y(), y);
            }
        }

        #[test]
        fn cosh_radius_identity((x, y) in moderate_halfplane_point()) {
            let h = HalfPlanePoint::new(x, y).unwrap();
            if let Ok(p) = halfplane_to_poincare(h) {
                let lhs = geodesic_radius(p).cosh();
                let rhs = (x * x + y * y + 1.0) / (2.0 * y);
                prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs, "{} vs {}", lhs, rhs);
            }
        }

        #[test]
        fn klein_radius_is_isometric((u, v) in moderate_disk_point()) {
            let p = PoincarePoint::new(u, v).unwrap();
            prop_assert!(close(klein_geodesic_radius(poincare_to_klein(p)), geodesic_radius(p), 1e-12 * geodesic_radius(p).max(1.0)));
        }

        #[test]
        fn distance_is_a_metric(a in disk_point(), b in disk_point(), c in disk_point()) {
            let a = PoincarePoint::new(a.0, a.1).unwrap();
            let b = PoincarePoint::new(b.0, b.1).unwrap();
            let c = PoincarePoint::new(c.0, c.1).unwrap();
            let ab = hyp_distance(a, b);
            prop_assert!((ab - hyp_distance(b, a)).abs() <= 1e-12 * ab.max(1.0));
            prop_assert!(ab <= hyp_distance(a, c) + hyp_distance(c, b) + 1e-9);
            prop_assert!(close(hyp_distance(PoincarePoint::origin(), b), geodesic_radius(b), 1e-12 * ab.max(1.0)));
        }

        #[test]
        fn distance_invariant_under_halfplane_transport(a in moderate_halfplane_point(), b in moderate_halfplane_point()) {
            // cosh d = 1 + |a - b|^2 / (2 y_a y_b) in the half-plane
            let ha = HalfPlanePoint::new(a.0, a.1).unwrap();
            let hb = HalfPlanePoint::new(b.0, b.1).unwrap();
            if let (Ok(pa), Ok(pb)) = (halfplane_to_poincare(ha), halfplane_to_poincare(hb)) {
                let sq = (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2);
                let half = (sq / (4.0 * a.1 * b.1)).sqrt();
                let d_half = 2.0 * half.asinh();
                let d = hyp_distance(pa, pb);
                prop_assert!((d - d_half).abs() <= 1e-10 * d_half.max(1.0), "{} vs {}", d, d_half);
            }
        }
    }
}
