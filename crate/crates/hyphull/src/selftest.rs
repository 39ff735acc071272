//! Fast internal consistency checks, runnable from the command line.

use std::f64::consts::{PI, TAU};

use hyphull_core::cauchy::cauchy_perimeter;
use hyphull_core::estimate::{estimate_l_rb, Exec};
use hyphull_core::exact::{g_function, perimeter_exact};
use hyphull_core::geometry::{
    halfplane_to_poincare, klein_to_poincare, poincare_to_halfplane, poincare_to_klein, KleinPoint, PoincarePoint,
};
use hyphull_core::hull::{convex_hull_points, edge_sum_perimeter};
use hyphull_core::quadrature::QuadratureSpec;
use hyphull_core::simulate::SimConfig;

pub struct Outcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

// low-discrepancy points in the disk of radius `max_r`
fn disk_points(n: usize, max_r: f64, offset: usize) -> Vec<(f64, f64)> {
    let (a1, a2) = (0.754_877_666_246_692_7, 0.569_840_290_998_053_2);
    (offset..offset + n)
        .map(|k| {
            let r = max_r * ((k as f64 * a1).fract()).sqrt();
            let th = TAU * (k as f64 * a2).fract();
            (r * th.cos(), r * th.sin())
        })
        .collect()
}

fn g_three() -> Outcome {
    let g = g_function(3.0).map(|v| v.value).unwrap_or(f64::NAN);
    Outcome {
        name: "g-function at 3",
        passed: (g - PI * PI / 2.0).abs() < 1e-12,
        detail: format!("{g}"),
    }
}

fn round_trips() -> Outcome {
    let mut worst: f64 = 0.0;
    for (u, v) in disk_points(10_000, 0.999, 1) {
        let p = PoincarePoint::new(u, v).expect("inside the disk");
        let k = klein_to_poincare(poincare_to_klein(p));
        worst = worst.max((k.u() - u).abs()).max((k.v() - v).abs());
        if let Ok(h) = halfplane_to_poincare(poincare_to_halfplane(p)) {
            worst = worst.max((h.u() - u).abs()).max((h.v() - v).abs());
        } else {
            worst = f64::INFINITY;
        }
    }
    Outcome {
        name: "coordinate round trips",
        passed: worst <= 1e-12,
        detail: format!("max error {worst:e}"),
    }
}

fn cauchy_vs_edges() -> Outcome {
    let q = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    for j in 0..50 {
        let pts: Vec<KleinPoint> = disk_points(3 + j, 0.99, 100 * j)
            .into_iter()
            .map(|(u, v)| KleinPoint::new(u, v).expect("inside the disk"))
            .collect();
        let poly = convex_hull_points(&pts).expect("non-empty");
        let c = cauchy_perimeter(&poly, &q).unwrap_or(f64::NAN);
        worst = worst.max((c - edge_sum_perimeter(&poly)).abs());
    }
    Outcome {
        name: "cauchy formula vs edge sum",
        passed: worst <= 1e-6,
        detail: format!("max difference {worst:e}"),
    }
}

fn rb_vs_quadrature(seed: u64, exec: &Exec) -> Outcome {
    let q = QuadratureSpec::new(1e-6, 1 << 14).expect("valid");
    let exact = perimeter_exact(1.0, &q).map(|v| v.value).unwrap_or(f64::NAN);
    let sim = SimConfig::new(1.0, 1e-3, seed, 0).expect("valid");
    match estimate_l_rb(1.0, 20_000, &sim, exec) {
        Ok(e) => Outcome {
            name: "perimeter at t = 1, simulation vs quadrature",
            passed: (e.mean - exact).abs() <= 4.0 * e.stderr,
            detail: format!("{:.5} ± {:.5} vs {exact:.5}", e.mean, e.stderr),
        },
        Err(err) => Outcome {
            name: "perimeter at t = 1, simulation vs quadrature",
            passed: false,
            detail: err.to_string(),
        },
    }
}

fn thread_invariance(seed: u64, exec: &Exec) -> Outcome {
    let sim = SimConfig::new(0.5, 1e-3, seed, 0).expect("valid");
    let a = estimate_l_rb(0.5, 2000, &sim, &Exec::sequential());
    let b = estimate_l_rb(0.5, 2000, &sim, &Exec::new(exec.threads().max(3)));
    let same = matches!((&a, &b), (Ok(x), Ok(y)) if x.mean.to_bits() == y.mean.to_bits());
    Outcome {
        name: "thread-count invariance",
        passed: same,
        detail: format!("{:?} / {:?}", a.map(|e| e.mean), b.map(|e| e.mean)),
    }
}

pub fn run(seed: u64, exec: &Exec) -> Vec<Outcome> {
    vec![
        g_three(),
        round_trips(),
        cauchy_vs_edges(),
        rb_vs_quadrature(seed, exec),
        thread_invariance(seed, exec),
    ]
}
