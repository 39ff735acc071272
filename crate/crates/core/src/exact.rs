//! Closed forms and quadrature targets for the Monte Carlo estimators.

use core::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::error::{Error, Result};
use crate::math;
use crate::quadrature::{integrate, integrate_with_breaks, QuadratureSpec};
use crate::special::ln_gamma;

/// Which formula produced an [`ExactValue`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    /// Perimeter at an independent exponential time, via the Gamma-ratio function `G`.
    GFunction,
    /// Expected perimeter of the planar Brownian hull, `sqrt(8 π t)`.
    Euclidean,
    /// Large-time limits of moments of the exponential functional.
    MomentLimit,
    /// The oscillatory kernel `ψ_u(t)`.
    PsiKernel,
    /// Fixed-time perimeter by iterated quadrature.
    PerimeterQuadrature,
}

impl Source {
    pub fn tag(self) -> &'static str {
        match self {
            Source::GFunction => "g-function",
            Source::Euclidean => "euclidean",
            Source::MomentLimit => "moment-limit",
            Source::PsiKernel => "psi-kernel",
            Source::PerimeterQuadrature => "perimeter-quadrature",
        }
    }
}

impl core::fmt::Display for Source {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.tag())
    }
}

/// A reference value. `est_abs_err` is zero for closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactValue {
    pub value: f64,
    pub source: Source,
    pub est_abs_err: f64,
    /// Set when the integrand oscillates faster than double precision can follow reliably.
    pub oscillation_warning: bool,
}

impl ExactValue {
    fn closed(value: f64, source: Source) -> Self {
        Self {
            value,
            source,
            est_abs_err: 0.0,
            oscillation_warning: false,
        }
    }
}

/// `G(x) = π (x-1)/(x+1) (Γ((x-1)/4) / Γ((x+1)/4))^2` for `x > 1`.
pub fn g_function(x: f64) -> Result<ExactValue> {
    if !(x > 1.0) || !x.is_finite() {
        return Err(Error::OutOfDomain("G needs a finite x > 1"));
    }
    let a = 0.25 * (x - 1.0);
    let b = 0.25 * (x + 1.0);
    let log_g = math::ln(PI) + math::ln(x - 1.0) - math::ln(x + 1.0) + 2.0 * (ln_gamma(a) - ln_gamma(b));
    Ok(ExactValue::closed(math::exp(log_g), Source::GFunction))
}

/// Expected hull perimeter at an independent `Exp(λ)` time, `G(sqrt(8λ + 1))`.
pub fn exp_time_perimeter(lambda: f64) -> Result<ExactValue> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::OutOfDomain("exponential rate must be positive"));
    }
    g_function(math::sqrt(8.0 * lambda + 1.0))
}

/// Expected perimeter of the convex hull of planar Brownian motion on `[0, t]`.
pub fn euclidean_perimeter(t: f64) -> Result<ExactValue> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::OutOfDomain("time must be non-negative"));
    }
    Ok(ExactValue::closed(math::sqrt(8.0 * PI * t), Source::Euclidean))
}

/// Large-time behaviour of `E[ξ_t^p]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentLimit {
    /// `p < 1/2`: the moment converges to this constant.
    Converges(ExactValue),
    /// `p = 1/2`: the moment grows linearly with this slope.
    Linear(ExactValue),
    /// `p > 1/2`: `E[ξ_t^p] ~ prefactor · exp(exponent · t)`.
    Exponential { exponent: f64, prefactor: ExactValue },
}

impl MomentLimit {
    /// The constant, the slope, or the prefactor.
    pub fn primary(&self) -> ExactValue {
        match *self {
            MomentLimit::Converges(v) | MomentLimit::Linear(v) => v,
            MomentLimit::Exponential { prefactor, .. } => prefactor,
        }
    }
}

/// Moment asymptotics of `ξ_t = ∫₀^t exp(2W_s - s) ds`.
///
/// For `p < 1/2` the limit is `E[ξ_∞^p]` with `ξ_∞ = 1/(2 γ)`, `γ ~ Gamma(1/2)`,
/// which is `π^{-1/2} 2^{-p} Γ(1/2 - p)`.
pub fn xi_moment_limit(p: f64) -> Result<MomentLimit> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::OutOfDomain("moment order must be positive"));
    }
    let limit = if p < 0.5 {
        let v = math::exp(-0.5 * math::ln(PI) - p * core::f64::consts::LN_2 + ln_gamma(0.5 - p));
        MomentLimit::Converges(ExactValue::closed(v, Source::MomentLimit))
    } else if p == 0.5 {
        MomentLimit::Linear(ExactValue::closed(1.0 / math::sqrt(2.0 * PI), Source::MomentLimit))
    } else {
        let v = math::exp(-p * core::f64::consts::LN_2 + ln_gamma(p - 0.5) - ln_gamma(2.0 * p - 0.5));
        MomentLimit::Exponential {
            exponent: p * (2.0 * p - 1.0),
            prefactor: ExactValue::closed(v, Source::MomentLimit),
        }
    };
    Ok(limit)
}

/// Below this horizon `ψ` flags its result as unreliable.
pub const PSI_RELIABLE_T: f64 = 0.5;

/// Smallest horizon accepted by [`perimeter_exact`].
pub const PERIMETER_MIN_T: f64 = 0.5;

const MAX_PSI_BREAKS: usize = 512;

// z where the envelope exp(-z^2/2t - u cosh z + z) drops below 10^-1 * tol
fn psi_cutoff(u: f64, t: f64, tol: f64) -> f64 {
    let target = math::ln(10.0 / tol).max(1.0);
    let g = |z: f64| z * z / (2.0 * t) + u * math::cosh(z) - z;
    // g is eventually increasing; start past its minimum
    let mut lo = t.clamp(1.0, 50.0);
    while g(lo) > target && lo > 1e-3 {
        lo *= 0.5;
    }
    let mut hi = lo.max(1.0);
    while g(hi) < target {
        hi *= 2.0;
    }
    if g(lo) > target {
        return hi;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

fn psi_value(u: f64, t: f64, q: &QuadratureSpec) -> Result<(f64, f64)> {
    let z_max = psi_cutoff(u, t, q.abs_tol());
    let f = |z: f64| math::exp(-z * z / (2.0 * t) - u * math::cosh(z)) * math::sin(PI * z / t) * math::sinh(z);
    // panel boundaries at the zeros of the sine, or a coarser comb when there are too many
    let lobes = math::ceil(z_max / t) as usize;
    let stride = lobes.div_ceil(MAX_PSI_BREAKS).max(1);
    let mut breaks = alloc::vec::Vec::with_capacity(lobes / stride + 2);
    let mut j = 0;
    while (j as f64) * t < z_max {
        breaks.push(j as f64 * t);
        j += stride;
    }
    breaks.push(z_max);
    let r = integrate_with_breaks(f, &breaks, q)?;
    Ok((r.value, r.abs_err))
}

/// `ψ_u(t) = ∫₀^∞ exp(-z²/2t) exp(-u cosh z) sin(π z / t) sinh z dz`.
pub fn psi(u: f64, t: f64, q: &QuadratureSpec) -> Result<ExactValue> {
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::OutOfDomain("psi needs u > 0"));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::OutOfDomain("psi needs t > 0"));
    }
    let (value, err) = psi_value(u, t, q)?;
    Ok(ExactValue {
        value,
        source: Source::PsiKernel,
        est_abs_err: err + 0.1 * q.abs_tol(),
        oscillation_warning: t < PSI_RELIABLE_T,
    })
}

// sup_u |ψ_u(t)| <= ∫₀^∞ exp(-z²/2t) sinh z dz
fn psi_bound(t: f64) -> f64 {
    math::sqrt(FRAC_PI_2 * t) * math::exp(0.5 * t) * (1.0 - math::erfc(math::sqrt(0.5 * t)))
}

/// Prefactor `2/(π sqrt t) · exp(π²/2t - t/8)` of the fixed-time formula.
pub fn perimeter_prefactor(t: f64) -> f64 {
    2.0 / (PI * math::sqrt(t)) * math::exp(PI * PI / (2.0 * t) - t / 8.0)
}

// ∬ y^{-1/2} v^{-1/2} exp(-v(1+y²)/2) ψ(yv) dv dy with y = s², v = w². The integrand
// is invariant under (s, w) -> (1/s, s² w), so the s-range folds onto (0, 1].
fn perimeter_integral(t: f64, tol: f64, q: &QuadratureSpec) -> Result<f64> {
    let outer = q.with_abs_tol(tol)?;
    let middle = q.with_abs_tol(0.25 * tol)?;
    let inner = q.with_abs_tol(0.125 * tol)?;
    let bound = psi_bound(t);
    let mut failure = None;
    let mut g = |s: f64| -> f64 {
        if failure.is_some() {
            return 0.0;
        }
        let a = 1.0 + s * s * s * s;
        let w_max = math::sqrt(2.0 * math::ln((10.0 * bound / tol).max(2.0)) / a);
        let s2 = s * s;
        let h = |w: f64| -> f64 {
            let u = s2 * w * w;
            if u == 0.0 {
                return 0.0;
            }
            match psi_value(u, t, &inner) {
                Ok((v, _)) => math::exp(-0.5 * a * w * w) * v,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        };
        match integrate(h, 0.0, w_max, &middle) {
            Ok(r) => r.value,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let r = integrate(&mut g, 0.0, 1.0, &outer);
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(8.0 * r?.value)
}

/// Expected hull perimeter at fixed time `t >= 0.5` by iterated quadrature.
///
/// The integral is evaluated at `abs_tol` and again at `abs_tol / 16`; the finer value
/// is returned and the difference (at least `abs_tol`) is reported as the error.
pub fn perimeter_exact(t: f64, q: &QuadratureSpec) -> Result<ExactValue> {
    if !(t >= PERIMETER_MIN_T) || !t.is_finite() {
        return Err(Error::OutOfDomain("fixed-time perimeter needs t >= 0.5"));
    }
    let pref = perimeter_prefactor(t);
    let tol = q.abs_tol() / pref;
    let coarse = pref * perimeter_integral(t, tol, q)?;
    let fine = pref * perimeter_integral(t, tol / 16.0, q)?;
    Ok(ExactValue {
        value: fine,
        source: Source::PerimeterQuadrature,
        est_abs_err: (fine - coarse).abs().max(q.abs_tol()),
        oscillation_warning: false,
    })
}

/// `π sqrt 2`, the small-rate scale of the exponential-time perimeter.
pub const EXP_TIME_LARGE_RATE_LIMIT: f64 = PI * SQRT_2;

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn g_at_three() {
        assert!(rel(g_function(3.0).unwrap().value, PI * PI / 2.0) < 1e-13);
        assert!(rel(exp_time_perimeter(1.0).unwrap().value, PI * PI / 2.0) < 1e-13);
        assert!(g_function(1.0).is_err());
        assert!(g_function(0.5).is_err());
        assert!(exp_time_perimeter(0.0).is_err());
    }

    #[test]
    fn g_direct_gamma_agrees() {
        let mut x = 1.0 + 1e-3;
        while x <= 20.0 {
            let a = (x - 1.0) / 4.0;
            let b = (x + 1.0) / 4.0;
            let ratio = libm::tgamma(a) / libm::tgamma(b);
            let direct = PI * (x - 1.0) / (x + 1.0) * ratio * ratio;
            let g = g_function(x).unwrap().value;
            assert!(rel(g, direct) < 1e-12, "x={x}: {g} vs {direct}");
            x += 0.0371;
        }
    }

    #[test]
    fn g_rate_limits() {
        let lam = 1e-6f64;
        assert!(rel(lam * exp_time_perimeter(lam).unwrap().value, 2.0) < 1e-3);
        let lam = 1e6f64;
        let v = lam.sqrt() * exp_time_perimeter(lam).unwrap().value;
        assert!(rel(v, EXP_TIME_LARGE_RATE_LIMIT) < 1e-3);
    }

    #[test]
    fn exp_time_perimeter_decreasing() {
        let mut prev = f64::INFINITY;
        for k in -20..=20 {
            let v = exp_time_perimeter(10f64.powf(k as f64 / 4.0)).unwrap().value;
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn euclidean_values() {
        assert_eq!(euclidean_perimeter(0.0).unwrap().value, 0.0);
        assert!((euclidean_perimeter(1.0).unwrap().value - 5.013256549262001).abs() < 1e-12);
        assert!(euclidean_perimeter(-1.0).is_err());
        // E sqrt(T) = sqrt(π)/2 for T ~ Exp(1)
        let at_exp = (8.0 * PI).sqrt() * PI.sqrt() / 2.0;
        assert!(rel(at_exp, EXP_TIME_LARGE_RATE_LIMIT) < 1e-15);
    }

    #[test]
    fn moment_limit_domain() {
        assert!(xi_moment_limit(0.0).is_err());
        assert!(xi_moment_limit(-0.5).is_err());
    }

    #[test]
    fn moment_limit_matches_dufresne_quadrature() {
        // ξ_∞ = 1/(2γ), γ ~ Gamma(1/2): E ξ_∞^p = ∫ (2g)^{-p} g^{-1/2} e^{-g} dg / sqrt(π)
        let q = QuadratureSpec::new(1e-12, 1 << 14).unwrap();
        for p in [0.05, 0.1, 0.25, 0.3] {
            // g = x², dg = 2x dx
            let f = |x: f64| 2.0 * (2.0 * x * x).powf(-p) * (-x * x).exp() / PI.sqrt();
            let v = integrate(f, 0.0, 12.0, &q).unwrap().value;
            let limit = xi_moment_limit(p).unwrap();
            assert!(matches!(limit, MomentLimit::Converges(_)));
            assert!(rel(limit.primary().value, v) < 1e-9, "p={p}");
        }
        assert!(rel(xi_moment_limit(0.25).unwrap().primary().value, 1.720079974649039) < 1e-12);
    }

    #[test]
    fn moment_limit_slope_and_growth() {
        let half = xi_moment_limit(0.5).unwrap();
        assert!(matches!(half, MomentLimit::Linear(_)));
        assert!((half.primary().value - 0.3989422804014327).abs() < 1e-15);
        // E ξ_t = e^t - 1 and E ξ_t² = (2/5)(e^{6t}/6 - e^t + 5/6)
        for (p, exponent, prefactor) in [(1.0, 1.0, 1.0), (2.0, 6.0, 1.0 / 15.0)] {
            match xi_moment_limit(p).unwrap() {
                MomentLimit::Exponential { exponent: e, prefactor: c } => {
                    assert!((e - exponent).abs() < 1e-15);
                    assert!(rel(c.value, prefactor) < 1e-13, "p={p}: {}", c.value);
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn psi_domain_and_flags() {
        let q = QuadratureSpec::default();
        assert!(psi(0.0, 1.0, &q).is_err());
        assert!(psi(1.0, 0.0, &q).is_err());
        assert!(psi(1.0, 0.3, &q).unwrap().oscillation_warning);
        assert!(!psi(1.0, 1.0, &q).unwrap().oscillation_warning);
    }

    #[test]
    fn psi_large_u_vanishes() {
        let q = QuadratureSpec::default();
        let v = psi(50.0, 1.0, &q).unwrap();
        assert!(v.value.abs() < 1e-20);
    }

    #[test]
    fn psi_small_u_positive() {
        let q = QuadratureSpec::default();
        assert!(psi(0.1, 1.0, &q).unwrap().value > 0.0);
    }

    #[test]
    fn psi_refinement_oracle() {
        // doubling the cut-off and forcing twice the panels leaves the value unchanged
        let q = QuadratureSpec::default();
        let v = psi(1.0, 1.0, &q).unwrap();
        let z_max = 2.0 * psi_cutoff(1.0, 1.0, q.abs_tol());
        let n = 256;
        let f = |z: f64| (-z * z / 2.0 - z.cosh()).exp() * (PI * z).sin() * z.sinh();
        let mut fine = 0.0;
        for i in 0..n {
            let a = z_max * i as f64 / n as f64;
            let b = z_max * (i + 1) as f64 / n as f64;
            fine += crate::quadrature::gauss_legendre_16(&mut { f }, a, b);
        }
        assert!((v.value - fine).abs() < q.abs_tol(), "{} vs {fine}", v.value);
    }

    #[test]
    fn psi_vanishes_as_u_goes_to_zero() {
        // the full-line Gaussian integral of sin(πz/t) sinh z e^{-z²/2t} is zero
        let q = QuadratureSpec::default();
        for t in [0.5, 1.0, 3.0] {
            let v = psi(1e-12, t, &q).unwrap().value;
            assert!(v.abs() < 1e-8, "t={t}: {v}");
        }
    }

    // K₀(u) = ∫₀^∞ exp(-u cosh τ) dτ
    fn bessel_k0(u: f64) -> f64 {
        let q = QuadratureSpec::new(1e-14, 4096).unwrap();
        let tau_max = ((40.0 / u).max(1.0) * 2.0).acosh() + 1.0;
        integrate(|x: f64| (-u * x.cosh()).exp(), 0.0, tau_max, &q).unwrap().value
    }

    #[test]
    fn perimeter_integral_matches_bessel_reduction() {
        // integrating out y at fixed u = yv gives 2 ∫₀^∞ ψ(u) u^{-1/2} K₀(u) du
        let t = 1.0;
        let q = QuadratureSpec::new(1e-11, 1 << 14).unwrap();
        let iterated = perimeter_integral(t, 1e-10, &q).unwrap();
        // u = x²
        let f = |x: f64| {
            let u = x * x;
            if u == 0.0 {
                0.0
            } else {
                4.0 * psi_value(u, t, &q).unwrap().0 * bessel_k0(u)
            }
        };
        let reduced = integrate(f, 0.0, 7.0, &q.with_abs_tol(1e-10).unwrap()).unwrap().value;
        assert!((iterated - reduced).abs() < 1e-8, "{iterated} vs {reduced}");
    }

    #[test]
    fn perimeter_matches_laplace_inversion() {
        // numerical inverse Laplace transform of G(sqrt(8λ+1))/λ
        let q = QuadratureSpec::new(1e-6, 1 << 14).unwrap();
        for (t, target) in [(1.0, 5.40575), (2.0, 8.14854)] {
            let v = perimeter_exact(t, &q).unwrap();
            assert!((v.value - target).abs() < 2e-5, "t={t}: {}", v.value);
            assert!(v.est_abs_err >= 0.0 && v.est_abs_err < 1e-4);
        }
    }

    #[test]
    fn perimeter_domain() {
        let q = QuadratureSpec::default();
        assert!(perimeter_exact(0.4, &q).is_err());
        assert!(perimeter_exact(f64::NAN, &q).is_err());
    }

    #[test]
    fn perimeter_error_estimate_honest() {
        let q = QuadratureSpec::new(1e-5, 1 << 14).unwrap();
        let a = perimeter_exact(1.5, &q).unwrap();
        let b = perimeter_exact(1.5, &q.with_abs_tol(5e-6).unwrap()).unwrap();
        assert!((a.value - b.value).abs() < a.est_abs_err);
    }

    #[test]
    fn perimeter_sits_between_bounds() {
        // hyperbolic hulls are longer than planar ones
        let q = QuadratureSpec::new(1e-5, 1 << 14).unwrap();
        for t in [0.5, 3.0] {
            let v = perimeter_exact(t, &q).unwrap().value;
            assert!(v > euclidean_perimeter(t).unwrap().value);
        }
    }

    #[test]
    fn exp_time_average_of_fixed_time_perimeter() {
        // ∫ e^{-t} E L_t dt = G(3); the planar value stands in on [0, 1/2] where quadrature is not offered
        let q = QuadratureSpec::new(1e-4, 1 << 14).unwrap();
        let fine = QuadratureSpec::new(1e-12, 4096).unwrap();
        let head = integrate(|t: f64| (-t).exp() * (8.0 * PI * t).sqrt(), 0.0, 0.5, &fine).unwrap().value;
        // beyond t = 10 the weight leaves less than 1e-3 of mass
        let tail = crate::quadrature::gauss_legendre_16(
            &mut |t: f64| (-t).exp() * perimeter_exact(t, &q).unwrap().value,
            0.5,
            10.0,
        );
        let target = g_function(3.0).unwrap().value;
        assert!(rel(head + tail, target) < 0.05, "{} vs {target}", head + tail);
    }
}
