//! Path generation for hyperbolic Brownian motion.
//!
//! The half-plane scheme is the workhorse: `Y_t = exp(W^Y_t - t/2)` is written
//! down exactly at every grid point, `X` is the Euler sum of `Y dW^X`, and the
//! quadratic variation `ξ_t = ∫ Y_s^2 ds` is accumulated by the trapezoid rule
//! with compensated summation. The polar scheme integrates the radial and
//! winding equations directly and exists for figures and cross-checks.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{GeodesicPolar, KleinPoint};
use crate::math;
use crate::rng::{path_rng, PathRng, Stream};

/// Time grid, root seed and path identity of one simulated path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    t_end: f64,
    dt: f64,
    seed: u64,
    path_index: u64,
    noise: bool,
}

impl SimConfig {
    pub fn new(t_end: f64, dt: f64, seed: u64, path_index: u64) -> Result<Self> {
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(Error::InvalidConfig("t_end must be positive and finite"));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidConfig("dt must be positive and finite"));
        }
        if dt > t_end {
            return Err(Error::InvalidConfig("dt must not exceed t_end"));
        }
        Ok(Self {
            t_end,
            dt,
            seed,
            path_index,
            noise: true,
        })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path_index(&self) -> u64 {
        self.path_index
    }

    pub fn noise(&self) -> bool {
        self.noise
    }

    /// Same grid and seed for another path.
    pub fn for_path(mut self, path_index: u64) -> Self {
        self.path_index = path_index;
        self
    }

    /// Same step and seed, new horizon. `dt` is shrunk to the horizon if needed.
    pub fn with_horizon(mut self, t_end: f64) -> Result<Self> {
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(Error::InvalidConfig("t_end must be positive and finite"));
        }
        self.t_end = t_end;
        self.dt = self.dt.min(t_end);
        Ok(self)
    }

    pub fn with_dt(self, dt: f64) -> Result<Self> {
        let mut c = Self::new(self.t_end, dt, self.seed, self.path_index)?;
        c.noise = self.noise;
        Ok(c)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Switches the Brownian increments off (deterministic debugging runs).
    pub fn without_noise(mut self) -> Self {
        self.noise = false;
        self
    }

    /// `ceil(t_end / dt)`; the last step is shortened to land on `t_end`.
    pub fn steps(&self) -> usize {
        let ratio = self.t_end / self.dt;
        // t_end / dt can land a hair above an integer
        let n = math::ceil(ratio * (1.0 - 4.0 * f64::EPSILON));
        (n as usize).max(1)
    }

    /// Time of grid point `i`.
    #[inline]
    pub fn time(&self, i: usize) -> f64 {
        if i >= self.steps() {
            self.t_end
        } else {
            i as f64 * self.dt
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..=self.steps()).map(|i| self.time(i)).collect()
    }

    pub(crate) fn rng(&self, stream: Stream) -> PathRng {
        path_rng(self.seed, self.path_index, stream)
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[inline]
fn normal(rng: &mut PathRng, on: bool) -> f64 {
    if on {
        rng.sample(StandardNormal)
    } else {
        0.0
    }
}

/// State of the half-plane process at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlaneState {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    /// Driving noise `W^Y_t`.
    pub wy: f64,
    /// Running `∫₀^t Y_s^2 ds`.
    pub xi: f64,
}

/// Streaming half-plane scheme, yielding every grid point starting at `(0, 1)`.
#[derive(Debug, Clone)]
pub struct HalfPlaneWalk {
    cfg: SimConfig,
    steps: usize,
    i: usize,
    state: HalfPlaneState,
    xi: Compensated,
    rng: PathRng,
    started: bool,
}

impl HalfPlaneWalk {
    pub fn new(cfg: &SimConfig) -> Self {
        Self {
            cfg: *cfg,
            steps: cfg.steps(),
            i: 0,
            state: HalfPlaneState {
                t: 0.0,
                x: 0.0,
                y: 1.0,
                wy: 0.0,
                xi: 0.0,
            },
            xi: Compensated::default(),
            rng: cfg.rng(Stream::Noise),
            started: false,
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }
}

impl Iterator for HalfPlaneWalk {
    type Item = HalfPlaneState;

    #[inline]
    fn next(&mut self) -> Option<HalfPlaneState> {
        if !self.started {
            self.started = true;
            return Some(self.state);
        }
        if self.i >= self.steps {
            return None;
        }
        let t0 = self.state.t;
        let t1 = self.cfg.time(self.i + 1);
        let h = t1 - t0;
        let sh = math::sqrt(h);
        let zx = normal(&mut self.rng, self.cfg.noise);
        let zy = normal(&mut self.rng, self.cfg.noise);
        let y0 = self.state.y;
        let x1 = self.state.x + y0 * sh * zx;
        let wy1 = self.state.wy + sh * zy;
        let y1 = math::exp(wy1 - 0.5 * t1);
        self.xi.add(0.5 * h * (y0 * y0 + y1 * y1));
        self.i += 1;
        self.state = HalfPlaneState {
            t: t1,
            x: x1,
            y: y1,
            wy: wy1,
            xi: self.xi.value(),
        };
        Some(self.state)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.steps - self.i + usize::from(!self.started);
        (left, Some(left))
    }
}

/// Fully materialised half-plane path.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPlanePath {
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub wy: Vec<f64>,
    pub xi: Vec<f64>,
}

impl HalfPlanePath {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

pub fn simulate_halfplane(cfg: &SimConfig) -> Result<HalfPlanePath> {
    let walk = HalfPlaneWalk::new(cfg);
    let n = walk.steps() + 1;
    let mut path = HalfPlanePath {
        times: Vec::with_capacity(n),
        x: Vec::with_capacity(n),
        y: Vec::with_capacity(n),
        wy: Vec::with_capacity(n),
        xi: Vec::with_capacity(n),
    };
    for s in walk {
        path.times.push(s.t);
        path.x.push(s.x);
        path.y.push(s.y);
        path.wy.push(s.wy);
        path.xi.push(s.xi);
    }
    Ok(path)
}

/// `sup` of the horizontal coordinate over the grid.
pub fn running_max(path: &HalfPlanePath) -> f64 {
    path.x.iter().copied().fold(0.0, f64::max)
}

/// Horizon and value of the exponential functional `∫₀^t exp(2W_s - s) ds`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiSample {
    pub t: f64,
    pub xi_t: f64,
}

/// Trapezoid discretisation of the exponential functional on the grid of `cfg`.
pub fn simulate_xi(cfg: &SimConfig) -> Result<XiSample> {
    let mut rng = cfg.rng(Stream::Noise);
    let steps = cfg.steps();
    let mut w = 0.0;
    let mut prev = 1.0;
    let mut t0 = 0.0;
    let mut acc = Compensated::default();
    for i in 1..=steps {
        let t1 = cfg.time(i);
        let h = t1 - t0;
        w += math::sqrt(h) * normal(&mut rng, cfg.noise);
        let next = math::exp(2.0 * w - t1);
        acc.add(0.5 * h * (prev + next));
        prev = next;
        t0 = t1;
    }
    Ok(XiSample {
        t: cfg.t_end,
        xi_t: acc.value(),
    })
}

/// Exponential variate with rate `lambda`, `-ln(U)/λ` with `U` uniform on `(0, 1]`.
pub fn sample_exp_time<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidConfig("exponential rate must be positive"));
    }
    let u = 1.0 - rng.random::<f64>();
    Ok(-math::ln(u) / lambda)
}

/// Exponential horizon for path `cfg.path_index()`, drawn from its own stream.
pub fn path_exp_time(cfg: &SimConfig, lambda: f64) -> Result<f64> {
    sample_exp_time(lambda, &mut cfg.rng(Stream::ExpTime))
}

/// Knobs of the polar scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarOptions {
    /// Reflecting floor for the radius.
    pub r_floor: f64,
    /// Time from which the winding is integrated.
    pub s_entrance: f64,
    /// Reflect at the floor before the step (default) rather than after it.
    pub reflect_first: bool,
}

impl Default for PolarOptions {
    fn default() -> Self {
        Self {
            r_floor: 1e-6,
            s_entrance: 1e-3,
            reflect_first: true,
        }
    }
}

/// Below `BESSEL_ZONE * sqrt(dt)` the radial step is taken as the norm of a planar
/// Gaussian displacement instead of an Euler step of the `coth` drift.
pub const BESSEL_ZONE: f64 = 4.0;

/// Radial and winding trajectory on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarPath {
    pub times: Vec<f64>,
    pub r: Vec<f64>,
    /// Winding accumulated after the entrance time, zero before it.
    pub theta_winding: Vec<f64>,
    /// Radial driving noise `W^R`.
    pub w_radial: Vec<f64>,
    /// First grid index with `t >= s_entrance`.
    pub entrance_index: usize,
    /// Uniform entrance angle at `s_entrance`.
    pub entrance_angle: f64,
    /// Steps taken with the planar (near-origin) update.
    pub planar_steps: usize,
    /// `max_i (t_i/2 + W_i - R_i)^+`.
    pub lower_bound_slack: f64,
}

impl PolarPath {
    /// Absolute angle `θ_t = θ_s + Θ_t mod 2π` (the entrance angle before `s`).
    pub fn theta(&self, i: usize) -> f64 {
        math::wrap_angle(self.entrance_angle + self.theta_winding[i])
    }

    pub fn point(&self, i: usize) -> Result<GeodesicPolar> {
        GeodesicPolar::new(self.r[i], self.theta(i))
    }

    /// Klein-disk image of every grid point. Fails once `tanh R` rounds to 1.
    pub fn to_klein(&self) -> Result<Vec<KleinPoint>> {
        (0..self.r.len()).map(|i| self.point(i)?.to_klein()).collect()
    }
}

// coth(r) - 1/r, with its series near zero
#[inline]
fn coth_minus_inverse(r: f64) -> f64 {
    if r < 1e-3 {
        r / 3.0 - r * r * r / 45.0
    } else {
        1.0 / math::tanh(r) - 1.0 / r
    }
}

/// Radial equation `dR = dt/(2 tanh R) + dW` and winding `dΘ = dW'/sinh R` from `R_0 = 0`.
///
/// Away from the origin this is the Euler scheme. Within `BESSEL_ZONE * sqrt(dt)`
/// of it, where the `1/(2R)` part of the drift is stiff, the radius is advanced as
/// the distance of `(R + dW, dW')` from the origin (the exact planar Bessel step)
/// plus `dt/2 (coth R - 1/R)`, and the winding by the angle of that displacement.
/// With the noise switched off the deterministic flow `cosh R_{t+h} = e^{h/2} cosh R_t`
/// is used.
pub fn simulate_polar(cfg: &SimConfig, opts: &PolarOptions) -> Result<PolarPath> {
    if !(opts.r_floor > 0.0) {
        return Err(Error::InvalidConfig("r_floor must be positive"));
    }
    if !(opts.s_entrance > 0.0 && opts.s_entrance < cfg.t_end) {
        return Err(Error::InvalidConfig("s_entrance must lie in (0, t_end)"));
    }
    let steps = cfg.steps();
    let mut rng = cfg.rng(Stream::Noise);
    let entrance_angle = cfg.rng(Stream::Entrance).random::<f64>() * TAU;
    let zone = BESSEL_ZONE * math::sqrt(cfg.dt);

    let mut path = PolarPath {
        times: Vec::with_capacity(steps + 1),
        r: Vec::with_capacity(steps + 1),
        theta_winding: Vec::with_capacity(steps + 1),
        w_radial: Vec::with_capacity(steps + 1),
        entrance_index: 0,
        entrance_angle,
        planar_steps: 0,
        lower_bound_slack: 0.0,
    };
    let mut r = 0.0f64;
    let mut w = 0.0f64;
    let mut winding = 0.0f64;
    let mut entered = false;
    let mut t0 = 0.0;
    path.times.push(0.0);
    path.r.push(0.0);
    path.theta_winding.push(0.0);
    path.w_radial.push(0.0);
    if opts.s_entrance <= 0.0 {
        entered = true;
    }

    for i in 1..=steps {
        if !entered && t0 >= opts.s_entrance {
            entered = true;
            path.entrance_index = i - 1;
        }
        let t1 = cfg.time(i);
        let h = t1 - t0;
        let sh = math::sqrt(h);
        if opts.reflect_first {
            r = r.max(opts.r_floor);
        }
        let z1 = normal(&mut rng, cfg.noise);
        let z2 = normal(&mut rng, cfg.noise);
        let dw = sh * z1;
        let dw_perp = sh * z2;
        let (r1, dtheta) = if !cfg.noise {
            (math::acosh(math::cosh(r) * math::exp(0.5 * h)), 0.0)
        } else if r < zone {
            path.planar_steps += 1;
            let a = r + dw;
            let rr = math::hypot(a, dw_perp) + 0.5 * h * coth_minus_inverse(r);
            (rr, math::atan2(dw_perp, a))
        } else {
            (r + 0.5 * h / math::tanh(r) + dw, dw_perp / math::sinh(r))
        };
        r = if opts.reflect_first { r1 } else { r1.max(opts.r_floor) };
        w += dw;
        if entered {
            winding += dtheta;
        }
        let slack = 0.5 * t1 + w - r;
        if slack > path.lower_bound_slack {
            path.lower_bound_slack = slack;
        }
        path.times.push(t1);
        path.r.push(r);
        path.theta_winding.push(winding);
        path.w_radial.push(w);
        t0 = t1;
    }
    if !entered {
        path.entrance_index = steps;
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(t: f64, dt: f64, idx: u64) -> SimConfig {
        SimConfig::new(t, dt, 2024, idx).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(0.0, 0.1, 0, 0).is_err());
        assert!(SimConfig::new(1.0, 0.0, 0, 0).is_err());
        assert!(SimConfig::new(1.0, -0.1, 0, 0).is_err());
        assert!(SimConfig::new(1.0, 2.0, 0, 0).is_err());
    }

    #[test]
    fn grid_lands_on_horizon() {
        let c = cfg(1.0, 1e-3, 0);
        assert_eq!(c.steps(), 1000);
        let c = cfg(1.0005, 1e-3, 0);
        assert_eq!(c.steps(), 1001);
        let g = c.grid();
        assert_eq!(*g.last().unwrap(), 1.0005);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!((g[1000] - g[999] - 1e-3).abs() < 1e-15);
        let c = cfg(0.3, 0.1, 0);
        assert_eq!(c.steps(), 3);
    }

    #[test]
    fn y_is_exact_geometric_form() {
        let p = simulate_halfplane(&cfg(2.0, 1e-2, 3)).unwrap();
        assert_eq!((p.x[0], p.y[0]), (0.0, 1.0));
        for i in 0..p.len() {
            assert_eq!(p.y[i], (p.wy[i] - 0.5 * p.times[i]).exp());
        }
        assert!(p.xi.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn single_step_law_shape() {
        let c = cfg(0.25, 0.25, 9);
        let p = simulate_halfplane(&c).unwrap();
        assert_eq!(p.len(), 2);
        // X_1 = Y_0 sqrt(dt) Z and Y_1 = exp(sqrt(dt) Z' - dt/2) for the first two normals of the stream
        let mut rng = c.rng(Stream::Noise);
        let zx: f64 = rng.sample(StandardNormal);
        let zy: f64 = rng.sample(StandardNormal);
        assert_eq!(p.x[1], 0.5 * zx);
        assert_eq!(p.y[1], (0.5 * zy - 0.125).exp());
    }

    #[test]
    fn paths_replay_bit_exactly() {
        let a = simulate_halfplane(&cfg(1.0, 1e-3, 77)).unwrap();
        let b = simulate_halfplane(&cfg(1.0, 1e-3, 77)).unwrap();
        assert_eq!(a, b);
        let c = simulate_halfplane(&cfg(1.0, 1e-3, 78)).unwrap();
        assert_ne!(a.x, c.x);
    }

    #[test]
    fn running_max_examples() {
        let mut p = simulate_halfplane(&cfg(0.3, 0.1, 0)).unwrap();
        p.x = alloc::vec![0.0, 0.0, 0.0, 0.0];
        assert_eq!(running_max(&p), 0.0);
        p.x = alloc::vec![0.0, -1.0, 2.0, 1.0];
        assert_eq!(running_max(&p), 2.0);
    }

    #[test]
    fn running_max_nested_horizons() {
        // same seed: the shorter path is a prefix of the longer one
        let short = simulate_halfplane(&cfg(0.5, 1e-3, 4)).unwrap();
        let long = simulate_halfplane(&cfg(1.0, 1e-3, 4)).unwrap();
        assert_eq!(&long.x[..short.len()], &short.x[..]);
        assert!(running_max(&long) >= running_max(&short));
    }

    #[test]
    fn xi_without_noise_is_deterministic_integral() {
        let c = cfg(2.0, 1e-4, 0).without_noise();
        let s = simulate_xi(&c).unwrap();
        assert!((s.xi_t - (1.0 - (-2.0f64).exp())).abs() < 1e-8);
        let p = simulate_halfplane(&c).unwrap();
        assert!((p.xi.last().unwrap() - s.xi_t).abs() < 1e-12);
    }

    #[test]
    fn xi_positive() {
        for i in 0..50 {
            assert!(simulate_xi(&cfg(0.01, 1e-3, i)).unwrap().xi_t > 0.0);
        }
    }

    #[test]
    fn exp_time_validation_and_determinism() {
        let c = cfg(1.0, 0.1, 5);
        assert!(path_exp_time(&c, 0.0).is_err());
        assert!(path_exp_time(&c, -1.0).is_err());
        assert_eq!(path_exp_time(&c, 2.0).unwrap(), path_exp_time(&c, 2.0).unwrap());
        assert!(path_exp_time(&c, 2.0).unwrap() > 0.0);
    }

    #[test]
    fn exp_time_means() {
        for (lambda, n) in [(1.0, 1_000_000u64), (2.0, 1_000_000)] {
            let mut sum = 0.0;
            let mut sq = 0.0;
            for i in 0..n {
                let t = path_exp_time(&cfg(1.0, 0.1, i), lambda).unwrap();
                sum += t;
                sq += t * t;
            }
            let mean = sum / n as f64;
            let sd = (sq / n as f64 - mean * mean).sqrt();
            assert!((mean - 1.0 / lambda).abs() < 3.0 * sd / (n as f64).sqrt(), "λ={lambda}: {mean}");
        }
    }

    #[test]
    fn polar_drift_only_beats_linear_bound() {
        let c = cfg(5.0, 1e-3, 0).without_noise();
        let p = simulate_polar(&c, &PolarOptions::default()).unwrap();
        for i in 0..p.r.len() {
            assert!(p.r[i] >= 0.5 * p.times[i] - 1e-12);
            assert_eq!(p.theta_winding[i], 0.0);
        }
        // cosh R_t = e^{t/2} for the drift flow from the origin (floor start adds O(r_floor^2))
        let last = *p.r.last().unwrap();
        assert!((last.cosh() - 2.5f64.exp()).abs() < 1e-9 * 2.5f64.exp());
    }

    #[test]
    fn polar_lower_bound_slack_is_bounded() {
        for idx in 0..20 {
            let c = cfg(5.0, 2e-3, idx);
            let p = simulate_polar(&c, &PolarOptions::default()).unwrap();
            assert!(p.r.iter().all(|&r| r >= 0.0));
            assert!(p.lower_bound_slack <= 0.5 * c.dt() * p.planar_steps as f64 + 1e-12);
            for i in 0..p.r.len() {
                assert!(p.r[i] >= 0.5 * p.times[i] + p.w_radial[i] - p.lower_bound_slack - 1e-12);
            }
            assert_eq!(p.theta_winding[p.entrance_index], 0.0);
            assert!(p.times[p.entrance_index] >= 1e-3);
        }
    }

    #[test]
    fn polar_config_validation() {
        let c = cfg(1.0, 1e-3, 0);
        let bad_floor = PolarOptions { r_floor: 0.0, ..Default::default() };
        assert!(simulate_polar(&c, &bad_floor).is_err());
        let bad_s = PolarOptions { s_entrance: 2.0, ..Default::default() };
        assert!(simulate_polar(&c, &bad_s).is_err());
    }

    #[test]
    fn polar_small_time_matches_planar_rayleigh() {
        // near the origin the radius is close to the norm of a planar Gaussian: E R_t ≈ sqrt(π t / 2)
        let (t, n) = (0.01, 20_000u64);
        let mut sum = 0.0;
        for idx in 0..n {
            let c = cfg(t, 1e-3, idx);
            let opts = PolarOptions { s_entrance: 1e-3, ..Default::default() };
            sum += *simulate_polar(&c, &opts).unwrap().r.last().unwrap();
        }
        let mean = sum / n as f64;
        let expect = (core::f64::consts::PI * t / 2.0).sqrt();
        assert!((mean / expect - 1.0).abs() < 0.02, "{mean} vs {expect}");
    }
}
