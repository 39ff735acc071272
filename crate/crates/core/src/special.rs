//! Log-gamma via the Lanczos approximation (g = 7, nine terms).

use core::f64::consts::PI;

use crate::math;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

// ln(sqrt(2π))
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln |Γ(x)|` for real `x` that is not a non-positive integer.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) Γ(1 - x) = π / sin(πx)
        let s = math::sin(PI * x);
        return math::ln(PI / s.abs()) - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (k, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * math::ln(t) - t + math::ln(acc)
}

/// `Γ(a) / Γ(b)` evaluated as one exponential of a log-gamma difference.
pub fn gamma_ratio(a: f64, b: f64) -> f64 {
    math::exp(ln_gamma(a) - ln_gamma(b))
}
