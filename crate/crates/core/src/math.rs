//! Float functions that resolve to `std` when it is available and to `libm` otherwise.

macro_rules! unary {
    ($($name:ident => $std:ident, $libm:ident;)*) => {
        $(
            #[inline(always)]
            pub fn $name(x: f64) -> f64 {
                #[cfg(feature = "std")]
                {
                    x.$std()
                }
                #[cfg(not(feature = "std"))]
                {
                    libm::$libm(x)
                }
            }
        )*
    };
}

unary! {
    exp => exp, exp;
    ln => ln, log;
    ln_1p => ln_1p, log1p;
    sqrt => sqrt, sqrt;
    sin => sin, sin;
    cos => cos, cos;
    sinh => sinh, sinh;
    cosh => cosh, cosh;
    tanh => tanh, tanh;
    tan => tan, tan;
    atan => atan, atan;
    asinh => asinh, asinh;
    acosh => acosh, acosh;
    ceil => ceil, ceil;
    floor => floor, floor;
}

#[inline(always)]
pub fn atan2(y: f64, x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        y.atan2(x)
    }
    #[cfg(not(feature = "std"))]
    {
        libm::atan2(y, x)
    }
}

#[inline(always)]
pub fn powf(x: f64, p: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.powf(p)
    }
    #[cfg(not(feature = "std"))]
    {
        libm::pow(x, p)
    }
}

#[inline(always)]
pub fn hypot(x: f64, y: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.hypot(y)
    }
    #[cfg(not(feature = "std"))]
    {
        libm::hypot(x, y)
    }
}

/// Complementary error function (always `libm`; `std` has none).
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// `arctanh` written through `log1p` so that arguments close to 1 keep their digits.
#[inline]
pub fn atanh(r: f64) -> f64 {
    0.5 * (ln_1p(r) - ln_1p(-r))
}

/// Reduces an angle to `[0, 2π)`.
#[inline]
pub fn wrap_angle(theta: f64) -> f64 {
    let tau = core::f64::consts::TAU;
    let w = theta - tau * floor(theta / tau);
    if w >= tau || w < 0.0 {
        0.0
    } else {
        w
    }
}
