//! Two-point channel `Y = X ± 1` (probability 1/2 each), for which
//! `S(g)(x) = (g(x + 1) + g(x - 1)) / 2`.
//!
//! On the band `[a - M, a + M]` the function
//!
//! ```text
//! g(y) = 0                       y <  a - M + 1
//!        2 f(y - 1)              y in [a - M + 1, a - M + 3)
//!        2 f(y - 1) - g(y - 2)   y in [a - M + 3, a + M + 1]
//!        -g(y - 2)               y >  a + M + 1
//! ```
//!
//! reproduces `f` exactly on the band and vanishes outside it, with
//! `||g||_inf <= 4 M ||f||_inf`.

use std::sync::Arc;

use super::{GShape, PiecewiseG, RealFn};
use crate::scalar::Scalar;

/// Points per unit length of the base band used to estimate `||g||_inf`.
const SUP_SAMPLES_PER_BAND: usize = 4096;

pub(super) fn eval<T: Scalar>(half_width: u32, center: T, f: &dyn Fn(T) -> T, y: T) -> T {
    if half_width == 0 {
        return T::zero();
    }
    let m = T::lit(f64::from(half_width));
    let two = T::lit(2.0);
    let lo = center - m + T::one();
    let hi = center + m + T::one();
    if y < lo {
        return T::zero();
    }
    let mut z = y;
    let mut sign = T::one();
    if z > hi {
        // -g(y - 2) repeatedly until we are back inside the band
        let jumps = ((z - hi) / two).ceil();
        z = z - two * jumps;
        if jumps.to_u64().unwrap_or(0) % 2 == 1 {
            sign = -sign;
        }
        if z > hi {
            z = z - two;
            sign = -sign;
        }
    }
    let mut acc = T::zero();
    loop {
        if z < lo {
            break;
        }
        acc = acc + sign * two * f(z - T::one());
        if z < lo + two {
            break;
        }
        sign = -sign;
        z = z - two;
    }
    acc
}

/// Builds the telescoping `g` for a bounded `f`, band half-width `m` and
/// centre `a`. `m = 0` gives `g ≡ 0`.
pub fn telescoping_g<T: Scalar>(f: RealFn<T>, m: u32, a: T) -> PiecewiseG<T> {
    if m == 0 {
        return PiecewiseG::zero();
    }
    let two = T::lit(2.0);
    let mm = T::lit(f64::from(m));
    let lo = a - mm + T::one();
    let hi = a + mm + T::one();
    // Every y in the band is y0 + 2j with y0 in the base interval [lo, lo + 2);
    // above the band g only alternates sign, so the sup is attained inside.
    let mut sup = T::zero();
    for s in 0..SUP_SAMPLES_PER_BAND {
        let y0 = lo + two * T::lit(s as f64 / SUP_SAMPLES_PER_BAND as f64);
        let mut g = T::zero();
        let mut y = y0;
        while y <= hi {
            g = two * f(y - T::one()) - g;
            sup = sup.max(g.abs());
            y = y + two;
        }
    }
    let breakpoints = vec![lo, lo + two, hi];
    let shape = GShape::Telescoping { half_width: m, center: a, f: Arc::clone(&f) };
    PiecewiseG::telescoping(breakpoints, shape, sup)
}
