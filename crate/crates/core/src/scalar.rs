//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All filtering, linear-algebra and divergence code is written against
//! [`Scalar`], which is implemented for `f32` and `f64`. Tolerances that
//! depend on machine precision live on the trait so generic code does not
//! hard-code `f64` thresholds.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Floating-point type usable by the filters, the observability tests and
/// the diagnostics.
pub trait Scalar:
    Float + FromPrimitive + Sum + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Tolerance on `|sum - 1|` for a probability vector.
    const DIST_TOL: f64;
    /// Default relative threshold for numeric rank decisions.
    const RANK_TOL: f64;
    /// Absolute residual above which a linear solve is reported infeasible.
    const SOLVE_EPS: f64;

    /// Converts an `f64` literal. Never fails for finite inputs on `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f64 {
    const DIST_TOL: f64 = 1e-12;
    const RANK_TOL: f64 = 1e-9;
    const SOLVE_EPS: f64 = 1e-8;
}

impl Scalar for f32 {
    const DIST_TOL: f64 = 1e-5;
    const RANK_TOL: f64 = 1e-4;
    const SOLVE_EPS: f64 = 1e-4;
}

/// `ln(exp(a) + exp(b))` without overflow.
pub fn log_add_exp<T: Scalar>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Deterministic left-to-right pairwise sum.
pub fn pairwise_sum<T: Scalar>(xs: &[T]) -> T {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().fold(T::zero(), |acc, &x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// `Σ a_i b_i` accumulated in doubled working precision (error-free
/// products via FMA, error-free sums), rounded once at the end.
pub fn dot2<T: Scalar>(a: &[T], b: &[T]) -> T {
    let (mut s, mut c) = (T::zero(), T::zero());
    for (&x, &y) in a.iter().zip(b) {
        let p = x * y;
        let pe = x.mul_add(y, -p);
        let t = s + p;
        let z = t - s;
        let se = (s - (t - z)) + (p - z);
        s = t;
        c = c + (pe + se);
    }
    s + c
}
