//! Relative-entropy decay of a Markov chain towards its invariant law.

use serde::Serialize;

use super::metrics::kl;
use crate::error::{Error, Result};
use crate::finite_pomp::FiniteDist;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

const MAX_POWER_ITERATIONS: usize = 1_000_000;
/// Starts that disagree by more than this are reported as distinct invariants.
const UNIQUENESS_TOL: f64 = 1e-9;

fn check_stochastic<T: Scalar>(t: &Matrix<T>) -> Result<()> {
    if t.rows() != t.cols() || t.rows() == 0 {
        return Err(Error::InvalidModel(format!("transition matrix is {}x{}", t.rows(), t.cols())));
    }
    for i in 0..t.rows() {
        let row = t.row(i);
        let s: T = row.iter().copied().sum();
        if row.iter().any(|&v| v < T::zero() || !v.is_finite()) || (s - T::one()).abs().as_f64() > T::DIST_TOL {
            return Err(Error::InvalidModel(format!("row {i} of the transition matrix is not a distribution")));
        }
    }
    Ok(())
}

fn sup_diff<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |m, (&x, &y)| m.max((x - y).abs()))
}

/// Power iteration on the lazy chain `(I + T) / 2` from one start. Iterates
/// until the residual `|pi T - pi|_inf` stops improving, then requires it to
/// be below `tol`.
fn power_from<T: Scalar>(t: &Matrix<T>, start: Vec<T>, tol: T) -> Result<Vec<T>> {
    const STALL: usize = 64;
    let half = T::lit(0.5);
    let floor = T::epsilon() * T::lit(4.0);
    let mut pi = start;
    let mut best = T::infinity();
    let mut since_best = 0;
    for _ in 0..MAX_POWER_ITERATIONS {
        let moved = t.vec_mul(&pi)?;
        let residual = sup_diff(&moved, &pi);
        if residual < best {
            best = residual;
            since_best = 0;
        } else {
            since_best += 1;
        }
        if residual <= floor || (since_best >= STALL && best < tol) {
            return Ok(pi);
        }
        let lazy: Vec<T> = pi.iter().zip(&moved).map(|(&a, &b)| half * (a + b)).collect();
        let s: T = lazy.iter().copied().sum();
        pi = lazy.into_iter().map(|v| v / s).collect();
    }
    Err(Error::PowerIterationNotConverged { iterations: MAX_POWER_ITERATIONS })
}

/// Stationary law of `T`, found by power iteration from every point mass.
/// The lazy chain has the same invariant laws as `T` and is aperiodic, so
/// the iteration converges; distinct limits mean the invariant law is not
/// unique.
pub fn invariant_dist<T: Scalar>(t: &Matrix<T>) -> Result<FiniteDist<T>> {
    check_stochastic(t)?;
    let n = t.rows();
    let tol = T::lit((T::DIST_TOL * 1e-2).max(16.0 * T::epsilon().as_f64()));
    let mut limits = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = vec![T::zero(); n];
        e[i] = T::one();
        limits.push(power_from(t, e, tol)?);
    }
    let spread = limits.iter().skip(1).fold(T::zero(), |m, l| m.max(sup_diff(l, &limits[0])));
    let allowed = T::lit(UNIQUENESS_TOL.max(T::DIST_TOL * 1e2));
    if spread > allowed {
        return Err(Error::NonUniqueInvariant { spread: spread.as_f64() });
    }
    // mass left on transient states is rounding noise
    let mut pi = limits.swap_remove(0);
    pi.iter_mut().filter(|v| **v < tol).for_each(|v| *v = T::zero());
    Ok(FiniteDist::from_weights(pi).expect("power iterate keeps unit mass"))
}

#[derive(Debug, Clone, Serialize)]
pub struct HarrisCurve<T: Serialize> {
    /// `D(pi_t || pi)` for `t = 0..=steps`, in nats.
    pub divergences: Vec<T>,
    pub invariant: Vec<T>,
    /// Non-increasing within `monotone_tol` at every step.
    pub monotone: bool,
    pub monotone_tol: f64,
    pub floor: f64,
    /// First `t` with `D(pi_t || pi) < floor`.
    pub first_below_floor: Option<usize>,
}

pub const MONOTONE_TOL: f64 = 1e-12;

/// Relative entropy of `pi_0 T^t` with respect to the invariant law of `T`.
pub fn harris_re_curve<T: Scalar + Serialize>(
    t: &Matrix<T>,
    pi0: &FiniteDist<T>,
    steps: usize,
    floor: f64,
) -> Result<HarrisCurve<T>> {
    let pi = invariant_dist(t)?;
    if pi0.len() != pi.len() {
        return Err(Error::DimensionMismatch(format!(
            "initial law has {} states, chain has {}",
            pi0.len(),
            pi.len()
        )));
    }
    if let Some(state) = pi0.first_ac_violation(&pi) {
        return Err(Error::InfiniteInitialDivergence { state });
    }
    let mut divergences = Vec::with_capacity(steps + 1);
    let mut cur = pi0.clone();
    for step in 0..=steps {
        if step > 0 {
            let next = t.vec_mul(cur.probs())?;
            cur = FiniteDist::from_weights(next).expect("stochastic matrix preserves mass");
        }
        divergences.push(kl(&cur, &pi)?);
    }
    let tol = T::lit(MONOTONE_TOL);
    let monotone = divergences.windows(2).all(|w| w[1] <= w[0] + tol);
    let first_below_floor = divergences.iter().position(|d| d.as_f64() < floor);
    Ok(HarrisCurve {
        divergences,
        invariant: pi.probs().to_vec(),
        monotone,
        monotone_tol: MONOTONE_TOL,
        floor,
        first_below_floor,
    })
}

impl<T: Scalar + Serialize> HarrisCurve<T> {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,divergence\n");
        for (t, d) in self.divergences.iter().enumerate() {
            out.push_str(&format!("{t},{:e}\n", d.as_f64()));
        }
        out
    }
}
