use super::filter::filter_run;
use super::{FiniteDist, FinitePomp};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Law of `X_0` given `Y_[0,h] = ys` (and `X_h = x_end` when supplied),
/// computed with a backward recursion in `O(n^2 h)`.
pub fn smooth_x0<T: Scalar>(
    model: &FinitePomp<T>,
    prior: &FiniteDist<T>,
    ys: &[usize],
    x_end: Option<usize>,
) -> Result<FiniteDist<T>> {
    model.check_dist(prior)?;
    let n = model.states();
    let Some((&y0, _)) = ys.split_first() else {
        return Err(Error::DimensionMismatch("empty observation sequence".into()));
    };
    for &y in ys {
        if y >= model.outputs() {
            return Err(Error::OutputOutOfRange { index: y, count: model.outputs() });
        }
    }
    let mut beta: Vec<T> = match x_end {
        None => vec![T::one(); n],
        Some(x) if x < n => (0..n).map(|i| if i == x { T::one() } else { T::zero() }).collect(),
        Some(x) => {
            return Err(Error::DimensionMismatch(format!("terminal state {x} for {n} states")));
        }
    };
    let t = model.transition();
    let b = model.channel();
    for &y in ys[1..].iter().rev() {
        // beta_t(x) = sum_x' T[x][x'] B[x'][y_{t+1}] beta_{t+1}(x')
        let weighted: Vec<T> = (0..n).map(|j| b[(j, y)] * beta[j]).collect();
        beta = t.mul_vec(&weighted)?;
        let scale = beta.iter().fold(T::zero(), |m, &v| m.max(v));
        if scale > T::zero() {
            beta.iter_mut().for_each(|v| *v = *v / scale);
        }
    }
    let weights: Vec<T> = (0..n).map(|x| prior[x] * b[(x, y0)] * beta[x]).collect();
    FiniteDist::from_weights(weights).ok_or(Error::ZeroEvidence { step: ys.len() - 1 })
}

/// Largest discrepancy, over states charged by the nu-filter at time `n`,
/// between the filter density ratio `pi_n^mu(x) / pi_n^nu(x)` and the
/// smoothed prior-likelihood-ratio expression
/// `E^nu[dmu/dnu(X_0) | ys, X_n = x] / E^nu[dmu/dnu(X_0) | ys]`.
///
/// The two sides are computed independently (forward filters vs backward
/// smoothing) and coincide in exact arithmetic whenever `mu << nu`.
pub fn rn_identity_gap<T: Scalar>(
    model: &FinitePomp<T>,
    mu: &FiniteDist<T>,
    nu: &FiniteDist<T>,
    ys: &[usize],
    n: usize,
) -> Result<T> {
    model.check_dist(mu)?;
    model.check_dist(nu)?;
    if let Some(state) = mu.first_ac_violation(nu) {
        return Err(Error::AbsoluteContinuityViolated { state });
    }
    if n >= ys.len() {
        return Err(Error::DimensionMismatch(format!(
            "time {n} beyond {} observations",
            ys.len()
        )));
    }
    let ys = &ys[..=n];
    let pi_mu = filter_run(model, mu, ys)?.pop().expect("non-empty");
    let pi_nu = filter_run(model, nu, ys)?.pop().expect("non-empty");

    let ratio: Vec<T> = mu
        .probs()
        .iter()
        .zip(nu.probs())
        .map(|(&m, &v)| if v > T::zero() { m / v } else { T::zero() })
        .collect();
    let expect_ratio = |d: &FiniteDist<T>| -> T {
        d.probs().iter().zip(&ratio).fold(T::zero(), |acc, (&p, &r)| acc + p * r)
    };
    let denom = expect_ratio(&smooth_x0(model, nu, ys, None)?);

    let mut gap = T::zero();
    for x in pi_nu.support() {
        let lhs = pi_mu[x] / pi_nu[x];
        let rhs = expect_ratio(&smooth_x0(model, nu, ys, Some(x))?) / denom;
        gap = gap.max((lhs - rhs).abs());
    }
    Ok(gap)
}
