use super::{FiniteDist, FinitePomp};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Bayes step: `posterior[x] ∝ likelihood[x] * prior[x]`.
///
/// `step` is only used to label a [`Error::ZeroEvidence`] failure.
pub fn bayes<T: Scalar>(likelihood: &[T], prior: &FiniteDist<T>, step: usize) -> Result<FiniteDist<T>> {
    if likelihood.len() != prior.len() {
        return Err(Error::DimensionMismatch(format!(
            "likelihood of length {} for {} states",
            likelihood.len(),
            prior.len()
        )));
    }
    let weights: Vec<T> = likelihood.iter().zip(prior.probs()).map(|(&l, &p)| l * p).collect();
    FiniteDist::from_weights(weights).ok_or(Error::ZeroEvidence { step })
}

/// `pi_0[x] ∝ prior[x] B[x][y0]`.
pub fn filter_init<T: Scalar>(
    model: &FinitePomp<T>,
    prior: &FiniteDist<T>,
    y0: usize,
) -> Result<FiniteDist<T>> {
    model.check_dist(prior)?;
    bayes(&model.likelihood(y0)?, prior, 0)
}

/// One-step predictor `pi^T T`.
pub fn predict<T: Scalar>(model: &FinitePomp<T>, pi: &FiniteDist<T>) -> Result<FiniteDist<T>> {
    model.check_dist(pi)?;
    let next = model.transition().vec_mul(pi.probs())?;
    // Renormalise to absorb rounding; the product of a distribution and a
    // row-stochastic matrix is a distribution.
    Ok(FiniteDist::from_weights(next).expect("stochastic matrix preserves mass"))
}

/// Predict with `T`, then condition on `y`.
pub fn filter_update<T: Scalar>(
    model: &FinitePomp<T>,
    prev: &FiniteDist<T>,
    y: usize,
) -> Result<FiniteDist<T>> {
    filter_update_at(model, prev, y, 0)
}

pub(crate) fn filter_update_at<T: Scalar>(
    model: &FinitePomp<T>,
    prev: &FiniteDist<T>,
    y: usize,
    step: usize,
) -> Result<FiniteDist<T>> {
    let pred = predict(model, prev)?;
    bayes(&model.likelihood(y)?, &pred, step)
}

/// Runs the filter over a whole observation sequence and returns
/// `pi_0, ..., pi_h`.
pub fn filter_run<T: Scalar>(
    model: &FinitePomp<T>,
    prior: &FiniteDist<T>,
    ys: &[usize],
) -> Result<Vec<FiniteDist<T>>> {
    let Some((&y0, rest)) = ys.split_first() else {
        return Ok(Vec::new());
    };
    let mut out = Vec::with_capacity(ys.len());
    let mut pi = filter_init(model, prior, y0)?;
    for (t, &y) in rest.iter().enumerate() {
        let next = filter_update_at(model, &pi, y, t + 1)?;
        out.push(std::mem::replace(&mut pi, next));
    }
    out.push(pi);
    Ok(out)
}
