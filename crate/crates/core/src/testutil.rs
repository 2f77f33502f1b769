//! Brute-force oracles shared by the unit tests.

use rand::Rng;

use crate::finite_pomp::{FiniteDist, FinitePomp};
use crate::scalar::Scalar;

pub fn example_45<T: Scalar>() -> FinitePomp<T> {
    crate::golden::model()
}

/// `(T, Q, H)` model with `n` states, `k` outputs and `m` noise symbols.
pub fn random_model<R: Rng>(rng: &mut R, n: usize, k: usize, m: usize) -> FinitePomp<f64> {
    crate::random::random_model(rng, n, k, m)
}

/// Posterior of `X_0` by summing the joint law over all `n^(h+1)` state paths.
pub fn enumerate_x0_posterior(
    model: &FinitePomp<f64>,
    prior: &FiniteDist<f64>,
    ys: &[usize],
    x_end: Option<usize>,
) -> Option<Vec<f64>> {
    let n = model.states();
    let len = ys.len();
    let total_paths = n.pow(len as u32);
    let mut acc = vec![0.0; n];
    let mut path = vec![0usize; len];
    for code in 0..total_paths {
        let mut c = code;
        for slot in path.iter_mut() {
            *slot = c % n;
            c /= n;
        }
        if let Some(x) = x_end {
            if path[len - 1] != x {
                continue;
            }
        }
        let mut w = prior[path[0]] * model.channel()[(path[0], ys[0])];
        for t in 1..len {
            w *= model.transition()[(path[t - 1], path[t])] * model.channel()[(path[t], ys[t])];
        }
        acc[path[0]] += w;
    }
    let s: f64 = acc.iter().sum();
    (s > 0.0).then(|| acc.into_iter().map(|a| a / s).collect())
}
