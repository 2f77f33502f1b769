use super::{FiniteDist, FinitePomp};
use crate::error::Result;
use crate::rng::{sample_index, stream, StreamRng};
use crate::scalar::Scalar;

/// A realised path `(x_0, y_0), ..., (x_h, y_h)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub xs: Vec<usize>,
    pub ys: Vec<usize>,
    pub seed: u64,
}

impl Trajectory {
    pub fn horizon(&self) -> usize {
        self.xs.len().saturating_sub(1)
    }
}

/// Samples `h + 1` state/output pairs. Draw order on the ChaCha8 stream:
/// `x_0, y_0, x_1, y_1, ...`, one uniform per draw.
pub fn sample_trajectory<T: Scalar>(
    model: &FinitePomp<T>,
    prior: &FiniteDist<T>,
    horizon: usize,
    seed: u64,
) -> Result<Trajectory> {
    let mut rng = stream(seed);
    sample_with(model, prior, horizon, seed, &mut rng)
}

pub(crate) fn sample_with<T: Scalar>(
    model: &FinitePomp<T>,
    prior: &FiniteDist<T>,
    horizon: usize,
    seed: u64,
    rng: &mut StreamRng,
) -> Result<Trajectory> {
    model.check_dist(prior)?;
    let n = model.states();
    let t_rows: Vec<Vec<f64>> =
        (0..n).map(|x| model.transition().row(x).iter().map(|p| p.as_f64()).collect()).collect();
    let b_rows: Vec<Vec<f64>> =
        (0..n).map(|x| model.channel().row(x).iter().map(|p| p.as_f64()).collect()).collect();

    let mut xs = Vec::with_capacity(horizon + 1);
    let mut ys = Vec::with_capacity(horizon + 1);
    let mut x = sample_index(rng, &prior.to_f64());
    xs.push(x);
    ys.push(sample_index(rng, &b_rows[x]));
    for _ in 0..horizon {
        x = sample_index(rng, &t_rows[x]);
        xs.push(x);
        ys.push(sample_index(rng, &b_rows[x]));
    }
    Ok(Trajectory { xs, ys, seed })
}
