//! Finite-alphabet partially observed Markov processes.
//!
//! A model is a row-stochastic transition matrix `T` over `n` states, a noise
//! law `Q` over `m` symbols and an assignment `H[x][z] = h(x, z)` of each
//! (state, noise) pair to one of `K` outputs. The induced channel matrix
//! `B[x][y] = sum_z Q[z] 1{H[x][z] = y}` is what the filters use; `(Q, H)` is
//! what the model file stores.

mod file;
pub(crate) mod filter;
pub(crate) mod sampling;
mod smoothing;

pub use file::ModelFile;
pub use filter::{bayes, filter_init, filter_run, filter_update, predict};
pub use sampling::{sample_trajectory, Trajectory};
pub use smoothing::{rn_identity_gap, smooth_x0};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Probability vector over a finite state alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDist<T> {
    probs: Vec<T>,
}

impl<T: Scalar> FiniteDist<T> {
    /// Validates non-negativity and `|sum - 1| <= T::DIST_TOL`.
    pub fn new(probs: Vec<T>) -> Result<Self> {
        check_probability_vector(&probs, "distribution")?;
        Ok(Self { probs })
    }

    pub fn from_f64(probs: &[f64]) -> Result<Self> {
        Self::new(probs.iter().map(|&p| T::lit(p)).collect())
    }

    /// Normalises non-negative weights. Returns `None` when they sum to zero.
    pub fn from_weights(mut weights: Vec<T>) -> Option<Self> {
        let total = crate::scalar::pairwise_sum(&weights);
        if !(total > T::zero()) || !total.is_finite() {
            return None;
        }
        for w in &mut weights {
            *w = *w / total;
        }
        Some(Self { probs: weights })
    }

    pub fn uniform(n: usize) -> Self {
        let p = T::one() / T::lit(n as f64);
        Self { probs: vec![p; n] }
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        let mut probs = vec![T::zero(); n];
        probs[at] = T::one();
        Self { probs }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    #[inline]
    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.probs.iter().map(|p| p.as_f64()).collect()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs.iter().enumerate().filter(|(_, &p)| p > T::zero()).map(|(i, _)| i)
    }

    /// `true` when every state charged by `self` is charged by `other`.
    pub fn absolutely_continuous_wrt(&self, other: &Self) -> bool {
        self.first_ac_violation(other).is_none()
    }

    pub(crate) fn first_ac_violation(&self, other: &Self) -> Option<usize> {
        self.probs
            .iter()
            .zip(&other.probs)
            .position(|(&p, &q)| p > T::zero() && q <= T::zero())
    }
}

impl<T> std::ops::Index<usize> for FiniteDist<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.probs[i]
    }
}

fn check_probability_vector<T: Scalar>(p: &[T], what: &str) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution(format!("{what} is empty")));
    }
    if let Some(i) = p.iter().position(|&x| !(x >= T::zero()) || !x.is_finite()) {
        return Err(Error::InvalidDistribution(format!(
            "{what} entry {i} is {} (must be finite and >= 0)",
            p[i]
        )));
    }
    let sum = crate::scalar::pairwise_sum(p);
    if (sum - T::one()).abs().as_f64() > T::DIST_TOL {
        return Err(Error::InvalidDistribution(format!("{what} sums to {sum}")));
    }
    Ok(())
}

/// `B[x][y] = sum_z Q[z] 1{H[x][z] = y}`.
pub fn build_channel_matrix<T: Scalar>(q: &[T], h: &[Vec<usize>], k: usize) -> Result<Matrix<T>> {
    check_probability_vector(q, "noise law Q")?;
    let mut b = Matrix::zeros(h.len(), k);
    for (x, row) in h.iter().enumerate() {
        if row.len() != q.len() {
            return Err(Error::DimensionMismatch(format!(
                "H row {x} has {} entries, Q has {}",
                row.len(),
                q.len()
            )));
        }
        for (&y, &w) in row.iter().zip(q) {
            if y >= k {
                return Err(Error::OutputOutOfRange { index: y, count: k });
            }
            b[(x, y)] = b[(x, y)] + w;
        }
    }
    Ok(b)
}

/// Finite POMP `(T, Q, H)` together with its derived channel matrix `B`.
#[derive(Debug, Clone)]
pub struct FinitePomp<T> {
    transition: Matrix<T>,
    noise: Vec<T>,
    assignment: Vec<Vec<usize>>,
    channel: Matrix<T>,
    outputs: usize,
}

impl<T: Scalar> FinitePomp<T> {
    pub fn new(
        transition: Matrix<T>,
        noise: Vec<T>,
        assignment: Vec<Vec<usize>>,
        outputs: usize,
    ) -> Result<Self> {
        let n = transition.rows();
        if n == 0 || transition.cols() != n {
            return Err(Error::InvalidModel(format!(
                "T must be square and non-empty, got {}x{}",
                transition.rows(),
                transition.cols()
            )));
        }
        if assignment.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "H has {} rows for {n} states",
                assignment.len()
            )));
        }
        if outputs == 0 {
            return Err(Error::InvalidModel("K must be positive".into()));
        }
        for x in 0..n {
            check_probability_vector(transition.row(x), &format!("row {x} of T"))
                .map_err(|e| Error::InvalidModel(e.to_string()))?;
        }
        let channel = build_channel_matrix(&noise, &assignment, outputs)?;
        for x in 0..n {
            check_probability_vector(channel.row(x), &format!("row {x} of B"))
                .map_err(|e| Error::InvalidModel(e.to_string()))?;
        }
        Ok(Self { transition, noise, assignment, channel, outputs })
    }

    /// Model whose channel is given directly as an `n x K` row-stochastic
    /// matrix. Noise symbols are the cells of the common refinement of the
    /// per-row cumulative partitions of `[0, 1)`; symbol `z` maps to the
    /// output whose band in row `x` contains the cell.
    pub fn from_channel(transition: Matrix<T>, channel: &Matrix<T>) -> Result<Self> {
        let (n, k) = (channel.rows(), channel.cols());
        let mut noise = Vec::new();
        let mut assignment = vec![Vec::new(); n];
        let mut cuts: Vec<T> = vec![T::zero()];
        for x in 0..n {
            let mut acc = T::zero();
            for y in 0..k {
                acc = acc + channel[(x, y)];
                cuts.push(acc.min(T::one()));
            }
        }
        cuts.retain(|c| *c >= T::zero());
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        if *cuts.last().unwrap() < T::one() {
            cuts.push(T::one());
        }
        for w in cuts.windows(2) {
            let width = w[1] - w[0];
            if width <= T::zero() {
                continue;
            }
            let mid = (w[0] + w[1]) / T::lit(2.0);
            noise.push(width);
            for (x, row) in assignment.iter_mut().enumerate() {
                let mut acc = T::zero();
                let mut out = k - 1;
                for y in 0..k {
                    acc = acc + channel[(x, y)];
                    if mid < acc {
                        out = y;
                        break;
                    }
                }
                row.push(out);
            }
        }
        Self::new(transition, noise, assignment, k)
    }

    #[inline]
    pub fn states(&self) -> usize {
        self.transition.rows()
    }

    #[inline]
    pub fn noise_symbols(&self) -> usize {
        self.noise.len()
    }

    #[inline]
    pub fn outputs(&self) -> usize {
        self.outputs
    }

    #[inline]
    pub fn transition(&self) -> &Matrix<T> {
        &self.transition
    }

    #[inline]
    pub fn channel(&self) -> &Matrix<T> {
        &self.channel
    }

    pub fn noise(&self) -> &[T] {
        &self.noise
    }

    pub fn assignment(&self) -> &[Vec<usize>] {
        &self.assignment
    }

    /// Likelihood column `B[., y]`.
    pub fn likelihood(&self, y: usize) -> Result<Vec<T>> {
        if y >= self.outputs {
            return Err(Error::OutputOutOfRange { index: y, count: self.outputs });
        }
        Ok(self.channel.column(y))
    }

    pub(crate) fn check_dist(&self, d: &FiniteDist<T>) -> Result<()> {
        if d.len() != self.states() {
            return Err(Error::DimensionMismatch(format!(
                "distribution over {} states for a {}-state model",
                d.len(),
                self.states()
            )));
        }
        Ok(())
    }
}
