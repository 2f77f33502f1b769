//! Distances between distributions on a finite alphabet.
//!
//! Total variation follows the `sup_{|f| <= 1}` convention, so
//! `tv(p, q) = Σ |p_i - q_i|` ranges over `[0, 2]` (twice the other common
//! convention). Relative entropy is in nats.

use rand::Rng;

use crate::error::{Error, Result};
use crate::finite_pomp::FiniteDist;
use crate::linalg::Matrix;
use crate::rng::stream;
use crate::scalar::{pairwise_sum, Scalar};

fn same_len<T>(p: &FiniteDist<T>, q: &FiniteDist<T>) -> Result<()>
where
    T: Scalar,
{
    if p.len() == q.len() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!("distributions of length {} and {}", p.len(), q.len())))
    }
}

pub fn tv<T: Scalar>(p: &FiniteDist<T>, q: &FiniteDist<T>) -> Result<T> {
    same_len(p, q)?;
    let d: Vec<T> = p.probs().iter().zip(q.probs()).map(|(&a, &b)| (a - b).abs()).collect();
    Ok(pairwise_sum(&d))
}

/// `D(p || q) = Σ p_i ln(p_i / q_i)`, `+inf` when some `p_i > 0 = q_i`.
///
/// Evaluated as `Σ q_i φ(p_i / q_i)` with `φ(r) = r ln r - r + 1 >= 0`, which
/// equals the usual sum for probability vectors and keeps every term
/// non-negative, so nearly equal inputs do not produce negative divergences.
pub fn kl<T: Scalar>(p: &FiniteDist<T>, q: &FiniteDist<T>) -> Result<T> {
    same_len(p, q)?;
    let mut terms = Vec::with_capacity(p.len());
    for (&a, &b) in p.probs().iter().zip(q.probs()) {
        if b == T::zero() {
            if a > T::zero() {
                return Ok(T::infinity());
            }
            continue;
        }
        if a == T::zero() {
            terms.push(b);
            continue;
        }
        let d = (a - b) / b;
        terms.push(b * ((T::one() + d) * d.ln_1p() - d));
    }
    Ok(pairwise_sum(&terms).max(T::zero()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinskerCheck<T> {
    pub holds: bool,
    /// `sqrt(2 D(p || q)) - tv(p, q)`.
    pub slack: T,
}

/// `tv(p, q) <= sqrt(2 D(p || q))`, with `D` in nats.
pub fn pinsker_holds<T: Scalar>(p: &FiniteDist<T>, q: &FiniteDist<T>) -> Result<PinskerCheck<T>> {
    let lhs = tv(p, q)?;
    let rhs = (T::lit(2.0) * kl(p, q)?).sqrt();
    let slack = rhs - lhs;
    Ok(PinskerCheck { holds: lhs <= rhs, slack })
}

/// Finite family of test functions on the state alphabet, one per row, each
/// with sup norm at most 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TestBank<T> {
    pub version: String,
    rows: Matrix<T>,
}

pub const BANK_VERSION: &str = "bank-v1";
const BANK_SEED: u64 = 0x6261_6e6b_7631;
const BANK_PROFILES: usize = 16;

impl<T: Scalar> TestBank<T> {
    /// Rows with sup norm above 1 are scaled down to 1.
    pub fn new(version: impl Into<String>, mut rows: Matrix<T>) -> Self {
        for i in 0..rows.rows() {
            let row = rows.row_mut(i);
            let sup = row.iter().fold(T::zero(), |m, v| m.max(v.abs()));
            if sup > T::one() {
                row.iter_mut().for_each(|v| *v = *v / sup);
            }
        }
        Self { version: version.into(), rows }
    }

    pub fn functions(&self) -> &Matrix<T> {
        &self.rows
    }

    pub fn states(&self) -> usize {
        self.rows.cols()
    }

    pub fn len(&self) -> usize {
        self.rows.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.rows() == 0
    }
}

/// Coordinate indicators followed by 16 seeded smooth profiles
/// `±cos(ω x + θ)` with a small random dither, each scaled to sup norm 1.
pub fn default_bank<T: Scalar>(n: usize) -> TestBank<T> {
    let mut rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for k in 0..BANK_PROFILES {
        let mut rng = stream(BANK_SEED ^ k as u64);
        let omega = rng.random_range(0.5..3.0) * std::f64::consts::PI / n.max(1) as f64;
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let mut f: Vec<f64> = (0..n)
            .map(|x| sign * (omega * x as f64 + theta).cos() + rng.random_range(-0.1..0.1))
            .collect();
        let sup = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if sup > 0.0 {
            f.iter_mut().for_each(|v| *v /= sup);
        }
        rows.push(f);
    }
    let rows = Matrix::from_f64_rows(&rows).unwrap_or_else(|_| Matrix::zeros(0, n));
    TestBank::new(BANK_VERSION, rows)
}

/// `max_f |Σ_x f(x) (p_x - q_x)|` over the bank; a lower bound on the
/// supremum over all bounded continuous `f`.
pub fn weak_gap<T: Scalar>(p: &FiniteDist<T>, q: &FiniteDist<T>, bank: &TestBank<T>) -> Result<T> {
    same_len(p, q)?;
    if bank.states() != p.len() && !bank.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "bank over {} states for distributions of length {}",
            bank.states(),
            p.len()
        )));
    }
    let diff: Vec<T> = p.probs().iter().zip(q.probs()).map(|(&a, &b)| a - b).collect();
    let gap = (0..bank.len())
        .map(|i| {
            let terms: Vec<T> = bank.rows.row(i).iter().zip(&diff).map(|(&f, &d)| f * d).collect();
            pairwise_sum(&terms).abs()
        })
        .fold(T::zero(), T::max);
    Ok(gap)
}
