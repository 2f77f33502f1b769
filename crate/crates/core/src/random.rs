//! Random model and distribution generators for property sweeps.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::finite_pomp::{FiniteDist, FinitePomp};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Flat Dirichlet(1, ..., 1) draw.
pub fn dirichlet<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let g: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = g.iter().sum();
    g.into_iter().map(|x| x / s).collect()
}

pub fn random_dist<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize) -> FiniteDist<T> {
    FiniteDist::from_weights(dirichlet(rng, n).into_iter().map(T::lit).collect())
        .expect("dirichlet draw has positive mass")
}

/// Distribution with every entry at least `floor / n` before normalisation.
pub fn random_full_support<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    floor: f64,
) -> FiniteDist<T> {
    let w: Vec<T> = (0..n).map(|_| T::lit(floor + rng.random::<f64>())).collect();
    FiniteDist::from_weights(w).expect("positive weights")
}

pub fn random_stochastic<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize, cols: usize) -> Matrix<T> {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| dirichlet(rng, cols)).collect();
    Matrix::from_f64_rows(&rows).expect("rectangular")
}

/// Random `(T, Q, H)` model with `n` states, `m` noise symbols and `k`
/// outputs. Every transition and noise entry is positive.
pub fn random_model<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    k: usize,
    m: usize,
) -> FinitePomp<T> {
    let t = random_stochastic(rng, n, n);
    let q: Vec<T> = {
        let d = dirichlet(rng, m);
        let s: T = d.iter().map(|&x| T::lit(x)).sum();
        d.into_iter().map(|x| T::lit(x) / s).collect()
    };
    let h: Vec<Vec<usize>> =
        (0..n).map(|_| (0..m).map(|_| rng.random_range(0..k)).collect()).collect();
    FinitePomp::new(t, q, h, k).expect("random model is valid")
}
