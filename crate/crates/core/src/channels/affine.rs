//! Affine channels `h(x, z) = a(z) x + b(z)`.
//!
//! For a polynomial `g(y) = sum_i alpha_i y^i`, the smoothed function
//! `S(g)(x) = E[g(a(Z) x + b(Z))]` is again a polynomial of the same degree,
//! with coefficients `beta = N alpha` where `N` is upper triangular and
//! `N[k][i] = C(i, k) E[a^k b^(i-k)]`.

use serde::Serialize;

use super::functions::{poly_eval, NoiseLaw};
use super::quadrature::Quadrature;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{dot2, Scalar};

/// Upper-triangular moment matrix; entry `(k, i)` maps coefficient `i` of
/// `g` to coefficient `k` of `S(g)`.
#[derive(Debug, Clone, Serialize)]
pub struct MomentMatrix<T: Scalar + Serialize> {
    pub degree: usize,
    pub entries: Matrix<T>,
    pub diag_nonzero: bool,
}

/// Diagonal entries with magnitude at or below this are treated as zero.
const DIAG_ZERO: f64 = 1e-13;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Fills `N(i, k) = C(i, k) E[a^k b^(i-k)]` for `k <= i <= degree` from a
/// moment oracle `(k, j) -> E[a^k b^j]`.
pub fn affine_moment_matrix<T: Scalar + Serialize>(
    moment: &dyn Fn(usize, usize) -> T,
    degree: usize,
) -> Result<MomentMatrix<T>> {
    let size = degree + 1;
    let mut entries = Matrix::zeros(size, size);
    for i in 0..size {
        for k in 0..=i {
            let m = moment(k, i - k);
            if !m.is_finite() {
                return Err(Error::NonFiniteMoment { k, j: i - k });
            }
            entries[(k, i)] = T::lit(binomial(i, k)) * m;
        }
    }
    let diag_nonzero = (0..size).all(|i| entries[(i, i)].abs().as_f64() > DIAG_ZERO);
    Ok(MomentMatrix { degree, entries, diag_nonzero })
}

/// Back-substitution for `beta = N alpha`. `beta` may be shorter than
/// `degree + 1`; missing high coefficients are zero.
pub fn affine_solve<T: Scalar + Serialize>(nmat: &MomentMatrix<T>, beta: &[T]) -> Result<Vec<T>> {
    let size = nmat.degree + 1;
    if beta.len() > size {
        return Err(Error::DimensionMismatch(format!(
            "{} target coefficients for degree {}",
            beta.len(),
            nmat.degree
        )));
    }
    if let Some(index) = (0..size).find(|&i| nmat.entries[(i, i)].abs().as_f64() <= DIAG_ZERO) {
        return Err(Error::SingularDiagonal { index });
    }
    let mut rhs = vec![T::zero(); size];
    rhs[..beta.len()].copy_from_slice(beta);
    let mut alpha = back_substitute(&nmat.entries, &rhs);
    // iterative refinement with residuals in doubled precision
    for _ in 0..REFINE_STEPS {
        let resid: Vec<T> = (0..size)
            .map(|k| {
                let mut row = nmat.entries.row(k).to_vec();
                let mut x = alpha.clone();
                row.push(-T::one());
                x.push(rhs[k]);
                -dot2(&row, &x)
            })
            .collect();
        let delta = back_substitute(&nmat.entries, &resid);
        alpha.iter_mut().zip(&delta).for_each(|(a, d)| *a = *a + *d);
    }
    Ok(alpha)
}

const REFINE_STEPS: usize = 2;

fn back_substitute<T: Scalar>(n: &Matrix<T>, rhs: &[T]) -> Vec<T> {
    let size = rhs.len();
    let mut alpha = vec![T::zero(); size];
    for k in (0..size).rev() {
        let tail = ((k + 1)..size).fold(T::zero(), |acc, i| acc + n[(k, i)] * alpha[i]);
        alpha[k] = (rhs[k] - tail) / n[(k, k)];
    }
    alpha
}

/// `beta = N alpha`, each entry rounded once.
pub fn affine_apply<T: Scalar + Serialize>(nmat: &MomentMatrix<T>, alpha: &[T]) -> Result<Vec<T>> {
    if alpha.len() != nmat.entries.cols() {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for degree {}",
            alpha.len(),
            nmat.degree
        )));
    }
    Ok((0..nmat.entries.rows()).map(|k| dot2(nmat.entries.row(k), alpha)).collect())
}

/// Moment oracle `(k, j) -> E[a(Z)^k b(Z)^j]` by quadrature over the noise
/// law, with `a` and `b` polynomials in `z`.
pub fn quadrature_moments<T: Scalar>(
    a: &[T],
    b: &[T],
    noise: NoiseLaw,
    quad: &Quadrature<T>,
) -> impl Fn(usize, usize) -> Result<T> {
    let (a, b, quad) = (a.to_vec(), b.to_vec(), quad.clone());
    move |k, j| {
        let (lo, hi) = noise.support::<T>();
        quad.integrate(
            &|z| poly_eval(&a, z).powi(k as i32) * poly_eval(&b, z).powi(j as i32) * noise.pdf(z),
            lo,
            hi,
            &[],
        )
    }
}

/// Moment matrix with moments from [`quadrature_moments`].
pub fn moment_matrix_by_quadrature<T: Scalar + Serialize>(
    a: &[T],
    b: &[T],
    noise: NoiseLaw,
    degree: usize,
    quad: &Quadrature<T>,
) -> Result<MomentMatrix<T>> {
    let oracle = quadrature_moments(a, b, noise, quad);
    let mut table = vec![vec![T::zero(); degree + 1]; degree + 1];
    for k in 0..=degree {
        for j in 0..=(degree - k) {
            table[k][j] = oracle(k, j)?;
        }
    }
    affine_moment_matrix(&|k, j| table[k][j], degree)
}
