//! Small dense linear algebra: row-major matrices, a one-sided Jacobi SVD,
//! numeric rank and minimum-norm least squares.
//!
//! The matrices handled here are tiny (states x outputs) or very flat
//! (states x K^N), so the SVD always orthogonalises the shorter dimension.

use std::ops::{Index, IndexMut};

use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Ok(Self { rows: rows.len(), cols, data })
    }

    pub fn from_f64_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let conv: Vec<Vec<T>> =
            rows.iter().map(|r| r.iter().map(|&x| T::lit(x)).collect()).collect();
        Self::from_rows(&conv)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|x| x.as_f64()).collect()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                let src = rhs.row(k);
                for (o, &b) in out.row_mut(i).iter_mut().zip(src) {
                    *o = *o + a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self * v`.
    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(T::zero(), |acc, (&a, &b)| acc + a * b))
            .collect())
    }

    /// `v^T * self` (a row vector times the matrix).
    pub fn vec_mul(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "row vector of length {} against {} rows",
                v.len(),
                self.rows
            )));
        }
        let mut out = vec![T::zero(); self.cols];
        for (i, &w) in v.iter().enumerate() {
            if w == T::zero() {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + w * a;
            }
        }
        Ok(out)
    }

    /// Horizontal concatenation `[self, rhs]`.
    pub fn hcat(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch("hcat with different row counts".into()));
        }
        let cols = self.cols + rhs.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(rhs.row(i));
        }
        Ok(Self { rows: self.rows, cols, data })
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar + Serialize> Serialize for Matrix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            seq.serialize_element(self.row(i))?;
        }
        seq.end()
    }
}

/// Thin singular value decomposition `A = U diag(s) V^T` with singular values
/// sorted in decreasing order. `U` is `rows x r`, `V` is `cols x r` with
/// `r = min(rows, cols)`; columns belonging to zero singular values are zero.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: Matrix<T>,
    pub s: Vec<T>,
    pub v: Matrix<T>,
}

const JACOBI_MAX_SWEEPS: usize = 60;

/// Hestenes one-sided Jacobi on the columns of a `len x k` matrix stored as
/// `k` column vectors. Returns (orthogonalised columns, right rotations).
fn jacobi_columns<T: Scalar>(mut cols: Vec<Vec<T>>) -> (Vec<Vec<T>>, Vec<Vec<T>>) {
    let k = cols.len();
    let mut v: Vec<Vec<T>> = (0..k)
        .map(|j| (0..k).map(|i| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    let eps = T::epsilon();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in (p + 1)..k {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for (&a, &b) in cols[p].iter().zip(&cols[q]) {
                    alpha = alpha + a * a;
                    beta = beta + b * b;
                    gamma = gamma + a * b;
                }
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                for (a, b) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = c * x - s * y;
                    *b = s * x + c * y;
                }
                let (left, right) = v.split_at_mut(q);
                for (a, b) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = c * x - s * y;
                    *b = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (cols, v)
}

/// SVD of `a` for the case `cols <= rows`.
fn svd_tall<T: Scalar>(a: &Matrix<T>) -> Svd<T> {
    let (m, k) = (a.rows(), a.cols());
    let cols: Vec<Vec<T>> = (0..k).map(|j| a.column(j)).collect();
    let (w, v) = jacobi_columns(cols);
    let mut order: Vec<(T, usize)> = w
        .iter()
        .enumerate()
        .map(|(j, c)| (c.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt(), j))
        .collect();
    order.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut u = Matrix::zeros(m, k);
    let mut vm = Matrix::zeros(k, k);
    let mut s = Vec::with_capacity(k);
    for (r, &(sigma, j)) in order.iter().enumerate() {
        s.push(sigma);
        if sigma > T::zero() {
            for i in 0..m {
                u[(i, r)] = w[j][i] / sigma;
            }
        }
        // `v[j]` holds column j of V (rotations were applied column-wise).
        for i in 0..k {
            vm[(i, r)] = v[j][i];
        }
    }
    Svd { u, s, v: vm }
}

pub fn svd<T: Scalar>(a: &Matrix<T>) -> Svd<T> {
    if a.cols() <= a.rows() {
        svd_tall(a)
    } else {
        let Svd { u, s, v } = svd_tall(&a.transpose());
        Svd { u: v, s, v: u }
    }
}

/// Singular values above `tol * sigma_max * max(rows, cols)` are treated as
/// non-zero.
pub fn rank_threshold<T: Scalar>(s: &[T], rows: usize, cols: usize, tol: T) -> T {
    let smax = s.iter().fold(T::zero(), |m, &x| m.max(x));
    tol * smax * T::lit(rows.max(cols) as f64)
}

pub fn numeric_rank<T: Scalar>(a: &Matrix<T>, tol: T) -> usize {
    if a.rows() == 0 || a.cols() == 0 {
        return 0;
    }
    let dec = svd(a);
    let thr = rank_threshold(&dec.s, a.rows(), a.cols(), tol);
    dec.s.iter().filter(|&&x| x > thr).count()
}

/// Minimum-norm least-squares solution of `a x = b` through the
/// pseudo-inverse, truncating singular values at the rank threshold.
pub fn min_norm_solve<T: Scalar>(a: &Matrix<T>, b: &[T], tol: T) -> Result<Vec<T>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "rhs of length {} for {} rows",
            b.len(),
            a.rows()
        )));
    }
    let dec = svd(a);
    let thr = rank_threshold(&dec.s, a.rows(), a.cols(), tol);
    // x = V diag(1/s) U^T b
    let utb = dec.u.vec_mul(b)?;
    let scaled: Vec<T> = utb
        .iter()
        .zip(&dec.s)
        .map(|(&c, &s)| if s > thr { c / s } else { T::zero() })
        .collect();
    dec.v.mul_vec(&scaled)
}
