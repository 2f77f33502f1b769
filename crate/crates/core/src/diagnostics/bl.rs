//! Bounded-Lipschitz distance between two distributions whose states sit at
//! given points of the real line:
//!
//! ```text
//! sup { Σ f_x (p_x - q_x) : |f_x| <= 1, |f_x - f_y| <= |pos_x - pos_y| }
//! ```
//!
//! On the line the pairwise Lipschitz constraints reduce to neighbours in
//! sorted order. With `u = f + 1 ∈ [0, 2]` every right-hand side is
//! non-negative, so the origin is a feasible basis and a plain tableau
//! simplex with Bland's rule solves the problem exactly.

use crate::error::{Error, Result};
use crate::finite_pomp::FiniteDist;
use crate::scalar::Scalar;

const PIVOT_EPS: f64 = 1e-12;

/// Maximises `c·u` subject to `A u <= b`, `u >= 0`, for `b >= 0`.
/// Returns the optimal value.
fn simplex_max(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<f64> {
    let n = c.len();
    let m = b.len();
    let width = n + m + 1;
    // rows 0..m are constraints, row m is the objective (stored as -c)
    let mut tab = vec![vec![0.0; width]; m + 1];
    for i in 0..m {
        tab[i][..n].copy_from_slice(&a[i]);
        tab[i][n + i] = 1.0;
        tab[i][width - 1] = b[i];
    }
    for j in 0..n {
        tab[m][j] = -c[j];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let max_iter = 50 * (n + m) + 1000;
    for _ in 0..max_iter {
        let Some(enter) = (0..n + m).find(|&j| tab[m][j] < -PIVOT_EPS) else {
            return Ok(tab[m][width - 1]);
        };
        let ratios: Vec<Option<f64>> = (0..m)
            .map(|i| (tab[i][enter] > PIVOT_EPS).then(|| tab[i][width - 1] / tab[i][enter]))
            .collect();
        let best = ratios.iter().flatten().fold(f64::INFINITY, |a, &r| a.min(r));
        let leave = (0..m)
            .filter(|&i| ratios[i].is_some_and(|r| r <= best + PIVOT_EPS))
            .min_by_key(|&i| basis[i]);
        // every variable is bounded above, so the problem is never unbounded
        let Some(r) = leave else {
            return Err(Error::LpNotConverged { iterations: 0 });
        };
        let pivot = tab[r][enter];
        tab[r].iter_mut().for_each(|v| *v /= pivot);
        let pivot_row = tab[r].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[enter];
            if f != 0.0 {
                row.iter_mut().zip(&pivot_row).for_each(|(v, &p)| *v -= f * p);
            }
        }
        basis[r] = enter;
    }
    Err(Error::LpNotConverged { iterations: max_iter })
}

pub fn bl_gap<T: Scalar>(p: &FiniteDist<T>, q: &FiniteDist<T>, positions: &[f64]) -> Result<T> {
    let n = p.len();
    if q.len() != n || positions.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "bl_gap: p has {n} states, q {}, positions {}",
            q.len(),
            positions.len()
        )));
    }
    if positions.iter().any(|x| !x.is_finite()) {
        return Err(Error::Config("state positions must be finite".into()));
    }
    let d: Vec<f64> = p.probs().iter().zip(q.probs()).map(|(a, b)| (*a - *b).as_f64()).collect();
    if d.iter().all(|&v| v == 0.0) {
        return Ok(T::zero());
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| positions[i].total_cmp(&positions[j]).then(i.cmp(&j)));

    let mut a = Vec::with_capacity(3 * n);
    let mut b = Vec::with_capacity(3 * n);
    for i in 0..n {
        let mut row = vec![0.0; n];
        row[i] = 1.0;
        a.push(row);
        b.push(2.0);
    }
    for w in order.windows(2) {
        let gap = positions[w[1]] - positions[w[0]];
        for (hi, lo) in [(w[1], w[0]), (w[0], w[1])] {
            let mut row = vec![0.0; n];
            row[hi] = 1.0;
            row[lo] = -1.0;
            a.push(row);
            b.push(gap);
        }
    }
    let value = simplex_max(&d, &a, &b)?;
    // objective in u = f + 1 carries the constant Σ d, which is 0 up to rounding
    let shift: f64 = d.iter().sum();
    Ok(T::lit((value - shift).max(0.0)))
}
