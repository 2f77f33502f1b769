//! Rank tests for observability of finite models.
//!
//! * one-step: the channel matrix `A = B` has rank `n`;
//! * marginal: `M = [A, TA, ..., T^{n-1}A]` has rank `n` (sufficient only;
//!   further blocks cannot raise the rank by Cayley–Hamilton);
//! * N-step: the joint matrix of `P(Y_1..Y_N | X_1 = x)` has rank `n`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite_pomp::FinitePomp;
use crate::linalg::{min_norm_solve, numeric_rank, Matrix};
use crate::scalar::Scalar;

/// Default cap on the number of joint-matrix columns (`K^N`).
pub const DEFAULT_COLUMN_CAP: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "n")]
pub enum Verdict {
    OneStepObservable,
    NStepObservable(usize),
    NotObservableUpTo(usize),
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::OneStepObservable => write!(f, "OneStepObservable"),
            Verdict::NStepObservable(n) => write!(f, "NStepObservable({n})"),
            Verdict::NotObservableUpTo(n) => write!(f, "NotObservableUpTo({n})"),
        }
    }
}

/// Outcome of the sufficient marginal test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MarginalTest {
    /// `rank(M) = n`: the model is n-step observable.
    Sufficient,
    /// `rank(M) < n`: the marginal laws alone cannot decide.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObservabilityReport<T: Scalar + Serialize> {
    pub one_step: Matrix<T>,
    pub marginal: Matrix<T>,
    /// Joint matrix for the horizon that settled the verdict (or the last
    /// horizon tried).
    pub joint: Option<Matrix<T>>,
    pub joint_horizon: Option<usize>,
    pub rank_one_step: usize,
    pub rank_marginal: usize,
    pub rank_joint: Option<usize>,
    pub tol: T,
    pub verdict: Verdict,
    pub marginal_test: MarginalTest,
}

pub fn one_step_matrix<T: Scalar>(model: &FinitePomp<T>) -> Matrix<T> {
    model.channel().clone()
}

/// `[A, TA, ..., T^{n-1} A]`; block `k` is obtained by multiplying block
/// `k - 1` by `T` on the left.
pub fn marginal_matrix<T: Scalar>(model: &FinitePomp<T>) -> Matrix<T> {
    marginal_blocks(model, model.states())
}

pub(crate) fn marginal_blocks<T: Scalar>(model: &FinitePomp<T>, blocks: usize) -> Matrix<T> {
    let t = model.transition();
    let mut block = one_step_matrix(model);
    let mut out = block.clone();
    for _ in 1..blocks {
        block = t.matmul(&block).expect("square T");
        out = out.hcat(&block).expect("same rows");
    }
    out
}

pub fn joint_matrix<T: Scalar>(model: &FinitePomp<T>, horizon: usize) -> Result<Matrix<T>> {
    joint_matrix_capped(model, horizon, DEFAULT_COLUMN_CAP)
}

/// Entry `(x, c)` is `P(Y_1 = y_1, ..., Y_N = y_N | X_1 = x)` with
/// `c = sum_t y_t K^(N - t)` (first observation most significant).
pub fn joint_matrix_capped<T: Scalar>(
    model: &FinitePomp<T>,
    horizon: usize,
    cap: usize,
) -> Result<Matrix<T>> {
    if horizon == 0 {
        return Err(Error::Config("joint matrix horizon must be >= 1".into()));
    }
    let n = model.states();
    let k = model.outputs();
    let columns = (k as u128).checked_pow(horizon as u32).unwrap_or(u128::MAX);
    if columns > cap as u128 {
        return Err(Error::SizeCapExceeded { columns, cap });
    }
    let columns = columns as usize;
    let t = model.transition();
    let b = model.channel();
    let mut out = Matrix::zeros(n, columns);
    for x1 in 0..n {
        // forward[prefix * n + x] = P(Y_1..Y_t = prefix, X_t = x | X_1 = x1)
        let mut forward: Vec<T> = (0..k)
            .flat_map(|y| (0..n).map(move |x| (y, x)))
            .map(|(y, x)| if x == x1 { b[(x1, y)] } else { T::zero() })
            .collect();
        let mut prefixes = k;
        for _ in 1..horizon {
            let mut next = vec![T::zero(); prefixes * k * n];
            for p in 0..prefixes {
                let cur = &forward[p * n..(p + 1) * n];
                if cur.iter().all(|&w| w == T::zero()) {
                    continue;
                }
                let moved = t.vec_mul(cur)?;
                for y in 0..k {
                    let slot = &mut next[(p * k + y) * n..(p * k + y + 1) * n];
                    for (x, s) in slot.iter_mut().enumerate() {
                        *s = moved[x] * b[(x, y)];
                    }
                }
            }
            forward = next;
            prefixes *= k;
        }
        for c in 0..columns {
            out[(x1, c)] = forward[c * n..(c + 1) * n].iter().fold(T::zero(), |a, &w| a + w);
        }
    }
    Ok(out)
}

pub fn observability_verdict<T: Scalar + Serialize>(
    model: &FinitePomp<T>,
    max_horizon: usize,
    tol: T,
) -> Result<ObservabilityReport<T>> {
    observability_verdict_capped(model, max_horizon, tol, DEFAULT_COLUMN_CAP)
}

pub fn observability_verdict_capped<T: Scalar + Serialize>(
    model: &FinitePomp<T>,
    max_horizon: usize,
    tol: T,
    cap: usize,
) -> Result<ObservabilityReport<T>> {
    if max_horizon == 0 {
        return Err(Error::Config("maximum horizon must be >= 1".into()));
    }
    let n = model.states();
    let one_step = one_step_matrix(model);
    let marginal = marginal_matrix(model);
    let rank_one_step = numeric_rank(&one_step, tol);
    let rank_marginal = numeric_rank(&marginal, tol);
    let marginal_test =
        if rank_marginal == n { MarginalTest::Sufficient } else { MarginalTest::Inconclusive };

    let mut report = ObservabilityReport {
        one_step,
        marginal,
        joint: None,
        joint_horizon: None,
        rank_one_step,
        rank_marginal,
        rank_joint: None,
        tol,
        verdict: Verdict::NotObservableUpTo(max_horizon),
        marginal_test,
    };
    if rank_one_step == n {
        report.verdict = Verdict::OneStepObservable;
        return Ok(report);
    }
    for horizon in 2..=max_horizon {
        let joint = joint_matrix_capped(model, horizon, cap)?;
        let rank = numeric_rank(&joint, tol);
        report.joint = Some(joint);
        report.joint_horizon = Some(horizon);
        report.rank_joint = Some(rank);
        if rank == n {
            report.verdict = Verdict::NStepObservable(horizon);
            return Ok(report);
        }
    }
    Ok(report)
}

/// Result of fitting a bounded function of `N` future outputs to a state
/// function.
#[derive(Debug, Clone, PartialEq)]
pub enum GSolution<T> {
    Solved { g: Vec<T>, residual_inf: T },
    Infeasible { g: Vec<T>, residual_inf: T, g_sup: T },
}

impl<T: Scalar> GSolution<T> {
    pub fn residual(&self) -> T {
        match self {
            GSolution::Solved { residual_inf, .. } | GSolution::Infeasible { residual_inf, .. } => {
                *residual_inf
            }
        }
    }

    pub fn is_solved(&self) -> bool {
        matches!(self, GSolution::Solved { .. })
    }
}

/// Minimum-norm least-squares `g` with `J g ≈ f`, `J = joint_matrix(N)`.
/// Infeasible when `||f - J g||_inf > eps` or `||g||_inf > bound`
/// (`bound = None` means unbounded).
pub fn solve_g<T: Scalar>(
    model: &FinitePomp<T>,
    f: &[T],
    horizon: usize,
    bound: Option<T>,
    eps: T,
) -> Result<GSolution<T>> {
    if f.len() != model.states() {
        return Err(Error::DimensionMismatch(format!(
            "target has {} entries for {} states",
            f.len(),
            model.states()
        )));
    }
    let j = joint_matrix(model, horizon)?;
    let g = min_norm_solve(&j, f, T::lit(T::RANK_TOL))?;
    let fitted = j.mul_vec(&g)?;
    let residual_inf = f.iter().zip(&fitted).fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));
    let g_sup = g.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    let too_big = bound.is_some_and(|b| g_sup > b);
    if residual_inf > eps || too_big {
        Ok(GSolution::Infeasible { g, residual_inf, g_sup })
    } else {
        Ok(GSolution::Solved { g, residual_inf })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden;
    use crate::random::random_model;
    use rand::SeedableRng;

    fn uninformative(n: usize) -> FinitePomp<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(n as u64);
        let t = crate::random::random_stochastic(&mut rng, n, n);
        let row = vec![0.2, 0.5, 0.3];
        let b = Matrix::from_rows(&vec![row; n]).unwrap();
        FinitePomp::from_channel(t, &b).unwrap()
    }

    #[test]
    fn example_one_step_and_marginal() {
        let m = golden::model::<f64>();
        let a = one_step_matrix(&m);
        assert_eq!(a, golden::matrix(&golden::ONE_STEP));
        assert_eq!(numeric_rank(&a, 1e-9), 2);
        let mm = marginal_matrix(&m);
        assert!(mm.max_abs_diff(&golden::matrix(&golden::MARGINAL)) < 1e-12);
        assert_eq!(numeric_rank(&mm, 1e-9), 3);
    }

    #[test]
    fn example_joint_two_step() {
        let m = golden::model::<f64>();
        let j = joint_matrix(&m, 2).unwrap();
        assert!(j.max_abs_diff(&golden::matrix(&golden::JOINT_TWO_STEP)) < 1e-15);
        assert_eq!(numeric_rank(&j, 1e-9), 4);
    }

    #[test]
    fn example_verdict() {
        let r = observability_verdict(&golden::model::<f64>(), 3, 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::NStepObservable(2));
        assert_eq!(r.marginal_test, MarginalTest::Inconclusive);
        assert_eq!((r.rank_one_step, r.rank_marginal, r.rank_joint), (2, 3, Some(4)));
    }

    #[test]
    fn identity_channel_is_one_step_observable() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let t = crate::random::random_stochastic(&mut rng, 3, 3);
        let m = FinitePomp::from_channel(t, &Matrix::identity(3)).unwrap();
        let r = observability_verdict(&m, 3, 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::OneStepObservable);
    }

    #[test]
    fn uninformative_channel_is_not_observable() {
        let m = uninformative(3);
        assert_eq!(numeric_rank(&one_step_matrix(&m), 1e-9), 1);
        let r = observability_verdict(&m, 4, 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::NotObservableUpTo(4));
        let j = joint_matrix(&m, 4).unwrap();
        for x in 1..3 {
            for c in 0..j.cols() {
                assert!((j[(x, c)] - j[(0, c)]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn identity_dynamics_repeat_the_channel_block() {
        let b = Matrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5], vec![1.0, 0.0]]).unwrap();
        let m = FinitePomp::from_channel(Matrix::<f64>::identity(3), &b).unwrap();
        let mm = marginal_matrix(&m);
        assert_eq!(mm, b.hcat(&b).unwrap().hcat(&b).unwrap());
        assert_eq!(numeric_rank(&mm, 1e-9), numeric_rank(&b, 1e-9));
    }

    #[test]
    fn single_state_marginal_is_a() {
        let b = Matrix::from_rows(&[vec![0.3, 0.7]]).unwrap();
        let m = FinitePomp::from_channel(Matrix::<f64>::identity(1), &b).unwrap();
        assert_eq!(marginal_matrix(&m), b);
        assert_eq!(numeric_rank(&marginal_matrix(&m), 1e-9), 1);
    }

    #[test]
    fn joint_horizon_one_is_channel() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let m: FinitePomp<f64> = random_model(&mut rng, 4, 3, 5);
        assert_eq!(joint_matrix(&m, 1).unwrap(), *m.channel());
    }

    #[test]
    fn size_cap_is_enforced() {
        let m = golden::model::<f64>();
        let err = joint_matrix_capped(&m, 5, 16).unwrap_err();
        assert!(matches!(err, Error::SizeCapExceeded { columns: 32, cap: 16 }));
        assert!(matches!(joint_matrix(&m, 21), Err(Error::SizeCapExceeded { .. })));
    }

    #[test]
    fn solve_g_invertible_channel() {
        let b = Matrix::from_rows(&[vec![0.8, 0.2], vec![0.3, 0.7]]).unwrap();
        let m = FinitePomp::from_channel(Matrix::<f64>::identity(2), &b).unwrap();
        let f = [1.5, -2.0];
        let sol = solve_g(&m, &f, 1, None, 1e-8).unwrap();
        let GSolution::Solved { g, residual_inf } = sol else { panic!("infeasible") };
        assert!(residual_inf < 1e-10);
        // g = B^{-1} f; det = 0.5
        let expect = [(0.7 * 1.5 - 0.2 * -2.0) / 0.5, (-0.3 * 1.5 + 0.8 * -2.0) / 0.5];
        assert!((g[0] - expect[0]).abs() < 1e-10 && (g[1] - expect[1]).abs() < 1e-10);
    }

    #[test]
    fn solve_g_on_example_two_step() {
        let m = golden::model::<f64>();
        let sol = solve_g(&m, &[1.0, 2.0, 3.0, 4.0], 2, None, 1e-8).unwrap();
        assert!(sol.is_solved());
        assert!(sol.residual() < 1e-10);
        // one step cannot separate states with equal channel rows
        assert!(!solve_g(&m, &[1.0, 2.0, 3.0, 4.0], 1, None, 1e-8).unwrap().is_solved());
    }

    #[test]
    fn solve_g_uninformative_nonconstant_is_infeasible() {
        let m = uninformative(3);
        let sol = solve_g(&m, &[0.0, 1.0, 2.0], 2, None, 1e-8).unwrap();
        assert!(!sol.is_solved());
        assert!(sol.residual() > 0.5);
        // constants are reachable
        assert!(solve_g(&m, &[2.0, 2.0, 2.0], 2, None, 1e-8).unwrap().is_solved());
    }

    #[test]
    fn solve_g_bound_is_enforced() {
        let m = golden::model::<f64>();
        let sol = solve_g(&m, &[1.0, 2.0, 3.0, 4.0], 2, Some(1e-3), 1e-8).unwrap();
        assert!(matches!(sol, GSolution::Infeasible { .. }));
    }
}
