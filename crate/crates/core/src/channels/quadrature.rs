//! Composite Gauss–Legendre quadrature with panel doubling.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Nodes and weights of the `order`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> GaussLegendre<T> {
    /// Roots of `P_order` by Newton iteration from the Chebyshev guesses.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let n = order;
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0f64, x);
                for k in 2..=n {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                let p = if n == 1 { x } else { p1 };
                let pm1 = if n == 1 { 1.0 } else { p0 };
                dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self {
            nodes: nodes.into_iter().map(T::lit).collect(),
            weights: weights.into_iter().map(T::lit).collect(),
        }
    }

    pub fn integrate(&self, f: &dyn Fn(T) -> T, a: T, b: T) -> T {
        let half = (b - a) / T::lit(2.0);
        let mid = (a + b) / T::lit(2.0);
        let s = self
            .nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&x, &w)| acc + w * f(mid + half * x));
        s * half
    }
}

/// Adaptive composite rule: each base interval is split into `2^level`
/// equal panels; the level grows until two successive estimates differ by at
/// most `tol * max(1, |I|)`.
#[derive(Debug, Clone)]
pub struct Quadrature<T> {
    rule: GaussLegendre<T>,
    pub tol: T,
    pub max_level: u32,
}

impl<T: Scalar> Default for Quadrature<T> {
    fn default() -> Self {
        Self { rule: GaussLegendre::new(10), tol: T::lit(1e-8), max_level: 14 }
    }
}

impl<T: Scalar> Quadrature<T> {
    pub fn new(order: usize, tol: T, max_level: u32) -> Self {
        Self { rule: GaussLegendre::new(order), tol, max_level }
    }

    fn composite(&self, f: &dyn Fn(T) -> T, cuts: &[T], level: u32) -> T {
        let panels = 1usize << level;
        let mut total = T::zero();
        for w in cuts.windows(2) {
            let h = (w[1] - w[0]) / T::lit(panels as f64);
            for p in 0..panels {
                let lo = w[0] + h * T::lit(p as f64);
                let hi = if p + 1 == panels { w[1] } else { lo + h };
                total = total + self.rule.integrate(f, lo, hi);
            }
        }
        total
    }

    /// `∫_a^b f`, splitting first at every interior point of `kinks`.
    pub fn integrate(&self, f: &dyn Fn(T) -> T, a: T, b: T, kinks: &[T]) -> Result<T> {
        if !(b > a) {
            return Ok(T::zero());
        }
        let mut cuts = vec![a];
        cuts.extend(kinks.iter().copied().filter(|&k| k > a && k < b));
        cuts.push(b);
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cuts.dedup();
        let mut prev = self.composite(f, &cuts, 0);
        let mut change = T::infinity();
        for level in 1..=self.max_level {
            let cur = self.composite(f, &cuts, level);
            change = (cur - prev).abs();
            if change <= self.tol * cur.abs().max(T::one()) {
                return Ok(cur);
            }
            prev = cur;
        }
        Err(Error::QuadratureNotConverged { change: change.as_f64() })
    }
}
