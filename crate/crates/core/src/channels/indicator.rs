//! Censoring channel `h(x, z) = x 1{x > z} + z 1{x <= z}` on a compact state
//! interval `[x_min, x_max]`.
//!
//! Differentiating `f = S(g)` gives `f'(x) = g'(x) Q(Z <= x)`, so
//! `g(x) = c + ∫_{x_min}^x f'(u) / Q(Z <= u) du`. With `g` extended by its
//! boundary value to the right of `x_max`, `S(g)(x) - f(x)` is the constant
//! `c + G(x_max) - f(x_max)` where `G` is the integral term; the anchored
//! constant `c = f(x_max) - G(x_max)` makes it vanish.

use super::functions::linspace;
use super::PiecewiseG;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Choice of the additive constant of `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IndicatorConstant<T> {
    /// `c = f(x_max) - G(x_max)`, the value for which `S(g) = f`.
    Anchored,
    /// User-supplied `c`.
    Fixed(T),
}

#[derive(Debug, Clone, Copy)]
pub struct IndicatorOptions<T> {
    pub constant: IndicatorConstant<T>,
    /// Grid points for the cumulative trapezoid rule.
    pub resolution: usize,
    /// Smallest admissible `Q(Z <= x_min)`.
    pub eps_pos: T,
}

impl<T: Scalar> Default for IndicatorOptions<T> {
    fn default() -> Self {
        Self { constant: IndicatorConstant::Anchored, resolution: 10_000, eps_pos: T::lit(1e-9) }
    }
}

/// Central differences, one-sided at the interval ends so `f` is never
/// evaluated outside `[lo, hi]`.
fn derivative<T: Scalar>(f: &dyn Fn(T) -> T, x: T, lo: T, hi: T) -> T {
    let h = (hi - lo) * T::lit(1e-6);
    let a = (x - h).max(lo);
    let b = (x + h).min(hi);
    (f(b) - f(a)) / (b - a)
}

pub fn indicator_g<T: Scalar>(
    f: &dyn Fn(T) -> T,
    df: Option<&dyn Fn(T) -> T>,
    q_cdf: &dyn Fn(T) -> T,
    domain: (T, T),
    opts: IndicatorOptions<T>,
) -> Result<PiecewiseG<T>> {
    let (lo, hi) = domain;
    if !(hi > lo) {
        return Err(Error::Config("indicator domain must have x_min < x_max".into()));
    }
    if opts.resolution < 2 {
        return Err(Error::Config("indicator resolution must be at least 2".into()));
    }
    let at_min = q_cdf(lo);
    if !(at_min > opts.eps_pos) {
        return Err(Error::PositivityViolated {
            value: at_min.as_f64(),
            threshold: opts.eps_pos.as_f64(),
        });
    }
    let xs: Vec<T> = linspace(lo.as_f64(), hi.as_f64(), opts.resolution)
        .into_iter()
        .map(T::lit)
        .collect();
    let integrand: Vec<T> = xs
        .iter()
        .map(|&x| {
            let d = match df {
                Some(df) => df(x),
                None => derivative(f, x, lo, hi),
            };
            d / q_cdf(x)
        })
        .collect();
    let half = T::lit(0.5);
    let mut cumulative = Vec::with_capacity(xs.len());
    let mut acc = T::zero();
    cumulative.push(acc);
    for i in 1..xs.len() {
        acc = acc + half * (xs[i] - xs[i - 1]) * (integrand[i] + integrand[i - 1]);
        cumulative.push(acc);
    }
    let c = match opts.constant {
        IndicatorConstant::Anchored => f(hi) - acc,
        IndicatorConstant::Fixed(c) => c,
    };
    let values = cumulative.into_iter().map(|v| v + c).collect();
    Ok(PiecewiseG::table(xs, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_target_gives_constant_g() {
        let cdf = |x: f64| (x + 1.0) / 2.0;
        let opts = IndicatorOptions { constant: IndicatorConstant::Fixed(0.7), ..Default::default() };
        let g = indicator_g(&|_| 3.0, None, &cdf, (0.0, 1.0), opts).unwrap();
        for y in [0.0, 0.3, 1.0, 2.0] {
            assert!((g.eval(y) - 0.7).abs() < 1e-15);
        }
        let anchored = indicator_g(&|_| 3.0, None, &cdf, (0.0, 1.0), Default::default()).unwrap();
        assert!((anchored.eval(0.5) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn linear_target_matches_log_closed_form() {
        // f(x) = x, Q = Uni[-1, 1]: G(x) = 2 ln(1 + x)
        let cdf = |x: f64| (x + 1.0) / 2.0;
        let opts = IndicatorOptions { constant: IndicatorConstant::Fixed(0.0), ..Default::default() };
        let g = indicator_g(&|x| x, Some(&|_| 1.0), &cdf, (0.0, 1.0), opts).unwrap();
        for x in [0.0, 0.25, 0.5, 1.0] {
            assert!((g.eval(x) - 2.0 * (1.0 + x).ln()).abs() < 1e-8);
        }
        assert!((g.sup_norm() - 2.0 * 2f64.ln()).abs() < 1e-8);
    }

    #[test]
    fn positivity_violation() {
        let cdf = |x: f64| ((x + 1.0) / 2.0).clamp(0.0, 1.0);
        let err = indicator_g(&|x| x, None, &cdf, (-1.0, 1.0), Default::default()).unwrap_err();
        assert!(matches!(err, Error::PositivityViolated { .. }));
    }
}
