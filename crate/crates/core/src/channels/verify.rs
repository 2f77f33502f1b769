use rayon::prelude::*;

use super::functions::{poly_eval, NoiseLaw};
use super::quadrature::Quadrature;
use super::RealFn;
use crate::error::Result;
use crate::scalar::Scalar;

/// Observation channel acting on a real state.
#[derive(Clone)]
pub enum Channel<T> {
    /// `y = a(z) x + b(z)` with polynomial `a`, `b` (coefficients in `z`).
    Affine { a: Vec<T>, b: Vec<T>, noise: NoiseLaw },
    /// `y = max(x, z)` in the form `x 1{x > z} + z 1{x <= z}`.
    Indicator { noise: NoiseLaw },
    /// `y = x ± 1` with probability 1/2 each.
    TwoPoint,
    /// `y = h(x)` without noise.
    Direct { h: RealFn<T> },
}

impl<T: Scalar> Channel<T> {
    /// `S(g)(x) = ∫ g(h(x, z)) Q(dz)`. `kinks` lists points where `g` is
    /// not smooth; they are used to split quadrature panels.
    pub fn smooth(
        &self,
        g: &(dyn Fn(T) -> T + Sync),
        kinks: &[T],
        x: T,
        quad: &Quadrature<T>,
    ) -> Result<T> {
        match self {
            Channel::Affine { a, b, noise } => {
                let (lo, hi) = noise.support::<T>();
                quad.integrate(
                    &|z| g(poly_eval(a, z) * x + poly_eval(b, z)) * noise.pdf(z),
                    lo,
                    hi,
                    &[],
                )
            }
            Channel::Indicator { noise } => {
                let (_, hi) = noise.support::<T>();
                let below = g(x) * noise.cdf(x);
                let above = quad.integrate(&|z| g(z) * noise.pdf(z), x, hi, kinks)?;
                Ok(below + above)
            }
            Channel::TwoPoint => Ok((g(x + T::one()) + g(x - T::one())) / T::lit(2.0)),
            Channel::Direct { h } => Ok(g(h(x))),
        }
    }
}

/// `max_{x in grid} |f(x) - S(g)(x)|`.
pub fn verify_s<T: Scalar>(
    g: &(dyn Fn(T) -> T + Sync),
    kinks: &[T],
    channel: &Channel<T>,
    f: &(dyn Fn(T) -> T + Sync),
    grid: &[T],
    quad: &Quadrature<T>,
) -> Result<T> {
    let residuals: Vec<T> = grid
        .par_iter()
        .map(|&x| channel.smooth(g, kinks, x, quad).map(|s| (f(x) - s).abs()))
        .collect::<Result<_>>()?;
    Ok(residuals.into_iter().fold(T::zero(), T::max))
}
