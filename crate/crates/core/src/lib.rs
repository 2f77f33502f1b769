//! Nonlinear filter stability toolkit for partially observed Markov
//! processes.
//!
//! * [`finite_pomp`]: exact filter/predictor recursions, trajectory sampling
//!   and backward smoothing of the initial state for finite models.
//! * [`observability`]: one-step, marginal and N-step rank tests.
//! * [`channels`]: constructive solvers for `g` in `f(x) = ∫ g(h(x, z)) Q(dz)`
//!   on several continuous-state channels, with quadrature verification.
//! * [`closedform_walk`]: exact two-atom filter for a random walk observed
//!   through a ±1 channel.
//! * [`diagnostics`]: TV / KL / weak / bounded-Lipschitz gaps, Monte Carlo
//!   merging experiments and relative-entropy decay of Markov chains.
//! * [`cli`]: the `filterstab` command-line front end.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common `f64` instantiation.

pub mod channels;
pub mod cli;
pub mod closedform_walk;
pub mod diagnostics;
pub mod error;
pub mod finite_pomp;
pub mod golden;
pub mod linalg;
pub mod observability;
pub mod random;
pub mod rng;
pub mod scalar;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Dist = finite_pomp::FiniteDist<f64>;
pub type Model = finite_pomp::FinitePomp<f64>;
pub type Mat = linalg::Matrix<f64>;
pub type Report = observability::ObservabilityReport<f64>;
pub type AtomPair = closedform_walk::AtomPairFilter<f64>;

pub type Dist32 = finite_pomp::FiniteDist<f32>;
pub type Model32 = finite_pomp::FinitePomp<f32>;
pub type Mat32 = linalg::Matrix<f32>;

/// Tool version embedded in every output file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
