//! Constructive solutions of `f(x) = S(g)(x) := ∫ g(h(x, z)) Q(dz)` for
//! continuous-state channels, and a verifier that measures
//! `sup_x |f(x) - S(g)(x)|` on a grid.

mod affine;
mod direct;
mod file;
mod functions;
mod indicator;
pub mod quadrature;
mod telescoping;
mod verify;

use std::sync::Arc;

pub use affine::{
    affine_apply, affine_moment_matrix, affine_solve, moment_matrix_by_quadrature,
    quadrature_moments, MomentMatrix,
};
pub use direct::direct_g;
pub use file::{run_channel_file, ChannelFile, ChannelRunReport};
pub use functions::{interp, linspace, poly_eval, GridFn, NoiseLaw};
pub use indicator::{indicator_g, IndicatorConstant, IndicatorOptions};
pub use quadrature::{GaussLegendre, Quadrature};
pub use telescoping::telescoping_g;
pub use verify::{verify_s, Channel};

use crate::scalar::Scalar;

pub type RealFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// How a [`PiecewiseG`] is evaluated.
#[derive(Clone)]
pub enum GShape<T> {
    /// `g ≡ 0`.
    Zero,
    /// Linear interpolation through `(breakpoints[i], values[i])`, extended by
    /// the boundary values.
    Table(Vec<T>),
    /// Alternating recursion of the two-point channel on the band
    /// `[center - half_width, center + half_width]`.
    Telescoping { half_width: u32, center: T, f: RealFn<T> },
}

/// A bounded function `g` of the observation.
#[derive(Clone)]
pub struct PiecewiseG<T> {
    breakpoints: Vec<T>,
    shape: GShape<T>,
    sup_norm: T,
}

impl<T: Scalar> std::fmt::Debug for PiecewiseG<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match &self.shape {
            GShape::Zero => "zero",
            GShape::Table(_) => "table",
            GShape::Telescoping { .. } => "telescoping",
        };
        f.debug_struct("PiecewiseG")
            .field("kind", &kind)
            .field("breakpoints", &self.breakpoints.len())
            .field("sup_norm", &self.sup_norm)
            .finish()
    }
}

impl<T: Scalar> PiecewiseG<T> {
    pub fn zero() -> Self {
        Self { breakpoints: Vec::new(), shape: GShape::Zero, sup_norm: T::zero() }
    }

    pub fn table(breakpoints: Vec<T>, values: Vec<T>) -> Self {
        assert_eq!(breakpoints.len(), values.len());
        assert!(!breakpoints.is_empty());
        let sup_norm = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        Self { breakpoints, shape: GShape::Table(values), sup_norm }
    }

    pub(crate) fn telescoping(breakpoints: Vec<T>, shape: GShape<T>, sup_norm: T) -> Self {
        Self { breakpoints, shape, sup_norm }
    }

    pub fn eval(&self, y: T) -> T {
        match &self.shape {
            GShape::Zero => T::zero(),
            GShape::Table(values) => interp(&self.breakpoints, values, y),
            GShape::Telescoping { half_width, center, f } => {
                telescoping::eval(*half_width, *center, f.as_ref(), y)
            }
        }
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn shape(&self) -> &GShape<T> {
        &self.shape
    }

    pub fn sup_norm(&self) -> T {
        self.sup_norm
    }
}
