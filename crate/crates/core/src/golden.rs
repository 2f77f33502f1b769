//! The four-state worked example: `Y = 1{x <= 2}` (states numbered from 1)
//! with a transition matrix whose odd and even rows coincide. Its marginal
//! matrix has rank 3 while the two-step joint matrix has full rank 4.

use crate::finite_pomp::{FinitePomp, ModelFile};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

pub const TRANSITION: [[f64; 4]; 4] = [
    [0.0, 0.25, 0.25, 0.5],
    [0.5, 0.0, 0.0, 0.5],
    [0.0, 0.25, 0.25, 0.5],
    [0.5, 0.0, 0.0, 0.5],
];

pub const ONE_STEP: [[f64; 2]; 4] = [[0.0, 1.0], [0.0, 1.0], [1.0, 0.0], [1.0, 0.0]];

pub const MARGINAL: [[f64; 8]; 4] = [
    [0.0, 1.0, 0.75, 0.25, 0.5625, 0.4375, 0.609375, 0.390625],
    [0.0, 1.0, 0.50, 0.50, 0.6250, 0.3750, 0.593750, 0.406250],
    [1.0, 0.0, 0.75, 0.25, 0.5625, 0.4375, 0.609375, 0.390625],
    [1.0, 0.0, 0.50, 0.50, 0.6250, 0.3750, 0.593750, 0.406250],
];

/// Two-step joint matrix, column index `2 * y1 + y2`.
pub const JOINT_TWO_STEP: [[f64; 4]; 4] = [
    [0.0, 0.0, 0.75, 0.25],
    [0.0, 0.0, 0.5, 0.5],
    [0.75, 0.25, 0.0, 0.0],
    [0.5, 0.5, 0.0, 0.0],
];

pub const MARGINAL_RANK: usize = 3;
pub const JOINT_RANK: usize = 4;

pub fn model_file() -> ModelFile {
    ModelFile {
        n: 4,
        m: 1,
        k: 2,
        t: TRANSITION.iter().map(|r| r.to_vec()).collect(),
        q: vec![1.0],
        h: vec![vec![1], vec![1], vec![0], vec![0]],
        b: Some(ONE_STEP.iter().map(|r| r.to_vec()).collect()),
        positions: None,
    }
}

pub fn model<T: Scalar>() -> FinitePomp<T> {
    model_file().build().expect("golden model is valid")
}

pub fn matrix<T: Scalar, const C: usize>(rows: &[[f64; C]]) -> Matrix<T> {
    Matrix::from_f64_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
        .expect("rectangular")
}
