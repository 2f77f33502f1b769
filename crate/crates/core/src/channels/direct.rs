use std::sync::Arc;

use super::RealFn;
use crate::scalar::Scalar;

/// Noise-free invertible channel `y = h(x)`: `g = f ∘ h⁻¹` gives
/// `S(g) = g ∘ h = f`.
pub fn direct_g<T: Scalar>(f: RealFn<T>, h_inverse: RealFn<T>) -> RealFn<T> {
    Arc::new(move |y| f(h_inverse(y)))
}
