use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Real function given as a table `{"xs": [..], "ys": [..]}` with linear
/// interpolation inside and constant extension outside `[xs[0], xs[last]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFn {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl GridFn {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let g = Self { xs, ys };
        g.validate()?;
        Ok(g)
    }

    pub fn sample(f: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> Self {
        let xs = linspace(lo, hi, points);
        let ys = xs.iter().map(|&x| f(x)).collect();
        Self { xs, ys }
    }

    pub fn validate(&self) -> Result<()> {
        if self.xs.is_empty() || self.xs.len() != self.ys.len() {
            return Err(Error::Config("grid table needs equal, non-empty xs and ys".into()));
        }
        if self.xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("grid table xs must be strictly increasing".into()));
        }
        if self.xs.iter().chain(&self.ys).any(|v| !v.is_finite()) {
            return Err(Error::Config("grid table has non-finite entries".into()));
        }
        Ok(())
    }

    pub fn eval<T: Scalar>(&self, x: T) -> T {
        T::lit(interp(&self.xs, &self.ys, x.as_f64()))
    }

    pub fn is_strictly_monotone(&self) -> bool {
        self.ys.windows(2).all(|w| w[1] > w[0]) || self.ys.windows(2).all(|w| w[1] < w[0])
    }

    /// Inverse of a strictly monotone table (swap and, if decreasing, reverse).
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_strictly_monotone() {
            return Err(Error::Config("only strictly monotone tables can be inverted".into()));
        }
        let (mut xs, mut ys) = (self.ys.clone(), self.xs.clone());
        if xs.len() > 1 && xs[1] < xs[0] {
            xs.reverse();
            ys.reverse();
        }
        Self::new(xs, ys)
    }

    pub fn sup_norm(&self) -> f64 {
        self.ys.iter().fold(0.0f64, |m, y| m.max(y.abs()))
    }
}

pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let h = (hi - lo) / (points - 1) as f64;
            (0..points).map(|i| if i + 1 == points { hi } else { lo + h * i as f64 }).collect()
        }
    }
}

/// Linear interpolation on sorted `xs`, clamped at both ends.
pub fn interp<T: Scalar>(xs: &[T], ys: &[T], x: T) -> T {
    let last = xs.len() - 1;
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[last] {
        return ys[last];
    }
    let i = xs.partition_point(|&v| v <= x) - 1;
    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + t * (ys[i + 1] - ys[i])
}

/// Noise law of a continuous channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseLaw {
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, std: f64 },
}

/// Half-width, in standard deviations, of the window used to integrate
/// against a normal law.
const NORMAL_SUPPORT_SIGMAS: f64 = 12.0;

impl NoiseLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseLaw::Uniform { lo, hi } if lo < hi && lo.is_finite() && hi.is_finite() => Ok(()),
            NoiseLaw::Normal { mean, std } if std > 0.0 && mean.is_finite() && std.is_finite() => {
                Ok(())
            }
            _ => Err(Error::Config(format!("invalid noise law {self:?}"))),
        }
    }

    pub fn pdf<T: Scalar>(&self, z: T) -> T {
        let z = z.as_f64();
        T::lit(match *self {
            NoiseLaw::Uniform { lo, hi } => {
                if z >= lo && z <= hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            NoiseLaw::Normal { mean, std } => {
                let u = (z - mean) / std;
                (-0.5 * u * u).exp() / (std * (2.0 * std::f64::consts::PI).sqrt())
            }
        })
    }

    pub fn cdf<T: Scalar>(&self, z: T) -> T {
        let z = z.as_f64();
        T::lit(match *self {
            NoiseLaw::Uniform { lo, hi } => ((z - lo) / (hi - lo)).clamp(0.0, 1.0),
            NoiseLaw::Normal { mean, std } => {
                0.5 * libm::erfc(-(z - mean) / (std * std::f64::consts::SQRT_2))
            }
        })
    }

    /// Interval carrying (numerically) all of the mass.
    pub fn support<T: Scalar>(&self) -> (T, T) {
        let (lo, hi) = match *self {
            NoiseLaw::Uniform { lo, hi } => (lo, hi),
            NoiseLaw::Normal { mean, std } => {
                (mean - NORMAL_SUPPORT_SIGMAS * std, mean + NORMAL_SUPPORT_SIGMAS * std)
            }
        };
        (T::lit(lo), T::lit(hi))
    }
}

/// Polynomial with coefficients in increasing degree.
pub fn poly_eval<T: Scalar>(coeffs: &[T], x: T) -> T {
    coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_and_clamping() {
        let g = GridFn::new(vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(g.eval(0.5f64), 1.0);
        assert_eq!(g.eval(2.0f64), 1.0);
        assert_eq!(g.eval(-4.0f64), 0.0);
        assert_eq!(g.eval(9.0f64), 0.0);
        assert_eq!(g.eval(1.0f64), 2.0);
    }

    #[test]
    fn inverse_of_decreasing_table() {
        let h = GridFn::new(vec![0.0, 1.0, 2.0], vec![5.0, 3.0, -1.0]).unwrap();
        let inv = h.inverse().unwrap();
        for x in [0.0f64, 0.3, 1.0, 1.7, 2.0] {
            assert!((inv.eval(h.eval(x)) - x).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(GridFn::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(GridFn::new(vec![0.0], vec![]).is_err());
        let flat = GridFn::new(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        assert!(flat.inverse().is_err());
    }

    #[test]
    fn normal_cdf_values() {
        let n = NoiseLaw::Normal { mean: 0.0, std: 1.0 };
        assert!((n.cdf(0.0f64) - 0.5).abs() < 1e-16);
        assert!((n.cdf(1.0f64) - 0.841_344_746_068_542_9).abs() < 1e-15);
        let u = NoiseLaw::Uniform { lo: -1.0, hi: 1.0 };
        assert_eq!(u.cdf(0.5f64), 0.75);
        assert_eq!(u.pdf(0.5f64), 0.5);
        assert_eq!(u.pdf(1.5f64), 0.0);
    }

    #[test]
    fn horner() {
        assert_eq!(poly_eval(&[1.0, 0.0, 2.0], 3.0f64), 19.0);
        assert_eq!(poly_eval::<f64>(&[], 3.0), 0.0);
    }
}
