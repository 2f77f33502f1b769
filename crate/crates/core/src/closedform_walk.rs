//! Exact filter for the random walk
//!
//! ```text
//! X_{n+1} = X_n + 1 + W_n,   W_n ~ N(0, 1)
//! Y_n     = X_n ± 1          (probability 1/2 each)
//! ```
//!
//! Given `Y_n = y` the state is `y - 1` or `y + 1`, so every filter is a pair
//! of atoms and is described by the weight `p` of the lower one. The
//! predictor is the Gaussian mixture `p N(y, 1) + (1 - p) N(y + 2, 1)` and
//! the channel likelihood `1/2` cancels in the update. Weights are computed
//! from log densities so drifting states never overflow.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::GridFn;
use crate::error::{Error, Result};
use crate::rng::{trial_stream, StreamRng};
use crate::scalar::{log_add_exp, pairwise_sum, Scalar};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[inline]
fn ln_phi<T: Scalar>(u: T) -> T {
    -T::lit(0.5) * u * u - T::lit(LN_SQRT_2PI)
}

/// Two-atom filter: mass `p` at `y_current - 1`, `1 - p` at `y_current + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AtomPairFilter<T> {
    pub y_current: T,
    pub p: T,
    /// Number of observations absorbed minus one.
    pub step: usize,
}

impl<T: Scalar> AtomPairFilter<T> {
    pub fn atoms(&self) -> [(T, T); 2] {
        [(self.y_current - T::one(), self.p), (self.y_current + T::one(), T::one() - self.p)]
    }

    /// Log density of the one-step predictor at `u`.
    pub fn ln_predictor(&self, u: T) -> T {
        let two = T::lit(2.0);
        let lo = self.p.ln() + ln_phi(u - self.y_current);
        let hi = (T::one() - self.p).ln() + ln_phi(u - self.y_current - two);
        log_add_exp(lo, hi)
    }
}

/// `p = 1 / (1 + exp(lb - la))` from the log weights of the two atoms.
fn weight_from_logs<T: Scalar>(la: T, lb: T, step: usize) -> Result<T> {
    let ninf = T::neg_infinity();
    if la == ninf && lb == ninf || la.is_nan() || lb.is_nan() {
        return Err(Error::ZeroEvidence { step });
    }
    let d = lb - la;
    Ok(if d > T::zero() {
        let e = (-d).exp();
        e / (T::one() + e)
    } else {
        T::one() / (T::one() + d.exp())
    })
}

/// Filter after the first observation: `p = ρ(y0 - 1) / (ρ(y0 - 1) + ρ(y0 + 1))`.
pub fn cf_init<T: Scalar>(ln_prior: impl Fn(T) -> T, y0: T) -> Result<AtomPairFilter<T>> {
    let p = weight_from_logs(ln_prior(y0 - T::one()), ln_prior(y0 + T::one()), 0)?;
    Ok(AtomPairFilter { y_current: y0, p, step: 0 })
}

pub fn cf_update<T: Scalar>(state: &AtomPairFilter<T>, y_next: T) -> Result<AtomPairFilter<T>> {
    let step = state.step + 1;
    let la = state.ln_predictor(y_next - T::one());
    let lb = state.ln_predictor(y_next + T::one());
    let p = weight_from_logs(la, lb, step)?;
    Ok(AtomPairFilter { y_current: y_next, p, step })
}

/// Runs the filter over a whole observation sequence, returning one state per
/// observation.
pub fn cf_run<T: Scalar>(ln_prior: impl Fn(T) -> T, ys: &[T]) -> Result<Vec<AtomPairFilter<T>>> {
    let Some((&y0, rest)) = ys.split_first() else {
        return Ok(Vec::new());
    };
    let mut out = Vec::with_capacity(ys.len());
    let mut f = cf_init(ln_prior, y0)?;
    out.push(f);
    for &y in rest {
        f = cf_update(&f, y)?;
        out.push(f);
    }
    Ok(out)
}

/// Prior law of `X_0` on the real line.
///
/// ```json
/// {"kind":"normal","mean":0,"std":1}
/// {"kind":"grid","xs":[..],"ys":[..]}
/// ```
///
/// A grid prior is an unnormalized density, linear between nodes and zero
/// outside `[xs[0], xs[last]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContinuousPrior {
    Normal { mean: f64, std: f64 },
    Grid(GridFn),
}

impl ContinuousPrior {
    pub fn normal(mean: f64, std: f64) -> Self {
        Self::Normal { mean, std }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Normal { mean, std } => {
                if mean.is_finite() && std.is_finite() && *std > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!("normal prior needs finite mean and std > 0, got ({mean}, {std})")))
                }
            }
            Self::Grid(g) => {
                g.validate()?;
                if g.xs.len() < 2 || g.ys.iter().any(|&v| v < 0.0) || g.ys.iter().all(|&v| v == 0.0) {
                    return Err(Error::Config(
                        "grid prior needs at least two nodes and a non-negative, non-zero density".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn ln_pdf<T: Scalar>(&self, x: T) -> T {
        match self {
            Self::Normal { mean, std } => {
                let s = T::lit(*std);
                ln_phi((x - T::lit(*mean)) / s) - s.ln()
            }
            Self::Grid(g) => {
                let xf = x.as_f64();
                if xf < g.xs[0] || xf > g.xs[g.xs.len() - 1] {
                    T::neg_infinity()
                } else {
                    g.eval(x).ln()
                }
            }
        }
    }

    /// Same law translated by `c`.
    pub fn shifted(&self, c: f64) -> Self {
        match self {
            Self::Normal { mean, std } => Self::Normal { mean: mean + c, std: *std },
            Self::Grid(g) => Self::Grid(GridFn { xs: g.xs.iter().map(|x| x + c).collect(), ys: g.ys.clone() }),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Normal { mean, std } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + std * z
            }
            Self::Grid(g) => sample_piecewise_linear(g, rng.random()),
        }
    }
}

/// Inverse CDF of the piecewise-linear density described by `g`.
fn sample_piecewise_linear(g: &GridFn, u: f64) -> f64 {
    let masses: Vec<f64> = g
        .xs
        .windows(2)
        .zip(g.ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .collect();
    let total: f64 = masses.iter().sum();
    let mut target = u * total;
    let last = masses.iter().rposition(|&m| m > 0.0).unwrap_or(0);
    for (i, &m) in masses.iter().enumerate() {
        if m <= 0.0 {
            continue;
        }
        if target < m || i == last {
            let w = g.xs[i + 1] - g.xs[i];
            let (d0, d1) = (g.ys[i], g.ys[i + 1]);
            let slope = (d1 - d0) / w;
            let target = target.min(m);
            // solve d0 t + slope t^2 / 2 = target for t in [0, w]
            let t = if slope.abs() < 1e-300 {
                target / d0
            } else {
                let disc = (d0 * d0 + 2.0 * slope * target).max(0.0);
                2.0 * target / (d0 + disc.sqrt())
            };
            return g.xs[i] + t.clamp(0.0, w);
        }
        target -= m;
    }
    g.xs[0]
}

/// One simulated path of the walk, `xs[n]` and `ys[n]` for `n = 0..=horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkPath {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

/// Draw order: `x0`, `sign0`, then `w_n`, `sign_n` for each later step.
pub fn simulate_walk(prior: &ContinuousPrior, horizon: usize, rng: &mut StreamRng) -> WalkPath {
    let mut xs = Vec::with_capacity(horizon + 1);
    let mut ys = Vec::with_capacity(horizon + 1);
    let mut x = prior.sample(rng);
    for n in 0..=horizon {
        if n > 0 {
            let w: f64 = rng.sample(StandardNormal);
            x += 1.0 + w;
        }
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        xs.push(x);
        ys.push(x + sign);
    }
    WalkPath { xs, ys }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WalkRow {
    pub step: usize,
    pub mean_gap: f64,
    pub median_gap: f64,
    pub max_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WalkReport {
    pub horizon: usize,
    pub trials: usize,
    pub seed: u64,
    pub rows: Vec<WalkRow>,
    /// `|p_n^μ - p_n^ν|` for every trial (outer) and step (inner).
    #[serde(skip)]
    pub gaps: Vec<Vec<f64>>,
}

impl WalkReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,mean_gap,median_gap,max_gap\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:e},{:e},{:e}\n", r.step, r.mean_gap, r.median_gap, r.max_gap));
        }
        out
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Simulates `trials` paths under `mu` and runs the `mu`- and `nu`-filters on
/// the same observations. Both filters share their atoms, so the filter TV
/// distance at step `n` is `2 |p_n^μ - p_n^ν|`.
pub fn cf_dual_run(
    mu: &ContinuousPrior,
    nu: &ContinuousPrior,
    horizon: usize,
    trials: usize,
    seed: u64,
) -> Result<WalkReport> {
    mu.validate()?;
    nu.validate()?;
    let gaps: Vec<Vec<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_stream(seed, t);
            let path = simulate_walk(mu, horizon, &mut rng);
            let fm = cf_run(|x| mu.ln_pdf(x), &path.ys)?;
            let fn_ = cf_run(|x| nu.ln_pdf(x), &path.ys)?;
            Ok(fm.iter().zip(&fn_).map(|(a, b)| (a.p - b.p).abs()).collect())
        })
        .collect::<Result<_>>()?;
    let rows = (0..=horizon)
        .map(|step| {
            let mut col: Vec<f64> = gaps.iter().map(|g| g[step]).collect();
            let mean = pairwise_sum(&col) / trials.max(1) as f64;
            col.sort_by(f64::total_cmp);
            WalkRow {
                step,
                mean_gap: mean,
                median_gap: median(&col),
                max_gap: col.last().copied().unwrap_or(0.0),
            }
        })
        .collect();
    Ok(WalkReport { horizon, trials, seed, rows, gaps })
}
