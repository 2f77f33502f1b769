//! Reference implementations used only by the integration tests. They share no
//! code with the library beyond the model accessors.

#![allow(dead_code)]

use filterstab::{Dist, Model};

/// Prints one verdict line and returns whether it passed.
pub fn verdict(name: &str, pass: bool, detail: impl std::fmt::Display) -> bool {
    println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

/// Posterior quantities by brute-force enumeration of all state paths
/// `x_0..x_n` under the prior `prior`.
pub struct Enumerated {
    /// `P(X_n = x | y_0..y_n)`.
    pub filter: Vec<f64>,
    /// `P(X_0 = i, X_n = x | y_0..y_n)`, indexed `[x][i]`.
    pub joint_x0_xn: Vec<Vec<f64>>,
}

pub fn enumerate(model: &Model, prior: &[f64], ys: &[usize]) -> Enumerated {
    let n = model.states();
    let len = ys.len();
    let t = model.transition();
    let b = model.channel();
    let mut joint = vec![vec![0.0; n]; n];
    let mut path = vec![0usize; len];
    let total = n.pow(len as u32);
    for code in 0..total {
        let mut c = code;
        for slot in path.iter_mut() {
            *slot = c % n;
            c /= n;
        }
        let mut w = prior[path[0]] * b[(path[0], ys[0])];
        for k in 1..len {
            w *= t[(path[k - 1], path[k])] * b[(path[k], ys[k])];
        }
        joint[path[len - 1]][path[0]] += w;
    }
    let z: f64 = joint.iter().flatten().sum();
    for row in joint.iter_mut() {
        row.iter_mut().for_each(|v| *v /= z);
    }
    let filter = joint.iter().map(|r| r.iter().sum()).collect();
    Enumerated { filter, joint_x0_xn: joint }
}

/// Right-hand side of the likelihood-ratio identity computed from the
/// enumerated `nu`-posterior: `E[r(X_0) | Y, X_n = x] / E[r(X_0) | Y]` with
/// `r = mu / nu`.
pub fn enumerated_rn_rhs(model: &Model, mu: &[f64], nu: &[f64], ys: &[usize]) -> Vec<f64> {
    let e = enumerate(model, nu, ys);
    let r: Vec<f64> = mu.iter().zip(nu).map(|(m, v)| m / v).collect();
    let denom: f64 = e.joint_x0_xn.iter().flat_map(|row| row.iter().zip(&r).map(|(p, r)| p * r)).sum();
    e.joint_x0_xn
        .iter()
        .zip(&e.filter)
        .map(|(row, &px)| {
            if px == 0.0 {
                f64::NAN
            } else {
                row.iter().zip(&r).map(|(p, r)| p * r).sum::<f64>() / px / denom
            }
        })
        .collect()
}

fn phi(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Grid filter for `X_{n+1} = X_n + 1 + W`, `Y = X ± 1`, on a lattice of
/// spacing `h` restricted to `±window` around the latest observation.
/// Observations must lie on the lattice. Returns the filter mass on
/// `y_n - 1` at every step.
pub fn grid_walk_filter(prior_pdf: impl Fn(f64) -> f64, ys: &[f64], h: f64, window: f64) -> Vec<f64> {
    let half = (window / h).round() as i64;
    let idx = |y: f64| (y / h).round() as i64;
    let mut out = Vec::with_capacity(ys.len());
    // sparse filter: (lattice index, weight)
    let mut filt: Vec<(i64, f64)> = Vec::new();
    for (step, &y) in ys.iter().enumerate() {
        let c = idx(y);
        let grid: Vec<i64> = (c - half..=c + half).collect();
        let pred: Vec<f64> = if step == 0 {
            grid.iter().map(|&j| prior_pdf(j as f64 * h)).collect()
        } else {
            grid.iter()
                .map(|&j| filt.iter().map(|&(i, w)| w * phi((j - i) as f64 * h - 1.0)).sum())
                .collect()
        };
        let lower = 1.0 / h;
        let (lo, hi) = (c - lower.round() as i64, c + lower.round() as i64);
        let weights: Vec<(i64, f64)> = grid
            .iter()
            .zip(&pred)
            .filter(|(&j, _)| j == lo || j == hi)
            .map(|(&j, &p)| (j, 0.5 * p))
            .collect();
        let z: f64 = weights.iter().map(|w| w.1).sum();
        filt = weights.into_iter().map(|(j, w)| (j, w / z)).collect();
        out.push(filt.iter().find(|w| w.0 == lo).map_or(0.0, |w| w.1));
    }
    out
}

pub fn dist(v: &[f64]) -> Dist {
    Dist::from_f64(v).unwrap()
}
