//! JSON channel specifications for the `channels-verify` command.
//!
//! ```json
//! {"kind":"affine","a":[0,0,1],"b":[0,1],"noise":{"kind":"uniform","lo":-1,"hi":1},
//!  "target":[0,1],"domain":[-10,10]}
//! {"kind":"indicator","noise":{"kind":"uniform","lo":-1,"hi":1},
//!  "f":{"xs":[..],"ys":[..]},"domain":[0,1]}
//! {"kind":"two_point","f":{"xs":[..],"ys":[..]},"M":3,"a":7}
//! {"kind":"direct","h":{"xs":[..],"ys":[..]},"f":{"xs":[..],"ys":[..]}}
//! ```

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::functions::{linspace, poly_eval, GridFn, NoiseLaw};
use super::indicator::{indicator_g, IndicatorConstant, IndicatorOptions};
use super::quadrature::Quadrature;
use super::telescoping::telescoping_g;
use super::verify::{verify_s, Channel};
use super::{affine_solve, direct_g, moment_matrix_by_quadrature, RealFn};
use crate::error::{Error, Result};

fn default_grid_points() -> usize {
    201
}

fn default_resolution() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelFile {
    Affine {
        a: Vec<f64>,
        b: Vec<f64>,
        noise: NoiseLaw,
        /// Coefficients of the target polynomial `f`, increasing degree.
        target: Vec<f64>,
        domain: [f64; 2],
        #[serde(default)]
        degree: Option<usize>,
        #[serde(default = "default_grid_points")]
        grid_points: usize,
    },
    Indicator {
        noise: NoiseLaw,
        f: GridFn,
        domain: [f64; 2],
        #[serde(default)]
        c: Option<f64>,
        #[serde(default = "default_resolution")]
        resolution: usize,
        #[serde(default = "default_grid_points")]
        grid_points: usize,
    },
    TwoPoint {
        f: GridFn,
        #[serde(rename = "M")]
        m: u32,
        a: f64,
        #[serde(default = "default_grid_points")]
        grid_points: usize,
    },
    Direct {
        h: GridFn,
        f: GridFn,
        #[serde(default = "default_grid_points")]
        grid_points: usize,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelRunReport {
    pub kind: &'static str,
    pub domain: [f64; 2],
    pub grid_points: usize,
    /// `sup |f - S(g)|` over the verification grid (inside the band for the
    /// two-point channel).
    pub residual: f64,
    /// `sup |S(g)|` outside the band (two-point channel only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_outside: Option<f64>,
    pub g_sup_norm: f64,
    /// Polynomial coefficients of `g` (affine channel only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_coefficients: Option<Vec<f64>>,
}

impl ChannelFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn check_domain(d: [f64; 2]) -> Result<()> {
    if d[0] < d[1] && d[0].is_finite() && d[1].is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("invalid domain {d:?}")))
    }
}

fn table_fn(t: &GridFn) -> RealFn<f64> {
    let t = t.clone();
    Arc::new(move |x| t.eval(x))
}

/// Builds `g` for the channel, then measures the residual of `S(g)` against
/// `f` on an evenly spaced grid.
pub fn run_channel_file(spec: &ChannelFile, quad: &Quadrature<f64>) -> Result<ChannelRunReport> {
    match spec {
        ChannelFile::Affine { a, b, noise, target, domain, degree, grid_points } => {
            noise.validate()?;
            check_domain(*domain)?;
            let degree = degree.unwrap_or(target.len().saturating_sub(1));
            let nmat = moment_matrix_by_quadrature(a, b, *noise, degree, quad)?;
            let alpha = affine_solve(&nmat, target)?;
            let ch = Channel::Affine { a: a.clone(), b: b.clone(), noise: *noise };
            let grid = linspace(domain[0], domain[1], *grid_points);
            let g = |y: f64| poly_eval(&alpha, y);
            let residual = verify_s(&g, &[], &ch, &|x| poly_eval(target, x), &grid, quad)?;
            // sup of g over the observation range reached from the domain
            let (zlo, zhi) = noise.support::<f64>();
            let mut g_sup = 0.0f64;
            for &x in &grid {
                for z in linspace(zlo, zhi, 101) {
                    g_sup = g_sup.max(g(poly_eval(a, z) * x + poly_eval(b, z)).abs());
                }
            }
            Ok(ChannelRunReport {
                kind: "affine",
                domain: *domain,
                grid_points: *grid_points,
                residual,
                residual_outside: None,
                g_sup_norm: g_sup,
                g_coefficients: Some(alpha),
            })
        }
        ChannelFile::Indicator { noise, f, domain, c, resolution, grid_points } => {
            noise.validate()?;
            f.validate()?;
            check_domain(*domain)?;
            let opts = IndicatorOptions {
                constant: c.map_or(IndicatorConstant::Anchored, IndicatorConstant::Fixed),
                resolution: *resolution,
                ..Default::default()
            };
            let fe = |x: f64| f.eval(x);
            let g = indicator_g(&fe, None, &|x| noise.cdf(x), (domain[0], domain[1]), opts)?;
            let ch = Channel::Indicator { noise: *noise };
            let grid = linspace(domain[0], domain[1], *grid_points);
            let residual = verify_s(&|y| g.eval(y), g.breakpoints(), &ch, &fe, &grid, quad)?;
            Ok(ChannelRunReport {
                kind: "indicator",
                domain: *domain,
                grid_points: *grid_points,
                residual,
                residual_outside: None,
                g_sup_norm: g.sup_norm(),
                g_coefficients: None,
            })
        }
        ChannelFile::TwoPoint { f, m, a, grid_points } => {
            f.validate()?;
            let fh = table_fn(f);
            let g = telescoping_g(Arc::clone(&fh), *m, *a);
            let half = f64::from(*m);
            let domain = [a - half, a + half];
            let inside = linspace(domain[0], domain[1], *grid_points);
            let ge = |y: f64| g.eval(y);
            let residual = verify_s(&ge, &[], &Channel::TwoPoint, &|x| fh(x), &inside, quad)?;
            let outside: Vec<f64> = linspace(domain[0] - 10.0, domain[0], *grid_points)
                .into_iter()
                .chain(linspace(domain[1], domain[1] + 10.0, *grid_points))
                .filter(|&x| x < domain[0] || x > domain[1])
                .collect();
            let residual_outside = verify_s(&ge, &[], &Channel::TwoPoint, &|_| 0.0, &outside, quad)?;
            Ok(ChannelRunReport {
                kind: "two_point",
                domain,
                grid_points: *grid_points,
                residual,
                residual_outside: Some(residual_outside),
                g_sup_norm: g.sup_norm(),
                g_coefficients: None,
            })
        }
        ChannelFile::Direct { h, f, grid_points } => {
            h.validate()?;
            f.validate()?;
            let inv = h.inverse()?;
            let g = direct_g(table_fn(f), table_fn(&inv));
            let ch = Channel::Direct { h: table_fn(h) };
            let domain = [h.xs[0], h.xs[h.xs.len() - 1]];
            let grid = linspace(domain[0], domain[1], *grid_points);
            let residual = verify_s(&|y| g(y), &[], &ch, &|x| f.eval(x), &grid, quad)?;
            Ok(ChannelRunReport {
                kind: "direct",
                domain,
                grid_points: *grid_points,
                residual,
                residual_outside: None,
                g_sup_norm: f.sup_norm(),
                g_coefficients: None,
            })
        }
    }
}
