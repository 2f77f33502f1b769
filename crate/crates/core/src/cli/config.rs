//! Experiment configuration: an optional JSON file overlaid by command-line
//! flags.
//!
//! ```json
//! {
//!   "command": "merging",
//!   "model": "golden.json",
//!   "mu": "uniform",
//!   "nu": [0.7, 0.1, 0.1, 0.1],
//!   "horizon": 50,
//!   "trials": 500,
//!   "seed": 7,
//!   "format": "csv",
//!   "out": "merging.csv"
//! }
//! ```
//!
//! Relative paths in a config file are resolved against the file's directory.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::closedform_walk::ContinuousPrior;
use crate::error::{Error, Result};
use crate::finite_pomp::FiniteDist;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Observability,
    Merging,
    Walk,
    Harris,
    ChannelsVerify,
    ReproducePaper,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Observability => "observability",
            Self::Merging => "merging",
            Self::Walk => "walk",
            Self::Harris => "harris",
            Self::ChannelsVerify => "channels-verify",
            Self::ReproducePaper => "reproduce-paper",
        }
    }

    pub fn default_format(self) -> Format {
        match self {
            Self::Merging | Self::Walk | Self::Harris => Format::Csv,
            Self::Observability | Self::ChannelsVerify => Format::Json,
            Self::ReproducePaper => Format::Text,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    /// Human-readable listing (reproduce-paper only).
    Text,
}

/// Prior as written in a config file or on the command line.
///
/// Finite priors: `"uniform"`, `"point:<i>"`, a JSON array or a comma list of
/// weights. Continuous priors: `"normal:<mean>,<std>"` or a JSON object
/// `{"kind":"normal","mean":..,"std":..}` / `{"kind":"grid","xs":..,"ys":..}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriorSpec {
    Weights(Vec<f64>),
    Continuous(ContinuousPrior),
    Text(String),
}

impl PriorSpec {
    /// Parses a command-line value.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.starts_with('[') || t.starts_with('{') {
            return serde_json::from_str(t).map_err(|e| Error::Config(format!("prior `{t}`: {e}")));
        }
        if t.contains(',') && !t.contains(':') {
            let w = t
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Config(format!("prior `{t}`: {e}")))?;
            return Ok(Self::Weights(w));
        }
        Ok(Self::Text(t.to_string()))
    }

    pub fn finite(&self, n: usize) -> Result<FiniteDist<f64>> {
        match self {
            Self::Weights(w) => {
                if w.len() != n {
                    return Err(Error::DimensionMismatch(format!("prior has {} weights for {n} states", w.len())));
                }
                FiniteDist::new(w.clone())
            }
            Self::Text(t) if t == "uniform" => Ok(FiniteDist::uniform(n)),
            Self::Text(t) => match t.strip_prefix("point:") {
                Some(i) => {
                    let i: usize = i.trim().parse().map_err(|_| Error::Config(format!("bad point prior `{t}`")))?;
                    if i >= n {
                        return Err(Error::Config(format!("point prior at {i} for {n} states")));
                    }
                    Ok(FiniteDist::point_mass(n, i))
                }
                None => Err(Error::Config(format!("unknown finite prior `{t}`"))),
            },
            Self::Continuous(_) => Err(Error::Config("a continuous prior was given where a finite one is needed".into())),
        }
    }

    pub fn continuous(&self) -> Result<ContinuousPrior> {
        let prior = match self {
            Self::Continuous(c) => c.clone(),
            Self::Text(t) => {
                let Some(args) = t.strip_prefix("normal:") else {
                    return Err(Error::Config(format!("unknown continuous prior `{t}`")));
                };
                let v: Vec<f64> = args
                    .split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Config(format!("bad normal prior `{t}`")))?;
                let [mean, std] = v[..] else {
                    return Err(Error::Config(format!("normal prior `{t}` needs mean,std")));
                };
                ContinuousPrior::normal(mean, std)
            }
            Self::Weights(_) => {
                return Err(Error::Config("a finite prior was given where a continuous one is needed".into()))
            }
        };
        prior.validate()?;
        Ok(prior)
    }
}

/// Every field is optional so a file can hold any subset; flags fill or
/// override the rest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<PriorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<PriorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nmax: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        let mut cfg: Self = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.model, &mut cfg.channel, &mut cfg.out].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Fields set in `flags` replace those in `self`.
    pub fn overlay(self, flags: Self) -> Self {
        Self {
            command: flags.command.or(self.command),
            model: flags.model.or(self.model),
            channel: flags.channel.or(self.channel),
            mu: flags.mu.or(self.mu),
            nu: flags.nu.or(self.nu),
            horizon: flags.horizon.or(self.horizon),
            trials: flags.trials.or(self.trials),
            seed: flags.seed.or(self.seed),
            tol: flags.tol.or(self.tol),
            nmax: flags.nmax.or(self.nmax),
            floor: flags.floor.or(self.floor),
            out: flags.out.or(self.out),
            format: flags.format.or(self.format),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == Some(0) {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        for (name, v) in [("tol", self.tol), ("floor", self.floor)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::Config(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if self.nmax == Some(0) {
            return Err(Error::Config("nmax must be at least 1".into()));
        }
        Ok(())
    }
}

/// Digest of the resolved experiment. Input files enter through the digests
/// of their contents and the output path is left out, so relocating files
/// does not change it.
pub fn config_digest(cfg: &ExperimentConfig, input_digests: &[(&str, String)]) -> String {
    let mut material = cfg.clone();
    material.model = None;
    material.channel = None;
    material.out = None;
    let mut h = Sha256::new();
    h.update(serde_json::to_string(&material).expect("config serialises"));
    for (name, d) in input_digests {
        h.update(b"\n");
        h.update(name.as_bytes());
        h.update(b"=");
        h.update(d.as_bytes());
    }
    hex::encode(h.finalize())
}

pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}
