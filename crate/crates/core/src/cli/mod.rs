//! `filterstab` command-line front end.
//!
//! Exit status: 0 on success, 1 when the input is invalid (bad flags, config,
//! model, prior or channel files), 2 when a well-formed run fails (zero
//! evidence, non-unique invariant law, quadrature failure, failed golden
//! check).

mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser};

pub use commands::{run, Outcome};
pub use config::{CommandKind, ExperimentConfig, Format, PriorSpec};

use crate::error::Error;

#[derive(Debug, Parser)]
#[command(name = "filterstab", version, about = "Filter stability experiments for partially observed Markov processes")]
pub struct Cli {
    /// Experiment to run; may instead come from the `command` field of --config.
    #[arg(value_enum)]
    pub command: Option<CommandKind>,

    #[command(flatten)]
    pub flags: Flags,

    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Worker threads for trial loops. Output does not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Finite model file (JSON with n, m, K, T, Q, H).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Prior of the true system: uniform, point:<i>, weights, normal:<mean>,<std> or JSON.
    #[arg(long)]
    pub mu: Option<String>,
    /// Prior of the mismatched filter, same syntax as --mu.
    #[arg(long)]
    pub nu: Option<String>,
    /// Last time step (steps for harris).
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Relative rank tolerance (observability).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Largest joint horizon tried by observability (default: number of states).
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Divergence floor reported by harris (default 1e-8).
    #[arg(long)]
    pub floor: Option<f64>,
    /// Channel specification for channels-verify.
    #[arg(long)]
    pub channel: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Flags {
    fn into_config(self, command: Option<CommandKind>) -> crate::Result<ExperimentConfig> {
        Ok(ExperimentConfig {
            command,
            model: self.model,
            channel: self.channel,
            mu: self.mu.as_deref().map(PriorSpec::parse).transpose()?,
            nu: self.nu.as_deref().map(PriorSpec::parse).transpose()?,
            horizon: self.horizon,
            trials: self.trials,
            seed: self.seed,
            tol: self.tol,
            nmax: self.nmax,
            floor: self.floor,
            out: self.out,
            format: self.format,
        })
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        1
    } else {
        2
    }
}

fn resolve(cli: Cli) -> crate::Result<ExperimentConfig> {
    let flags = cli.flags.into_config(cli.command)?;
    let cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?.overlay(flags),
        None => flags,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Parses `args`, runs the experiment and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return 1;
        }
        // fails only if a pool already exists, which is harmless here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cfg = match resolve(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, &outcome.text)
            .map_err(|source| Error::Io { path: path.display().to_string(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(outcome.text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| Error::Io { path: "<stdout>".into(), source })
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return exit_code(&e);
    }
    if outcome.checks_failed {
        eprintln!("error: one or more checks failed");
        return 2;
    }
    0
}
