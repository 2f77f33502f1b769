use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{config_digest, file_digest, CommandKind, ExperimentConfig, Format, PriorSpec};
use crate::channels::{run_channel_file, ChannelFile, Quadrature};
use crate::closedform_walk::cf_dual_run;
use crate::diagnostics::{default_bank, harris_re_curve, merging_experiment, MergingOptions};
use crate::error::{Error, Result};
use crate::finite_pomp::ModelFile;
use crate::linalg::Matrix;
use crate::observability::{observability_verdict, Verdict};
use crate::{golden, VERSION};

pub const DEFAULT_HORIZON: usize = 50;
pub const DEFAULT_MERGING_TRIALS: usize = 500;
pub const DEFAULT_WALK_TRIALS: usize = 200;
pub const DEFAULT_FLOOR: f64 = 1e-8;
const WEAK_GAP_NOTE: &str = "weak_gap is a maximum over a finite test bank and under-estimates the weak distance";

/// Rendered output of one command.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub text: String,
    /// Set when a command that checks reference values found a mismatch.
    pub checks_failed: bool,
}

fn ok(text: String) -> Result<Outcome> {
    Ok(Outcome { text, checks_failed: false })
}

fn require<'a>(p: &'a Option<PathBuf>, flag: &str, cmd: CommandKind) -> Result<&'a Path> {
    p.as_deref().ok_or_else(|| Error::Config(format!("{} needs --{flag}", cmd.name())))
}

fn meta(cmd: CommandKind, digest: &str, extra: Value) -> Value {
    let mut m = json!({
        "tool": "filterstab",
        "version": VERSION,
        "command": cmd.name(),
        "config_digest": digest,
    });
    if let (Value::Object(m), Value::Object(extra)) = (&mut m, extra) {
        m.extend(extra);
    }
    m
}

fn csv_doc(meta: &Value, body: &str) -> String {
    format!("# {meta}\n{body}")
}

fn json_doc(meta: Value, report: impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&json!({ "meta": meta, "report": report }))?;
    s.push('\n');
    Ok(s)
}

fn key_value_csv(rows: &[(&str, String)]) -> String {
    let mut s = String::from("quantity,value\n");
    for (k, v) in rows {
        let _ = writeln!(s, "{k},{v}");
    }
    s
}

fn format_of(cfg: &ExperimentConfig, cmd: CommandKind) -> Result<Format> {
    let f = cfg.format.unwrap_or(cmd.default_format());
    if f == Format::Text && cmd != CommandKind::ReproducePaper {
        return Err(Error::Config(format!("{} supports csv and json output", cmd.name())));
    }
    Ok(f)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let cmd = cfg.command.ok_or_else(|| Error::Config("no command given".into()))?;
    let format = format_of(cfg, cmd)?;
    match cmd {
        CommandKind::Observability => observability(cfg, format),
        CommandKind::Merging => merging(cfg, format),
        CommandKind::Walk => walk(cfg, format),
        CommandKind::Harris => harris(cfg, format),
        CommandKind::ChannelsVerify => channels_verify(cfg, format),
        CommandKind::ReproducePaper => reproduce_paper(cfg, format),
    }
}

fn load_model(cfg: &ExperimentConfig, cmd: CommandKind) -> Result<(ModelFile, String)> {
    let path = require(&cfg.model, "model", cmd)?;
    let file = ModelFile::load(path)?;
    let digest = file.digest();
    Ok((file, digest))
}

fn observability(cfg: &ExperimentConfig, format: Format) -> Result<Outcome> {
    let cmd = CommandKind::Observability;
    let (file, model_digest) = load_model(cfg, cmd)?;
    let model = file.build::<f64>()?;
    let nmax = cfg.nmax.unwrap_or(model.states().max(2));
    let tol = cfg.tol.unwrap_or(1e-9);
    let report = observability_verdict(&model, nmax, tol)?;
    let digest = config_digest(cfg, &[("model", model_digest.clone())]);
    let m = meta(cmd, &digest, json!({ "model_digest": model_digest, "nmax": nmax, "tol": tol }));
    match format {
        Format::Json => ok(json_doc(m, &report)?),
        _ => {
            let opt = |v: Option<usize>| v.map_or_else(|| "none".to_string(), |v| v.to_string());
            let body = key_value_csv(&[
                ("states", model.states().to_string()),
                ("rank_one_step", report.rank_one_step.to_string()),
                ("rank_marginal", report.rank_marginal.to_string()),
                ("joint_horizon", opt(report.joint_horizon)),
                ("rank_joint", opt(report.rank_joint)),
                ("marginal_test", format!("{:?}", report.marginal_test)),
                ("verdict", report.verdict.to_string()),
            ]);
            ok(csv_doc(&m, &body))
        }
    }
}

fn merging(cfg: &ExperimentConfig, format: Format) -> Result<Outcome> {
    let cmd = CommandKind::Merging;
    let (file, model_digest) = load_model(cfg, cmd)?;
    let model = file.build::<f64>()?;
    let n = model.states();
    let uniform = PriorSpec::Text("uniform".into());
    let mu = cfg.mu.as_ref().unwrap_or(&uniform).finite(n)?;
    let nu = cfg.nu.as_ref().unwrap_or(&uniform).finite(n)?;
    let horizon = cfg.horizon.unwrap_or(DEFAULT_HORIZON);
    let trials = cfg.trials.unwrap_or(DEFAULT_MERGING_TRIALS);
    let seed = cfg.seed.unwrap_or(0);
    let opts = MergingOptions {
        bank: default_bank(n),
        positions: file.positions(),
        model_digest: Some(model_digest.clone()),
    };
    let report = merging_experiment(&model, &mu, &nu, horizon, trials, seed, &opts)?;
    let digest = config_digest(cfg, &[("model", model_digest.clone())]);
    let m = meta(
        cmd,
        &digest,
        json!({
            "model_digest": model_digest,
            "seed": seed,
            "horizon": horizon,
            "trials": trials,
            "bank_version": report.bank_version,
            "bank_note": WEAK_GAP_NOTE,
            "tv_convention": "sum |p - q|, range [0, 2]",
            "kl_units": "nats",
        }),
    );
    match format {
        Format::Json => ok(json_doc(m, &report)?),
        _ => ok(csv_doc(&m, &report.csv_rows())),
    }
}

fn walk(cfg: &ExperimentConfig, format: Format) -> Result<Outcome> {
    let cmd = CommandKind::Walk;
    let mu = match &cfg.mu {
        Some(p) => p.continuous()?,
        None => PriorSpec::Text("normal:0,1".into()).continuous()?,
    };
    let nu = match &cfg.nu {
        Some(p) => p.continuous()?,
        None => PriorSpec::Text("normal:5,2".into()).continuous()?,
    };
    let horizon = cfg.horizon.unwrap_or(DEFAULT_HORIZON);
    let trials = cfg.trials.unwrap_or(DEFAULT_WALK_TRIALS);
    let seed = cfg.seed.unwrap_or(0);
    let report = cf_dual_run(&mu, &nu, horizon, trials, seed)?;
    let digest = config_digest(cfg, &[]);
    let m = meta(
        cmd,
        &digest,
        json!({
            "seed": seed,
            "horizon": horizon,
            "trials": trials,
            "mu": mu,
            "nu": nu,
            "gap": "|p_mu - p_nu|; filter TV distance is twice the gap",
        }),
    );
    match format {
        Format::Json => ok(json_doc(m, &report)?),
        _ => ok(csv_doc(&m, &report.to_csv())),
    }
}

fn harris(cfg: &ExperimentConfig, format: Format) -> Result<Outcome> {
    let cmd = CommandKind::Harris;
    let (file, model_digest) = load_model(cfg, cmd)?;
    let t: Matrix<f64> = Matrix::from_f64_rows(&file.t)?;
    let start = PriorSpec::Text("point:0".into());
    let pi0 = cfg.mu.as_ref().unwrap_or(&start).finite(t.rows())?;
    let steps = cfg.horizon.unwrap_or(DEFAULT_HORIZON);
    let floor = cfg.floor.unwrap_or(DEFAULT_FLOOR);
    let curve = harris_re_curve(&t, &pi0, steps, floor)?;
    let digest = config_digest(cfg, &[("model", model_digest.clone())]);
    let m = meta(
        cmd,
        &digest,
        json!({
            "model_digest": model_digest,
            "steps": steps,
            "floor": floor,
            "monotone": curve.monotone,
            "monotone_tol": curve.monotone_tol,
            "first_below_floor": curve.first_below_floor,
            "invariant": curve.invariant,
            "kl_units": "nats",
        }),
    );
    match format {
        Format::Json => ok(json_doc(m, &curve)?),
        _ => ok(csv_doc(&m, &curve.to_csv())),
    }
}

fn channels_verify(cfg: &ExperimentConfig, format: Format) -> Result<Outcome> {
    let cmd = CommandKind::ChannelsVerify;
    let path = require(&cfg.channel, "channel", cmd)?;
    let spec = ChannelFile::load(path)?;
    let report = run_channel_file(&spec, &Quadrature::default())?;
    let channel_digest = file_digest(path)?;
    let digest = config_digest(cfg, &[("channel", channel_digest.clone())]);
    let m = meta(cmd, &digest, json!({ "channel_digest": channel_digest }));
    match format {
        Format::Json => ok(json_doc(m, &report)?),
        _ => {
            let mut rows = vec![
                ("kind", report.kind.to_string()),
                ("domain_lo", format!("{:e}", report.domain[0])),
                ("domain_hi", format!("{:e}", report.domain[1])),
                ("grid_points", report.grid_points.to_string()),
                ("residual", format!("{:e}", report.residual)),
                ("g_sup_norm", format!("{:e}", report.g_sup_norm)),
            ];
            if let Some(r) = report.residual_outside {
                rows.push(("residual_outside", format!("{r:e}")));
            }
            ok(csv_doc(&m, &key_value_csv(&rows)))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct Check {
    name: String,
    pass: bool,
    detail: String,
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), pass, detail: detail.into() }
}

fn matrix_check(name: &str, got: &Matrix<f64>, want: &Matrix<f64>, tol: f64) -> Check {
    let same_shape = got.rows() == want.rows() && got.cols() == want.cols();
    let diff = if same_shape { got.max_abs_diff(want) } else { f64::INFINITY };
    check(name, diff <= tol, format!("max |diff| = {diff:e}"))
}

fn render_matrix(out: &mut String, title: &str, m: &Matrix<f64>) {
    let _ = writeln!(out, "{title}");
    for i in 0..m.rows() {
        let cells: Vec<String> = m.row(i).iter().map(|v| format!("{v:>9}")).collect();
        let _ = writeln!(out, "  {}", cells.join(" "));
    }
}

fn reproduce_paper(cfg: &ExperimentConfig, format: Format) -> Result<Outcome> {
    const TOL: f64 = 1e-12;
    let cmd = CommandKind::ReproducePaper;
    let file = golden::model_file();
    let model = file.build::<f64>()?;
    let report = observability_verdict(&model, 4, 1e-9)?;
    let joint = report
        .joint
        .clone()
        .ok_or_else(|| Error::InvalidModel("golden model produced no joint matrix".into()))?;

    let mut checks = vec![
        matrix_check("transition T", &model.transition().clone(), &golden::matrix(&golden::TRANSITION), 0.0),
        matrix_check("one-step matrix A", &report.one_step, &golden::matrix(&golden::ONE_STEP), TOL),
        matrix_check("marginal matrix M", &report.marginal, &golden::matrix(&golden::MARGINAL), TOL),
    ];
    for (i, j, v) in [(0, 4, 0.5625), (0, 5, 0.4375), (0, 6, 0.609375), (0, 7, 0.390625)] {
        let got = report.marginal[(i, j)];
        checks.push(check(format!("M[{}][{}] = {v}", i + 1, j + 1), (got - v).abs() <= TOL, format!("{got}")));
    }
    checks.push(check(
        "rank M = 3",
        report.rank_marginal == golden::MARGINAL_RANK,
        format!("rank {}", report.rank_marginal),
    ));
    checks.push(matrix_check("joint 2-step matrix", &joint, &golden::matrix(&golden::JOINT_TWO_STEP), TOL));
    checks.push(check(
        "rank joint = 4",
        report.rank_joint == Some(golden::JOINT_RANK),
        format!("rank {:?}", report.rank_joint),
    ));
    checks.push(check(
        "verdict NStepObservable(2)",
        report.verdict == Verdict::NStepObservable(2),
        report.verdict.to_string(),
    ));
    let failed = checks.iter().any(|c| !c.pass);

    let digest = config_digest(cfg, &[("model", file.digest())]);
    let m = meta(cmd, &digest, json!({ "model_digest": file.digest(), "tol": TOL }));
    let text = match format {
        Format::Json => json_doc(m, json!({ "observability": report, "checks": checks }))?,
        Format::Csv => {
            let mut body = String::from("check,pass,detail\n");
            for c in &checks {
                let _ = writeln!(body, "\"{}\",{},\"{}\"", c.name, c.pass, c.detail);
            }
            csv_doc(&m, &body)
        }
        Format::Text => {
            let mut out = format!("# {m}\n");
            render_matrix(&mut out, "T", model.transition());
            render_matrix(&mut out, "A", &report.one_step);
            render_matrix(&mut out, "M = [A, TA, T^2A, T^3A]", &report.marginal);
            render_matrix(&mut out, "joint N=2 (columns y1 y2 = 00, 01, 10, 11)", &joint);
            let _ = writeln!(out, "rank A = {}", report.rank_one_step);
            let _ = writeln!(out, "rank M = {}", report.rank_marginal);
            let _ = writeln!(out, "rank joint = {:?}", report.rank_joint);
            let _ = writeln!(out, "verdict = {}", report.verdict);
            for c in &checks {
                let _ = writeln!(out, "{} {} ({})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            out
        }
    };
    Ok(Outcome { text, checks_failed: failed })
}
