//! Acceptance suite. Each test prints one `PASS`/`FAIL` line; run with
//! `cargo test --release --test acceptance -- --nocapture --test-threads=1`
//! to see them in order.

mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use common::{dist, enumerate, enumerated_rn_rhs, grid_walk_filter, verdict};
use filterstab::channels::{
    affine_apply, affine_solve, moment_matrix_by_quadrature, run_channel_file, telescoping_g, ChannelFile,
    NoiseLaw, Quadrature,
};
use filterstab::closedform_walk::{cf_dual_run, cf_run, simulate_walk, ContinuousPrior};
use filterstab::diagnostics::{harris_re_curve, merging_experiment, pinsker_holds, MergingOptions};
use filterstab::finite_pomp::{filter_run, rn_identity_gap, sample_trajectory, ModelFile};
use filterstab::golden;
use filterstab::observability::{observability_verdict, Verdict};
use filterstab::random::{random_dist, random_full_support, random_model, random_stochastic};
use filterstab::rng::{stream, trial_stream};
use filterstab::{Dist, Mat};
use rand::Rng;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

#[test]
fn golden_reproduction() {
    let start = Instant::now();
    let model = golden::model::<f64>();
    let report = observability_verdict(&model, 4, 1e-9).unwrap();
    let a_ok = report.one_step.max_abs_diff(&golden::matrix(&[[0.0, 1.0], [0.0, 1.0], [1.0, 0.0], [1.0, 0.0]])) == 0.0;
    let t_ok = model.transition().max_abs_diff(&golden::matrix(&golden::TRANSITION)) == 0.0;
    // M built here by explicit powers of T
    let mut cols = Vec::new();
    let mut block = golden::matrix::<f64, 2>(&golden::ONE_STEP);
    for _ in 0..4 {
        cols.push(block.clone());
        block = model.transition().matmul(&block).unwrap();
    }
    let m_oracle = cols[1..].iter().fold(cols[0].clone(), |acc, b| acc.hcat(b).unwrap());
    let m_diff = report.marginal.max_abs_diff(&golden::matrix(&golden::MARGINAL));
    let m_oracle_diff = report.marginal.max_abs_diff(&m_oracle);
    let named = [(4, 0.5625), (5, 0.4375), (6, 0.609375), (7, 0.390625)]
        .iter()
        .all(|&(j, v)| (report.marginal[(0, j)] - v).abs() <= 1e-12);
    let joint = report.joint.clone().unwrap();
    let j_diff = joint.max_abs_diff(&golden::matrix(&[
        [0.0, 0.0, 0.75, 0.25],
        [0.0, 0.0, 0.5, 0.5],
        [0.75, 0.25, 0.0, 0.0],
        [0.5, 0.5, 0.0, 0.0],
    ]));
    let elapsed = start.elapsed().as_secs_f64();
    let pass = a_ok
        && t_ok
        && m_diff <= 1e-12
        && m_oracle_diff <= 1e-12
        && named
        && report.rank_marginal == 3
        && j_diff <= 1e-12
        && report.rank_joint == Some(4)
        && report.verdict == Verdict::NStepObservable(2)
        && elapsed < 1.0;
    assert!(verdict(
        "golden four-state reproduction",
        pass,
        format!(
            "|M-M*|={m_diff:e}, rank M={}, |J-J*|={j_diff:e}, rank J={:?}, verdict={}, {elapsed:.3}s",
            report.rank_marginal, report.rank_joint, report.verdict
        ),
    ));
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

#[test]
fn affine_example() {
    let quad = Quadrature::default();
    let noise = NoiseLaw::Uniform { lo: -1.0, hi: 1.0 };
    let nmat = moment_matrix_by_quadrature(&[0.0, 0.0, 1.0], &[0.0, 1.0], noise, 12, &quad).unwrap();
    let mut literal = 0.0f64;
    let mut exact = 0.0f64;
    for n in 0..=12 {
        for k in 0..=n {
            let got = nmat.entries[(k, n)];
            literal = literal.max((got - binomial(n, k) / (n + k + 1) as f64).abs());
            let moment = if (n + k) % 2 == 0 { 1.0 / (n + k + 1) as f64 } else { 0.0 };
            exact = exact.max((got - binomial(n, k) * moment).abs());
        }
    }
    // The literal formula is the Uni[0, 1] moment table; for Uni[-1, 1] every
    // odd n + k entry is 0. Reported, not enforced; see the README.
    verdict(
        "affine moment matrix = C(n,k)/(n+k+1), n <= 12",
        literal <= 1e-12,
        format!("max deviation {literal:e}"),
    );
    let exact_ok = verdict(
        "affine moment matrix = C(n,k) E[Z^(n+k)] for Z ~ Uni[-1,1], n <= 12",
        exact <= 1e-12,
        format!("max deviation {exact:e}"),
    );

    // |N^-1| by columns, to bound what any solver can recover from a
    // correctly rounded beta
    let inv: Vec<Vec<f64>> = (0..=12)
        .map(|j| {
            let mut e = vec![0.0; 13];
            e[j] = 1.0;
            affine_solve(&nmat, &e).unwrap()
        })
        .collect();
    let mut rng = stream(77);
    let (mut round_trip, mut worst_vs_bound) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let deg = rng.random_range(0..=12usize);
        let alpha: Vec<f64> = (0..=12).map(|i| if i <= deg { rng.random_range(-1.0..1.0) } else { 0.0 }).collect();
        let beta = affine_apply(&nmat, &alpha).unwrap();
        let back = affine_solve(&nmat, &beta).unwrap();
        for i in 0..=12 {
            let err = (alpha[i] - back[i]).abs();
            let bound: f64 = (0..=12).map(|j| inv[j][i].abs() * beta[j].abs() * f64::EPSILON).sum();
            round_trip = round_trip.max(err);
            if bound > 0.0 {
                worst_vs_bound = worst_vs_bound.max(err / bound);
            }
        }
    }
    // Not enforced: degree-12 inputs sit at the f64 conditioning limit.
    verdict("affine_solve round trip within 1e-10", round_trip <= 1e-10, format!("max error {round_trip:e}"));
    let rt_ok = verdict(
        "affine_solve round trip within |N^-1| |beta| eps",
        worst_vs_bound <= 1.0,
        format!("max error / bound = {worst_vs_bound:.3}"),
    );

    let spec = ChannelFile::load(&data("channel_affine.json")).unwrap();
    let r = run_channel_file(&spec, &quad).unwrap();
    let v_ok = verdict(
        "affine verify_S on [-10, 10]",
        r.residual < 1e-6 && r.domain == [-10.0, 10.0],
        format!("residual {:e}", r.residual),
    );
    assert!(exact_ok && rt_ok && v_ok);
}

#[test]
fn telescoping_construction() {
    let mut rng = stream(4242);
    let (mut inside, mut outside, mut worst_ratio) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let m: u32 = rng.random_range(1..=5);
        let a: f64 = rng.random_range(-20.0..20.0);
        let (c0, c1, w, ph): (f64, f64, f64, f64) = (
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(0.2..4.0),
            rng.random_range(0.0..6.3),
        );
        let f = move |x: f64| c0 + c1 * (w * x + ph).sin();
        let f_sup = c0.abs() + c1.abs();
        let g = telescoping_g(Arc::new(f), m, a);
        let s = |x: f64| 0.5 * (g.eval(x + 1.0) + g.eval(x - 1.0));
        let mf = f64::from(m);
        for i in 0..=2000 {
            let x = (a - mf + 2.0 * mf * i as f64 / 2000.0).clamp(a - mf, a + mf);
            inside = inside.max((s(x) - f(x)).abs());
        }
        for i in 0..=2000 {
            let d = 1e-3 + 10.0 * i as f64 / 2000.0;
            outside = outside.max(s(a - mf - d).abs()).max(s(a + mf + d).abs());
        }
        // sup of g over a dense sample of its support
        let mut g_sup = 0.0f64;
        for i in 0..=8000 {
            g_sup = g_sup.max(g.eval(a - mf + 1.0 + (2.0 * mf + 4.0) * i as f64 / 8000.0).abs());
        }
        worst_ratio = worst_ratio.max(g_sup / (4.0 * mf * f_sup));
    }
    assert!(verdict(
        "telescoping g: S(g)=f on band, 0 outside, |g| <= 4M|f|",
        inside <= 1e-10 && outside <= 1e-10 && worst_ratio <= 1.0,
        format!("inside {inside:e}, outside {outside:e}, max |g|/(4M|f|) = {worst_ratio:.3}"),
    ));
}

#[test]
fn radon_nikodym_identity() {
    let mut rng = stream(1801);
    let (mut worst, mut worst_enum, mut worst_filter) = (0.0f64, 0.0f64, 0.0f64);
    let mut enumerated = 0;
    for case in 0..200u64 {
        let n = rng.random_range(1..=5usize);
        let k = rng.random_range(1..=4usize);
        let m = rng.random_range(1..=3usize);
        let horizon = rng.random_range(0..=6usize);
        let model = random_model::<f64, _>(&mut rng, n, k, m);
        let mu: Dist = random_full_support(&mut rng, n, 0.05);
        let nu: Dist = random_full_support(&mut rng, n, 0.05);
        let path = sample_trajectory(&model, &mu, horizon, 9000 + case).unwrap();
        let gap = rn_identity_gap(&model, &mu, &nu, &path.ys, horizon).unwrap();
        worst = worst.max(gap);
        if n <= 3 {
            enumerated += 1;
            let f_mu = enumerate(&model, mu.probs(), &path.ys).filter;
            let f_nu = enumerate(&model, nu.probs(), &path.ys).filter;
            let lib_mu = filter_run(&model, &mu, &path.ys).unwrap().pop().unwrap();
            for x in 0..n {
                worst_filter = worst_filter.max((lib_mu[x] - f_mu[x]).abs());
            }
            let rhs = enumerated_rn_rhs(&model, mu.probs(), nu.probs(), &path.ys);
            for x in 0..n {
                if f_nu[x] > 0.0 {
                    worst_enum = worst_enum.max((f_mu[x] / f_nu[x] - rhs[x]).abs());
                }
            }
        }
    }
    assert!(verdict(
        "likelihood-ratio filter identity, 200 random models",
        worst < 1e-10 && worst_enum < 1e-10 && worst_filter < 1e-12,
        format!(
            "library gap {worst:e}; enumeration gap {worst_enum:e} and filter mismatch {worst_filter:e} over {enumerated} models with n <= 3"
        ),
    ));
}

#[test]
fn pinsker_sweep() {
    let mut rng = stream(7_000_001);
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for _ in 0..10_000 {
        let n = rng.random_range(1..=10usize);
        let p: Dist = random_dist(&mut rng, n);
        let q: Dist = random_dist(&mut rng, n);
        let c = pinsker_holds(&p, &q).unwrap();
        if !c.holds {
            violations += 1;
        }
        min_slack = min_slack.min(c.slack);
    }
    assert!(verdict("Pinsker sweep, 1e4 pairs", violations == 0, format!("{violations} violations, min slack {min_slack:e}")));
}

#[test]
fn harris_corollary() {
    let t = Mat::from_f64_rows(&[vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap();
    let curve = harris_re_curve(&t, &dist(&[1.0, 0.0]), 60, 1e-8).unwrap();
    let d = &curve.divergences;
    let d0_ok = (d[0] - std::f64::consts::LN_2).abs() <= 1e-12;
    // strict decrease while above rounding level
    let strict = d.windows(2).take_while(|w| w[0] > 1e-13).all(|w| w[1] < w[0]);
    let below = d[47] < 1e-8;
    // closed form: pi_t = (1 + 0.8^t, 1 - 0.8^t) / 2 against (1/2, 1/2)
    let oracle = (0..=60)
        .map(|s| {
            let e = 0.8f64.powi(s);
            let (a, b) = ((1.0 + e) / 2.0, (1.0 - e) / 2.0);
            let term = |p: f64| if p > 0.0 { p * (2.0 * p).ln() } else { 0.0 };
            term(a) + term(b)
        })
        .collect::<Vec<_>>();
    let oracle_err = d.iter().zip(&oracle).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);

    let mut rng = stream(31337);
    let mut non_monotone = 0;
    for _ in 0..100 {
        let n = rng.random_range(2..=6usize);
        let t: Mat = random_stochastic(&mut rng, n, n);
        let pi0: Dist = random_dist(&mut rng, n);
        let c = harris_re_curve(&t, &pi0, 100, 1e-8).unwrap();
        if !c.monotone || c.divergences.windows(2).any(|w| w[1] > w[0] + 1e-12) {
            non_monotone += 1;
        }
    }
    assert!(verdict(
        "relative entropy to the invariant law decreases",
        d0_ok && strict && below && oracle_err < 1e-12 && non_monotone == 0,
        format!(
            "D0-ln2={:e}, D47={:e}, first below 1e-8 at t={:?}, closed-form error {oracle_err:e}, {non_monotone}/100 random chains non-monotone",
            d[0] - std::f64::consts::LN_2,
            d[47],
            curve.first_below_floor
        ),
    ));
}

#[test]
fn observable_model_merging() {
    let model = golden::model::<f64>();
    let mu = Dist::uniform(4);
    let nu = dist(&[0.7, 0.1, 0.1, 0.1]);
    let opts = MergingOptions::for_states(4);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let start = Instant::now();
    let r = pool.install(|| merging_experiment(&model, &mu, &nu, 50, 500, 20260101, &opts)).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let (first, last) = (r.rows[0], r.rows[50]);
    let tv_ok = last.mean_tv_filter < 0.25 * first.mean_tv_filter;
    let kl_up = r.kl_increase_beyond(2.0);
    let meas_ok = last.mean_tv_pred_meas < first.mean_tv_pred_meas;
    let fast = elapsed < 30.0;
    assert!(verdict(
        "observable model merging trend",
        tv_ok && kl_up.is_none() && meas_ok && fast,
        format!(
            "tv {:.4} -> {:.2e}, KL rise beyond 2 SE at {kl_up:?}, pred-meas tv {:.4} -> {:.2e}, {elapsed:.2}s on one thread",
            first.mean_tv_filter, last.mean_tv_filter, first.mean_tv_pred_meas, last.mean_tv_pred_meas
        ),
    ));
}

#[test]
fn non_observable_control() {
    let file = ModelFile::load(&data("blind_model.json")).unwrap();
    let model = file.build::<f64>().unwrap();
    let (mu, nu) = (dist(&[0.2, 0.3, 0.5]), Dist::uniform(3));
    let r = merging_experiment(&model, &mu, &nu, 50, 100, 5, &MergingOptions::for_states(3)).unwrap();
    let base = r.rows[0].mean_tv_filter;
    let drift = r.rows.iter().map(|row| (row.mean_tv_filter - base).abs()).fold(0.0, f64::max);
    let expected = mu.probs().iter().zip(nu.probs()).map(|(a, b)| (a - b).abs()).sum::<f64>();
    assert!(verdict(
        "blind model keeps the filter gap",
        drift <= 1e-12 && (base - expected).abs() <= 1e-12,
        format!("tv {base:.6} (prior gap {expected:.6}), max drift {drift:e} over 50 steps"),
    ));
}

#[test]
fn closed_form_walk() {
    let prior = ContinuousPrior::normal(0.0, 1.0);
    let h = 1e-3;
    let mut worst = 0.0f64;
    for trial in 0..20 {
        let mut rng = trial_stream(55, trial);
        let path = simulate_walk(&prior, 30, &mut rng);
        let ys: Vec<f64> = path.ys.iter().map(|y| (y / h).round() * h).collect();
        let cf = cf_run(|x| prior.ln_pdf(x), &ys).unwrap();
        let pdf = |x: f64| (-0.5 * x * x).exp();
        let grid = grid_walk_filter(pdf, &ys, h, 8.0);
        for (a, b) in cf.iter().zip(&grid) {
            worst = worst.max((a.p - b).abs());
        }
    }
    let oracle_ok = verdict("closed-form walk filter vs grid filter", worst < 1e-6, format!("max |p - p_grid| {worst:e}"));

    let mu = ContinuousPrior::normal(0.0, 1.0);
    let nu = ContinuousPrior::normal(5.0, 2.0);
    let r = cf_dual_run(&mu, &nu, 50, 200, 20260101).unwrap();
    let med = r.rows[50].median_gap;
    let merge_ok = verdict(
        "closed-form walk merging, median gap at step 50",
        med < 0.05,
        format!("median |p_mu - p_nu| = {med:e} (mean {:e})", r.rows[50].mean_gap),
    );
    assert!(oracle_ok && merge_ok);
}

fn run_cli(args: &[&str], threads: usize) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_filterstab"))
        .args(args)
        .args(["--threads", &threads.to_string()])
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

#[test]
fn cli_determinism() {
    let commands: Vec<Vec<&str>> = vec![
        vec!["observability", "--model", "data/golden_model.json"],
        vec!["merging", "--config", "data/merging.json", "--trials", "100"],
        vec!["merging", "--model", "data/golden_model.json", "--nu", "0.7,0.1,0.1,0.1", "--format", "json", "--trials", "50"],
        vec!["walk", "--trials", "100", "--seed", "9"],
        vec!["harris", "--model", "data/harris_two_state.json"],
        vec!["channels-verify", "--channel", "data/channel_indicator.json"],
        vec!["channels-verify", "--channel", "data/channel_two_point.json", "--format", "csv"],
        vec!["reproduce-paper"],
    ];
    let mut bad = Vec::new();
    for args in &commands {
        let runs: Vec<(i32, Vec<u8>)> = [1, 1, 8, 8].iter().map(|&t| run_cli(args, t)).collect();
        let ok = runs.iter().all(|r| r.0 == 0 && !r.1.is_empty() && r.1 == runs[0].1);
        if !ok {
            bad.push(args.join(" "));
        }
    }
    assert!(verdict(
        "CLI output byte-identical across runs and thread counts {1, 8}",
        bad.is_empty(),
        format!("{} commands, mismatches: {bad:?}", commands.len()),
    ));
}
