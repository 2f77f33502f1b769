//! Monte Carlo merging experiment for finite models.
//!
//! Every trial samples a path under `mu`, runs the `mu`- and `nu`-filters on
//! its outputs and records, per step, the gaps between the two filters, the
//! two one-step predictors and the two predictive laws of the next output.
//! Expectations are therefore under `P^mu`.

use rayon::prelude::*;
use serde::Serialize;

use super::bl::bl_gap;
use super::metrics::{default_bank, kl, tv, weak_gap, TestBank};
use crate::error::{Error, Result};
use crate::finite_pomp::sampling::sample_with;
use crate::finite_pomp::{filter_init, predict, FiniteDist, FinitePomp, ModelFile};
use crate::finite_pomp::filter::filter_update_at;
use crate::rng::{trial_seed, trial_stream};
use crate::scalar::{pairwise_sum, Scalar};

pub const CSV_HEADER: &str = "step,mean_tv_filter,se_tv_filter,mean_tv_predictor,mean_kl_filter,se_kl_filter,weak_gap,bl_gap,mean_tv_pred_meas";

#[derive(Debug, Clone)]
pub struct MergingOptions<T> {
    pub bank: TestBank<T>,
    /// Location of each state on the real line for the bounded-Lipschitz gap.
    pub positions: Vec<f64>,
    /// Digest recorded in the report; defaults to the digest of the model's
    /// canonical file form.
    pub model_digest: Option<String>,
}

impl<T: Scalar> MergingOptions<T> {
    /// Default bank and positions `0, 1, ..., n - 1`.
    pub fn for_states(n: usize) -> Self {
        Self { bank: default_bank(n), positions: (0..n).map(|i| i as f64).collect(), model_digest: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MergingRow {
    pub step: usize,
    pub mean_tv_filter: f64,
    pub se_tv_filter: f64,
    pub mean_tv_predictor: f64,
    pub mean_kl_filter: f64,
    pub se_kl_filter: f64,
    pub weak_gap: f64,
    pub bl_gap: f64,
    pub mean_tv_pred_meas: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MergingReport {
    pub horizon: usize,
    pub trials: usize,
    pub seed: u64,
    pub model_digest: String,
    pub bank_version: String,
    pub rows: Vec<MergingRow>,
}

/// Per-step quantities of one trial.
#[derive(Debug, Clone, Copy, Default)]
struct StepSample {
    tv_filter: f64,
    tv_predictor: f64,
    kl_filter: f64,
    weak: f64,
    bl: f64,
    tv_pred_meas: f64,
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(xs) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Law of the next output given the state law `pi`: `pi^T B`.
fn output_law<T: Scalar>(model: &FinitePomp<T>, pi: &FiniteDist<T>) -> Result<FiniteDist<T>> {
    let w = model.channel().vec_mul(pi.probs())?;
    FiniteDist::from_weights(w).ok_or(Error::ZeroEvidence { step: 0 })
}

fn run_trial<T: Scalar>(
    model: &FinitePomp<T>,
    mu: &FiniteDist<T>,
    nu: &FiniteDist<T>,
    horizon: usize,
    seed: u64,
    trial: u64,
    opts: &MergingOptions<T>,
) -> Result<Vec<StepSample>> {
    let mut rng = trial_stream(seed, trial);
    let path = sample_with(model, mu, horizon, trial_seed(seed, trial), &mut rng)?;
    let mut out = Vec::with_capacity(horizon + 1);
    let (mut pred_mu, mut pred_nu) = (mu.clone(), nu.clone());
    let mut filt: Option<(FiniteDist<T>, FiniteDist<T>)> = None;
    for (n, &y) in path.ys.iter().enumerate() {
        if let Some((fm, fv)) = &filt {
            pred_mu = predict(model, fm)?;
            pred_nu = predict(model, fv)?;
        }
        let tv_pred_meas = tv(&output_law(model, &pred_mu)?, &output_law(model, &pred_nu)?)?;
        let (fm, fv) = match &filt {
            None => (filter_init(model, mu, y)?, filter_init(model, nu, y)?),
            Some((pm, pv)) => (filter_update_at(model, pm, y, n)?, filter_update_at(model, pv, y, n)?),
        };
        out.push(StepSample {
            tv_filter: tv(&fm, &fv)?.as_f64(),
            tv_predictor: tv(&pred_mu, &pred_nu)?.as_f64(),
            kl_filter: kl(&fm, &fv)?.as_f64(),
            weak: weak_gap(&fm, &fv, &opts.bank)?.as_f64(),
            bl: bl_gap(&fm, &fv, &opts.positions)?.as_f64(),
            tv_pred_meas: tv_pred_meas.as_f64(),
        });
        filt = Some((fm, fv));
    }
    Ok(out)
}

/// Runs `trials` independent dual-filter trials of length `horizon + 1`.
///
/// Trials run in parallel; per-step means are reduced in trial order so the
/// report does not depend on the number of worker threads.
pub fn merging_experiment<T: Scalar>(
    model: &FinitePomp<T>,
    mu: &FiniteDist<T>,
    nu: &FiniteDist<T>,
    horizon: usize,
    trials: usize,
    seed: u64,
    opts: &MergingOptions<T>,
) -> Result<MergingReport> {
    model.check_dist(mu)?;
    model.check_dist(nu)?;
    if let Some(state) = mu.first_ac_violation(nu) {
        return Err(Error::AbsoluteContinuityViolated { state });
    }
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    if opts.positions.len() != model.states() {
        return Err(Error::DimensionMismatch(format!(
            "{} positions for {} states",
            opts.positions.len(),
            model.states()
        )));
    }
    let samples: Vec<Vec<StepSample>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| run_trial(model, mu, nu, horizon, seed, t, opts))
        .collect::<Result<_>>()?;

    let rows = (0..=horizon)
        .map(|step| {
            let col = |f: fn(&StepSample) -> f64| samples.iter().map(|s| f(&s[step])).collect::<Vec<f64>>();
            let (mean_tv_filter, se_tv_filter) = mean_se(&col(|s| s.tv_filter));
            let (mean_kl_filter, se_kl_filter) = mean_se(&col(|s| s.kl_filter));
            MergingRow {
                step,
                mean_tv_filter,
                se_tv_filter,
                mean_tv_predictor: mean_se(&col(|s| s.tv_predictor)).0,
                mean_kl_filter,
                se_kl_filter,
                weak_gap: mean_se(&col(|s| s.weak)).0,
                bl_gap: mean_se(&col(|s| s.bl)).0,
                mean_tv_pred_meas: mean_se(&col(|s| s.tv_pred_meas)).0,
            }
        })
        .collect();

    Ok(MergingReport {
        horizon,
        trials,
        seed,
        model_digest: opts.model_digest.clone().unwrap_or_else(|| ModelFile::from_model(model).digest()),
        bank_version: opts.bank.version.clone(),
        rows,
    })
}

impl MergingReport {
    /// First step `n` at which `mean_kl_filter[n] - mean_kl_filter[n - 1]`
    /// exceeds `k` combined standard errors, if any.
    pub fn kl_increase_beyond(&self, k: f64) -> Option<usize> {
        self.rows.windows(2).find_map(|w| {
            let tol = k * (w[0].se_kl_filter.powi(2) + w[1].se_kl_filter.powi(2)).sqrt();
            (w[1].mean_kl_filter - w[0].mean_kl_filter > tol).then_some(w[1].step)
        })
    }

    pub fn csv_rows(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}\n",
                r.step,
                r.mean_tv_filter,
                r.se_tv_filter,
                r.mean_tv_predictor,
                r.mean_kl_filter,
                r.se_kl_filter,
                r.weak_gap,
                r.bl_gap,
                r.mean_tv_pred_meas
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden;
    use crate::linalg::Matrix;

    fn d(v: &[f64]) -> FiniteDist<f64> {
        FiniteDist::from_f64(v).unwrap()
    }

    #[test]
    fn identical_priors_give_zero_rows() {
        let model = golden::model::<f64>();
        let mu = d(&[0.1, 0.2, 0.3, 0.4]);
        let r = merging_experiment(&model, &mu, &mu, 10, 8, 3, &MergingOptions::for_states(4)).unwrap();
        for row in &r.rows {
            let vals = [
                row.mean_tv_filter,
                row.mean_tv_predictor,
                row.mean_kl_filter,
                row.weak_gap,
                row.bl_gap,
                row.mean_tv_pred_meas,
            ];
            assert!(vals.iter().all(|&v| v == 0.0), "{row:?}");
        }
    }

    #[test]
    fn step_zero_predictor_gap_is_prior_gap() {
        let model = golden::model::<f64>();
        let (mu, nu) = (FiniteDist::uniform(4), d(&[0.7, 0.1, 0.1, 0.1]));
        let r = merging_experiment(&model, &mu, &nu, 3, 4, 1, &MergingOptions::for_states(4)).unwrap();
        assert!((r.rows[0].mean_tv_predictor - 0.9).abs() < 1e-15);
        assert_eq!(r.rows.len(), 4);
        assert_eq!(r.model_digest, ModelFile::from_model(&model).digest());
    }

    #[test]
    fn blind_model_keeps_prior_gap() {
        let t = Matrix::<f64>::identity(3);
        let b = Matrix::from_f64_rows(&[vec![0.5, 0.5], vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let model = FinitePomp::from_channel(t, &b).unwrap();
        let (mu, nu) = (d(&[0.2, 0.3, 0.5]), d(&[0.6, 0.3, 0.1]));
        let r = merging_experiment(&model, &mu, &nu, 20, 5, 9, &MergingOptions::for_states(3)).unwrap();
        for row in &r.rows {
            assert!((row.mean_tv_filter - 0.8).abs() < 1e-12);
        }
    }

    #[test]
    fn absolute_continuity_is_checked() {
        let model = golden::model::<f64>();
        let err = merging_experiment(
            &model,
            &FiniteDist::uniform(4),
            &d(&[0.5, 0.5, 0.0, 0.0]),
            3,
            2,
            0,
            &MergingOptions::for_states(4),
        )
        .unwrap_err();
        assert!(matches!(err, Error::AbsoluteContinuityViolated { state: 2 }));
    }

    #[test]
    fn csv_layout() {
        let model = golden::model::<f64>();
        let mu = FiniteDist::uniform(4);
        let r = merging_experiment(&model, &mu, &mu, 2, 2, 0, &MergingOptions::for_states(4)).unwrap();
        let csv = r.csv_rows();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next().unwrap().split(',').count(), 9);
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn mean_and_standard_error() {
        let (m, se) = mean_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_se(&[7.0]), (7.0, 0.0));
    }
}
