//! Distances between filters, Monte Carlo merging experiments and
//! relative-entropy decay of Markov chains.

mod bl;
mod harris;
mod merging;
mod metrics;

pub use bl::bl_gap;
pub use harris::{harris_re_curve, invariant_dist, HarrisCurve, MONOTONE_TOL};
pub use merging::{merging_experiment, MergingOptions, MergingReport, MergingRow, CSV_HEADER};
pub use metrics::{default_bank, kl, pinsker_holds, tv, weak_gap, PinskerCheck, TestBank, BANK_VERSION};
