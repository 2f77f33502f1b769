//! Random stream discipline.
//!
//! Every experiment takes one master `u64` seed. Trial `i` draws from its own
//! ChaCha8 stream seeded with `master ^ i` (expanded by
//! [`SeedableRng::seed_from_u64`]). Results therefore depend only on the master
//! seed and the trial index, never on how trials are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

#[inline]
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    master ^ trial
}

pub fn stream(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn trial_stream(master: u64, trial: u64) -> StreamRng {
    stream(trial_seed(master, trial))
}

/// Inverse-CDF draw from a finite probability vector. Zero-probability
/// entries are never returned.
pub fn sample_index<R: Rng + ?Sized>(rng: &mut R, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        last_positive = i;
        acc += p;
        if u < acc {
            return i;
        }
    }
    last_positive
}
