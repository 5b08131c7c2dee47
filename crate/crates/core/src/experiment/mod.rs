//! Seeded Monte Carlo experiments on random markets.
//!
//! Every trial draws its market from its own ChaCha stream (see
//! [`crate::random::trial_rng`]) and results are merged as integer counts,
//! so outputs depend only on the seed, never on the number of workers.

use rayon::prelude::*;
use serde::Serialize;

pub mod config;
pub mod eta;
pub mod events;
pub mod pn;
pub mod stable_sets;

pub use config::{run_config, ConfigOutput, ExperimentConfig, ExperimentKind};
pub use eta::{estimate_eta, EtaEstimate};
pub use events::{appendix_events, estimate_event_probs, AppendixEvents, EventRow, EventStats};
pub use pn::{estimate_pn, pareto_classification, ParetoCounts, PnEstimate};
pub use stable_sets::{stable_set_equality_experiment, InclusionWitness, StableEqualityRow};

/// Standard error of a binomial proportion.
pub fn binomial_se(p: f64, trials: u64) -> f64 {
    if trials == 0 {
        return f64::NAN;
    }
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// A count of successes out of a count of samples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Proportion {
    pub hits: u64,
    pub samples: u64,
}

impl Proportion {
    pub fn new(hits: u64, samples: u64) -> Self {
        Proportion { hits, samples }
    }

    pub fn frequency(&self) -> f64 {
        if self.samples == 0 {
            f64::NAN
        } else {
            self.hits as f64 / self.samples as f64
        }
    }

    pub fn se(&self) -> f64 {
        binomial_se(self.frequency(), self.samples)
    }

    /// Normal-approximation 95% interval.
    pub fn ci95(&self) -> (f64, f64) {
        let (p, se) = (self.frequency(), self.se());
        (p - 1.96 * se, p + 1.96 * se)
    }
}

/// Runs `trial` for `0..trials` in parallel and folds the results with
/// `merge`. `merge` must be associative and commutative on the values it
/// sees (integer counts are).
pub(crate) fn fold_trials<T, F, M>(trials: u64, identity: T, trial: F, merge: M) -> T
where
    T: Clone + Send + Sync,
    F: Fn(u64) -> T + Sync + Send,
    M: Fn(T, T) -> T + Sync + Send,
{
    (0..trials)
        .into_par_iter()
        .map(trial)
        .reduce(|| identity.clone(), &merge)
}
