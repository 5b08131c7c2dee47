//! School choice with affirmative action: immediate acceptance and top
//! trading cycles under majority quotas or minority reserves, stability and
//! equilibrium analysis by exhaustive search, and seeded Monte Carlo
//! experiments on random markets.
//!
//! ```
//! use affirm_core::{fixtures, run_mechanism, Mechanism, Regime};
//!
//! let market = fixtures::example1_market(Regime::Quota);
//! let mu = run_mechanism(Mechanism::Iam, &market).unwrap();
//! assert_eq!(mu.school_of(affirm_core::StudentId(2)), None);
//! ```

pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod game;
pub mod io;
pub mod mechanism;
pub mod model;
pub mod random;
pub mod stability;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use game::{
    construct_first_choice_equilibrium, enumerate_strategies, is_nash, nash_outcome_set,
    strategyproofness_probe, Deviation, Game, NashCheck, NashOutcomes, StrategyProfile,
};
pub use mechanism::{iam_with_aa, run_mechanism, ttcm_with_aa, Mechanism, MechanismVariant};
pub use model::{
    check_feasible, check_feasible_in, corresponding_policy, validate_market, Market, Matching,
    Policy, PreferenceOrder, PriorityOrder, Regime, SchoolId, StudentId, StudentType,
    ValidationReport,
};
pub use random::{appendix_spec, sample_market, PairedSample, RandomMarketSpec, SpecRule};
pub use stability::{
    enumerate_matchings, find_blocking_pairs, is_stable, minority_pareto_compare, stable_set,
    BlockingClause, BlockingPair, MinorityPareto, StableSet, DEFAULT_ENUMERATION_BOUND,
};
