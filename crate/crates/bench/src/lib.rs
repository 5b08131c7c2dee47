//! Market builders shared by the criterion benches.

use affirm_core::random::{sample_market, RandomMarketSpec, SpecRule};
use affirm_core::PairedSample;

/// Uniform spec with `n` schools, lists of three, two seats each, one
/// reserved seat at the first `n^(1/4)` schools.
pub fn uniform_spec(n: usize) -> RandomMarketSpec {
    SpecRule::Uniform {
        list_length: 3,
        students_per_school: 1.0,
        minority_fraction: 0.3,
        capacity: 2,
        reserve_scale: 1.0,
        reserve_exponent: 0.25,
        reserve_per_school: 1,
    }
    .spec(n)
    .expect("valid rule")
}

pub fn uniform_sample(n: usize, seed: u64) -> PairedSample {
    sample_market(&uniform_spec(n), seed).expect("valid spec")
}
