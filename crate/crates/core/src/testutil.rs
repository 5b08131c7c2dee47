use proptest::prelude::*;

use crate::model::{Market, Policy, PreferenceOrder, PriorityOrder, StudentId, StudentType};

/// Small valid markets: 1..=max_students students, 1..=max_schools schools
/// with capacity 1 or 2, random cutoffs, random policies of either regime.
pub fn arb_small_market(max_students: usize, max_schools: usize) -> impl Strategy<Value = Market> {
    (1..=max_students, 1..=max_schools).prop_flat_map(|(n_students, n_schools)| {
        let students: Vec<u32> = (0..n_students as u32).collect();
        let schools: Vec<u32> = (0..n_schools as u32).collect();
        let types = prop::collection::vec(any::<bool>(), n_students);
        let caps = prop::collection::vec(1u32..=2, n_schools);
        let prios = prop::collection::vec(
            (
                Just(students.clone()).prop_shuffle(),
                prop_oneof![3 => Just(n_students), 1 => 0..=n_students],
            ),
            n_schools,
        );
        let prefs = prop::collection::vec(
            prop::sample::subsequence(schools.clone(), 0..=n_schools).prop_shuffle(),
            n_students,
        );
        let values = prop::collection::vec(0u32..=2, n_schools);
        (types, caps, prios, prefs, values, any::<bool>()).prop_map(
            |(types, caps, prios, prefs, values, quota)| {
                let values: Vec<u32> = values.iter().zip(&caps).map(|(&v, &q)| v.min(q)).collect();
                let policy = if quota {
                    Policy::quota(values)
                } else {
                    Policy::reserve(values)
                };
                Market::new(
                    types
                        .into_iter()
                        .map(|m| {
                            if m {
                                StudentType::Minority
                            } else {
                                StudentType::Majority
                            }
                        })
                        .collect(),
                    caps,
                    prios
                        .into_iter()
                        .map(|(order, cutoff)| {
                            PriorityOrder::new(order.into_iter().map(StudentId).collect(), cutoff)
                        })
                        .collect(),
                    prefs
                        .into_iter()
                        .map(PreferenceOrder::from_indices)
                        .collect(),
                    policy,
                )
            },
        )
    })
}
