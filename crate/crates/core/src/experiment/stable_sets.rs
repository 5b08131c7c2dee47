//! How often the quota and reserve stable sets coincide on small random
//! markets, computed by exhaustive enumeration.

use serde::Serialize;

use super::{fold_trials, Proportion};
use crate::error::{Error, Result};
use crate::model::{check_feasible_in, Matching, Regime};
use crate::random::{sample_market_with, trial_rng, SpecRule};
use crate::stability::{is_stable, stable_set};

/// A reserve-stable matching that is quota-feasible but not quota-stable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InclusionWitness {
    pub trial: u64,
    pub matching: Vec<Option<u32>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StableEqualityRow {
    pub n: usize,
    pub trials: u64,
    /// Trials skipped because enumeration exceeded the bound.
    pub skipped: u64,
    pub equal: u64,
    pub fraction: f64,
    pub se: f64,
    /// Reserve-stable matchings that violate the quota feasibility clause.
    pub r_stable_q_infeasible: u64,
    /// Reserve-stable, quota-feasible matchings that are not quota-stable.
    pub inclusion_violations: u64,
    /// Up to a few violations, lowest trial first.
    pub witnesses: Vec<InclusionWitness>,
}

const MAX_WITNESSES: usize = 5;

#[derive(Clone, Debug, Default)]
struct Counts {
    done: u64,
    skipped: u64,
    equal: u64,
    infeasible: u64,
    violations: u64,
    witnesses: Vec<InclusionWitness>,
}

impl Counts {
    fn merge(mut self, o: Counts) -> Counts {
        self.done += o.done;
        self.skipped += o.skipped;
        self.equal += o.equal;
        self.infeasible += o.infeasible;
        self.violations += o.violations;
        self.witnesses.extend(o.witnesses);
        self.witnesses
            .sort_by(|a, b| (a.trial, &a.matching).cmp(&(b.trial, &b.matching)));
        self.witnesses.truncate(MAX_WITNESSES);
        self
    }
}

fn encode(m: &Matching) -> Vec<Option<u32>> {
    m.assignment().iter().map(|c| c.map(|c| c.0)).collect()
}

pub fn stable_set_equality_experiment(
    n_grid: &[usize],
    rule: &SpecRule,
    trials: u64,
    seed: u64,
    bound: u128,
) -> Result<Vec<StableEqualityRow>> {
    n_grid
        .iter()
        .map(|&n| {
            let spec = rule.spec(n)?;
            let c = fold_trials(
                trials,
                Counts::default(),
                |trial| {
                    let sample = sample_market_with(&spec, &mut trial_rng(seed, n, trial))
                        .expect("valid spec");
                    let market = &sample.quota;
                    let sets = stable_set(market, Regime::Quota, bound)
                        .and_then(|q| Ok((q, stable_set(market, Regime::Reserve, bound)?)));
                    let mut c = Counts::default();
                    let (xi_q, xi_r) = match sets {
                        Ok(s) => s,
                        Err(Error::TooLarge { .. }) => {
                            c.skipped = 1;
                            return c;
                        }
                        Err(e) => panic!("stable set enumeration failed: {e}"),
                    };
                    c.done = 1;
                    c.equal = u64::from(xi_q.same_members(&xi_r));
                    for mu in xi_r.iter() {
                        if check_feasible_in(mu, market, Regime::Quota).is_err() {
                            c.infeasible += 1;
                        } else if !is_stable(mu, market, Regime::Quota) {
                            c.violations += 1;
                            if c.witnesses.len() < MAX_WITNESSES {
                                c.witnesses.push(InclusionWitness {
                                    trial,
                                    matching: encode(mu),
                                });
                            }
                        }
                    }
                    c
                },
                Counts::merge,
            );
            let p = Proportion::new(c.equal, c.done);
            Ok(StableEqualityRow {
                n,
                trials,
                skipped: c.skipped,
                equal: c.equal,
                fraction: p.frequency(),
                se: p.se(),
                r_stable_q_infeasible: c.infeasible,
                inclusion_violations: c.violations,
                witnesses: c.witnesses,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::DEFAULT_ENUMERATION_BOUND;

    fn rule(minority_fraction: f64, students_per_school: f64) -> SpecRule {
        SpecRule::Uniform {
            list_length: 2,
            students_per_school,
            minority_fraction,
            capacity: 2,
            reserve_scale: 1.0,
            reserve_exponent: 0.0,
            reserve_per_school: 1,
        }
    }

    #[test]
    fn crowded_small_markets_differ_sometimes() {
        // Four students over two schools of two seats: collisions everywhere.
        let rows = stable_set_equality_experiment(
            &[2],
            &rule(0.5, 2.0),
            300,
            2,
            DEFAULT_ENUMERATION_BOUND,
        )
        .unwrap();
        assert!(rows[0].fraction < 1.0);
        assert_eq!(rows[0].skipped, 0);
    }

    #[test]
    fn without_minorities_differences_come_from_quota_infeasibility() {
        // With no minorities the minority clauses never fire and the reserve
        // never binds, so every reserve-stable matching that is also
        // quota-feasible is quota-stable; the sets can still differ through
        // reserve-stable matchings that exceed the quota.
        let rows = stable_set_equality_experiment(
            &[3, 4],
            &rule(0.0, 1.0),
            200,
            5,
            DEFAULT_ENUMERATION_BOUND,
        )
        .unwrap();
        for r in &rows {
            assert_eq!(r.inclusion_violations, 0, "{r:?}");
            if r.equal < r.trials {
                assert!(r.r_stable_q_infeasible > 0);
            }
        }
    }

    #[test]
    fn bound_skips() {
        let rows = stable_set_equality_experiment(&[3], &rule(0.5, 1.0), 10, 0, 2).unwrap();
        assert_eq!(rows[0].skipped, 10);
        assert!(rows[0].fraction.is_nan());
    }
}
