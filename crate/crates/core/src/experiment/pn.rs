//! How often top trading cycles under a quota and under the corresponding
//! reserve produce different matchings, and who gains when they do.

use serde::Serialize;

use super::{events::appendix_events, fold_trials, Proportion};
use crate::error::Result;
use crate::mechanism::{assign, Mechanism};
use crate::model::{Market, Matching};
use crate::random::{appendix_spec, sample_market_with, trial_rng, two_seat_count};
use crate::stability::{minority_pareto_compare, MinorityPareto};

/// Minority-welfare comparison of the quota outcome against the reserve
/// outcome, over trials where the two differ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ParetoCounts {
    pub q_dominates: u64,
    pub r_dominates: u64,
    pub equal: u64,
    pub incomparable: u64,
    /// Trials where at least one minority strictly prefers the quota
    /// outcome.
    pub some_minority_prefers_q: u64,
    /// Trials where at least one minority strictly prefers the reserve
    /// outcome.
    pub some_minority_prefers_r: u64,
}

impl ParetoCounts {
    pub fn record(&mut self, market: &Market, mu_q: &Matching, mu_r: &Matching) {
        match minority_pareto_compare(mu_q, mu_r, market) {
            MinorityPareto::Dominates => self.q_dominates += 1,
            MinorityPareto::DominatedBy => self.r_dominates += 1,
            MinorityPareto::EqualForMinorities => self.equal += 1,
            MinorityPareto::Incomparable => self.incomparable += 1,
        }
        let prefers = |a: &Matching, b: &Matching| {
            market
                .minorities()
                .any(|s| market.preference(s).prefers(a.school_of(s), b.school_of(s)))
        };
        self.some_minority_prefers_q += u64::from(prefers(mu_q, mu_r));
        self.some_minority_prefers_r += u64::from(prefers(mu_r, mu_q));
    }

    pub fn merge(self, o: ParetoCounts) -> ParetoCounts {
        ParetoCounts {
            q_dominates: self.q_dominates + o.q_dominates,
            r_dominates: self.r_dominates + o.r_dominates,
            equal: self.equal + o.equal,
            incomparable: self.incomparable + o.incomparable,
            some_minority_prefers_q: self.some_minority_prefers_q + o.some_minority_prefers_q,
            some_minority_prefers_r: self.some_minority_prefers_r + o.some_minority_prefers_r,
        }
    }

    pub fn total(&self) -> u64 {
        self.q_dominates + self.r_dominates + self.equal + self.incomparable
    }
}

/// Classifies `(market, quota outcome, reserve outcome)` triples from
/// trials where the outcomes differ.
pub fn pareto_classification<'a, I>(trials: I) -> ParetoCounts
where
    I: IntoIterator<Item = (&'a Market, &'a Matching, &'a Matching)>,
{
    let mut counts = ParetoCounts::default();
    for (market, mu_q, mu_r) in trials {
        counts.record(market, mu_q, mu_r);
    }
    counts
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PnEstimate {
    pub n: usize,
    pub t: f64,
    pub delta: f64,
    pub trials: u64,
    pub seed: u64,
    pub differ: u64,
    pub p_hat: f64,
    pub se: f64,
    /// Trials where all four separating events hold.
    pub events: u64,
    /// Among those, `c1` holds `s1` under the quota.
    pub pi1_hits: u64,
    /// Among those, `c1` holds `s2` under the reserve.
    pub pi2_hits: u64,
    pub pi1_hat: f64,
    pub pi2_hat: f64,
    pub pareto: ParetoCounts,
}

impl PnEstimate {
    pub fn proportion(&self) -> Proportion {
        Proportion::new(self.differ, self.trials)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Counts {
    differ: u64,
    events: u64,
    pi1: u64,
    pi2: u64,
    pareto: ParetoCounts,
}

impl Counts {
    fn merge(self, o: Counts) -> Counts {
        Counts {
            differ: self.differ + o.differ,
            events: self.events + o.events,
            pi1: self.pi1 + o.pi1,
            pi2: self.pi2 + o.pi2,
            pareto: self.pareto.merge(o.pareto),
        }
    }
}

/// One estimate per market size, each from `trials` paired samples of
/// `appendix_spec(n, t, delta)`.
pub fn estimate_pn(
    n_grid: &[usize],
    t: f64,
    delta: f64,
    trials: u64,
    seed: u64,
) -> Result<Vec<PnEstimate>> {
    n_grid
        .iter()
        .map(|&n| {
            let spec = appendix_spec(n, t, delta);
            spec.validate()?;
            let two_seat = two_seat_count(n, delta);
            let c = fold_trials(
                trials,
                Counts::default(),
                |trial| {
                    let sample = sample_market_with(&spec, &mut trial_rng(seed, n, trial))
                        .expect("valid spec");
                    let mu_q = assign(Mechanism::Ttc, &sample.quota, sample.quota.preferences());
                    let mu_r = assign(
                        Mechanism::Ttc,
                        &sample.reserve,
                        sample.reserve.preferences(),
                    );
                    let mut c = Counts::default();
                    if mu_q != mu_r {
                        c.differ = 1;
                        c.pareto.record(&sample.quota, &mu_q, &mu_r);
                    }
                    if let Some(ev) = appendix_events(&sample.quota, two_seat) {
                        c.events = 1;
                        c.pi1 = u64::from(mu_q.roster(ev.c1) == [ev.s1]);
                        c.pi2 = u64::from(mu_r.roster(ev.c1) == [ev.s2]);
                    }
                    c
                },
                Counts::merge,
            );
            let p = Proportion::new(c.differ, trials);
            Ok(PnEstimate {
                n,
                t,
                delta,
                trials,
                seed,
                differ: c.differ,
                p_hat: p.frequency(),
                se: p.se(),
                events: c.events,
                pi1_hits: c.pi1,
                pi2_hits: c.pi2,
                pi1_hat: Proportion::new(c.pi1, c.events).frequency(),
                pi2_hat: Proportion::new(c.pi2, c.events).frequency(),
                pareto: c.pareto,
            })
        })
        .collect()
}
