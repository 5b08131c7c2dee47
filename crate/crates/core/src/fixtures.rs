//! Worked markets with known outcomes, and the `verify` checklist built on
//! them.
//!
//! Schools and students are numbered from zero: `c1, c2, c3` are `0, 1, 2`
//! and `s1..s5` are `0..4`.

use std::fmt;

use crate::game::{is_nash, strategyproofness_probe, Game, StrategyProfile};
use crate::mechanism::{run_mechanism, Mechanism};
use crate::model::{
    Market, Matching, Policy, PreferenceOrder, PriorityOrder, Regime, StudentId, StudentType,
};
use crate::stability::{minority_pareto_compare, MinorityPareto};

/// Three schools and five students; students 3 and 4 are minorities.
/// Capacities (1, 3, 1), quotas (1, 1, 1), reserves (0, 2, 0).
pub fn example1_market(regime: Regime) -> Market {
    use StudentType::*;
    let up = PriorityOrder::from_indices([0, 1, 2, 3, 4]);
    let quota = Policy::quota(vec![1, 1, 1]);
    let capacities = vec![1, 3, 1];
    let policy = quota.in_regime(regime, &capacities);
    Market::new(
        vec![Majority, Majority, Majority, Minority, Minority],
        capacities,
        vec![up.clone(), up, PriorityOrder::from_indices([3, 4, 0, 1, 2])],
        Example1Profile::Truthful.preferences(),
        policy,
    )
}

/// The reported profiles of the manipulation example.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Example1Profile {
    /// Everyone truthful.
    Truthful,
    /// Student 1 reports only school 0 and student 4 reports only school 2.
    Prime,
    /// Student 1 reports only school 0 and student 2 reports only school 2.
    Hat,
    /// Student 2 reports only school 0.
    DoublePrime,
}

impl Example1Profile {
    pub fn preferences(self) -> Vec<PreferenceOrder> {
        let common = PreferenceOrder::from_indices([1, 0, 2]);
        let mut prefs = vec![
            common.clone(),
            common.clone(),
            common.clone(),
            common,
            PreferenceOrder::from_indices([0, 2, 1]),
        ];
        match self {
            Example1Profile::Truthful => {}
            Example1Profile::Prime => {
                prefs[1] = PreferenceOrder::from_indices([0]);
                prefs[4] = PreferenceOrder::from_indices([2]);
            }
            Example1Profile::Hat => {
                prefs[1] = PreferenceOrder::from_indices([0]);
                prefs[2] = PreferenceOrder::from_indices([2]);
            }
            Example1Profile::DoublePrime => {
                prefs[2] = PreferenceOrder::from_indices([0]);
            }
        }
        prefs
    }

    pub fn market(self, regime: Regime) -> Market {
        example1_market(regime).with_preferences(self.preferences())
    }

    pub fn profile(self) -> StrategyProfile {
        StrategyProfile(self.preferences())
    }
}

/// Two schools (capacities 2 and 1) and three students; student 2 is the
/// only minority. Quotas (1, 1), reserves (1, 0).
pub fn appendix_small_market(regime: Regime) -> Market {
    use StudentType::*;
    let capacities = vec![2, 1];
    let policy = Policy::quota(vec![1, 1]).in_regime(regime, &capacities);
    Market::new(
        vec![Majority, Majority, Minority],
        capacities,
        vec![
            PriorityOrder::from_indices([1, 2, 0]),
            PriorityOrder::from_indices([0, 1, 2]),
        ],
        vec![
            PreferenceOrder::from_indices([0]),
            PreferenceOrder::from_indices([1]),
            PreferenceOrder::from_indices([1]),
        ],
        policy,
    )
}

/// Builds a matching from per-school rosters of student indices.
pub fn matching_from_rosters(market: &Market, rosters: &[&[u32]]) -> Matching {
    let rosters: Vec<Vec<StudentId>> = rosters
        .iter()
        .map(|r| r.iter().copied().map(StudentId).collect())
        .collect();
    Matching::from_rosters(&rosters, market.n_students())
}

/// A named reproduction target: a market, a mechanism, and the expected
/// rosters.
#[derive(Clone, Debug)]
pub struct OutcomeFixture {
    pub name: &'static str,
    pub mechanism: Mechanism,
    pub market: Market,
    pub expected: Matching,
}

pub fn outcome_fixtures() -> Vec<OutcomeFixture> {
    use Example1Profile::*;
    let iam = |name, profile: Example1Profile, regime, rosters: &[&[u32]]| {
        let market = profile.market(regime);
        let expected = matching_from_rosters(&market, rosters);
        OutcomeFixture {
            name,
            mechanism: Mechanism::Iam,
            market,
            expected,
        }
    };
    let ttc = |name, regime, rosters: &[&[u32]]| {
        let market = appendix_small_market(regime);
        let expected = matching_from_rosters(&market, rosters);
        OutcomeFixture {
            name,
            mechanism: Mechanism::Ttc,
            market,
            expected,
        }
    };
    vec![
        iam(
            "example1/iam-q/truthful",
            Truthful,
            Regime::Quota,
            &[&[4], &[0, 3], &[1]],
        ),
        iam(
            "example1/iam-r/truthful",
            Truthful,
            Regime::Reserve,
            &[&[4], &[0, 1, 3], &[2]],
        ),
        iam(
            "example1/iam-q/prime",
            Prime,
            Regime::Quota,
            &[&[1], &[0, 3], &[4]],
        ),
        iam(
            "example1/iam-q/hat",
            Hat,
            Regime::Quota,
            &[&[1], &[0, 3, 4], &[2]],
        ),
        iam(
            "example1/iam-r/double-prime",
            DoublePrime,
            Regime::Reserve,
            &[&[2], &[0, 1, 3], &[4]],
        ),
        ttc("appendix/ttcm-q", Regime::Quota, &[&[0], &[1]]),
        ttc("appendix/ttcm-r", Regime::Reserve, &[&[0], &[2]]),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for FixtureCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}", self.name)?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> FixtureCheck {
    FixtureCheck {
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

/// Runs every published worked example and reports one line per claim.
pub fn verify() -> Vec<FixtureCheck> {
    let mut out = Vec::new();

    for fx in outcome_fixtures() {
        match run_mechanism(fx.mechanism, &fx.market) {
            Ok(mu) => {
                let detail = if mu == fx.expected {
                    String::new()
                } else {
                    format!("got {:?}", mu.assignment())
                };
                out.push(check(fx.name, mu == fx.expected, detail));
            }
            Err(e) => out.push(check(fx.name, false, e.to_string())),
        }
    }

    let q = Policy::quota(vec![1, 1, 1]);
    out.push(check(
        "example1/corresponding-reserve",
        q.corresponding(&[1, 3, 1]) == Policy::reserve(vec![0, 2, 0]),
        "",
    ));

    let game_q = Game::new(Mechanism::Iam, example1_market(Regime::Quota)).expect("valid");
    let game_r = Game::new(Mechanism::Iam, example1_market(Regime::Reserve)).expect("valid");

    let prime = is_nash(&Example1Profile::Prime.profile(), &game_q);
    out.push(check(
        "example1/iam-q/prime-is-equilibrium",
        prime.is_nash(),
        prime.to_string(),
    ));

    let truthful_q = is_nash(&game_q.truthful_profile(), &game_q);
    let s2_witness = truthful_q.deviation.as_ref().is_some_and(|d| {
        d.student == StudentId(1) && d.report == PreferenceOrder::from_indices([0])
    });
    out.push(check(
        "example1/iam-q/truthful-s2-deviates",
        s2_witness,
        truthful_q.to_string(),
    ));

    let truthful_r = is_nash(&game_r.truthful_profile(), &game_r);
    let s3_witness = truthful_r.deviation.as_ref().is_some_and(|d| {
        d.student == StudentId(2) && d.report == PreferenceOrder::from_indices([0])
    });
    out.push(check(
        "example1/iam-r/truthful-only-s3-deviates",
        s3_witness,
        truthful_r.to_string(),
    ));

    let dp = is_nash(&Example1Profile::DoublePrime.profile(), &game_r);
    out.push(check(
        "example1/iam-r/double-prime-is-equilibrium",
        dp.is_nash(),
        dp.to_string(),
    ));

    for regime in [Regime::Quota, Regime::Reserve] {
        let name = format!(
            "example1/ttcm-{}/strategy-proof",
            regime.letter().to_ascii_lowercase()
        );
        match strategyproofness_probe(Mechanism::Ttc, &example1_market(regime)) {
            Ok(v) => out.push(check(name, v.is_empty(), format!("{} deviations", v.len()))),
            Err(e) => out.push(check(name, false, e.to_string())),
        }
    }

    let market = appendix_small_market(Regime::Quota);
    let mu_q = run_mechanism(Mechanism::Ttc, &market).expect("valid");
    let mu_r = run_mechanism(Mechanism::Ttc, &market.corresponding()).expect("valid");
    let rel = minority_pareto_compare(&mu_r, &mu_q, &market);
    out.push(check(
        "appendix/ttcm-r-dominates-for-minorities",
        rel == MinorityPareto::Dominates,
        format!("{rel:?}"),
    ));

    out
}
