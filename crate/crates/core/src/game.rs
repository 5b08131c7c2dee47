//! The preference revelation game induced by a mechanism: students report
//! preference orders, the mechanism runs on the reports, and each student
//! evaluates the outcome with her true preferences.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mechanism::{assign, Mechanism};
use crate::model::{Market, Matching, PreferenceOrder, Regime, SchoolId, StudentId};
use crate::stability::is_stable;

pub use crate::stability::DEFAULT_ENUMERATION_BOUND;

/// A mechanism on a fixed market. The market's preferences are the truthful
/// ones used for payoffs.
#[derive(Clone, Debug)]
pub struct Game {
    pub mechanism: Mechanism,
    pub market: Market,
}

/// One report per student.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StrategyProfile(pub Vec<PreferenceOrder>);

impl StrategyProfile {
    pub fn reports(&self) -> &[PreferenceOrder] {
        &self.0
    }
}

impl fmt::Display for StrategyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}: {p}", StudentId(i as u32))?;
        }
        Ok(())
    }
}

impl Game {
    pub fn new(mechanism: Mechanism, market: Market) -> Result<Self> {
        market.ensure_valid()?;
        Ok(Game { mechanism, market })
    }

    pub fn regime(&self) -> Regime {
        self.market.regime()
    }

    pub fn truthful_profile(&self) -> StrategyProfile {
        StrategyProfile(self.market.preferences().to_vec())
    }

    /// Every report a student may make.
    pub fn strategies(&self) -> Vec<PreferenceOrder> {
        let n = self.market.n_schools();
        enumerate_strategies(n, n)
    }

    pub fn outcome(&self, profile: &StrategyProfile) -> Matching {
        assert_eq!(
            profile.0.len(),
            self.market.n_students(),
            "one report per student"
        );
        assign(self.mechanism, &self.market, &profile.0)
    }

    fn prefers(&self, s: StudentId, a: Option<SchoolId>, b: Option<SchoolId>) -> bool {
        self.market.preference(s).prefers(a, b)
    }
}

/// All strict orderings of subsets of `n_schools` schools with at most
/// `max_len` entries, the empty report included. Lexicographic order:
/// `[], [c0], [c0 c1], [c0 c1 c2], [c0 c2], ...`.
pub fn enumerate_strategies(n_schools: usize, max_len: usize) -> Vec<PreferenceOrder> {
    fn extend(
        prefix: &mut Vec<u32>,
        used: &mut [bool],
        max_len: usize,
        out: &mut Vec<PreferenceOrder>,
    ) {
        out.push(PreferenceOrder::from_indices(prefix.iter().copied()));
        if prefix.len() == max_len {
            return;
        }
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                prefix.push(c as u32);
                extend(prefix, used, max_len, out);
                prefix.pop();
                used[c] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(
        &mut Vec::new(),
        &mut vec![false; n_schools],
        max_len.min(n_schools),
        &mut out,
    );
    out
}

/// A profitable unilateral misreport.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deviation {
    pub student: StudentId,
    pub report: PreferenceOrder,
    pub from: Option<SchoolId>,
    pub to: Option<SchoolId>,
}

impl fmt::Display for Deviation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |c: Option<SchoolId>| c.map_or("self".to_string(), |c| c.to_string());
        write!(
            f,
            "{} reports [{}] and moves {} -> {}",
            self.student,
            self.report,
            show(self.from),
            show(self.to)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NashCheck {
    /// The first profitable deviation, scanning students by id and reports
    /// in lexicographic order.
    pub deviation: Option<Deviation>,
}

impl NashCheck {
    pub fn is_nash(&self) -> bool {
        self.deviation.is_none()
    }
}

impl fmt::Display for NashCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.deviation {
            None => f.write_str("no profitable deviation"),
            Some(d) => write!(f, "{d}"),
        }
    }
}

pub fn is_nash(profile: &StrategyProfile, game: &Game) -> NashCheck {
    let base = game.outcome(profile);
    let strategies = game.strategies();
    let mut reports: Vec<&PreferenceOrder> = profile.0.iter().collect();
    for s in game.market.students() {
        let from = base.school_of(s);
        for report in &strategies {
            reports[s.index()] = report;
            let to = assign(game.mechanism, &game.market, &reports).school_of(s);
            if game.prefers(s, to, from) {
                return NashCheck {
                    deviation: Some(Deviation {
                        student: s,
                        report: report.clone(),
                        from,
                        to,
                    }),
                };
            }
        }
        reports[s.index()] = &profile.0[s.index()];
    }
    NashCheck { deviation: None }
}

/// Every equilibrium outcome, each with the first profile (in mixed-radix
/// order, student 0 most significant) that supports it.
#[derive(Clone, Debug, Default)]
pub struct NashOutcomes {
    pub outcomes: BTreeMap<Matching, StrategyProfile>,
    pub profiles: u64,
    pub equilibria: u64,
}

impl NashOutcomes {
    pub fn matchings(&self) -> impl Iterator<Item = &Matching> {
        self.outcomes.keys()
    }
}

/// Exhaustive search over all strategy profiles. Outcomes of every profile
/// are tabulated once, so each unilateral deviation is a table lookup.
pub fn nash_outcome_set(game: &Game, bound: u128) -> Result<NashOutcomes> {
    let market = &game.market;
    let n = market.n_students();
    let m_schools = market.n_schools();
    let strategies = game.strategies();
    let k = strategies.len();
    let size = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > bound {
        return Err(Error::TooLarge {
            what: "strategy profile space",
            size,
            bound,
        });
    }
    let total = size as usize;
    // place[i] is the weight of student i's digit.
    let place: Vec<usize> = (0..n).map(|i| k.pow((n - 1 - i) as u32)).collect();
    let digit = |p: usize, i: usize| (p / place[i]) % k;
    let self_code = m_schools as u16;

    // table[p * n + i] is student i's school under profile p.
    let mut table = vec![0u16; total * n.max(1)];
    if n > 0 {
        table
            .par_chunks_mut(n * 256)
            .enumerate()
            .for_each(|(chunk, out)| {
                let mut reports: Vec<&PreferenceOrder> = Vec::with_capacity(n);
                for (j, row) in out.chunks_mut(n).enumerate() {
                    let p = chunk * 256 + j;
                    reports.clear();
                    reports.extend((0..n).map(|i| &strategies[digit(p, i)]));
                    let mu = assign(game.mechanism, market, &reports);
                    for (i, cell) in row.iter_mut().enumerate() {
                        *cell = mu.assignment()[i].map_or(self_code, |c| c.0 as u16);
                    }
                }
            });
    }

    // rank[i][code]: position of the outcome in student i's true order.
    let rank: Vec<Vec<usize>> = market
        .students()
        .map(|s| {
            let pref = market.preference(s);
            (0..=m_schools)
                .map(|c| pref.rank((c < m_schools).then_some(SchoolId(c as u32))))
                .collect()
        })
        .collect();

    let equilibria: Vec<usize> = (0..total)
        .into_par_iter()
        .filter(|&p| {
            (0..n).all(|i| {
                let current = rank[i][table[p * n + i] as usize];
                let base = p - digit(p, i) * place[i];
                (0..k).all(|d| rank[i][table[(base + d * place[i]) * n + i] as usize] >= current)
            })
        })
        .collect();

    let mut result = NashOutcomes {
        profiles: total as u64,
        equilibria: equilibria.len() as u64,
        ..NashOutcomes::default()
    };
    for p in equilibria {
        let assignment = (0..n)
            .map(|i| {
                let code = table[p * n + i];
                (code != self_code).then_some(SchoolId(code as u32))
            })
            .collect();
        let mu = Matching::from_assignment(assignment, m_schools);
        result.outcomes.entry(mu).or_insert_with(|| {
            StrategyProfile((0..n).map(|i| strategies[digit(p, i)].clone()).collect())
        });
    }
    Ok(result)
}

/// The profile in which each matched student ranks her school first and the
/// rest of her true list after it. Unmatched students report nothing.
pub fn construct_first_choice_equilibrium(
    matching: &Matching,
    game: &Game,
) -> Result<StrategyProfile> {
    let market = &game.market;
    if matching.n_students() != market.n_students() {
        return Err(Error::MatchingShape {
            expected: market.n_students(),
            got: matching.n_students(),
        });
    }
    let regime = game.regime();
    if !is_stable(matching, market, regime) {
        return Err(Error::NotStable(regime));
    }
    let reports = market
        .students()
        .map(|s| match matching.school_of(s) {
            None => PreferenceOrder::empty(),
            Some(c) => PreferenceOrder::new(
                std::iter::once(c)
                    .chain(
                        market
                            .preference(s)
                            .schools()
                            .iter()
                            .copied()
                            .filter(|&d| d != c),
                    )
                    .collect(),
            ),
        })
        .collect();
    Ok(StrategyProfile(reports))
}

/// Upper bound on `students * strategies` for [`strategyproofness_probe`].
pub const PROBE_BOUND: u128 = 1_000_000;

/// Every profitable unilateral misreport against truthful play.
pub fn strategyproofness_probe(mechanism: Mechanism, market: &Market) -> Result<Vec<Deviation>> {
    market.ensure_valid()?;
    let n = market.n_schools();
    // Number of reports: sum over k of n!/(n-k)!.
    let mut count: u128 = 1;
    let mut term: u128 = 1;
    for j in 0..n as u128 {
        term = term.saturating_mul(n as u128 - j);
        count = count.saturating_add(term);
    }
    let size = count.saturating_mul(market.n_students() as u128);
    if size > PROBE_BOUND {
        return Err(Error::TooLarge {
            what: "deviation scan",
            size,
            bound: PROBE_BOUND,
        });
    }
    let strategies = enumerate_strategies(n, n);
    let truthful = assign(mechanism, market, market.preferences());
    let mut reports: Vec<&PreferenceOrder> = market.preferences().iter().collect();
    let mut out = Vec::new();
    for s in market.students() {
        let from = truthful.school_of(s);
        for report in &strategies {
            reports[s.index()] = report;
            let to = assign(mechanism, market, &reports).school_of(s);
            if market.preference(s).prefers(to, from) {
                out.push(Deviation {
                    student: s,
                    report: report.clone(),
                    from,
                    to,
                });
            }
        }
        reports[s.index()] = market.preference(s);
    }
    Ok(out)
}
