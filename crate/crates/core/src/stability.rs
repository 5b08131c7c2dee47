//! Blocking pairs, Q-/R-stability, and brute-force enumeration of feasible
//! and stable matchings.
//!
//! A pair `(s, c)` can block only if `s` strictly prefers `c` to her
//! assignment. It then blocks when `c` has an empty seat and finds `s`
//! acceptable (under a quota, a majority also needs the quota to have room),
//! or when one of the regime's priority clauses holds:
//!
//! | clause | quota regime | reserve regime |
//! |---|---|---|
//! | minority | `s` outranks some student at `c` | same |
//! | majority, room | fewer than `q^M_c` majorities at `c`; `s` outranks some student at `c` | more than `r^m_c` minorities at `c`; `s` outranks some student at `c` |
//! | majority, at limit | exactly `q^M_c` majorities at `c`; `s` outranks some majority at `c` | at most `r^m_c` minorities at `c`; `s` outranks some majority at `c` |
//!
//! Stability additionally requires individual rationality: every matched
//! student lists her school and is acceptable to it. Unmatched students are
//! allowed.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{check_feasible_in, Market, Matching, Policy, Regime, SchoolId, StudentId};

/// Default cap on the number of candidate assignments an enumeration may
/// visit.
pub const DEFAULT_ENUMERATION_BOUND: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockingClause {
    CapacitySlack,
    /// Clause (i).
    Minority,
    /// Clause (ii).
    MajorityRoom,
    /// Clause (iii).
    MajorityAtLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BlockingPair {
    pub student: StudentId,
    pub school: SchoolId,
    pub clause: BlockingClause,
    pub regime: Regime,
}

/// Effective quota and reserve per school for one regime.
struct Limits {
    quota: Vec<u32>,
    reserve: Vec<u32>,
}

impl Limits {
    fn new(market: &Market, regime: Regime) -> Self {
        let caps = market.capacities();
        let policy: Policy = market.policy().in_regime(regime, caps);
        match regime {
            Regime::Quota => Limits {
                reserve: policy.corresponding(caps).values,
                quota: policy.values,
            },
            Regime::Reserve => Limits {
                quota: policy.corresponding(caps).values,
                reserve: policy.values,
            },
        }
    }
}

/// The clause under which `(s, c)` blocks `matching`, if any. Assumes `s`
/// strictly prefers `c` to her assignment.
fn blocking_clause(
    s: StudentId,
    c: SchoolId,
    matching: &Matching,
    market: &Market,
    regime: Regime,
    limits: &Limits,
) -> Option<BlockingClause> {
    let roster = matching.roster(c);
    let prio = market.priority(c);
    // An empty seat is no use to a majority whose quota is already full.
    let quota_full = regime == Regime::Quota
        && !market.is_minority(s)
        && matching.majority_count(c, market) >= limits.quota[c.index()] as usize;
    if roster.len() < market.capacity(c) as usize && prio.is_acceptable(s) && !quota_full {
        return Some(BlockingClause::CapacitySlack);
    }
    let outranks_someone = roster.iter().any(|&t| prio.prefers(s, t));
    if market.is_minority(s) {
        return outranks_someone.then_some(BlockingClause::Minority);
    }
    let outranks_majority = roster
        .iter()
        .any(|&t| !market.is_minority(t) && prio.prefers(s, t));
    let room = match regime {
        Regime::Quota => {
            let majorities = matching.majority_count(c, market);
            let quota = limits.quota[c.index()] as usize;
            if majorities == quota {
                false
            } else if majorities < quota {
                true
            } else {
                // Over quota: infeasible, rejected before we get here.
                return None;
            }
        }
        Regime::Reserve => matching.minority_count(c, market) > limits.reserve[c.index()] as usize,
    };
    if room {
        outranks_someone.then_some(BlockingClause::MajorityRoom)
    } else {
        outranks_majority.then_some(BlockingClause::MajorityAtLimit)
    }
}

/// Every blocking pair of `matching` under `regime`, ordered by student then
/// school. The matching must be feasible in that regime.
pub fn find_blocking_pairs(
    matching: &Matching,
    market: &Market,
    regime: Regime,
) -> Result<Vec<BlockingPair>> {
    check_feasible_in(matching, market, regime).map_err(Error::Infeasible)?;
    let limits = Limits::new(market, regime);
    let mut out = Vec::new();
    for s in market.students() {
        let pref = market.preference(s);
        let current = pref.rank(matching.school_of(s));
        let mut better: Vec<SchoolId> = pref.schools()[..current.min(pref.len())].to_vec();
        better.sort();
        for c in better {
            if let Some(clause) = blocking_clause(s, c, matching, market, regime, &limits) {
                out.push(BlockingPair {
                    student: s,
                    school: c,
                    clause,
                    regime,
                });
            }
        }
    }
    Ok(out)
}

/// Every matched student lists her school and is acceptable to it.
pub fn is_individually_rational(matching: &Matching, market: &Market) -> bool {
    market.students().all(|s| match matching.school_of(s) {
        None => true,
        Some(c) => market.preference(s).lists(c) && market.is_acceptable(c, s),
    })
}

pub fn is_stable(matching: &Matching, market: &Market, regime: Regime) -> bool {
    if check_feasible_in(matching, market, regime).is_err()
        || !is_individually_rational(matching, market)
    {
        return false;
    }
    let limits = Limits::new(market, regime);
    market.students().all(|s| {
        let pref = market.preference(s);
        let current = pref.rank(matching.school_of(s));
        pref.schools()[..current.min(pref.len())]
            .iter()
            .all(|&c| blocking_clause(s, c, matching, market, regime, &limits).is_none())
    })
}

/// Iterator over all feasible matchings in which each student is unmatched
/// or at a school she lists.
pub struct MatchingEnumerator<'a> {
    market: &'a Market,
    options: Vec<Vec<Option<SchoolId>>>,
    quota: Vec<u32>,
    digits: Vec<usize>,
    used: Vec<u32>,
    majorities: Vec<u32>,
    pos: usize,
    started: bool,
    finished: bool,
}

impl<'a> MatchingEnumerator<'a> {
    fn place(&mut self, i: usize) -> bool {
        let Some(c) = self.options[i][self.digits[i]] else {
            return true;
        };
        let j = c.index();
        let minority = self.market.is_minority(StudentId(i as u32));
        if self.used[j] >= self.market.capacity(c)
            || (!minority && self.majorities[j] >= self.quota[j])
        {
            return false;
        }
        self.used[j] += 1;
        if !minority {
            self.majorities[j] += 1;
        }
        true
    }

    fn unplace(&mut self, i: usize) {
        if let Some(c) = self.options[i][self.digits[i]] {
            self.used[c.index()] -= 1;
            if !self.market.is_minority(StudentId(i as u32)) {
                self.majorities[c.index()] -= 1;
            }
        }
    }
}

impl Iterator for MatchingEnumerator<'_> {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        if self.finished {
            return None;
        }
        let n = self.options.len();
        if self.started {
            if n == 0 {
                self.finished = true;
                return None;
            }
            self.pos = n - 1;
            self.unplace(self.pos);
            self.digits[self.pos] += 1;
        }
        self.started = true;
        loop {
            if self.pos == n {
                let assignment = (0..n).map(|i| self.options[i][self.digits[i]]).collect();
                return Some(Matching::from_assignment(
                    assignment,
                    self.market.n_schools(),
                ));
            }
            let i = self.pos;
            if self.digits[i] >= self.options[i].len() {
                if i == 0 {
                    self.finished = true;
                    return None;
                }
                self.digits[i] = 0;
                self.pos -= 1;
                self.unplace(self.pos);
                self.digits[self.pos] += 1;
            } else if self.place(i) {
                self.pos += 1;
            } else {
                self.digits[i] += 1;
            }
        }
    }
}

/// Streams every feasible matching (under `regime`'s feasibility clauses)
/// that assigns each student to herself or to a school she lists.
pub fn enumerate_matchings(
    market: &Market,
    regime: Regime,
    bound: u128,
) -> Result<MatchingEnumerator<'_>> {
    let options: Vec<Vec<Option<SchoolId>>> = market
        .students()
        .map(|s| {
            std::iter::once(None)
                .chain(
                    market
                        .preference(s)
                        .schools()
                        .iter()
                        .filter(|c| c.index() < market.n_schools())
                        .map(|&c| Some(c)),
                )
                .collect()
        })
        .collect();
    let size = options
        .iter()
        .try_fold(1u128, |acc, o| acc.checked_mul(o.len() as u128))
        .unwrap_or(u128::MAX);
    if size > bound {
        return Err(Error::TooLarge {
            what: "matching enumeration",
            size,
            bound,
        });
    }
    let quota = Limits::new(market, regime).quota;
    let quota = match regime {
        Regime::Quota => quota,
        Regime::Reserve => market.capacities().to_vec(),
    };
    let n = options.len();
    Ok(MatchingEnumerator {
        market,
        options,
        quota,
        digits: vec![0; n],
        used: vec![0; market.n_schools()],
        majorities: vec![0; market.n_schools()],
        pos: 0,
        started: false,
        finished: false,
    })
}

/// A set of stable matchings in canonical (sorted) order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableSet {
    pub regime: Regime,
    pub matchings: BTreeSet<Matching>,
}

impl StableSet {
    pub fn len(&self) -> usize {
        self.matchings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matchings.is_empty()
    }

    pub fn contains(&self, m: &Matching) -> bool {
        self.matchings.contains(m)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Matching> {
        self.matchings.iter()
    }

    /// Same members, regardless of regime tag.
    pub fn same_members(&self, other: &StableSet) -> bool {
        self.matchings == other.matchings
    }
}

pub fn stable_set(market: &Market, regime: Regime, bound: u128) -> Result<StableSet> {
    let matchings = enumerate_matchings(market, regime, bound)?
        .filter(|m| is_stable(m, market, regime))
        .collect();
    Ok(StableSet { regime, matchings })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MinorityPareto {
    /// The first matching Pareto dominates the second for minorities.
    Dominates,
    DominatedBy,
    /// Every minority has the same assignment in both.
    EqualForMinorities,
    Incomparable,
}

/// Compares two matchings from the minorities' point of view, using the
/// market's (truthful) preferences.
pub fn minority_pareto_compare(mu: &Matching, other: &Matching, market: &Market) -> MinorityPareto {
    let mut same = true;
    let (mut mu_weak, mut mu_strict) = (true, false);
    let (mut other_weak, mut other_strict) = (true, false);
    for s in market.minorities() {
        let (a, b) = (mu.school_of(s), other.school_of(s));
        if a == b {
            continue;
        }
        same = false;
        let pref = market.preference(s);
        if pref.prefers(a, b) {
            mu_strict = true;
            other_weak = false;
        } else if pref.prefers(b, a) {
            other_strict = true;
            mu_weak = false;
        } else {
            // Different assignments she ranks equally (two unlisted schools).
            mu_weak = false;
            other_weak = false;
        }
    }
    if same {
        MinorityPareto::EqualForMinorities
    } else if mu_weak && mu_strict {
        MinorityPareto::Dominates
    } else if other_weak && other_strict {
        MinorityPareto::DominatedBy
    } else {
        MinorityPareto::Incomparable
    }
}
