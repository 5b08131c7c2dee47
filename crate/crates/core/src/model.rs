//! Market, policy and matching types.
//!
//! Students and schools are identified by dense indices starting at zero so
//! that the mechanisms and the simulator can use plain vectors as lookup
//! tables. A [`Market`] is an immutable value; the bulky per-student and
//! per-school tables sit behind `Arc`s so that the quota and reserve views of
//! the same sampled market share storage.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StudentId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SchoolId(pub u32);

impl StudentId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl SchoolId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for StudentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

impl fmt::Display for SchoolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StudentType {
    Majority,
    Minority,
}

impl StudentType {
    pub fn is_minority(self) -> bool {
        matches!(self, StudentType::Minority)
    }
}

/// Which affirmative action a market applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Per-school caps on admitted majority students.
    Quota,
    /// Per-school seats on which minority applicants take precedence.
    Reserve,
}

impl Regime {
    pub fn other(self) -> Regime {
        match self {
            Regime::Quota => Regime::Reserve,
            Regime::Reserve => Regime::Quota,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Regime::Quota => 'Q',
            Regime::Reserve => 'R',
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "q" | "quota" => Ok(Regime::Quota),
            "r" | "reserve" => Ok(Regime::Reserve),
            _ => Err(Error::UnknownRegime(s.to_string())),
        }
    }
}

/// A student's strict ranking of the schools she finds acceptable, most
/// preferred first. Being unmatched ranks right after the last listed school;
/// unlisted schools rank below being unmatched.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PreferenceOrder(Vec<SchoolId>);

impl PreferenceOrder {
    pub fn new(schools: Vec<SchoolId>) -> Self {
        PreferenceOrder(schools)
    }

    pub fn from_indices<I: IntoIterator<Item = u32>>(indices: I) -> Self {
        PreferenceOrder(indices.into_iter().map(SchoolId).collect())
    }

    pub fn empty() -> Self {
        PreferenceOrder(Vec::new())
    }

    pub fn schools(&self) -> &[SchoolId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn top(&self) -> Option<SchoolId> {
        self.0.first().copied()
    }

    pub fn position(&self, school: SchoolId) -> Option<usize> {
        self.0.iter().position(|&c| c == school)
    }

    pub fn lists(&self, school: SchoolId) -> bool {
        self.0.contains(&school)
    }

    /// Position of an outcome in this order: listed schools by index, being
    /// unmatched at `len`, unlisted schools at `len + 1`.
    pub fn rank(&self, outcome: Option<SchoolId>) -> usize {
        match outcome {
            None => self.0.len(),
            Some(c) => self.position(c).unwrap_or(self.0.len() + 1),
        }
    }

    /// Strict preference of `a` over `b`.
    pub fn prefers(&self, a: Option<SchoolId>, b: Option<SchoolId>) -> bool {
        self.rank(a) < self.rank(b)
    }

    /// Weak preference: the same outcome, or a strictly better one.
    pub fn weakly_prefers(&self, a: Option<SchoolId>, b: Option<SchoolId>) -> bool {
        a == b || self.prefers(a, b)
    }
}

impl AsRef<[SchoolId]> for PreferenceOrder {
    fn as_ref(&self) -> &[SchoolId] {
        &self.0
    }
}

impl fmt::Display for PreferenceOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("(empty)");
        }
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A school's strict priority over all students, highest first. Students at
/// positions `cutoff..` rank below the empty seat and are unacceptable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriorityOrder {
    order: Vec<StudentId>,
    cutoff: usize,
    rank: Vec<u32>,
}

const UNRANKED: u32 = u32::MAX;

impl PriorityOrder {
    pub fn new(order: Vec<StudentId>, cutoff: usize) -> Self {
        let len = order.iter().map(|s| s.index() + 1).max().unwrap_or(0);
        let mut rank = vec![UNRANKED; len];
        for (i, s) in order.iter().enumerate() {
            if rank[s.index()] == UNRANKED {
                rank[s.index()] = i as u32;
            }
        }
        PriorityOrder {
            order,
            cutoff,
            rank,
        }
    }

    /// Every student acceptable.
    pub fn all_acceptable(order: Vec<StudentId>) -> Self {
        let cutoff = order.len();
        Self::new(order, cutoff)
    }

    pub fn from_indices<I: IntoIterator<Item = u32>>(indices: I) -> Self {
        Self::all_acceptable(indices.into_iter().map(StudentId).collect())
    }

    pub fn order(&self) -> &[StudentId] {
        &self.order
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn rank_of(&self, s: StudentId) -> Option<usize> {
        match self.rank.get(s.index()) {
            Some(&r) if r != UNRANKED => Some(r as usize),
            _ => None,
        }
    }

    #[inline]
    pub(crate) fn rank_or_max(&self, s: StudentId) -> u32 {
        self.rank.get(s.index()).copied().unwrap_or(UNRANKED)
    }

    pub fn is_acceptable(&self, s: StudentId) -> bool {
        self.rank_of(s).is_some_and(|r| r < self.cutoff)
    }

    /// `a` has strictly higher priority than `b`.
    pub fn prefers(&self, a: StudentId, b: StudentId) -> bool {
        self.rank_or_max(a) < self.rank_or_max(b)
    }
}

/// Per-school affirmative action values for one regime: majority quotas
/// `q^M` under [`Regime::Quota`], minority reserves `r^m` under
/// [`Regime::Reserve`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Policy {
    pub regime: Regime,
    pub values: Vec<u32>,
}

impl Policy {
    pub fn quota(values: Vec<u32>) -> Self {
        Policy {
            regime: Regime::Quota,
            values,
        }
    }

    pub fn reserve(values: Vec<u32>) -> Self {
        Policy {
            regime: Regime::Reserve,
            values,
        }
    }

    /// The policy with no effect: quotas at capacity or zero reserves.
    pub fn inert(regime: Regime, capacities: &[u32]) -> Self {
        match regime {
            Regime::Quota => Policy::quota(capacities.to_vec()),
            Regime::Reserve => Policy::reserve(vec![0; capacities.len()]),
        }
    }

    pub fn corresponding(&self, capacities: &[u32]) -> Policy {
        corresponding_policy(self, capacities)
    }

    /// This policy expressed in `regime`.
    pub fn in_regime(&self, regime: Regime, capacities: &[u32]) -> Policy {
        if self.regime == regime {
            self.clone()
        } else {
            self.corresponding(capacities)
        }
    }
}

/// Maps a quota policy to its reserve counterpart and back, through
/// `r^m_c = q_c - q^M_c`.
pub fn corresponding_policy(policy: &Policy, capacities: &[u32]) -> Policy {
    let values = policy
        .values
        .iter()
        .zip(capacities)
        .map(|(&v, &q)| q.saturating_sub(v))
        .collect();
    Policy {
        regime: policy.regime.other(),
        values,
    }
}

/// A school choice market with one affirmative action policy in force.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Market {
    types: Arc<[StudentType]>,
    capacities: Arc<[u32]>,
    priorities: Arc<[PriorityOrder]>,
    preferences: Arc<[PreferenceOrder]>,
    policy: Policy,
}

impl Market {
    /// Builds a market without checking it; see [`validate_market`].
    pub fn new(
        types: Vec<StudentType>,
        capacities: Vec<u32>,
        priorities: Vec<PriorityOrder>,
        preferences: Vec<PreferenceOrder>,
        policy: Policy,
    ) -> Self {
        Market {
            types: types.into(),
            capacities: capacities.into(),
            priorities: priorities.into(),
            preferences: preferences.into(),
            policy,
        }
    }

    pub fn n_students(&self) -> usize {
        self.types.len()
    }

    pub fn n_schools(&self) -> usize {
        self.capacities.len()
    }

    pub fn students(&self) -> impl ExactSizeIterator<Item = StudentId> + '_ {
        (0..self.types.len() as u32).map(StudentId)
    }

    pub fn schools(&self) -> impl ExactSizeIterator<Item = SchoolId> + '_ {
        (0..self.capacities.len() as u32).map(SchoolId)
    }

    pub fn types(&self) -> &[StudentType] {
        &self.types
    }

    #[inline]
    pub fn student_type(&self, s: StudentId) -> StudentType {
        self.types[s.index()]
    }

    #[inline]
    pub fn is_minority(&self, s: StudentId) -> bool {
        self.types[s.index()].is_minority()
    }

    pub fn minorities(&self) -> impl Iterator<Item = StudentId> + '_ {
        self.students().filter(|&s| self.is_minority(s))
    }

    pub fn capacities(&self) -> &[u32] {
        &self.capacities
    }

    #[inline]
    pub fn capacity(&self, c: SchoolId) -> u32 {
        self.capacities[c.index()]
    }

    pub fn priorities(&self) -> &[PriorityOrder] {
        &self.priorities
    }

    #[inline]
    pub fn priority(&self, c: SchoolId) -> &PriorityOrder {
        &self.priorities[c.index()]
    }

    pub fn preferences(&self) -> &[PreferenceOrder] {
        &self.preferences
    }

    #[inline]
    pub fn preference(&self, s: StudentId) -> &PreferenceOrder {
        &self.preferences[s.index()]
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    pub fn regime(&self) -> Regime {
        self.policy.regime
    }

    /// Effective majority quota: the policy value under a quota, capacity
    /// under a reserve.
    #[inline]
    pub fn majority_quota(&self, c: SchoolId) -> u32 {
        match self.policy.regime {
            Regime::Quota => self.policy.values[c.index()],
            Regime::Reserve => self.capacities[c.index()],
        }
    }

    /// Effective minority reserve: the policy value under a reserve, zero
    /// under a quota.
    #[inline]
    pub fn minority_reserve(&self, c: SchoolId) -> u32 {
        match self.policy.regime {
            Regime::Quota => 0,
            Regime::Reserve => self.policy.values[c.index()],
        }
    }

    #[inline]
    pub fn is_acceptable(&self, c: SchoolId, s: StudentId) -> bool {
        self.priorities[c.index()].is_acceptable(s)
    }

    pub fn with_policy(&self, policy: Policy) -> Market {
        Market {
            policy,
            ..self.clone()
        }
    }

    pub fn with_preferences(&self, preferences: Vec<PreferenceOrder>) -> Market {
        Market {
            preferences: preferences.into(),
            ..self.clone()
        }
    }

    pub fn with_types(&self, types: Vec<StudentType>) -> Market {
        Market {
            types: types.into(),
            ..self.clone()
        }
    }

    /// The same market under the corresponding policy of the other regime.
    pub fn corresponding(&self) -> Market {
        self.with_policy(self.policy.corresponding(&self.capacities))
    }

    /// The same market under `regime`, converting the policy if needed.
    pub fn in_regime(&self, regime: Regime) -> Market {
        if regime == self.regime() {
            self.clone()
        } else {
            self.corresponding()
        }
    }

    pub fn validate(&self) -> ValidationReport {
        validate_market(self)
    }

    pub(crate) fn ensure_valid(&self) -> crate::Result<()> {
        let report = self.validate();
        if report.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidMarket(report))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    PreferenceCount {
        expected: usize,
        got: usize,
    },
    PriorityCount {
        expected: usize,
        got: usize,
    },
    PolicyLength {
        expected: usize,
        got: usize,
    },
    DanglingSchool {
        student: StudentId,
        school: SchoolId,
    },
    DuplicateSchool {
        student: StudentId,
        school: SchoolId,
    },
    DanglingStudent {
        school: SchoolId,
        student: StudentId,
    },
    NotAPermutation {
        school: SchoolId,
    },
    CutoffOutOfRange {
        school: SchoolId,
        cutoff: usize,
    },
    ZeroCapacity {
        school: SchoolId,
    },
    PolicyBound {
        school: SchoolId,
        value: u32,
        capacity: u32,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            PreferenceCount { expected, got } => {
                write!(f, "{got} preference lists for {expected} students")
            }
            PriorityCount { expected, got } => {
                write!(f, "{got} priority orders for {expected} schools")
            }
            PolicyLength { expected, got } => {
                write!(f, "{got} policy values for {expected} schools")
            }
            DanglingSchool { student, school } => {
                write!(f, "{student} lists nonexistent school {school}")
            }
            DuplicateSchool { student, school } => {
                write!(f, "{student} lists {school} more than once")
            }
            DanglingStudent { school, student } => {
                write!(f, "{school} ranks nonexistent student {student}")
            }
            NotAPermutation { school } => {
                write!(f, "{school} priority is not a permutation of all students")
            }
            CutoffOutOfRange { school, cutoff } => {
                write!(f, "{school} acceptability cutoff {cutoff} out of range")
            }
            ZeroCapacity { school } => write!(f, "{school} has zero capacity"),
            PolicyBound {
                school,
                value,
                capacity,
            } => write!(
                f,
                "{school} policy value {value} exceeds its capacity {capacity}"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Warning {
    FewStudents(usize),
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::FewStudents(n) => write!(f, "market has {n} students (fewer than 2)"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  error: {v}")?;
        }
        for w in &self.warnings {
            writeln!(f, "  warning: {w}")?;
        }
        Ok(())
    }
}

pub fn validate_market(market: &Market) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n_students = market.n_students();
    let n_schools = market.n_schools();
    let v = &mut report.violations;

    if market.preferences.len() != n_students {
        v.push(Violation::PreferenceCount {
            expected: n_students,
            got: market.preferences.len(),
        });
    }
    if market.priorities.len() != n_schools {
        v.push(Violation::PriorityCount {
            expected: n_schools,
            got: market.priorities.len(),
        });
    }
    if market.policy.values.len() != n_schools {
        v.push(Violation::PolicyLength {
            expected: n_schools,
            got: market.policy.values.len(),
        });
    }

    for (i, pref) in market.preferences.iter().enumerate() {
        let student = StudentId(i as u32);
        let mut seen = vec![false; n_schools];
        for &school in pref.schools() {
            if school.index() >= n_schools {
                v.push(Violation::DanglingSchool { student, school });
            } else if std::mem::replace(&mut seen[school.index()], true) {
                v.push(Violation::DuplicateSchool { student, school });
            }
        }
    }

    for (j, prio) in market.priorities.iter().enumerate() {
        let school = SchoolId(j as u32);
        let mut seen = vec![false; n_students];
        let mut permutation = prio.order().len() == n_students;
        for &student in prio.order() {
            if student.index() >= n_students {
                v.push(Violation::DanglingStudent { school, student });
                permutation = false;
            } else if std::mem::replace(&mut seen[student.index()], true) {
                permutation = false;
            }
        }
        if !permutation {
            v.push(Violation::NotAPermutation { school });
        }
        if prio.cutoff() > n_students {
            v.push(Violation::CutoffOutOfRange {
                school,
                cutoff: prio.cutoff(),
            });
        }
    }

    for (j, &capacity) in market.capacities.iter().enumerate() {
        let school = SchoolId(j as u32);
        if capacity == 0 {
            v.push(Violation::ZeroCapacity { school });
        }
        if let Some(&value) = market.policy.values.get(j) {
            if value > capacity {
                v.push(Violation::PolicyBound {
                    school,
                    value,
                    capacity,
                });
            }
        }
    }

    if n_students < 2 {
        report.warnings.push(Warning::FewStudents(n_students));
    }
    report
}

/// An assignment of every student to a school or to herself, with the
/// school rosters derived from it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    assignment: Vec<Option<SchoolId>>,
    rosters: Vec<Vec<StudentId>>,
}

impl Matching {
    /// Rosters are sorted by student id. Assignments to schools at or above
    /// `n_schools` are kept but appear in no roster, so the matching fails the
    /// domain clause of [`check_feasible`].
    pub fn from_assignment(assignment: Vec<Option<SchoolId>>, n_schools: usize) -> Self {
        let mut rosters = vec![Vec::new(); n_schools];
        for (i, a) in assignment.iter().enumerate() {
            if let Some(c) = a {
                if let Some(r) = rosters.get_mut(c.index()) {
                    r.push(StudentId(i as u32));
                }
            }
        }
        Matching {
            assignment,
            rosters,
        }
    }

    pub fn unmatched(n_students: usize, n_schools: usize) -> Self {
        Self::from_assignment(vec![None; n_students], n_schools)
    }

    /// Builds a matching from school rosters; students in no roster are
    /// unmatched. A student listed at two schools keeps the later one.
    pub fn from_rosters(rosters: &[Vec<StudentId>], n_students: usize) -> Self {
        let mut assignment = vec![None; n_students];
        for (j, roster) in rosters.iter().enumerate() {
            for s in roster {
                if let Some(a) = assignment.get_mut(s.index()) {
                    *a = Some(SchoolId(j as u32));
                }
            }
        }
        Self::from_assignment(assignment, rosters.len())
    }

    pub fn n_students(&self) -> usize {
        self.assignment.len()
    }

    pub fn n_schools(&self) -> usize {
        self.rosters.len()
    }

    #[inline]
    pub fn school_of(&self, s: StudentId) -> Option<SchoolId> {
        self.assignment[s.index()]
    }

    pub fn roster(&self, c: SchoolId) -> &[StudentId] {
        &self.rosters[c.index()]
    }

    pub fn assignment(&self) -> &[Option<SchoolId>] {
        &self.assignment
    }

    pub fn rosters(&self) -> &[Vec<StudentId>] {
        &self.rosters
    }

    pub fn into_assignment(self) -> Vec<Option<SchoolId>> {
        self.assignment
    }

    pub fn majority_count(&self, c: SchoolId, market: &Market) -> usize {
        self.roster(c)
            .iter()
            .filter(|&&s| !market.is_minority(s))
            .count()
    }

    pub fn minority_count(&self, c: SchoolId, market: &Market) -> usize {
        self.roster(c)
            .iter()
            .filter(|&&s| market.is_minority(s))
            .count()
    }
}

impl fmt::Display for Matching {
    /// One `student -> school|self` line per student.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.assignment.iter().enumerate() {
            match a {
                Some(c) => writeln!(f, "{} -> {}", i, c.0)?,
                None => writeln!(f, "{i} -> self")?,
            }
        }
        Ok(())
    }
}

/// The four defining clauses of a matching.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeasibilityClause {
    /// (i) every student is assigned to an existing school or to herself.
    Domain,
    /// (ii) assignments and rosters agree.
    Consistency,
    /// (iii) no roster exceeds capacity.
    Capacity,
    /// (iv) no roster exceeds the majority quota.
    MajorityQuota,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Infeasibility {
    pub clause: FeasibilityClause,
    pub detail: String,
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "clause {:?}: {}", self.clause, self.detail)
    }
}

/// Checks the matching clauses, with the quota clause read from the market's
/// own policy.
pub fn check_feasible(matching: &Matching, market: &Market) -> Result<(), Infeasibility> {
    check_feasible_in(matching, market, market.regime())
}

/// Checks the matching clauses against `market`'s policy expressed in
/// `regime`. The quota clause is vacuous under a reserve, where `q^M = q`.
pub fn check_feasible_in(
    matching: &Matching,
    market: &Market,
    regime: Regime,
) -> Result<(), Infeasibility> {
    let fail = |clause, detail: String| Err(Infeasibility { clause, detail });

    if matching.n_students() != market.n_students() || matching.n_schools() != market.n_schools() {
        return fail(
            FeasibilityClause::Domain,
            format!(
                "matching is {}x{}, market is {}x{}",
                matching.n_students(),
                matching.n_schools(),
                market.n_students(),
                market.n_schools()
            ),
        );
    }
    for s in market.students() {
        if let Some(c) = matching.school_of(s) {
            if c.index() >= market.n_schools() {
                return fail(
                    FeasibilityClause::Domain,
                    format!("{s} assigned to nonexistent {c}"),
                );
            }
        }
    }
    let recomputed = Matching::from_assignment(matching.assignment.clone(), market.n_schools());
    if recomputed.rosters != matching.rosters {
        return fail(
            FeasibilityClause::Consistency,
            "rosters disagree with assignments".into(),
        );
    }
    let quotas = market
        .policy()
        .in_regime(Regime::Quota, market.capacities());
    for c in market.schools() {
        let roster = matching.roster(c);
        if roster.len() > market.capacity(c) as usize {
            return fail(
                FeasibilityClause::Capacity,
                format!(
                    "{c} admits {} students over capacity {}",
                    roster.len(),
                    market.capacity(c)
                ),
            );
        }
        if regime == Regime::Quota {
            let majorities = matching.majority_count(c, market);
            let quota = quotas.values[c.index()] as usize;
            if majorities > quota {
                return fail(
                    FeasibilityClause::MajorityQuota,
                    format!("{c} admits {majorities} majority students over quota {quota}"),
                );
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn example_market_is_valid() {
        let report = fixtures::example1_market(Regime::Quota).validate();
        assert!(report.is_ok(), "{report}");
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn dangling_school_reported_once() {
        let m = fixtures::example1_market(Regime::Quota);
        let mut prefs = m.preferences().to_vec();
        prefs[0] = PreferenceOrder::from_indices([1, 7]);
        let report = m.with_preferences(prefs).validate();
        assert_eq!(
            report.violations,
            vec![Violation::DanglingSchool {
                student: StudentId(0),
                school: SchoolId(7)
            }]
        );
    }

    #[test]
    fn quota_above_capacity_reported() {
        let m = fixtures::example1_market(Regime::Quota);
        let report = m.with_policy(Policy::quota(vec![2, 1, 1])).validate();
        assert_eq!(
            report.violations,
            vec![Violation::PolicyBound {
                school: SchoolId(0),
                value: 2,
                capacity: 1
            }]
        );
    }

    #[test]
    fn duplicates_and_bad_priorities() {
        let m = Market::new(
            vec![StudentType::Majority; 2],
            vec![1],
            vec![PriorityOrder::new(vec![StudentId(0), StudentId(0)], 3)],
            vec![
                PreferenceOrder::from_indices([0, 0]),
                PreferenceOrder::empty(),
            ],
            Policy::quota(vec![1]),
        );
        let report = m.validate();
        assert!(report.violations.contains(&Violation::DuplicateSchool {
            student: StudentId(0),
            school: SchoolId(0)
        }));
        assert!(report.violations.contains(&Violation::NotAPermutation {
            school: SchoolId(0)
        }));
        assert!(report.violations.contains(&Violation::CutoffOutOfRange {
            school: SchoolId(0),
            cutoff: 3
        }));
    }

    #[test]
    fn single_student_only_warns() {
        let m = Market::new(
            vec![StudentType::Minority],
            vec![1],
            vec![PriorityOrder::from_indices([0])],
            vec![PreferenceOrder::from_indices([0])],
            Policy::reserve(vec![1]),
        );
        let report = m.validate();
        assert!(report.is_ok());
        assert_eq!(report.warnings, vec![Warning::FewStudents(1)]);
    }

    #[test]
    fn corresponding_policy_of_example() {
        let q = Policy::quota(vec![1, 1, 1]);
        let r = corresponding_policy(&q, &[1, 3, 1]);
        assert_eq!(r, Policy::reserve(vec![0, 2, 0]));
        assert_eq!(corresponding_policy(&r, &[1, 3, 1]), q);
        assert_eq!(
            corresponding_policy(&Policy::quota(vec![1, 3, 1]), &[1, 3, 1]),
            Policy::reserve(vec![0, 0, 0])
        );
    }

    #[test]
    fn feasibility_of_example_outcomes() {
        let m = fixtures::example1_market(Regime::Quota);
        let mu = fixtures::matching_from_rosters(&m, &[&[4], &[0, 3], &[1]]);
        assert_eq!(check_feasible(&mu, &m), Ok(()));
        assert_eq!(check_feasible(&Matching::unmatched(5, 3), &m), Ok(()));

        let over = fixtures::matching_from_rosters(&m, &[&[], &[0, 1, 3], &[]]);
        let err = check_feasible(&over, &m).unwrap_err();
        assert_eq!(err.clause, FeasibilityClause::MajorityQuota);
        // Under the corresponding reserve the same roster is feasible.
        assert_eq!(check_feasible(&over, &m.corresponding()), Ok(()));
    }

    #[test]
    fn feasibility_domain_and_capacity() {
        let m = fixtures::example1_market(Regime::Reserve);
        let bad = Matching::from_assignment(vec![Some(SchoolId(9)), None, None, None, None], 3);
        assert_eq!(
            check_feasible(&bad, &m).unwrap_err().clause,
            FeasibilityClause::Domain
        );
        let full = fixtures::matching_from_rosters(&m, &[&[0, 1], &[], &[]]);
        assert_eq!(
            check_feasible(&full, &m).unwrap_err().clause,
            FeasibilityClause::Capacity
        );
    }

    #[test]
    fn preference_ranks() {
        let p = PreferenceOrder::from_indices([2, 0]);
        assert!(p.prefers(Some(SchoolId(2)), Some(SchoolId(0))));
        assert!(p.prefers(Some(SchoolId(0)), None));
        assert!(p.prefers(None, Some(SchoolId(1))));
        assert!(!p.prefers(None, None));
        assert!(p.weakly_prefers(Some(SchoolId(1)), Some(SchoolId(1))));
    }

    #[test]
    fn priority_cutoff() {
        let p = PriorityOrder::new(vec![StudentId(2), StudentId(0), StudentId(1)], 2);
        assert!(p.is_acceptable(StudentId(2)));
        assert!(p.is_acceptable(StudentId(0)));
        assert!(!p.is_acceptable(StudentId(1)));
        assert!(p.prefers(StudentId(0), StudentId(1)));
        assert_eq!(p.rank_of(StudentId(5)), None);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn policy_and_caps() -> impl Strategy<Value = (Policy, Vec<u32>)> {
            prop::collection::vec(1u32..5, 1..6).prop_flat_map(|caps| {
                let values: Vec<_> = caps.iter().map(|&q| 0..=q).collect();
                (any::<bool>(), values).prop_map(move |(quota, values)| {
                    let policy = if quota {
                        Policy::quota(values)
                    } else {
                        Policy::reserve(values)
                    };
                    (policy, caps.clone())
                })
            })
        }

        proptest! {
            #[test]
            fn corresponding_is_involution((policy, caps) in policy_and_caps()) {
                let there = corresponding_policy(&policy, &caps);
                prop_assert_ne!(there.regime, policy.regime);
                prop_assert_eq!(corresponding_policy(&there, &caps), policy);
            }

            #[test]
            fn reserve_feasibility_ignores_reserve_values(
                reserves in prop::collection::vec(0u32..=3, 3),
                assignment in prop::collection::vec(prop::option::of(0u32..3), 5),
            ) {
                let base = fixtures::example1_market(Regime::Reserve);
                let caps = base.capacities().to_vec();
                let reserves: Vec<u32> = reserves.iter().zip(&caps).map(|(&r, &q)| r.min(q)).collect();
                let mu = Matching::from_assignment(
                    assignment.into_iter().map(|a| a.map(SchoolId)).collect(), 3);
                let a = check_feasible(&mu, &base).is_ok();
                let b = check_feasible(&mu, &base.with_policy(Policy::reserve(reserves))).is_ok();
                prop_assert_eq!(a, b);
            }

            #[test]
            fn rosters_round_trip(
                assignment in prop::collection::vec(prop::option::of(0u32..4), 0..8),
            ) {
                let mu = Matching::from_assignment(
                    assignment.into_iter().map(|a| a.map(SchoolId)).collect(), 4);
                let back = Matching::from_rosters(mu.rosters(), mu.n_students());
                prop_assert_eq!(back, mu);
            }
        }
    }
}
