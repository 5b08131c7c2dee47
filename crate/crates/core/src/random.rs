//! Random markets: weighted preference lists, uniform priorities, regularity
//! checks, and the small-list construction used to separate the two
//! affirmative actions under top trading cycles.
//!
//! Majority students take ids `0..n_majority`; minorities follow.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    Market, Policy, PreferenceOrder, PriorityOrder, Regime, SchoolId, StudentId, StudentType,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomMarketSpec {
    pub n_schools: usize,
    /// Number of schools each student lists.
    pub list_length: usize,
    pub majority_weights: Vec<f64>,
    pub minority_weights: Vec<f64>,
    pub n_majority: usize,
    pub n_minority: usize,
    pub capacities: Vec<u32>,
    /// Majority quota per school; the reserve view uses `capacity - quota`.
    pub majority_quotas: Vec<u32>,
}

impl RandomMarketSpec {
    pub fn n_students(&self) -> usize {
        self.n_majority + self.n_minority
    }

    pub fn quota_policy(&self) -> Policy {
        Policy::quota(self.majority_quotas.clone())
    }

    pub fn reserves(&self) -> Vec<u32> {
        self.capacities
            .iter()
            .zip(&self.majority_quotas)
            .map(|(&q, &m)| q.saturating_sub(m))
            .collect()
    }

    pub fn types(&self) -> Vec<StudentType> {
        let mut t = vec![StudentType::Majority; self.n_majority];
        t.resize(self.n_students(), StudentType::Minority);
        t
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_schools;
        let err = |msg: String| Err(Error::Spec(msg));
        for (name, len) in [
            ("majority_weights", self.majority_weights.len()),
            ("minority_weights", self.minority_weights.len()),
            ("capacities", self.capacities.len()),
            ("majority_quotas", self.majority_quotas.len()),
        ] {
            if len != n {
                return err(format!("{name} has {len} entries, expected {n}"));
            }
        }
        if self.list_length > n {
            return err(format!(
                "list_length {} exceeds {n} schools",
                self.list_length
            ));
        }
        for (c, (&q, &m)) in self
            .capacities
            .iter()
            .zip(&self.majority_quotas)
            .enumerate()
        {
            if q == 0 {
                return err(format!("school {c} has zero capacity"));
            }
            if m > q {
                return err(format!("school {c}: majority quota {m} above capacity {q}"));
            }
        }
        for (name, weights, students) in [
            ("majority", &self.majority_weights, self.n_majority),
            ("minority", &self.minority_weights, self.n_minority),
        ] {
            if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                return err(format!("{name} weights must be finite and nonnegative"));
            }
            let support = weights.iter().filter(|&&w| w > 0.0).count();
            if students > 0 && support < self.list_length {
                return err(format!(
                    "{name} weights have {support} positive entries, fewer than list_length {}",
                    self.list_length
                ));
            }
        }
        Ok(())
    }
}

/// Draws `k` distinct schools in sequence, each from `weights` renormalized
/// over the schools not yet drawn.
struct ListSampler {
    index: Option<WeightedIndex<f64>>,
    weights: Vec<f64>,
    k: usize,
    support: usize,
}

impl ListSampler {
    fn new(weights: &[f64], k: usize) -> Self {
        let support = weights.iter().filter(|&&w| w > 0.0).count();
        ListSampler {
            index: WeightedIndex::new(weights).ok(),
            weights: weights.to_vec(),
            k,
            support,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R, drawn: &mut Vec<bool>) -> PreferenceOrder {
        let mut list = Vec::with_capacity(self.k);
        let Some(index) = &self.index else {
            return PreferenceOrder::new(list);
        };
        drawn.clear();
        drawn.resize(self.weights.len(), false);
        if 2 * self.k <= self.support {
            // Redrawing on a repeat is the renormalized draw, and cheap while
            // most of the mass is still available.
            while list.len() < self.k {
                let c = index.sample(rng);
                if !drawn[c] {
                    drawn[c] = true;
                    list.push(SchoolId(c as u32));
                }
            }
        } else {
            let mut left: f64 = self.weights.iter().sum();
            while list.len() < self.k {
                let mut u = rng.gen::<f64>() * left;
                let mut pick = None;
                for (c, &w) in self.weights.iter().enumerate() {
                    if drawn[c] || w <= 0.0 {
                        continue;
                    }
                    pick = Some(c);
                    if u < w {
                        break;
                    }
                    u -= w;
                }
                let c = pick.expect("positive weight remains");
                drawn[c] = true;
                left -= self.weights[c];
                list.push(SchoolId(c as u32));
            }
        }
        PreferenceOrder::new(list)
    }
}

pub fn generate_preferences<R: Rng + ?Sized>(
    spec: &RandomMarketSpec,
    rng: &mut R,
) -> Result<Vec<PreferenceOrder>> {
    spec.validate()?;
    let majority = ListSampler::new(&spec.majority_weights, spec.list_length);
    let minority = ListSampler::new(&spec.minority_weights, spec.list_length);
    let mut drawn = Vec::new();
    let mut out = Vec::with_capacity(spec.n_students());
    for _ in 0..spec.n_majority {
        out.push(majority.sample(rng, &mut drawn));
    }
    for _ in 0..spec.n_minority {
        out.push(minority.sample(rng, &mut drawn));
    }
    Ok(out)
}

/// One uniform permutation of all students per school, everyone acceptable.
pub fn generate_priorities<R: Rng + ?Sized>(
    spec: &RandomMarketSpec,
    rng: &mut R,
) -> Vec<PriorityOrder> {
    let n = spec.n_students();
    let base: Vec<StudentId> = (0..n as u32).map(StudentId).collect();
    (0..spec.n_schools)
        .map(|_| {
            let mut order = base.clone();
            order.shuffle(rng);
            PriorityOrder::all_acceptable(order)
        })
        .collect()
}

/// The same realized market under the quota policy and under its
/// corresponding reserve policy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairedSample {
    pub quota: Market,
    pub reserve: Market,
}

impl PairedSample {
    pub fn view(&self, regime: Regime) -> &Market {
        match regime {
            Regime::Quota => &self.quota,
            Regime::Reserve => &self.reserve,
        }
    }
}

/// Per-trial generator: a ChaCha stream keyed by the seed and market size,
/// with the trial index as stream number.
pub fn trial_rng(seed: u64, n: usize, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, n as u64));
    rng.set_stream(trial);
    rng
}

fn mix(seed: u64, n: u64) -> u64 {
    // splitmix64 finalizer over the pair.
    let mut z = seed ^ n.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn sample_market_with<R: Rng + ?Sized>(
    spec: &RandomMarketSpec,
    rng: &mut R,
) -> Result<PairedSample> {
    let preferences = generate_preferences(spec, rng)?;
    let priorities = generate_priorities(spec, rng);
    let quota = Market::new(
        spec.types(),
        spec.capacities.clone(),
        priorities,
        preferences,
        spec.quota_policy(),
    );
    let reserve = quota.corresponding();
    Ok(PairedSample { quota, reserve })
}

/// Trial 0 of `seed`.
pub fn sample_market(spec: &RandomMarketSpec, seed: u64) -> Result<PairedSample> {
    sample_market_with(spec, &mut trial_rng(seed, spec.n_schools, 0))
}

/// How condition (4) measures the reserve vector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReserveMeasure {
    /// Largest reserve at any single school.
    #[default]
    PerSchoolMax,
    /// Total reserved seats.
    Total,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityParams {
    pub a: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub theta: f64,
    pub r: f64,
    pub k: usize,
    pub q_bar: u32,
    #[serde(default)]
    pub reserve_measure: ReserveMeasure,
}

impl RegularityParams {
    pub fn is_admissible(&self) -> bool {
        (0.0..0.5).contains(&self.a)
            && self.lambda > 0.0
            && self.kappa > 0.0
            && self.theta > 0.0
            && self.r >= 1.0
            && self.k > 0
            && self.q_bar > 0
    }
}

/// Outcome of the six regularity conditions for one market size.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityReport {
    pub n: usize,
    pub conditions: [bool; 6],
}

impl RegularityReport {
    pub fn all(&self) -> bool {
        self.conditions.iter().all(|&c| c)
    }
}

fn ratio_ok(weights: &[f64], r: f64) -> bool {
    let positive = weights.iter().copied().filter(|&w| w > 0.0);
    let (lo, hi) = positive.fold((f64::INFINITY, 0.0f64), |(lo, hi), w| {
        (lo.min(w), hi.max(w))
    });
    hi == 0.0 || hi <= r * lo * (1.0 + 1e-12)
}

pub fn check_regularity(
    specs: &[RandomMarketSpec],
    params: &RegularityParams,
) -> Vec<RegularityReport> {
    specs
        .iter()
        .map(|spec| {
            let n = spec.n_schools as f64;
            let students = spec.n_students() as f64;
            let seats: f64 = spec.capacities.iter().map(|&q| q as f64).sum();
            let reserves = spec.reserves();
            let reserve_size = match params.reserve_measure {
                ReserveMeasure::PerSchoolMax => reserves.iter().copied().max().unwrap_or(0) as f64,
                ReserveMeasure::Total => reserves.iter().map(|&r| r as f64).sum(),
            };
            let conditions = [
                spec.list_length <= params.k,
                spec.capacities.iter().all(|&q| q <= params.q_bar),
                students <= params.lambda * n && seats - students >= params.kappa * n,
                reserve_size <= params.theta * n.powf(params.a),
                ratio_ok(&spec.majority_weights, params.r)
                    && ratio_ok(&spec.minority_weights, params.r),
                spec.majority_quotas
                    .iter()
                    .zip(&spec.majority_weights)
                    .all(|(&m, &w)| m > 0 || w == 0.0),
            ];
            RegularityReport {
                n: spec.n_schools,
                conditions,
            }
        })
        .collect()
}

/// Number of two-seat schools in the construction: `ceil(delta * n)`,
/// capped at `n`.
pub fn two_seat_count(n: usize, delta: f64) -> usize {
    ((delta * n as f64).ceil() as usize).min(n)
}

/// Number of minority students in the construction: `ceil(t * n)`, capped
/// at `n`.
pub fn minority_count(n: usize, t: f64) -> usize {
    ((t * n as f64).ceil() as usize).min(n)
}

/// `n` schools and `n` students, each listing one school uniformly at
/// random. The first `ceil(delta n)` schools have two seats with a majority
/// quota of one (a reserve of one); the others have one seat and no binding
/// policy. The last `ceil(t n)` students are minorities. At `n = 1` the
/// single school always gets two seats.
pub fn appendix_spec(n: usize, t: f64, delta: f64) -> RandomMarketSpec {
    let two = two_seat_count(n, delta);
    let minorities = minority_count(n, t);
    let mut capacities = vec![1; n];
    capacities[..two].fill(2);
    RandomMarketSpec {
        n_schools: n,
        list_length: 1.min(n),
        majority_weights: vec![1.0; n],
        minority_weights: vec![1.0; n],
        n_majority: n - minorities,
        n_minority: minorities,
        capacities,
        majority_quotas: vec![1; n],
    }
}

/// A family of specs indexed by the number of schools.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpecRule {
    /// The construction of [`appendix_spec`].
    Appendix {
        minority_fraction: f64,
        two_seat_fraction: f64,
    },
    /// Uniform weights and a common capacity. The first
    /// `floor(reserve_scale * n^reserve_exponent / reserve_per_school)`
    /// schools reserve `reserve_per_school` seats; majorities give zero
    /// weight to schools left with no majority quota.
    Uniform {
        list_length: usize,
        students_per_school: f64,
        minority_fraction: f64,
        capacity: u32,
        reserve_scale: f64,
        reserve_exponent: f64,
        reserve_per_school: u32,
    },
}

impl SpecRule {
    pub fn spec(&self, n: usize) -> Result<RandomMarketSpec> {
        let spec = match *self {
            SpecRule::Appendix {
                minority_fraction,
                two_seat_fraction,
            } => appendix_spec(n, minority_fraction, two_seat_fraction),
            SpecRule::Uniform {
                list_length,
                students_per_school,
                minority_fraction,
                capacity,
                reserve_scale,
                reserve_exponent,
                reserve_per_school,
            } => {
                if reserve_per_school > capacity {
                    return Err(Error::Spec(format!(
                        "reserve_per_school {reserve_per_school} exceeds capacity {capacity}"
                    )));
                }
                let students = (students_per_school * n as f64).floor() as usize;
                let minorities =
                    ((minority_fraction * students as f64).ceil() as usize).min(students);
                let reserved = if reserve_per_school == 0 {
                    0
                } else {
                    let budget = reserve_scale * (n as f64).powf(reserve_exponent);
                    ((budget / reserve_per_school as f64).floor() as usize).min(n)
                };
                let mut quotas = vec![capacity; n];
                quotas[..reserved].fill(capacity - reserve_per_school);
                let majority_weights = quotas
                    .iter()
                    .map(|&m| if m == 0 { 0.0 } else { 1.0 })
                    .collect();
                RandomMarketSpec {
                    n_schools: n,
                    list_length: list_length.min(n),
                    majority_weights,
                    minority_weights: vec![1.0; n],
                    n_majority: students - minorities,
                    n_minority: minorities,
                    capacities: vec![capacity; n],
                    majority_quotas: quotas,
                }
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// A spec file: either an explicit spec or a rule with a size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpecDocument {
    Explicit(RandomMarketSpec),
    Rule {
        n: usize,
        #[serde(flatten)]
        rule: SpecRule,
    },
}

impl SpecDocument {
    pub fn resolve(&self) -> Result<RandomMarketSpec> {
        match self {
            SpecDocument::Explicit(spec) => {
                spec.validate()?;
                Ok(spec.clone())
            }
            SpecDocument::Rule { n, rule } => rule.spec(*n),
        }
    }

    /// Parses TOML, or JSON when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Ok(serde_json::from_str(text)?)
        } else {
            Ok(toml::from_str(text)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(n: usize, k: usize, students: usize) -> RandomMarketSpec {
        RandomMarketSpec {
            n_schools: n,
            list_length: k,
            majority_weights: vec![1.0; n],
            minority_weights: vec![1.0; n],
            n_majority: students,
            n_minority: 0,
            capacities: vec![1; n],
            majority_quotas: vec![1; n],
        }
    }

    #[test]
    fn full_lists_are_permutations() {
        let spec = uniform(5, 5, 50);
        let mut rng = trial_rng(1, 5, 0);
        for p in generate_preferences(&spec, &mut rng).unwrap() {
            let mut s: Vec<u32> = p.schools().iter().map(|c| c.0).collect();
            s.sort();
            assert_eq!(s, vec![0, 1, 2, 3, 4]);
        }
    }

    #[test]
    fn top_choice_is_uniform() {
        // Chi-square with 4 degrees of freedom; 20.5 is the 0.9996 quantile.
        let n = 5;
        let draws = 100_000;
        let spec = uniform(n, 1, draws);
        let mut rng = trial_rng(7, n, 0);
        let mut counts = vec![0f64; n];
        for p in generate_preferences(&spec, &mut rng).unwrap() {
            counts[p.schools()[0].index()] += 1.0;
        }
        let e = draws as f64 / n as f64;
        let chi2: f64 = counts.iter().map(|c| (c - e).powi(2) / e).sum();
        assert!(chi2 < 20.5, "chi2 = {chi2}");
    }

    #[test]
    fn renormalized_draws_match_exact_probabilities() {
        // Weights (3, 1): P(first = 0) = 3/4, P(list = [1, 0]) = 1/4. With
        // k = 2 the renormalizing path runs.
        let mut spec = uniform(2, 2, 40_000);
        spec.majority_weights = vec![3.0, 1.0];
        let mut rng = trial_rng(3, 2, 0);
        let firsts = generate_preferences(&spec, &mut rng)
            .unwrap()
            .iter()
            .filter(|p| p.schools()[0] == SchoolId(0))
            .count() as f64
            / 40_000.0;
        assert!((firsts - 0.75).abs() < 4.0 * (0.75f64 * 0.25 / 40_000.0).sqrt());

        // Three schools, weights (2, 1, 1), k = 1 takes the rejection path;
        // second position given first = 0 is uniform over {1, 2}.
        let mut spec = uniform(3, 2, 40_000);
        spec.majority_weights = vec![2.0, 1.0, 1.0];
        let prefs = generate_preferences(&spec, &mut trial_rng(4, 3, 0)).unwrap();
        // P(list = [1, 0]) = 1/4 * 2/3 = 1/6.
        let hits = prefs
            .iter()
            .filter(|p| p.schools() == [SchoolId(1), SchoolId(0)])
            .count() as f64
            / 40_000.0;
        assert!((hits - 1.0 / 6.0).abs() < 4.0 * (1.0 / 6.0 * 5.0 / 6.0 / 40_000.0f64).sqrt());
    }

    #[test]
    fn degenerate_minority_weights() {
        let mut spec = uniform(4, 1, 3);
        spec.n_minority = 10;
        spec.minority_weights = vec![1.0, 0.0, 0.0, 0.0];
        let prefs = generate_preferences(&spec, &mut trial_rng(2, 4, 0)).unwrap();
        assert!(prefs[3..].iter().all(|p| p.schools() == [SchoolId(0)]));
    }

    #[test]
    fn list_longer_than_support_is_an_error() {
        let mut spec = uniform(3, 2, 1);
        spec.majority_weights = vec![1.0, 0.0, 0.0];
        assert!(matches!(
            generate_preferences(&spec, &mut trial_rng(0, 3, 0)),
            Err(Error::Spec(_))
        ));
    }

    #[test]
    fn two_student_priorities_are_balanced() {
        let spec = uniform(1, 1, 2);
        let mut rng = trial_rng(5, 1, 0);
        let draws = 100_000;
        let first = (0..draws)
            .filter(|_| generate_priorities(&spec, &mut rng)[0].order()[0] == StudentId(0))
            .count() as f64
            / draws as f64;
        assert!((first - 0.5).abs() < 4.0 * (0.25f64 / draws as f64).sqrt());

        let one = uniform(1, 1, 1);
        assert_eq!(
            generate_priorities(&one, &mut rng)[0].order(),
            &[StudentId(0)]
        );
    }

    #[test]
    fn top_picks_of_two_schools_are_uncorrelated() {
        let spec = uniform(2, 1, 4);
        let mut rng = trial_rng(6, 2, 0);
        let draws = 50_000;
        let (mut sx, mut sy, mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for _ in 0..draws {
            let p = generate_priorities(&spec, &mut rng);
            let x = p[0].order()[0].0 as f64;
            let y = p[1].order()[0].0 as f64;
            sx += x;
            sy += y;
            sxy += x * y;
            sxx += x * x;
            syy += y * y;
        }
        let d = draws as f64;
        let cov = sxy / d - sx * sy / d / d;
        let corr = cov / ((sxx / d - (sx / d).powi(2)) * (syy / d - (sy / d).powi(2))).sqrt();
        assert!(corr.abs() < 0.02, "corr = {corr}");
    }

    #[test]
    fn sampling_is_deterministic_and_paired() {
        let spec = appendix_spec(20, 0.5, 0.5);
        let a = sample_market(&spec, 11).unwrap();
        let b = sample_market(&spec, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.quota.preferences(), a.reserve.preferences());
        assert_eq!(a.quota.priorities(), a.reserve.priorities());
        assert_eq!(
            crate::model::corresponding_policy(a.quota.policy(), a.quota.capacities()),
            *a.reserve.policy()
        );
        assert!(a.quota.validate().is_ok() && a.reserve.validate().is_ok());
    }

    #[test]
    fn different_seeds_differ() {
        let spec = appendix_spec(30, 0.5, 0.5);
        let base = sample_market(&spec, 0).unwrap();
        let same = (1..1000u64)
            .filter(|&s| sample_market(&spec, s).unwrap() == base)
            .count();
        assert_eq!(same, 0);
    }

    #[test]
    fn appendix_shape() {
        let spec = appendix_spec(4, 0.5, 0.5);
        assert_eq!(spec.capacities, vec![2, 2, 1, 1]);
        assert_eq!(spec.reserves(), vec![1, 1, 0, 0]);
        assert_eq!((spec.n_majority, spec.n_minority), (2, 2));
        assert_eq!(spec.list_length, 1);
        let one = appendix_spec(1, 0.5, 0.3);
        assert_eq!(one.capacities, vec![2]);
    }

    #[test]
    fn appendix_specs_are_regular() {
        let delta = 0.5;
        let params = RegularityParams {
            a: 0.0,
            theta: delta + 1.0,
            lambda: 1.0,
            kappa: delta / 2.0,
            r: 1.0,
            k: 1,
            q_bar: 2,
            reserve_measure: ReserveMeasure::PerSchoolMax,
        };
        assert!(params.is_admissible());
        let specs: Vec<_> = [4, 10, 50, 400]
            .iter()
            .map(|&n| appendix_spec(n, 0.5, delta))
            .collect();
        for report in check_regularity(&specs, &params) {
            assert!(report.all(), "{report:?}");
        }
        // Counting all reserved seats instead makes condition (4) fail.
        let total = RegularityParams {
            reserve_measure: ReserveMeasure::Total,
            ..params
        };
        assert!(!check_regularity(&specs, &total)[3].conditions[3]);
    }

    #[test]
    fn growing_reserves_break_condition_4() {
        let params = RegularityParams {
            a: 0.4,
            theta: 1.0,
            lambda: 1.0,
            kappa: 0.1,
            r: 1.0,
            k: 1,
            q_bar: 1000,
            reserve_measure: ReserveMeasure::Total,
        };
        let specs: Vec<_> = [10usize, 100, 1000]
            .iter()
            .map(|&n| {
                // One school reserves n seats.
                let mut s = uniform(n, 1, n / 2);
                s.capacities[0] = n as u32 + 1;
                s
            })
            .collect();
        let reports = check_regularity(&specs, &params);
        assert!(reports.iter().all(|r| !r.conditions[3]));
    }

    #[test]
    fn positive_weight_on_closed_school_breaks_condition_6() {
        let mut spec = uniform(3, 1, 3);
        spec.majority_quotas[1] = 0;
        let params = RegularityParams {
            a: 0.0,
            theta: 1.0,
            lambda: 1.0,
            kappa: 0.0001,
            r: 1.0,
            k: 1,
            q_bar: 1,
            reserve_measure: ReserveMeasure::PerSchoolMax,
        };
        let report = &check_regularity(&[spec.clone()], &params)[0];
        assert!(!report.conditions[5]);
        spec.majority_weights[1] = 0.0;
        assert!(check_regularity(&[spec], &params)[0].conditions[5]);
    }

    #[test]
    fn uniform_rule() {
        let rule = SpecRule::Uniform {
            list_length: 3,
            students_per_school: 1.0,
            minority_fraction: 0.5,
            capacity: 2,
            reserve_scale: 1.0,
            reserve_exponent: 0.4,
            reserve_per_school: 1,
        };
        let spec = rule.spec(100).unwrap();
        // 100^0.4 = 6.3 reserved seats, one per school.
        assert_eq!(spec.reserves().iter().filter(|&&r| r > 0).count(), 6);
        assert_eq!(spec.n_students(), 100);
        assert_eq!(spec.n_minority, 50);
    }

    #[test]
    fn spec_documents() {
        let doc = SpecDocument::parse(
            "n = 6\nrule = \"appendix\"\nminority_fraction = 0.5\ntwo_seat_fraction = 0.5\n",
        )
        .unwrap();
        assert_eq!(doc.resolve().unwrap(), appendix_spec(6, 0.5, 0.5));
        let explicit = serde_json::to_string(&appendix_spec(3, 0.5, 0.5)).unwrap();
        assert_eq!(
            SpecDocument::parse(&explicit).unwrap().resolve().unwrap(),
            appendix_spec(3, 0.5, 0.5)
        );
    }
}
