//! The four events behind the lower bound on the probability that the two
//! affirmative actions separate under top trading cycles, on markets from
//! [`appendix_spec`].
//!
//! `c1` is the first one-seat school. With two minorities `s1, s2` and
//! schools `c2` (two seats) and `c3`:
//!
//! 1. exactly two students rank `c1` first, and both are minorities;
//! 2. apart from `c1`, exactly one school ranks `s1` first and it has two
//!    seats (`c2`), and exactly one school ranks `s2` first (`c3`);
//! 3. apart from `s1, s2`, exactly one student ranks `c2` first (`s3`) and
//!    exactly one ranks `c3` first (`s4`);
//! 4. `c1` ranks `s3` and `s4` above both `s1` and `s2`.
//!
//! The first event's closed form counts ordered minority pairs, so it is
//! twice the probability of the event itself; both are reported.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::{fold_trials, Proportion};
use crate::error::{Error, Result};
use crate::model::{Market, SchoolId, StudentId};
use crate::random::{
    appendix_spec, generate_preferences, generate_priorities, trial_rng, two_seat_count,
};

const E: f64 = std::f64::consts::E;

/// The participants once all four events hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AppendixEvents {
    pub c1: SchoolId,
    pub c2: SchoolId,
    pub c3: SchoolId,
    pub s1: StudentId,
    pub s2: StudentId,
    pub s3: StudentId,
    pub s4: StudentId,
}

/// How far through the event chain a market gets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Progress {
    e1: bool,
    e2: bool,
    e3: bool,
    e4: bool,
}

fn students_ranking_first(market: &Market, c: SchoolId) -> Vec<StudentId> {
    market
        .students()
        .filter(|&s| market.preference(s).top() == Some(c))
        .collect()
}

/// The unique school other than `skip` that ranks `s` first, if exactly one.
fn unique_school_topping(market: &Market, s: StudentId, skip: SchoolId) -> Option<SchoolId> {
    let mut found = None;
    for c in market.schools().filter(|&c| c != skip) {
        if market.priority(c).order().first() == Some(&s) {
            if found.is_some() {
                return None;
            }
            found = Some(c);
        }
    }
    found
}

/// The unique student outside `skip` ranking `c` first, if exactly one.
fn unique_student_ranking(market: &Market, c: SchoolId, skip: [StudentId; 2]) -> Option<StudentId> {
    let mut found = None;
    for s in market.students().filter(|s| !skip.contains(s)) {
        if market.preference(s).top() == Some(c) {
            if found.is_some() {
                return None;
            }
            found = Some(s);
        }
    }
    found
}

fn progress(
    market: &Market,
    c1: SchoolId,
    two_seat: usize,
    pair: (StudentId, StudentId),
) -> (Progress, Option<AppendixEvents>) {
    let mut p = Progress {
        e1: true,
        ..Progress::default()
    };
    let (s1, s2) = pair;
    let c2 = unique_school_topping(market, s1, c1).filter(|c| c.index() < two_seat);
    let c3 = unique_school_topping(market, s2, c1);
    let (Some(c2), Some(c3)) = (c2, c3) else {
        return (p, None);
    };
    p.e2 = true;
    let s3 = unique_student_ranking(market, c2, [s1, s2]);
    let s4 = unique_student_ranking(market, c3, [s1, s2]);
    let (Some(s3), Some(s4)) = (s3, s4) else {
        return (p, None);
    };
    p.e3 = true;
    let prio = market.priority(c1);
    let low = prio.rank_of(s1).min(prio.rank_of(s2));
    let high = prio.rank_of(s3).max(prio.rank_of(s4));
    if high >= low {
        return (p, None);
    }
    p.e4 = true;
    (
        p,
        Some(AppendixEvents {
            c1,
            c2,
            c3,
            s1,
            s2,
            s3,
            s4,
        }),
    )
}

/// Checks the four events on a realized market with `two_seat` leading
/// two-seat schools, trying both labelings of the minority pair.
pub fn appendix_events(market: &Market, two_seat: usize) -> Option<AppendixEvents> {
    if two_seat >= market.n_schools() {
        return None;
    }
    let c1 = SchoolId(two_seat as u32);
    let first = students_ranking_first(market, c1);
    let [a, b] = first[..] else {
        return None;
    };
    if !(market.is_minority(a) && market.is_minority(b)) {
        return None;
    }
    progress(market, c1, two_seat, (a, b))
        .1
        .or_else(|| progress(market, c1, two_seat, (b, a)).1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EventRow {
    pub statistic: &'static str,
    pub hits: u64,
    pub samples: u64,
    pub frequency: f64,
    pub se: f64,
    pub formula: Option<f64>,
    pub limit: Option<f64>,
}

impl EventRow {
    fn new(
        statistic: &'static str,
        p: Proportion,
        formula: Option<f64>,
        limit: Option<f64>,
    ) -> Self {
        EventRow {
            statistic,
            hits: p.hits,
            samples: p.samples,
            frequency: p.frequency(),
            se: p.se(),
            formula,
            limit,
        }
    }

    /// Distance from the closed form in standard errors.
    pub fn z_score(&self) -> Option<f64> {
        self.formula.map(|f| (self.frequency - f) / self.se)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EventStats {
    pub n: usize,
    pub t: f64,
    pub delta: f64,
    pub trials: u64,
    pub seed: u64,
    pub rows: Vec<EventRow>,
}

impl EventStats {
    pub fn row(&self, statistic: &str) -> Option<&EventRow> {
        self.rows.iter().find(|r| r.statistic == statistic)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Counts {
    e1: u64,
    e2: u64,
    e3: u64,
    e4: u64,
    e3_analog: u64,
    e4_analog: u64,
}

impl Counts {
    fn merge(self, o: Counts) -> Counts {
        Counts {
            e1: self.e1 + o.e1,
            e2: self.e2 + o.e2,
            e3: self.e3 + o.e3,
            e4: self.e4 + o.e4,
            e3_analog: self.e3_analog + o.e3_analog,
            e4_analog: self.e4_analog + o.e4_analog,
        }
    }
}

pub fn event1_formula(n: usize, minorities: usize) -> f64 {
    let (n, m) = (n as f64, minorities as f64);
    m * (m - 1.0) / (n * n) * (1.0 - 1.0 / n).powf(n - 2.0)
}

pub fn event2_formula(n: usize, two_seat: usize) -> f64 {
    let (n, d) = (n as f64, two_seat as f64);
    d * (n - 2.0) / (n * n) * (1.0 - 2.0 / n).powf(n - 3.0)
}

pub fn event3_formula(n: usize) -> f64 {
    let n = n as f64;
    (n - 2.0) * (n - 3.0) / ((n - 1.0) * (n - 1.0)) * (1.0 - 2.0 / (n - 1.0)).powf(n - 4.0)
}

/// Event frequencies over `trials` markets from `appendix_spec(n, t, delta)`.
///
/// Besides the chained conditional frequencies, two standalone analogs are
/// drawn in every trial: `n - 2` students each picking one of `n - 1`
/// schools uniformly (exactly one picks each of two designated schools),
/// and a uniform order of four students (two designated ones on top).
pub fn estimate_event_probs(
    n: usize,
    t: f64,
    delta: f64,
    trials: u64,
    seed: u64,
) -> Result<EventStats> {
    let spec = appendix_spec(n, t, delta);
    let two_seat = two_seat_count(n, delta);
    if spec.n_minority < 2 || two_seat >= n || n < 4 {
        return Err(Error::Spec(format!(
            "events need n >= 4, two minorities and a one-seat school (n = {n}, t = {t}, delta = {delta})"
        )));
    }
    let c1 = SchoolId(two_seat as u32);
    let counts = fold_trials(
        trials,
        Counts::default(),
        |trial| {
            let mut rng = trial_rng(seed, n, trial);
            let prefs = generate_preferences(&spec, &mut rng).expect("valid spec");
            let mut c = Counts::default();
            let first: Vec<usize> = (0..n).filter(|&i| prefs[i].top() == Some(c1)).collect();
            if let [a, b] = first[..] {
                if a >= spec.n_majority && b >= spec.n_majority {
                    c.e1 = 1;
                    // Priorities only matter from here on.
                    let market = Market::new(
                        spec.types(),
                        spec.capacities.clone(),
                        generate_priorities(&spec, &mut rng),
                        prefs,
                        spec.quota_policy(),
                    );
                    // The lower id plays s1.
                    let (p, _) = progress(
                        &market,
                        c1,
                        two_seat,
                        (StudentId(a as u32), StudentId(b as u32)),
                    );
                    c.e2 = p.e2 as u64;
                    c.e3 = p.e3 as u64;
                    c.e4 = p.e4 as u64;
                }
            }
            let (mut hit0, mut hit1) = (0, 0);
            for _ in 0..n - 2 {
                match rng.gen_range(0..n - 1) {
                    0 => hit0 += 1,
                    1 => hit1 += 1,
                    _ => {}
                }
            }
            c.e3_analog = u64::from(hit0 == 1 && hit1 == 1);
            let mut four = [0u8, 1, 2, 3];
            four.shuffle(&mut rng);
            c.e4_analog = u64::from(four[0] >= 2 && four[1] >= 2);
            c
        },
        Counts::merge,
    );

    let e1 = Proportion::new(counts.e1, trials);
    let labeled = EventRow {
        statistic: "event1_labeled",
        hits: 2 * counts.e1,
        samples: trials,
        frequency: 2.0 * e1.frequency(),
        se: 2.0 * e1.se(),
        formula: Some(event1_formula(n, spec.n_minority)),
        limit: Some(t * t / E),
    };
    let rows = vec![
        EventRow::new(
            "event1",
            e1,
            Some(event1_formula(n, spec.n_minority) / 2.0),
            Some(t * t / (2.0 * E)),
        ),
        labeled,
        EventRow::new(
            "event2_given_1",
            Proportion::new(counts.e2, counts.e1),
            Some(event2_formula(n, two_seat)),
            Some(delta / (E * E)),
        ),
        EventRow::new(
            "event3_given_12",
            Proportion::new(counts.e3, counts.e2),
            Some(event3_formula(n)),
            Some(1.0 / (E * E)),
        ),
        EventRow::new(
            "event4_given_123",
            Proportion::new(counts.e4, counts.e3),
            Some(1.0 / 6.0),
            Some(1.0 / 6.0),
        ),
        EventRow::new(
            "events_1234",
            Proportion::new(counts.e4, trials),
            None,
            None,
        ),
        EventRow::new(
            "event3_analog",
            Proportion::new(counts.e3_analog, trials),
            Some(event3_formula(n)),
            Some(1.0 / (E * E)),
        ),
        EventRow::new(
            "event4_analog",
            Proportion::new(counts.e4_analog, trials),
            Some(1.0 / 6.0),
            Some(1.0 / 6.0),
        ),
    ];
    Ok(EventStats {
        n,
        t,
        delta,
        trials,
        seed,
        rows,
    })
}
