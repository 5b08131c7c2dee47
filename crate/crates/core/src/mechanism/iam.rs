//! Immediate acceptance with affirmative actions.
//!
//! Each round, every student not yet placed applies to the next school on her
//! list. A school with seats left first takes minority applicants, in
//! priority order, up to its remaining reserve; it then takes the remaining
//! applicants in priority order while seats last, skipping majority
//! applicants once its majority quota is used up. Acceptances are final.
//! Applicants below a school's acceptability cutoff are always rejected.

use serde::Serialize;

use super::{initial_counters, Counters};
use crate::error::Result;
use crate::model::{Market, Matching, SchoolId, StudentId};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IamRound {
    pub round: usize,
    pub applications: Vec<(StudentId, SchoolId)>,
    pub accepted: Vec<(StudentId, SchoolId)>,
    pub rejected: Vec<(StudentId, SchoolId)>,
    /// Counters at the end of the round, indexed by school.
    pub counters: Vec<Counters>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IamTrace {
    pub rounds: Vec<IamRound>,
}

impl IamTrace {
    /// All acceptances up to and including `round` (zero-based).
    pub fn accepted_through(&self, round: usize) -> Vec<(StudentId, SchoolId)> {
        let mut out: Vec<_> = self.rounds[..=round]
            .iter()
            .flat_map(|r| r.accepted.iter().copied())
            .collect();
        out.sort();
        out
    }
}

pub fn iam_with_aa(market: &Market) -> Result<(Matching, IamTrace)> {
    market.ensure_valid()?;
    let mut trace = IamTrace::default();
    let mu = run(market, market.preferences(), Some(&mut trace));
    Ok((mu, trace))
}

pub(crate) fn run<P: AsRef<[SchoolId]>>(
    market: &Market,
    prefs: &[P],
    mut trace: Option<&mut IamTrace>,
) -> Matching {
    let n = market.n_students();
    let mut counters = initial_counters(market);
    let mut assignment: Vec<Option<SchoolId>> = vec![None; n];
    let mut next = vec![0usize; n];
    // (school, priority rank, student); sorting groups applicants by school
    // in priority order.
    let mut apps: Vec<(u32, u32, StudentId)> = Vec::new();
    let mut taken: Vec<bool> = Vec::new();

    for round in 0.. {
        apps.clear();
        for (i, list) in prefs.iter().enumerate() {
            let list = list.as_ref();
            if assignment[i].is_none() && next[i] < list.len() {
                let c = list[next[i]];
                next[i] += 1;
                let s = StudentId(i as u32);
                apps.push((c.0, market.priority(c).rank_or_max(s), s));
            }
        }
        if apps.is_empty() {
            break;
        }
        apps.sort_unstable();

        let mut record = trace.as_ref().map(|_| IamRound {
            round,
            applications: apps.iter().map(|&(c, _, s)| (s, SchoolId(c))).collect(),
            ..IamRound::default()
        });

        let mut start = 0;
        while start < apps.len() {
            let c = apps[start].0;
            let end = start + apps[start..].iter().take_while(|a| a.0 == c).count();
            let group = &apps[start..end];
            let school = SchoolId(c);
            let cutoff = market.priority(school).cutoff() as u32;
            let ctr = &mut counters[c as usize];

            taken.clear();
            taken.resize(group.len(), false);
            if ctr.reserve > 0 {
                for (k, &(_, rank, s)) in group.iter().enumerate() {
                    if ctr.reserve == 0 || ctr.capacity == 0 {
                        break;
                    }
                    if rank < cutoff && market.is_minority(s) {
                        ctr.admit(true);
                        taken[k] = true;
                    }
                }
            }
            for (k, &(_, rank, s)) in group.iter().enumerate() {
                if taken[k] || rank >= cutoff {
                    continue;
                }
                let minority = market.is_minority(s);
                if ctr.has_seat_for(minority) {
                    ctr.admit(minority);
                    taken[k] = true;
                }
            }
            for (k, &(_, _, s)) in group.iter().enumerate() {
                if taken[k] {
                    assignment[s.index()] = Some(school);
                }
                if let Some(r) = record.as_mut() {
                    if taken[k] {
                        r.accepted.push((s, school));
                    } else {
                        r.rejected.push((s, school));
                    }
                }
            }
            start = end;
        }

        if let (Some(t), Some(mut r)) = (trace.as_deref_mut(), record) {
            r.counters = counters.clone();
            t.rounds.push(r);
        }
    }

    Matching::from_assignment(assignment, market.n_schools())
}
