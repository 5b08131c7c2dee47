//! Top trading cycles with affirmative actions.
//!
//! Every school starts with a capacity counter, a quota counter (its
//! effective majority quota) and a reserve counter (its effective minority
//! reserve). At each step a school with seats left points to its
//! highest-priority remaining minority while its reserve counter is
//! positive, and otherwise to its highest-priority remaining student. A
//! school whose reserve is open but has no acceptable minority left points
//! to its highest-priority remaining student. Each remaining student points
//! to the first school on her list that still has a seat she may take and
//! finds her acceptable, or to herself. All cycles of the resulting
//! functional graph are cleared at once.

use serde::Serialize;

use super::{initial_counters, Counters};
use crate::error::Result;
use crate::model::{Market, Matching, SchoolId, StudentId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Node {
    Student(StudentId),
    School(SchoolId),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TtcStep {
    pub step: usize,
    pub school_pointers: Vec<(SchoolId, StudentId)>,
    /// `None` is a student pointing to herself.
    pub student_pointers: Vec<(StudentId, Option<SchoolId>)>,
    pub cycles: Vec<Vec<Node>>,
    pub assignments: Vec<(StudentId, Option<SchoolId>)>,
    /// Counters at the end of the step, indexed by school.
    pub counters: Vec<Counters>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TtcTrace {
    pub steps: Vec<TtcStep>,
}

pub fn ttcm_with_aa(market: &Market) -> Result<(Matching, TtcTrace)> {
    market.ensure_valid()?;
    let mut trace = TtcTrace::default();
    let mu = run(market, market.preferences(), Some(&mut trace));
    Ok((mu, trace))
}

const NONE: u32 = u32::MAX;

pub(crate) fn run<P: AsRef<[SchoolId]>>(
    market: &Market,
    prefs: &[P],
    mut trace: Option<&mut TtcTrace>,
) -> Matching {
    let n_students = market.n_students();
    let n_schools = market.n_schools();
    let mut counters = initial_counters(market);
    let mut assignment: Vec<Option<SchoolId>> = vec![None; n_students];
    let mut remaining = vec![true; n_students];
    let mut n_remaining = n_students;

    // Pointers only ever move down a list: students leave and counters only
    // shrink, so a target skipped once stays skipped.
    let mut any_cursor = vec![0usize; n_schools];
    let mut min_cursor = vec![0usize; n_schools];
    let mut student_cursor = vec![0usize; n_students];

    // Graph nodes: students are 0..n_students, schools follow.
    let n_nodes = n_students + n_schools;
    let mut next = vec![NONE; n_nodes];
    let mut seen = vec![NONE; n_nodes];
    let mut done = vec![false; n_nodes];
    let mut path: Vec<u32> = Vec::new();
    let mut cleared: Vec<u32> = Vec::new();

    let mut step = 0;
    while n_remaining > 0 {
        let mut record = trace.as_ref().map(|_| TtcStep {
            step,
            ..TtcStep::default()
        });

        for c in 0..n_schools {
            let school = SchoolId(c as u32);
            let ctr = counters[c];
            let node = n_students + c;
            next[node] = NONE;
            done[node] = false;
            seen[node] = NONE;
            if ctr.capacity == 0 {
                continue;
            }
            let prio = market.priority(school);
            let order = prio.order();
            let cutoff = prio.cutoff().min(order.len());
            let mut target = None;
            if ctr.reserve > 0 {
                let cur = &mut min_cursor[c];
                while *cur < cutoff
                    && !(remaining[order[*cur].index()] && market.is_minority(order[*cur]))
                {
                    *cur += 1;
                }
                if *cur < cutoff {
                    target = Some(order[*cur]);
                }
            }
            if target.is_none() {
                let cur = &mut any_cursor[c];
                while *cur < cutoff && !remaining[order[*cur].index()] {
                    *cur += 1;
                }
                if *cur < cutoff {
                    target = Some(order[*cur]);
                }
            }
            if let Some(s) = target {
                next[node] = s.0;
                if let Some(r) = record.as_mut() {
                    r.school_pointers.push((school, s));
                }
            }
        }

        for i in 0..n_students {
            done[i] = false;
            seen[i] = NONE;
            if !remaining[i] {
                next[i] = NONE;
                continue;
            }
            let s = StudentId(i as u32);
            let minority = market.is_minority(s);
            let list = prefs[i].as_ref();
            let cur = &mut student_cursor[i];
            while *cur < list.len() {
                let c = list[*cur];
                if counters[c.index()].has_seat_for(minority) && market.is_acceptable(c, s) {
                    break;
                }
                *cur += 1;
            }
            let target = list.get(*cur).copied();
            next[i] = match target {
                Some(c) => (n_students + c.index()) as u32,
                None => i as u32,
            };
            if let Some(r) = record.as_mut() {
                r.student_pointers.push((s, target));
            }
        }

        // Walk from every remaining student; a walk that returns to a node
        // on its own path has found a cycle.
        cleared.clear();
        for start in 0..n_students {
            if !remaining[start] || done[start] {
                continue;
            }
            path.clear();
            let mut v = start as u32;
            loop {
                if v == NONE || done[v as usize] {
                    break;
                }
                if seen[v as usize] == start as u32 {
                    let pos = path.iter().position(|&u| u == v).expect("on path");
                    let cycle = &path[pos..];
                    if let Some(r) = record.as_mut() {
                        r.cycles.push(
                            cycle
                                .iter()
                                .map(|&u| node_of(u as usize, n_students))
                                .collect(),
                        );
                    }
                    cleared.extend(cycle.iter().copied().filter(|&u| (u as usize) < n_students));
                    break;
                }
                seen[v as usize] = start as u32;
                path.push(v);
                v = next[v as usize];
            }
            for &u in &path {
                done[u as usize] = true;
            }
        }
        debug_assert!(!cleared.is_empty(), "every step clears a cycle");

        for &u in &cleared {
            let i = u as usize;
            let s = StudentId(u);
            let target = next[i] as usize;
            let school = (target != i).then(|| SchoolId((target - n_students) as u32));
            if let Some(c) = school {
                counters[c.index()].admit(market.is_minority(s));
            }
            assignment[i] = school;
            remaining[i] = false;
            n_remaining -= 1;
            if let Some(r) = record.as_mut() {
                r.assignments.push((s, school));
            }
        }

        if let (Some(t), Some(mut r)) = (trace.as_deref_mut(), record) {
            r.assignments.sort();
            r.counters = counters.clone();
            t.steps.push(r);
        }
        step += 1;
    }

    Matching::from_assignment(assignment, n_schools)
}

fn node_of(u: usize, n_students: usize) -> Node {
    if u < n_students {
        Node::Student(StudentId(u as u32))
    } else {
        Node::School(SchoolId((u - n_students) as u32))
    }
}
