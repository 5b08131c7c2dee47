//! JSON file formats for markets and matchings.
//!
//! Market document:
//!
//! ```json
//! {
//!   "students":    [{ "id": 0, "type": "majority" }, ...],
//!   "schools":     [{ "id": 0, "capacity": 1, "priority": [0, 1, 2], "cutoff": 3 }, ...],
//!   "preferences": [{ "student": 0, "schools": [1, 0] }, ...],
//!   "policy":      { "regime": "quota", "values": [1, 1] }
//! }
//! ```
//!
//! Ids must be dense from zero but may appear in any order. `cutoff` is
//! optional on input and defaults to the number of students; it is always
//! written on output. A student without a `preferences` entry has an empty
//! list.
//!
//! Matching document: `{ "assignment": [1, null, 0] }`, one entry per
//! student (school id, or `null` for unmatched). Writers also emit a
//! `rosters` array for readability; readers ignore it.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    Market, Matching, Policy, PreferenceOrder, PriorityOrder, SchoolId, StudentId, StudentType,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudentEntry {
    pub id: u32,
    #[serde(rename = "type")]
    pub kind: StudentType,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchoolEntry {
    pub id: u32,
    pub capacity: u32,
    pub priority: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreferenceEntry {
    pub student: u32,
    pub schools: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketDocument {
    pub students: Vec<StudentEntry>,
    pub schools: Vec<SchoolEntry>,
    #[serde(default)]
    pub preferences: Vec<PreferenceEntry>,
    pub policy: Policy,
}

fn format_err(msg: String) -> Error {
    Error::Config(msg)
}

/// Places `(id, value)` pairs into a dense vector, rejecting gaps and repeats.
fn dense<T>(what: &str, items: impl IntoIterator<Item = (u32, T)>, len: usize) -> Result<Vec<T>> {
    let mut slots: Vec<Option<T>> = (0..len).map(|_| None).collect();
    for (id, value) in items {
        let slot = slots
            .get_mut(id as usize)
            .ok_or_else(|| format_err(format!("{what} id {id} out of range 0..{len}")))?;
        if slot.replace(value).is_some() {
            return Err(format_err(format!("duplicate {what} id {id}")));
        }
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| format_err(format!("missing {what} id {i}"))))
        .collect()
}

impl MarketDocument {
    pub fn from_market(market: &Market) -> Self {
        MarketDocument {
            students: market
                .students()
                .map(|s| StudentEntry {
                    id: s.0,
                    kind: market.student_type(s),
                })
                .collect(),
            schools: market
                .schools()
                .map(|c| {
                    let prio = market.priority(c);
                    SchoolEntry {
                        id: c.0,
                        capacity: market.capacity(c),
                        priority: prio.order().iter().map(|s| s.0).collect(),
                        cutoff: Some(prio.cutoff()),
                    }
                })
                .collect(),
            preferences: market
                .students()
                .map(|s| PreferenceEntry {
                    student: s.0,
                    schools: market.preference(s).schools().iter().map(|c| c.0).collect(),
                })
                .collect(),
            policy: market.policy().clone(),
        }
    }

    /// Converts to a market. Id layout problems are errors here; everything
    /// else is left to [`crate::validate_market`].
    pub fn into_market(self) -> Result<Market> {
        let n_students = self.students.len();
        let n_schools = self.schools.len();
        let types = dense(
            "student",
            self.students.into_iter().map(|e| (e.id, e.kind)),
            n_students,
        )?;
        let schools = dense(
            "school",
            self.schools.into_iter().map(|e| (e.id, e)),
            n_schools,
        )?;
        let mut preferences = vec![PreferenceOrder::empty(); n_students];
        let mut seen = vec![false; n_students];
        for entry in self.preferences {
            let i = entry.student as usize;
            if i >= n_students {
                return Err(format_err(format!(
                    "preference for unknown student {}",
                    entry.student
                )));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(format_err(format!(
                    "duplicate preference for student {}",
                    entry.student
                )));
            }
            preferences[i] = PreferenceOrder::from_indices(entry.schools);
        }
        let mut capacities = Vec::with_capacity(n_schools);
        let mut priorities = Vec::with_capacity(n_schools);
        for school in schools {
            capacities.push(school.capacity);
            let order: Vec<StudentId> = school.priority.into_iter().map(StudentId).collect();
            let cutoff = school.cutoff.unwrap_or(n_students);
            priorities.push(PriorityOrder::new(order, cutoff));
        }
        Ok(Market::new(
            types,
            capacities,
            priorities,
            preferences,
            self.policy,
        ))
    }
}

pub fn market_to_json(market: &Market) -> String {
    serde_json::to_string_pretty(&MarketDocument::from_market(market))
        .expect("market document serializes")
}

pub fn market_from_json(text: &str) -> Result<Market> {
    serde_json::from_str::<MarketDocument>(text)?.into_market()
}

pub fn read_market(path: impl AsRef<Path>) -> Result<Market> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    market_from_json(&text)
}

pub fn write_market(path: impl AsRef<Path>, market: &Market) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, market_to_json(market) + "\n").map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingDocument {
    pub assignment: Vec<Option<u32>>,
    #[serde(default, skip_deserializing, skip_serializing_if = "Vec::is_empty")]
    pub rosters: Vec<Vec<u32>>,
}

impl MatchingDocument {
    pub fn from_matching(matching: &Matching) -> Self {
        MatchingDocument {
            assignment: matching
                .assignment()
                .iter()
                .map(|a| a.map(|c| c.0))
                .collect(),
            rosters: matching
                .rosters()
                .iter()
                .map(|r| r.iter().map(|s| s.0).collect())
                .collect(),
        }
    }

    pub fn into_matching(self, n_schools: usize) -> Matching {
        Matching::from_assignment(
            self.assignment
                .into_iter()
                .map(|a| a.map(SchoolId))
                .collect(),
            n_schools,
        )
    }
}

pub fn matching_to_json(matching: &Matching) -> String {
    serde_json::to_string_pretty(&MatchingDocument::from_matching(matching))
        .expect("matching document serializes")
}

pub fn matching_from_json(text: &str, n_schools: usize) -> Result<Matching> {
    Ok(serde_json::from_str::<MatchingDocument>(text)?.into_matching(n_schools))
}

pub fn read_matching(path: impl AsRef<Path>, market: &Market) -> Result<Matching> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let matching = matching_from_json(&text, market.n_schools())?;
    if matching.n_students() != market.n_students() {
        return Err(Error::MatchingShape {
            expected: market.n_students(),
            got: matching.n_students(),
        });
    }
    Ok(matching)
}

pub fn write_matching(path: impl AsRef<Path>, matching: &Matching) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, matching_to_json(matching) + "\n").map_err(|e| Error::io(path, e))
}
