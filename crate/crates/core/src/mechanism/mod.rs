//! Immediate acceptance and top trading cycles, each run under whichever
//! affirmative action the market's policy carries.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Market, Matching, Regime, SchoolId};

pub mod iam;
pub mod ttc;

pub use iam::{iam_with_aa, IamRound, IamTrace};
pub use ttc::{ttcm_with_aa, Node, TtcStep, TtcTrace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mechanism {
    /// Immediate acceptance (Boston).
    Iam,
    /// Top trading cycles.
    #[serde(rename = "ttcm")]
    Ttc,
}

impl Mechanism {
    /// Name with the regime suffix, e.g. `IAM-Q`.
    pub fn label(self, regime: Regime) -> String {
        format!("{self}-{}", regime.letter())
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mechanism::Iam => "IAM",
            Mechanism::Ttc => "TTCM",
        })
    }
}

impl FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "iam" | "boston" => Ok(Mechanism::Iam),
            "ttcm" | "ttc" => Ok(Mechanism::Ttc),
            _ => Err(Error::UnknownMechanism(s.to_string())),
        }
    }
}

/// A mechanism together with the regime view of a paired sample it runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MechanismVariant {
    pub mechanism: Mechanism,
    pub regime: Regime,
}

impl MechanismVariant {
    pub const IAM_Q: Self = Self::new(Mechanism::Iam, Regime::Quota);
    pub const IAM_R: Self = Self::new(Mechanism::Iam, Regime::Reserve);
    pub const TTCM_Q: Self = Self::new(Mechanism::Ttc, Regime::Quota);
    pub const TTCM_R: Self = Self::new(Mechanism::Ttc, Regime::Reserve);

    pub const fn new(mechanism: Mechanism, regime: Regime) -> Self {
        MechanismVariant { mechanism, regime }
    }
}

impl fmt::Display for MechanismVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.mechanism.label(self.regime))
    }
}

impl FromStr for MechanismVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (m, r) = s
            .rsplit_once('-')
            .ok_or_else(|| Error::UnknownMechanism(s.to_string()))?;
        Ok(MechanismVariant::new(m.parse()?, r.parse()?))
    }
}

impl Serialize for MechanismVariant {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MechanismVariant {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// School counters as a mechanism sees them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counters {
    pub capacity: u32,
    pub quota: u32,
    pub reserve: u32,
}

pub(crate) fn initial_counters(market: &Market) -> Vec<Counters> {
    market
        .schools()
        .map(|c| Counters {
            capacity: market.capacity(c),
            quota: market.majority_quota(c),
            reserve: market.minority_reserve(c),
        })
        .collect()
}

impl Counters {
    /// Records one admission.
    #[inline]
    pub(crate) fn admit(&mut self, minority: bool) {
        self.capacity -= 1;
        if minority {
            self.reserve = self.reserve.saturating_sub(1);
        } else {
            self.quota -= 1;
        }
    }

    #[inline]
    pub(crate) fn has_seat_for(&self, minority: bool) -> bool {
        self.capacity > 0 && (minority || self.quota > 0)
    }
}

/// Runs `mechanism` on a validated market.
pub fn run_mechanism(mechanism: Mechanism, market: &Market) -> Result<Matching> {
    market.ensure_valid()?;
    Ok(assign(mechanism, market, market.preferences()))
}

/// Runs `mechanism` on `market`'s schools and policy with the reported
/// `prefs` in place of the market's own preferences. No validation.
pub(crate) fn assign<P: AsRef<[SchoolId]>>(
    mechanism: Mechanism,
    market: &Market,
    prefs: &[P],
) -> Matching {
    match mechanism {
        Mechanism::Iam => iam::run(market, prefs, None),
        Mechanism::Ttc => ttc::run(market, prefs, None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn dispatch_matches_direct_calls() {
        let m = fixtures::example1_market(Regime::Quota);
        assert_eq!(
            run_mechanism(Mechanism::Iam, &m).unwrap(),
            iam_with_aa(&m).unwrap().0
        );
        let a2 = fixtures::appendix_small_market(Regime::Reserve);
        assert_eq!(
            run_mechanism(Mechanism::Ttc, &a2).unwrap(),
            ttcm_with_aa(&a2).unwrap().0
        );
    }

    #[test]
    fn unknown_tag_is_an_error() {
        assert!(matches!(
            "sosm".parse::<Mechanism>(),
            Err(Error::UnknownMechanism(_))
        ));
        assert_eq!("TTC".parse::<Mechanism>().unwrap(), Mechanism::Ttc);
        assert_eq!(
            "iam-r".parse::<MechanismVariant>().unwrap(),
            MechanismVariant::IAM_R
        );
        assert!("iam-x".parse::<MechanismVariant>().is_err());
        assert_eq!(MechanismVariant::TTCM_Q.to_string(), "TTCM-Q");
    }

    #[test]
    fn invalid_market_rejected() {
        let m = fixtures::example1_market(Regime::Quota)
            .with_policy(crate::Policy::quota(vec![5, 1, 1]));
        assert!(matches!(
            run_mechanism(Mechanism::Iam, &m),
            Err(Error::InvalidMarket(_))
        ));
        assert!(matches!(
            run_mechanism(Mechanism::Ttc, &m),
            Err(Error::InvalidMarket(_))
        ));
    }
}
