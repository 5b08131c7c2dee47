//! Per-school probability that two mechanisms give a school different
//! rosters on the same realized market.

use serde::Serialize;

use super::{binomial_se, fold_trials};
use crate::error::Result;
use crate::mechanism::{assign, MechanismVariant};
use crate::random::{sample_market_with, trial_rng, RandomMarketSpec};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EtaEstimate {
    pub n: usize,
    pub pair: (MechanismVariant, MechanismVariant),
    pub trials: u64,
    pub seed: u64,
    /// Trials in which each school's roster differed.
    pub differ: Vec<u64>,
    pub eta: Vec<f64>,
    pub max_eta: f64,
    /// School attaining the maximum (lowest index on ties).
    pub argmax: Option<usize>,
    pub se: f64,
}

impl EtaEstimate {
    pub fn pair_label(&self) -> String {
        format!("{}/{}", self.pair.0, self.pair.1)
    }
}

pub fn estimate_eta(
    spec: &RandomMarketSpec,
    pair: (MechanismVariant, MechanismVariant),
    trials: u64,
    seed: u64,
) -> Result<EtaEstimate> {
    spec.validate()?;
    let n = spec.n_schools;
    // Validate one realized market up front; the generator cannot produce
    // an invalid one after that.
    sample_market_with(spec, &mut trial_rng(seed, n, 0))?
        .quota
        .ensure_valid()?;
    let differ = fold_trials(
        trials,
        vec![0u64; n],
        |t| {
            let sample =
                sample_market_with(spec, &mut trial_rng(seed, n, t)).expect("validated spec");
            let run = |v: MechanismVariant| {
                let m = sample.view(v.regime);
                assign(v.mechanism, m, m.preferences())
            };
            let (a, b) = (run(pair.0), run(pair.1));
            a.rosters()
                .iter()
                .zip(b.rosters())
                .map(|(x, y)| u64::from(x != y))
                .collect()
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    );
    let eta: Vec<f64> = differ
        .iter()
        .map(|&d| d as f64 / trials.max(1) as f64)
        .collect();
    let argmax = (0..n).fold(None, |best: Option<usize>, c| match best {
        Some(b) if differ[b] >= differ[c] => Some(b),
        _ => Some(c),
    });
    let max_eta = argmax.map_or(0.0, |c| eta[c]);
    Ok(EtaEstimate {
        n,
        pair,
        trials,
        seed,
        differ,
        eta,
        max_eta,
        argmax,
        se: binomial_se(max_eta, trials),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{appendix_spec, SpecRule};

    #[test]
    fn self_comparison_is_zero() {
        let spec = appendix_spec(10, 0.5, 0.5);
        let e = estimate_eta(
            &spec,
            (MechanismVariant::IAM_Q, MechanismVariant::IAM_Q),
            200,
            1,
        )
        .unwrap();
        assert!(e.eta.iter().all(|&x| x == 0.0));
        assert_eq!(e.max_eta, 0.0);
    }

    #[test]
    fn quota_and_reserve_differ_sometimes() {
        let spec = SpecRule::Uniform {
            list_length: 2,
            students_per_school: 1.0,
            minority_fraction: 0.5,
            capacity: 2,
            reserve_scale: 1.0,
            reserve_exponent: 0.0,
            reserve_per_school: 1,
        }
        .spec(6)
        .unwrap();
        let e = estimate_eta(
            &spec,
            (MechanismVariant::IAM_Q, MechanismVariant::IAM_R),
            2000,
            3,
        )
        .unwrap();
        // Only school 0 carries a policy; other rosters move only through
        // students it turns away.
        assert!(e.eta[0] > 0.0);
        assert!(e.eta.iter().all(|&x| x <= e.eta[0]), "{:?}", e.eta);
        assert!(e.max_eta <= 1.0);
    }

    #[test]
    fn deterministic() {
        let spec = appendix_spec(8, 0.5, 0.5);
        let pair = (MechanismVariant::TTCM_Q, MechanismVariant::TTCM_R);
        assert_eq!(
            estimate_eta(&spec, pair, 300, 9).unwrap(),
            estimate_eta(&spec, pair, 300, 9).unwrap()
        );
    }
}
