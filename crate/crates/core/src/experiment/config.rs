//! TOML experiment configs and their CSV/JSON outputs.
//!
//! ```toml
//! experiment = "pn"
//! seed = 7
//! trials = 10000
//! grid = [50, 200, 800]
//! minority_fraction = 0.5
//! two_seat_fraction = 0.5
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{estimate_eta, estimate_event_probs, estimate_pn, stable_set_equality_experiment};
use crate::error::{Error, Result};
use crate::mechanism::MechanismVariant;
use crate::random::SpecRule;
use crate::stability::DEFAULT_ENUMERATION_BOUND;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub trials: u64,
    /// Output path without extension; `.csv` and `.json` are appended.
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(flatten)]
    pub kind: ExperimentKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Per-school roster difference between two mechanism variants.
    Eta {
        grid: Vec<usize>,
        pair: (MechanismVariant, MechanismVariant),
        spec: SpecRule,
    },
    /// Whole-matching difference between the two TTC variants.
    Pn {
        grid: Vec<usize>,
        minority_fraction: f64,
        two_seat_fraction: f64,
    },
    /// Frequencies of the separating events.
    Events {
        grid: Vec<usize>,
        minority_fraction: f64,
        two_seat_fraction: f64,
    },
    /// Agreement of the quota and reserve stable sets.
    StableSets {
        grid: Vec<usize>,
        spec: SpecRule,
        #[serde(default)]
        bound: Option<u64>,
    },
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text)?;
        config.check()?;
        Ok(config)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    fn check(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        let grid = match &self.kind {
            ExperimentKind::Eta { grid, .. }
            | ExperimentKind::Pn { grid, .. }
            | ExperimentKind::Events { grid, .. }
            | ExperimentKind::StableSets { grid, .. } => grid,
        };
        if grid.is_empty() || grid.contains(&0) {
            return Err(Error::Config("grid must list positive market sizes".into()));
        }
        Ok(())
    }
}

/// Rendered results of one config.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigOutput {
    pub csv: String,
    pub json: String,
}

impl ConfigOutput {
    /// Writes `<base>.csv` and `<base>.json`, creating parent directories.
    pub fn write(&self, base: &Path) -> Result<(PathBuf, PathBuf)> {
        if let Some(dir) = base.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let csv = base.with_extension("csv");
        let json = base.with_extension("json");
        std::fs::write(&csv, &self.csv).map_err(|e| Error::io(&csv, e))?;
        std::fs::write(&json, &self.json).map_err(|e| Error::io(&json, e))?;
        Ok((csv, json))
    }
}

fn opt(x: f64) -> String {
    if x.is_finite() {
        x.to_string()
    } else {
        String::new()
    }
}

#[derive(Serialize)]
struct Summary<'a, T: Serialize> {
    config: &'a ExperimentConfig,
    results: T,
}

fn render<T: Serialize>(
    config: &ExperimentConfig,
    header: &[&str],
    rows: Vec<Vec<String>>,
    results: T,
) -> Result<ConfigOutput> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let csv = String::from_utf8(w.into_inner().map_err(|e| Error::Config(e.to_string()))?)
        .expect("csv output is utf-8");
    let mut json = serde_json::to_string_pretty(&Summary { config, results })?;
    json.push('\n');
    Ok(ConfigOutput { csv, json })
}

/// Runs `config` on a pool of `jobs` workers (0 picks the default). The
/// output does not depend on `jobs`.
pub fn run_config(config: &ExperimentConfig, jobs: usize) -> Result<ConfigOutput> {
    config.check()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| run(config))
}

fn run(config: &ExperimentConfig) -> Result<ConfigOutput> {
    let (seed, trials) = (config.seed, config.trials);
    match &config.kind {
        ExperimentKind::Eta { grid, pair, spec } => {
            let estimates = grid
                .iter()
                .map(|&n| estimate_eta(&spec.spec(n)?, *pair, trials, seed))
                .collect::<Result<Vec<_>>>()?;
            let rows = estimates
                .iter()
                .map(|e| {
                    vec![
                        e.n.to_string(),
                        e.pair_label(),
                        opt(e.max_eta),
                        opt(e.se),
                        e.trials.to_string(),
                        e.seed.to_string(),
                    ]
                })
                .collect();
            render(
                config,
                &["n", "mechanism_pair", "max_eta", "se", "trials", "seed"],
                rows,
                estimates,
            )
        }
        ExperimentKind::Pn {
            grid,
            minority_fraction,
            two_seat_fraction,
        } => {
            let estimates =
                estimate_pn(grid, *minority_fraction, *two_seat_fraction, trials, seed)?;
            let rows = estimates
                .iter()
                .map(|e| {
                    vec![
                        e.n.to_string(),
                        opt(e.p_hat),
                        opt(e.se),
                        opt(e.pi1_hat),
                        opt(e.pi2_hat),
                    ]
                })
                .collect();
            render(
                config,
                &["n", "p_hat", "se", "pi1_hat", "pi2_hat"],
                rows,
                estimates,
            )
        }
        ExperimentKind::Events {
            grid,
            minority_fraction,
            two_seat_fraction,
        } => {
            let stats = grid
                .iter()
                .map(|&n| {
                    estimate_event_probs(n, *minority_fraction, *two_seat_fraction, trials, seed)
                })
                .collect::<Result<Vec<_>>>()?;
            let rows = stats
                .iter()
                .flat_map(|s| {
                    s.rows.iter().map(move |r| {
                        vec![
                            s.n.to_string(),
                            r.statistic.to_string(),
                            opt(r.frequency),
                            opt(r.se),
                            r.formula.map_or(String::new(), opt),
                            r.limit.map_or(String::new(), opt),
                            r.samples.to_string(),
                        ]
                    })
                })
                .collect();
            render(
                config,
                &[
                    "n",
                    "statistic",
                    "frequency",
                    "se",
                    "formula",
                    "limit",
                    "samples",
                ],
                rows,
                stats,
            )
        }
        ExperimentKind::StableSets { grid, spec, bound } => {
            let bound = bound.map_or(DEFAULT_ENUMERATION_BOUND, u128::from);
            let rows_out = stable_set_equality_experiment(grid, spec, trials, seed, bound)?;
            let rows = rows_out
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        opt(r.fraction),
                        opt(r.se),
                        r.trials.to_string(),
                        r.skipped.to_string(),
                        r.inclusion_violations.to_string(),
                        r.r_stable_q_infeasible.to_string(),
                    ]
                })
                .collect();
            render(
                config,
                &[
                    "n",
                    "equal_fraction",
                    "se",
                    "trials",
                    "skipped",
                    "inclusion_violations",
                    "r_stable_q_infeasible",
                ],
                rows,
                rows_out,
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PN: &str = r#"
experiment = "pn"
seed = 3
trials = 200
grid = [10, 20]
minority_fraction = 0.5
two_seat_fraction = 0.5
"#;

    const ETA: &str = r#"
experiment = "eta"
seed = 1
trials = 100
grid = [10]
pair = ["IAM-Q", "IAM-R"]

[spec]
rule = "uniform"
list_length = 3
students_per_school = 1.0
minority_fraction = 0.5
capacity = 2
reserve_scale = 1.0
reserve_exponent = 0.0
reserve_per_school = 1
"#;

    #[test]
    fn pn_schema_and_determinism() {
        let config = ExperimentConfig::parse(PN).unwrap();
        let a = run_config(&config, 1).unwrap();
        let b = run_config(&config, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.csv.starts_with("n,p_hat,se,pi1_hat,pi2_hat\n"));
        assert_eq!(a.csv.lines().count(), 3);
    }

    #[test]
    fn eta_schema() {
        let config = ExperimentConfig::parse(ETA).unwrap();
        let out = run_config(&config, 1).unwrap();
        let mut lines = out.csv.lines();
        assert_eq!(
            lines.next(),
            Some("n,mechanism_pair,max_eta,se,trials,seed")
        );
        assert!(lines.next().unwrap().starts_with("10,IAM-Q/IAM-R,"));
        let v: serde_json::Value = serde_json::from_str(&out.json).unwrap();
        assert_eq!(v["config"]["experiment"], "eta");
    }

    #[test]
    fn malformed_configs() {
        let err = ExperimentConfig::parse("experiment = \"pn\"\nseed = \"x\"\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line") || msg.contains("seed"), "{msg}");
        assert!(matches!(
            ExperimentConfig::parse(&PN.replace("trials = 200", "trials = 0")),
            Err(Error::Config(_))
        ));
        assert!(ExperimentConfig::parse(&PN.replace("\"pn\"", "\"sosm\"")).is_err());
    }
}
