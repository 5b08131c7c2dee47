use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use affirm_core::experiment::{run_config, ExperimentConfig};
use affirm_core::io::{read_market, read_matching, write_market};
use affirm_core::mechanism::{IamTrace, Node, TtcTrace};
use affirm_core::random::SpecDocument;
use affirm_core::{
    find_blocking_pairs, fixtures, iam_with_aa, nash_outcome_set, sample_market, stable_set,
    ttcm_with_aa, Game, Market, Matching, Mechanism, Regime, DEFAULT_ENUMERATION_BOUND,
};

#[derive(Parser)]
#[command(
    name = "affirm",
    version,
    about = "School choice with majority quotas and minority reserves"
)]
struct Cli {
    /// Base seed for random generation.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Trials per grid point (overrides the config).
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Output path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MechanismArg {
    Iam,
    Ttcm,
}

impl From<MechanismArg> for Mechanism {
    fn from(m: MechanismArg) -> Self {
        match m {
            MechanismArg::Iam => Mechanism::Iam,
            MechanismArg::Ttcm => Mechanism::Ttc,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Q,
    R,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Q => Regime::Quota,
            RegimeArg::R => Regime::Reserve,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a mechanism on a market under the market's own policy.
    Solve {
        #[arg(long, value_enum)]
        mechanism: MechanismArg,
        #[arg(long)]
        market: PathBuf,
        /// Also print the round-by-round trace.
        #[arg(long)]
        trace: bool,
    },
    /// List every stable matching under a regime.
    Stable {
        #[arg(long)]
        market: PathBuf,
        #[arg(long, value_enum)]
        regime: RegimeArg,
    },
    /// List the blocking pairs of a matching.
    Block {
        #[arg(long)]
        market: PathBuf,
        #[arg(long)]
        matching: PathBuf,
        #[arg(long, value_enum)]
        regime: RegimeArg,
    },
    /// Equilibrium outcomes of the preference revelation game.
    Nash {
        #[arg(long)]
        market: PathBuf,
        #[arg(long, value_enum)]
        mechanism: MechanismArg,
    },
    /// Sample a market from a spec file; writes one file per regime.
    Gen {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Run an experiment config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Check the published worked examples.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut out = String::new();
    let code = match &cli.command {
        Command::Solve {
            mechanism,
            market,
            trace,
        } => {
            let market = load_market(market)?;
            match Mechanism::from(*mechanism) {
                Mechanism::Iam => {
                    let (mu, t) = iam_with_aa(&market)?;
                    out.push_str(&render_matching(&mu));
                    if *trace {
                        render_iam_trace(&mut out, &t);
                    }
                }
                Mechanism::Ttc => {
                    let (mu, t) = ttcm_with_aa(&market)?;
                    out.push_str(&render_matching(&mu));
                    if *trace {
                        render_ttc_trace(&mut out, &t);
                    }
                }
            }
            ExitCode::SUCCESS
        }
        Command::Stable { market, regime } => {
            let market = load_market(market)?;
            let set = stable_set(&market, (*regime).into(), DEFAULT_ENUMERATION_BOUND)?;
            writeln!(out, "{} stable matchings", set.len())?;
            for mu in set.iter() {
                writeln!(out, "{}", rosters(mu))?;
            }
            ExitCode::SUCCESS
        }
        Command::Block {
            market,
            matching,
            regime,
        } => {
            let market = load_market(market)?;
            let mu = read_matching(matching, &market)
                .with_context(|| format!("reading {}", matching.display()))?;
            let pairs = find_blocking_pairs(&mu, &market, (*regime).into())?;
            if pairs.is_empty() {
                writeln!(out, "no blocking pairs")?;
            }
            for p in &pairs {
                let clause = serde_json::to_value(p.clause)?;
                writeln!(
                    out,
                    "{} {} {}",
                    p.student.0,
                    p.school.0,
                    clause.as_str().unwrap_or_default()
                )?;
            }
            ExitCode::SUCCESS
        }
        Command::Nash { market, mechanism } => {
            let market = load_market(market)?;
            let game = Game::new((*mechanism).into(), market)?;
            let found = nash_outcome_set(&game, DEFAULT_ENUMERATION_BOUND)?;
            writeln!(
                out,
                "{} equilibrium outcomes ({} of {} profiles are equilibria)",
                found.outcomes.len(),
                found.equilibria,
                found.profiles
            )?;
            for (mu, profile) in &found.outcomes {
                writeln!(out, "{}", rosters(mu))?;
                writeln!(out, "  supported by {profile}")?;
            }
            ExitCode::SUCCESS
        }
        Command::Gen { spec } => {
            let seed = cli.seed.context("gen needs --seed")?;
            let base = cli.out.as_deref().context("gen needs --out")?;
            let text = std::fs::read_to_string(spec)
                .with_context(|| format!("reading {}", spec.display()))?;
            let spec = SpecDocument::parse(&text)
                .with_context(|| format!("parsing {}", spec.display()))?
                .resolve()?;
            let sample = sample_market(&spec, seed)?;
            for regime in [Regime::Quota, Regime::Reserve] {
                let path = regime_path(base, regime);
                write_market(&path, sample.view(regime))?;
                writeln!(out, "{}", path.display())?;
            }
            ExitCode::SUCCESS
        }
        Command::Simulate { config } => {
            let mut cfg = ExperimentConfig::read(config)
                .with_context(|| format!("reading {}", config.display()))?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            if let Some(trials) = cli.trials {
                cfg.trials = trials;
            }
            // --out only moves the files; the recorded config keeps its own
            // value so results do not depend on where they were written.
            let base = cli.out.clone().or_else(|| cfg.out.clone());
            let result = run_config(&cfg, cli.jobs)?;
            match &base {
                Some(base) => {
                    let (csv, json) = result.write(base)?;
                    writeln!(out, "{}\n{}", csv.display(), json.display())?;
                }
                None => out.push_str(&result.csv),
            }
            ExitCode::SUCCESS
        }
        Command::Verify => {
            let checks = fixtures::verify();
            for c in &checks {
                writeln!(out, "{c}")?;
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            writeln!(out, "{} passed, {failed} failed", checks.len() - failed)?;
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    };
    print!("{out}");
    Ok(code)
}

fn load_market(path: &Path) -> Result<Market> {
    read_market(path).with_context(|| format!("reading {}", path.display()))
}

/// `<stem>.q.<ext>` or `<stem>.r.<ext>`, defaulting the extension to json.
fn regime_path(base: &Path, regime: Regime) -> PathBuf {
    let ext = base.extension().and_then(|e| e.to_str()).unwrap_or("json");
    let stem = base
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("market");
    let tag = regime.letter().to_ascii_lowercase();
    base.with_file_name(format!("{stem}.{tag}.{ext}"))
}

fn render_matching(mu: &Matching) -> String {
    mu.to_string()
}

/// `c0: 1 3 | c1: - | self: 2`
fn rosters(mu: &Matching) -> String {
    let mut s = String::new();
    for (c, roster) in mu.rosters().iter().enumerate() {
        if c > 0 {
            s.push_str(" | ");
        }
        let _ = write!(s, "c{c}:");
        if roster.is_empty() {
            s.push_str(" -");
        }
        for st in roster {
            let _ = write!(s, " {}", st.0);
        }
    }
    let unmatched: Vec<String> = mu
        .assignment()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.is_none())
        .map(|(i, _)| i.to_string())
        .collect();
    if !unmatched.is_empty() {
        let _ = write!(s, " | self: {}", unmatched.join(" "));
    }
    s
}

fn pairs<A: std::fmt::Display, B: std::fmt::Display>(xs: &[(A, B)]) -> String {
    if xs.is_empty() {
        return "-".into();
    }
    xs.iter()
        .map(|(a, b)| format!("{a}->{b}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn counters(out: &mut String, cs: &[affirm_core::mechanism::Counters]) {
    for (c, k) in cs.iter().enumerate() {
        let _ = writeln!(
            out,
            "  c{c}: capacity {} quota {} reserve {}",
            k.capacity, k.quota, k.reserve
        );
    }
}

fn render_iam_trace(out: &mut String, trace: &IamTrace) {
    for r in &trace.rounds {
        let _ = writeln!(out, "\nround {}", r.round);
        let _ = writeln!(out, "  applied: {}", pairs(&r.applications));
        let _ = writeln!(out, "  accepted: {}", pairs(&r.accepted));
        let _ = writeln!(out, "  rejected: {}", pairs(&r.rejected));
        counters(out, &r.counters);
    }
}

fn render_ttc_trace(out: &mut String, trace: &TtcTrace) {
    for step in &trace.steps {
        let _ = writeln!(out, "\nstep {}", step.step);
        let _ = writeln!(out, "  schools point: {}", pairs(&step.school_pointers));
        let students: Vec<(String, String)> = step
            .student_pointers
            .iter()
            .map(|(s, c)| (s.to_string(), c.map_or("self".into(), |c| c.to_string())))
            .collect();
        let _ = writeln!(out, "  students point: {}", pairs(&students));
        for cycle in &step.cycles {
            let nodes: Vec<String> = cycle
                .iter()
                .map(|n| match n {
                    Node::Student(s) => s.to_string(),
                    Node::School(c) => c.to_string(),
                })
                .collect();
            let _ = writeln!(out, "  cycle: {}", nodes.join(" -> "));
        }
        let assigned: Vec<(String, String)> = step
            .assignments
            .iter()
            .map(|(s, c)| (s.to_string(), c.map_or("self".into(), |c| c.to_string())))
            .collect();
        let _ = writeln!(out, "  assigned: {}", pairs(&assigned));
        counters(out, &step.counters);
    }
}
