use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use affirm_core::io::read_market;
use affirm_core::Regime;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> String {
    root()
        .join("fixtures")
        .join(name)
        .to_str()
        .expect("utf-8 path")
        .to_string()
}

fn affirm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_affirm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = affirm(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8")
}

#[test]
fn solve_prints_one_line_per_student() {
    let iam = stdout(&[
        "solve",
        "--mechanism",
        "iam",
        "--market",
        &fixture("example1-iam-q-truthful.json"),
    ]);
    assert_eq!(iam, "0 -> 1\n1 -> 2\n2 -> self\n3 -> 1\n4 -> 0\n");

    let ttc = stdout(&[
        "solve",
        "--mechanism",
        "ttcm",
        "--market",
        &fixture("appendix-ttcm-r.json"),
    ]);
    assert_eq!(ttc, "0 -> 0\n1 -> self\n2 -> 1\n");
}

#[test]
fn solve_trace_follows_the_matching() {
    let out = stdout(&[
        "solve",
        "--mechanism",
        "iam",
        "--market",
        &fixture("example1-iam-q-truthful.json"),
        "--trace",
    ]);
    assert!(out.starts_with("0 -> 1\n"));
    assert!(out.contains("\nround 1\n"), "{out}");
    assert!(out.contains("  accepted: "));

    let out = stdout(&[
        "solve",
        "--mechanism",
        "ttcm",
        "--market",
        &fixture("appendix-ttcm-q.json"),
        "--trace",
    ]);
    assert!(out.contains("cycle: "), "{out}");
}

#[test]
fn block_lists_pairs_with_clauses() {
    let dir = tempfile::tempdir().unwrap();
    let matching = dir.path().join("mu.json");
    std::fs::write(&matching, r#"{ "assignment": [1, 2, null, 1, 0] }"#).unwrap();
    let out = stdout(&[
        "block",
        "--market",
        &fixture("example1-iam-q-truthful.json"),
        "--matching",
        matching.to_str().unwrap(),
        "--regime",
        "q",
    ]);
    assert_eq!(out, "1 0 majority-room\n2 0 majority-room\n");
}

#[test]
fn stable_reports_count_then_members() {
    let out = stdout(&[
        "stable",
        "--market",
        &fixture("appendix-ttcm-r.json"),
        "--regime",
        "r",
    ]);
    let mut lines = out.lines();
    let count: usize = lines
        .next()
        .and_then(|l| l.strip_suffix(" stable matchings"))
        .and_then(|n| n.parse().ok())
        .expect("count line");
    assert_eq!(lines.count(), count);
    // Top trading cycles gives c1 to student 2, but student 1 outranks her there.
    assert_eq!(out, "1 stable matchings\nc0: 0 | c1: 1 | self: 2\n");
}

#[test]
fn nash_reports_the_unique_reserve_outcome() {
    let out = stdout(&[
        "nash",
        "--market",
        &fixture("example1-iam-r-truthful.json"),
        "--mechanism",
        "iam",
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("1 equilibrium outcomes"), "{out}");
    assert_eq!(lines[1], "c0: 2 | c1: 0 1 3 | c2: 4");
    assert!(lines[2].starts_with("  supported by s0: "));
}

#[test]
fn gen_writes_both_regime_views() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.toml");
    std::fs::write(
        &spec,
        "n = 8\nrule = \"appendix\"\nminority_fraction = 0.5\ntwo_seat_fraction = 0.5\n",
    )
    .unwrap();
    let base = dir.path().join("market.json");
    let out = stdout(&[
        "gen",
        "--spec",
        spec.to_str().unwrap(),
        "--seed",
        "11",
        "--out",
        base.to_str().unwrap(),
    ]);
    assert_eq!(out.lines().count(), 2);
    let q = read_market(dir.path().join("market.q.json")).unwrap();
    let r = read_market(dir.path().join("market.r.json")).unwrap();
    assert_eq!(q.regime(), Regime::Quota);
    assert_eq!(r.regime(), Regime::Reserve);
    assert_eq!(q.corresponding(), r);
    assert_eq!(q.n_schools(), 8);

    // Same seed, same market.
    let again = dir.path().join("again.json");
    stdout(&[
        "gen",
        "--spec",
        spec.to_str().unwrap(),
        "--seed",
        "11",
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(
        std::fs::read(dir.path().join("again.q.json")).unwrap(),
        std::fs::read(dir.path().join("market.q.json")).unwrap()
    );
}

#[test]
fn simulate_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("pn.toml");
    std::fs::write(
        &config,
        "experiment = \"pn\"\nseed = 5\ntrials = 40\ngrid = [10, 20]\nminority_fraction = 0.5\ntwo_seat_fraction = 0.5\n",
    )
    .unwrap();
    let printed = stdout(&["simulate", "--config", config.to_str().unwrap()]);
    assert!(printed.starts_with("n,p_hat,se,pi1_hat,pi2_hat\n"));
    assert_eq!(printed.lines().count(), 3);

    let base = dir.path().join("out/pn");
    stdout(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--jobs",
        "2",
        "--out",
        base.to_str().unwrap(),
    ]);
    let csv = std::fs::read_to_string(base.with_extension("csv")).unwrap();
    assert_eq!(csv, printed);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(base.with_extension("json")).unwrap())
            .unwrap();
    assert_eq!(json["config"]["trials"], 40);
    assert_eq!(json["results"].as_array().unwrap().len(), 2);

    let fewer = stdout(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--trials",
        "10",
        "--seed",
        "6",
    ]);
    assert_eq!(fewer.lines().count(), 3);
}

#[test]
fn verify_passes_every_check() {
    let out = affirm(&["verify"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    let lines: Vec<&str> = text.lines().collect();
    let (summary, checks) = lines.split_last().unwrap();
    assert!(checks.len() >= 7);
    assert!(checks.iter().all(|l| l.starts_with("PASS ")), "{text}");
    assert!(summary.ends_with(" 0 failed"));
}

#[test]
fn bad_inputs_fail_cleanly() {
    let out = affirm(&[
        "solve",
        "--mechanism",
        "iam",
        "--market",
        "/nonexistent.json",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));

    let out = affirm(&[
        "solve",
        "--mechanism",
        "boston",
        "--market",
        &fixture("appendix-ttcm-q.json"),
    ]);
    assert!(!out.status.success());

    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "experiment = \"pn\"\nseed = 1\ntrials = 0\ngrid = [5]\nminority_fraction = 0.5\ntwo_seat_fraction = 0.5\n").unwrap();
    let out = affirm(&["simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trials"));
}
