use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SCENARIO: &str = r#"
name = "tiny"
seed = 3
solvers = ["mis:2", "greedy"]

[constellation]
kind = "walker"
total = 2
planes = 2
phasing = 1
altitude_km = 500.0
inclination_deg = 97.4

[horizon]
duration_s = 43200.0

[requests]
source = "random"
count = 40
"#;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_constel-sched"))
        .args(args)
        .output()
        .unwrap()
}

fn write_scenario(dir: &Path) -> String {
    let p = dir.join("tiny.toml");
    fs::write(&p, SCENARIO).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn run_writes_schedules_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write_scenario(dir.path());
    let out = dir.path().join("out");
    let o = bin(&["run", "--scenario", &sc, "--out", out.to_str().unwrap(), "--seed", "5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "results.csv",
        "results.txt",
        "results.json",
        "schedule_mis_2.json",
        "schedule_greedy.json",
    ] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let sched: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("schedule_greedy.json")).unwrap()).unwrap();
    assert_eq!(sched["solver"], "greedy");
    assert_eq!(
        sched["objective"].as_u64().unwrap() as usize,
        sched["collects"].as_array().unwrap().len()
    );
    let results: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("results.json")).unwrap()).unwrap();
    assert_eq!(results["entries"][0]["result"]["metadata"]["seed"], 5);
    assert!(String::from_utf8_lossy(&o.stdout).contains("tiny"));
}

#[test]
fn solver_flag_overrides_file() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write_scenario(dir.path());
    let out = dir.path().join("out");
    let o = bin(&[
        "run",
        "--scenario",
        &sc,
        "--solver",
        "exact:5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(out.join("schedule_exact_5.json").is_file());
    assert!(!out.join("schedule_greedy.json").exists());
}

#[test]
fn graph_export_then_solve() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write_scenario(dir.path());
    let dimacs = dir.path().join("g.dimacs");
    let lp = dir.path().join("g.lp");
    let jsonl = dir.path().join("collects.jsonl");
    let o = bin(&[
        "graph",
        "--scenario",
        &sc,
        "--export",
        dimacs.to_str().unwrap(),
        "--lp",
        lp.to_str().unwrap(),
        "--collects",
        jsonl.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let header = fs::read_to_string(&dimacs).unwrap();
    let n: usize = header
        .lines()
        .find(|l| l.starts_with("p "))
        .unwrap()
        .split_whitespace()
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(fs::read_to_string(&jsonl).unwrap().lines().count(), n);
    assert!(fs::read_to_string(&lp).unwrap().contains("Binary"));

    let cert = dir.path().join("cert.txt");
    let o = bin(&[
        "solve-graph",
        dimacs.to_str().unwrap(),
        "--solver",
        "exact",
        "--certificate",
        cert.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(&cert).unwrap();
    let mut lines = text.lines();
    let size: usize = lines.next().unwrap().strip_prefix("s ").unwrap().parse().unwrap();
    let ids: Vec<usize> = lines.map(|l| l.parse().unwrap()).collect();
    assert_eq!(ids.len(), size);
    assert!(ids.iter().all(|&v| (1..=n).contains(&v)));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.toml");
    assert_eq!(
        bin(&["run", "--scenario", missing.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(
        bin(&["solve-graph", "x.dimacs", "--solver", "fastest"]).status.code(),
        Some(2)
    );

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, SCENARIO.replace("count = 40", "count = 0")).unwrap();
    let o = bin(&["run", "--scenario", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("config"));

    let garbage = dir.path().join("g.dimacs");
    fs::write(&garbage, "p edge 2 1\ne 1 5\n").unwrap();
    assert_eq!(bin(&["solve-graph", garbage.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn bench_runs_suite() {
    let dir = tempfile::tempdir().unwrap();
    write_scenario(dir.path());
    let suite = dir.path().join("suite.toml");
    fs::write(&suite, "scenarios = [\"tiny.toml\"]\n").unwrap();
    let out = dir.path().join("bench");
    let o = bin(&[
        "bench",
        "--suite",
        suite.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    assert!(csv.lines().next().unwrap().contains("best"));
}
