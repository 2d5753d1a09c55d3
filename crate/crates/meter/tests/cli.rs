use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn meter(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aai-meter")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// A small self-improving simulation in a fresh directory.
fn simulated() -> TempDir {
    let dir = TempDir::new().unwrap();
    let o = meter(&["simulate", "--seed", "3", "--runs", "10", "--archetype", "self-improving", "--out", "sim"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    dir
}

#[test]
fn report_is_byte_identical_across_runs_and_job_counts() {
    let dir = simulated();
    for (out, jobs) in [("a", "1"), ("b", "1"), ("c", "0")] {
        let o = meter(&["report", "--config", "sim/config.toml", "--jobs", jobs, "--out", out, "sim/traces.jsonl"], dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let read = |d: &str, f: &str| fs::read(dir.path().join(d).join(f)).unwrap();
    for f in ["bundle.json", "bundle.sha256", "tables/axes.csv", "tables/gates.csv", "plots/self-improving-frontier.svg"] {
        assert_eq!(read("a", f), read("b", f), "{f} differs between repeated runs");
        assert_eq!(read("a", f), read("c", f), "{f} differs between job counts");
    }
    let bundle: serde_json::Value = serde_json::from_slice(&read("a", "bundle.json")).unwrap();
    assert_eq!(bundle["seed"], 3);
    assert_eq!(
        bundle["inputs"][0]["records"].as_u64().unwrap() as usize,
        fs::read_to_string(dir.path().join("sim/traces.jsonl")).unwrap().lines().count()
    );
}

#[test]
fn seed_flag_changes_bootstrap_output() {
    let dir = simulated();
    for (out, seed) in [("a", "1"), ("b", "2")] {
        let o = meter(&["axes", "--config", "sim/config.toml", "--seed", seed, "--out", out, "sim/traces.jsonl"], dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_ne!(fs::read(dir.path().join("a")).unwrap(), fs::read(dir.path().join("b")).unwrap());
}

#[test]
fn gates_without_kappa_star_names_the_field() {
    let dir = simulated();
    let cfg = fs::read_to_string(dir.path().join("sim/config.toml")).unwrap();
    let stripped: String = cfg.lines().filter(|l| !l.starts_with("kappa_star")).map(|l| format!("{l}\n")).collect();
    fs::write(dir.path().join("nok.toml"), stripped).unwrap();

    let o = meter(&["axes", "--config", "nok.toml", "sim/traces.jsonl"], dir.path());
    assert!(o.status.success(), "axes do not need kappa_star: {}", stderr(&o));
    let o = meter(&["gates", "--config", "nok.toml", "sim/traces.jsonl"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("gates.kappa_star"), "{}", stderr(&o));
}

#[test]
fn required_level_not_reached_exits_with_two() {
    let dir = simulated();
    let o = meter(&["gates", "--config", "sim/config.toml", "--require-level", "5", "sim/traces.jsonl"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("below AAI-5"));
}

#[test]
fn malformed_record_reports_file_and_line() {
    let dir = simulated();
    let good = fs::read_to_string(dir.path().join("sim/traces.jsonl")).unwrap();
    let first = good.lines().next().unwrap();
    fs::write(dir.path().join("bad.jsonl"), format!("{first}\n{{\"quality\": 2}}\n")).unwrap();
    let o = meter(&["axes", "--config", "sim/config.toml", "bad.jsonl"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.jsonl:2:"), "{}", stderr(&o));
}

#[test]
fn missing_config_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let o = meter(&["axes", "x.jsonl"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--config"));
}
