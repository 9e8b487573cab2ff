//! End-to-end tests of the `emseq` binary: exit codes, artifacts, cache.

use std::fs;
use std::process::{Command, Output};

const GOLDEN_30: &str = "010011010111000100001111011001";

fn emseq(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_emseq"));
    cmd.args(args);
    cmd
}

fn run(args: &[&str]) -> Output {
    emseq(args).output().expect("binary runs")
}

#[test]
fn gen_prints_golden_prefix() {
    let out = run(&["gen", "-n", "30"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), GOLDEN_30);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["gen", "-n", "0"][..],
        &["gen", "-n", "200000", "--engine", "naive"],
        &["stats", "-n", "100", "-w", "012"],
        &["verify", "-n", "100", "--lemma", "9.9"],
        &["stats", "-n", "100", "--checkpoints", "50,40"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}: {out:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn engines_emit_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let fast = dir.path().join("fast.emsq");
    let naive = dir.path().join("naive.emsq");
    assert!(run(&["gen", "-n", "2000", "--format", "binary", "--out", fast.to_str().unwrap()]).status.success());
    assert!(run(&["gen", "-n", "2000", "--engine", "naive", "--format", "binary", "--out", naive.to_str().unwrap()]).status.success());
    assert_eq!(fs::read(&fast).unwrap(), fs::read(&naive).unwrap());
}

#[test]
fn trace_csv_has_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let out = run(&["gen", "-n", "31", "--trace", trace.to_str().unwrap()]);
    assert!(out.status.success());
    let text = fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,match_start,match_len,source_end,emitted");
    // 28 generated steps (t = 4..=31); the last is the length-4 match
    assert_eq!(lines.clone().count(), 28);
    assert!(lines.last().unwrap().starts_with("31,27,4,"));
}

#[test]
fn rn_identity_and_gate_exit() {
    let out = run(&["rn", "-n", "1000"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["rn"]["size"], 990);
    assert_eq!(json["rn"]["identity_holds"], true);
}

#[test]
fn verify_suite_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let j1 = dir.path().join("a.json");
    let j2 = dir.path().join("b.json");
    let csv = dir.path().join("summary.csv");
    let args = |json: &str| {
        vec![
            "verify".to_string(), "-n".into(), "5000".into(),
            "--maxlen".into(), "6".into(), "--samples".into(), "500".into(),
            "--json-out".into(), json.into(), "--csv-out".into(), csv.to_str().unwrap().into(),
        ]
    };
    let out = emseq(&[]).args(args(j1.to_str().unwrap())).output().unwrap();
    assert!(out.status.success(), "{out:?}");
    let out = emseq(&[]).args(args(j2.to_str().unwrap())).output().unwrap();
    assert!(out.status.success());
    assert_eq!(fs::read(&j1).unwrap(), fs::read(&j2).unwrap());
    let summary = fs::read_to_string(&csv).unwrap();
    assert!(summary.starts_with("check,population,violations,worst_residual,pass"));
    assert!(summary.lines().skip(1).all(|l| l.ends_with("true")));
}

#[test]
fn threshold_config_can_force_gate_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.cfg");
    fs::write(&cfg, "residual_final = 0.0\n").unwrap();
    let out = run(&["verify", "-n", "5000", "--maxlen", "4", "--samples", "10", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    fs::write(&cfg, "no_such_key = 1\n").unwrap();
    let out = run(&["verify", "-n", "5000", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_key"));
}

#[test]
fn cache_dir_is_populated_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let mut cmd = emseq(&["gen", "-n", "1234"]);
    cmd.env("EMSEQ_CACHE_DIR", dir.path());
    let first = cmd.output().unwrap();
    assert!(first.status.success());
    let cached = dir.path().join("em_1234.emsq");
    assert!(cached.is_file());

    let mut cmd = emseq(&["gen", "-n", "1234"]);
    cmd.env("EMSEQ_CACHE_DIR", dir.path());
    let second = cmd.output().unwrap();
    assert!(second.status.success());
    assert_eq!(first.stdout, second.stdout);

    // corrupt cache must not silently pass when traces force a replay
    fs::write(&cached, b"EMSQ\x01garbage").unwrap();
    let mut cmd = emseq(&["gen", "-n", "1234", "--trace", dir.path().join("t.csv").to_str().unwrap()]);
    cmd.env("EMSEQ_CACHE_DIR", dir.path());
    let third = cmd.output().unwrap();
    assert_eq!(third.status.code(), Some(1));
}

#[test]
fn tree_dot_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d1 = dir.path().join("a.dot");
    let d2 = dir.path().join("b.dot");
    for d in [&d1, &d2] {
        let out = run(&["tree", "-n", "300", "--dot", d.to_str().unwrap(), "--max-depth", "6"]);
        assert!(out.status.success());
    }
    let text = fs::read_to_string(&d1).unwrap();
    assert_eq!(text, fs::read_to_string(&d2).unwrap());
    assert!(text.starts_with("digraph"));
    assert!(text.contains("lambda"));
}
