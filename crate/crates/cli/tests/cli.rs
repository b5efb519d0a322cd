//! End-to-end tests of the binary: exit codes, determinism, config
//! precedence, manifest reproduction, and output formats.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roughlab"))
        .args(args)
        .output()
        .expect("binary launches")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn sample_is_deterministic_and_manifest_hashes_match() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let r = run(&[
            "sample",
            "--hurst",
            "0.45",
            "--n",
            "64",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(r.status.success(), "{}", stderr(&r));
    }
    let pa = read(&a, "path.csv");
    assert_eq!(pa, read(&b, "path.csv"), "same invocation must be byte-identical");
    let rows = pa.split(|&c| c == b'\n').filter(|l| !l.is_empty()).count();
    assert_eq!(rows, 1 + 64, "header plus one row per grid point");

    let manifest: serde_json::Value =
        serde_json::from_slice(&read(&a, "manifest.json")).unwrap();
    assert_eq!(manifest["command"], "sample");
    let recorded = manifest["outputs"][0]["sha256"].as_str().unwrap();
    assert_eq!(recorded, roughlab_core::sha256_hex(&pa), "manifest hash covers file bytes");
}

#[test]
fn invalid_hurst_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&["sample", "--hurst", "1.5", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("invalid input"), "stderr: {}", stderr(&r));
    assert!(!dir.path().join("path.csv").exists(), "failed runs write nothing");
}

#[test]
fn huge_gamma_gives_zero_crossings() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&[
        "greedy",
        "--gamma",
        "1e9",
        "--n",
        "64",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", stderr(&r));
    assert!(stdout(&r).contains("crossings = 0"), "stdout: {}", stdout(&r));
    let csv = String::from_utf8(read(dir.path(), "partition.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "i,tau_i,attained_norm");
    assert_eq!(lines.len(), 2, "one piece when the threshold is never crossed");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"hurst": 0.35, "n": 32, "seed": 3}"#).unwrap();
    let out = dir.path().join("run");
    let r = run(&[
        "sample",
        "--config",
        cfg.to_str().unwrap(),
        "--n",
        "16",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", stderr(&r));
    let manifest: serde_json::Value = serde_json::from_slice(&read(&out, "manifest.json")).unwrap();
    assert_eq!(manifest["config"]["n"], 16, "flag wins over file");
    assert_eq!(manifest["config"]["hurst"], 0.35, "file wins over default");
    assert_eq!(manifest["config"]["seed"], 3);
}

#[test]
fn manifest_reproduces_outputs_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let again = dir.path().join("again");
    let r = run(&[
        "lift",
        "--hurst",
        "0.4",
        "--dims",
        "2",
        "--n",
        "32",
        "--seed",
        "11",
        "--out",
        first.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", stderr(&r));
    let manifest = first.join("manifest.json");
    let r = run(&[
        "lift",
        "--config",
        manifest.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", stderr(&r));
    assert_eq!(read(&first, "path.csv"), read(&again, "path.csv"));
    assert_eq!(read(&first, "lift.csv"), read(&again, "lift.csv"));
    let lift = String::from_utf8(read(&first, "lift.csv")).unwrap();
    assert_eq!(lift.lines().count(), 1 + 31 * 2 * 2, "per-step entries only");
}

#[test]
fn manifest_for_another_command_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let r = run(&["sample", "--n", "16", "--out", out.to_str().unwrap()]);
    assert!(r.status.success());
    let r = run(&[
        "greedy",
        "--config",
        out.join("manifest.json").to_str().unwrap(),
        "--out",
        dir.path().join("g").to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("produced by"), "stderr: {}", stderr(&r));
}

#[test]
fn unknown_config_key_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"hirst": 0.35}"#).unwrap();
    let r = run(&[
        "sample",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("hirst"), "stderr names the bad key: {}", stderr(&r));
}

#[test]
fn missing_input_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&[
        "norms",
        "--input",
        dir.path().join("nope.csv").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(4));
}

#[test]
fn norms_reads_back_a_sampled_path() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s");
    let r = run(&["sample", "--n", "64", "--seed", "2", "--out", s.to_str().unwrap()]);
    assert!(r.status.success());
    let n = dir.path().join("n");
    let r = run(&[
        "norms",
        "--input",
        s.join("path.csv").to_str().unwrap(),
        "--kind",
        "p-sigma-var",
        "--p",
        "2.5",
        "--sigma",
        "0.02",
        "--out",
        n.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", stderr(&r));
    let report: serde_json::Value = serde_json::from_slice(&read(&n, "norms.json")).unwrap();
    assert_eq!(report["kind"], "p-sigma-var");
    assert!(report["value"].as_f64().unwrap() > 0.0);
    let manifest: serde_json::Value = serde_json::from_slice(&read(&n, "manifest.json")).unwrap();
    assert!(
        manifest["input_hashes"]
            .as_object()
            .unwrap()
            .values()
            .next()
            .unwrap()
            .as_str()
            .unwrap()
            .len()
            == 64,
        "input file hash is recorded"
    );
}

#[test]
fn unknown_norm_kind_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&["norms", "--kind", "q-var", "--n", "16", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn tail_outputs_table_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&[
        "tail",
        "--samples",
        "40",
        "--steps",
        "64",
        "--gamma",
        "0.25",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", stderr(&r));
    let csv = String::from_utf8(read(dir.path(), "tail.csv")).unwrap();
    assert!(csv.starts_with("n,count,prob\n"));
    let summary: serde_json::Value =
        serde_json::from_slice(&read(dir.path(), "tail_summary.json")).unwrap();
    assert_eq!(summary["samples"], 40);
    assert!(summary["threshold"].as_f64().unwrap() > 0.0);
}

#[test]
fn solve_writes_trajectory_rows() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&[
        "solve",
        "--drift",
        "diagonal-linear",
        "--dims",
        "2",
        "--diffusion",
        "coordinate-sin",
        "--sigma-g",
        "0.1",
        "--steps",
        "32",
        "--y0",
        "0.5,-0.5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", stderr(&r));
    let csv = String::from_utf8(read(dir.path(), "trajectory.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,y1,y2");
    assert_eq!(lines.len(), 1 + 33);
    assert!(lines[1].starts_with("0.0000000000000000e0,5.0000000000000000e-1,-5.00"));
}

#[test]
fn sweep_output_does_not_depend_on_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one");
    let two = dir.path().join("two");
    for (out, jobs) in [(&one, "1"), (&two, "2")] {
        let r = run(&[
            "stability",
            "--sigmas",
            "0.1,0.3",
            "--seeds",
            "3",
            "--steps",
            "256",
            "--horizon",
            "5",
            "--jobs",
            jobs,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(r.status.success(), "{}", stderr(&r));
    }
    assert_eq!(read(&one, "sweep.csv"), read(&two, "sweep.csv"));
    assert_eq!(read(&one, "sweep_summary.json"), read(&two, "sweep_summary.json"));
    let csv = String::from_utf8(read(&one, "sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 3, "one row per (strength, seed)");
    assert!(csv.starts_with("cg,seed,exponent,stable\n"));
}
