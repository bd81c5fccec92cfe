//! End-to-end checks of the binary: exit codes, output determinism, and
//! the failure messages a caller scripts against.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_monocorr"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn gauss_grid_runs_clean_and_is_byte_deterministic() {
    let args = [
        "gauss-grid",
        "--t-range",
        "-2:2:5",
        "--s-range",
        "-2:2:5",
        "--rho-range",
        "0.1:0.9:3",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0, "stderr: {}", stderr(&a));
    assert_eq!(a.stdout, b.stdout, "two runs differ");
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "label,n,inequality,cov_num,cov_den,rhs_core,ratio,t,s,rho"
    );
    assert_eq!(text.lines().count(), 1 + 5 * 5 * 3);
    // Rows are sorted by label.
    let labels: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    let mut sorted = labels.clone();
    sorted.sort_unstable();
    assert_eq!(labels, sorted);
}

#[test]
fn thread_count_does_not_change_output_bytes() {
    let args = [
        "cube-audit",
    ];
    let free = bin().args(args).output().expect("runs");
    let one = bin()
        .args(args)
        .env("MONOCORR_THREADS", "1")
        .output()
        .expect("runs");
    let three = bin()
        .args(args)
        .env("MONOCORR_THREADS", "3")
        .output()
        .expect("runs");
    assert_eq!(code(&free), 0);
    assert_eq!(free.stdout, one.stdout);
    assert_eq!(free.stdout, three.stdout);
}

#[test]
fn invalid_thread_count_is_a_usage_error() {
    for bad in ["0", "-2", "many"] {
        let out = bin()
            .args(["mc-calibrate"])
            .env("MONOCORR_THREADS", bad)
            .output()
            .expect("runs");
        assert_eq!(code(&out), 2, "MONOCORR_THREADS={bad}");
        assert!(stderr(&out).contains("MONOCORR_THREADS"));
    }
}

#[test]
fn unknown_descriptor_kind_names_the_file_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fams.json");
    std::fs::write(&path, r#"[{"kind": "parity", "n": 4}]"#).unwrap();
    let out = run(&["cube-audit", "--families", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("fams.json"), "stderr: {err}");
    assert!(err.contains("parity"), "stderr: {err}");
}

#[test]
fn descriptor_outside_dimension_cap_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fams.json");
    std::fs::write(&path, r#"[{"kind": "dictator", "n": 40, "i": 0}]"#).unwrap();
    let out = run(&["cube-audit", "--families", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("dictator_40_i0"), "stderr: {}", stderr(&out));
}

#[test]
fn cube_audit_report_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let to_file = run(&["cube-audit", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&to_file), 0);
    let from_file = std::fs::read_to_string(&path).unwrap();
    let to_stdout = run(&["cube-audit"]);
    assert_eq!(from_file, stdout(&to_stdout));
}

#[test]
fn json_extension_switches_the_report_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&[
        "gauss-grid",
        "--t-range",
        "0:1:2",
        "--s-range",
        "0:0:1",
        "--rho-range",
        "0.5:0.5:1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.trim_start().starts_with('['));
    assert!(text.contains("\"inequality\":\"sign_cov_lower\""));
}

#[test]
fn gamma_min_records_then_matches_then_rejects_a_drifted_pin() {
    let dir = tempfile::tempdir().unwrap();
    let pins = dir.path().join("pins.json");
    let grid = [
        "gamma-min",
        "--t-range",
        "-4:4:5",
        "--s-range",
        "-4:4:5",
        "--rho-range",
        "0.2:1:3",
        "--pins",
    ];
    let mut first_args: Vec<&str> = grid.to_vec();
    first_args.push(pins.to_str().unwrap());
    let first = run(&first_args);
    assert_eq!(code(&first), 0, "stderr: {}", stderr(&first));
    let saved = std::fs::read_to_string(&pins).unwrap();
    assert!(saved.contains("gamma_grid_min"));

    let second = run(&first_args);
    assert_eq!(code(&second), 0);
    assert_eq!(first.stdout, second.stdout, "scan is deterministic");
    assert_eq!(
        saved,
        std::fs::read_to_string(&pins).unwrap(),
        "matching run does not rewrite the pin file"
    );

    // A different grid finds a different minimum; the pin must catch it.
    let drifted = run(&[
        "gamma-min",
        "--t-range",
        "0:0:1",
        "--s-range",
        "0:0:1",
        "--rho-range",
        "0.5:0.5:1",
        "--pins",
        pins.to_str().unwrap(),
    ]);
    assert_eq!(code(&drifted), 1);
    assert!(stderr(&drifted).contains("drifted"), "stderr: {}", stderr(&drifted));
}

#[test]
fn negative_correlation_axis_is_rejected() {
    let out = run(&[
        "gauss-grid",
        "--t-range",
        "0:1:2",
        "--s-range",
        "0:1:2",
        "--rho-range",
        "-0.5:0.5:3",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("rho"), "stderr: {}", stderr(&out));
}

#[test]
fn malformed_axis_is_rejected_by_the_parser() {
    for bad in ["1:2", "a:b:3", "0:1:0", "3:1:5"] {
        let out = run(&[
            "gamma-min",
            "--t-range",
            bad,
            "--s-range",
            "0:1:2",
            "--rho-range",
            "0.5:0.5:1",
        ]);
        assert_eq!(code(&out), 2, "axis {bad:?}");
    }
}

#[test]
fn theorem3_audit_reads_instances_from_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("instances.json");
    std::fs::write(
        &path,
        r#"[{
            "label": "hand_rolled",
            "f": {"base": 0.0, "atoms": [[0.0, 1.0]]},
            "g": {"base": 0.0, "atoms": [[0.5, 1.0]]},
            "w": [1.0, 0.0],
            "v": [0.6, 0.8]
        }]"#,
    )
    .unwrap();
    let out = run(&["theorem3-audit", "--instances", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("hand_rolled,"));
}

#[test]
fn theorem3_audit_rejects_a_negatively_correlated_instance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("instances.json");
    std::fs::write(
        &path,
        r#"[{
            "label": "anti",
            "f": {"base": 0.0, "atoms": [[0.0, 1.0]]},
            "g": {"base": 0.0, "atoms": [[0.0, 1.0]]},
            "w": [1.0, 0.0],
            "v": [-1.0, 0.0]
        }]"#,
    )
    .unwrap();
    let out = run(&["theorem3-audit", "--instances", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("anti"), "stderr: {}", stderr(&out));
}

#[test]
fn config_file_fields_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    std::fs::write(&cfg, r#"{"mc": {"samples": 70}}"#).unwrap();
    // Config alone is invalid (too few samples)...
    let bad = run(&["mc-calibrate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&bad), 2);
    // ...but a flag overrides it.
    let good = run(&[
        "mc-calibrate",
        "--config",
        cfg.to_str().unwrap(),
        "--mc-samples",
        "2000",
    ]);
    assert_eq!(code(&good), 0, "stderr: {}", stderr(&good));
}

#[test]
fn mc_calibrate_reports_every_case_and_passes_at_default_settings() {
    let out = run(&["mc-calibrate", "--mc-samples", "40000"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "label,truth,estimate,std_error,gap_se,pass"
    );
    assert_eq!(text.lines().count(), 51, "header plus fifty cases");
    let summary = stderr(&out);
    assert!(summary.contains("/50 inside"), "stderr: {summary}");
}

#[test]
fn help_lists_every_subcommand() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for sub in [
        "cube-audit",
        "gauss-grid",
        "gamma-min",
        "theorem3-audit",
        "mc-calibrate",
    ] {
        assert!(text.contains(sub), "help is missing {sub}");
    }
}

#[test]
fn missing_pin_directory_is_an_io_error_not_a_panic() {
    let out = run(&[
        "gamma-min",
        "--t-range",
        "0:0:1",
        "--s-range",
        "0:0:1",
        "--rho-range",
        "0.5:0.5:1",
        "--pins",
        "/nonexistent-dir/pins.json",
    ]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr(&out));
}

/// The pin file written by one campaign is readable by another: recording
/// through theorem3-audit and re-running compares against the stored value.
#[test]
fn step_pair_pins_round_trip_through_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let pins = dir.path().join("pins.json");
    let args = ["theorem3-audit", "--pins"];
    let mut full: Vec<&str> = args.to_vec();
    full.push(pins.to_str().unwrap());
    let first = run(&full);
    assert_eq!(code(&first), 0, "stderr: {}", stderr(&first));
    assert!(std::fs::read_to_string(&pins)
        .unwrap()
        .contains("min_ratio:step_pair"));
    let second = run(&full);
    assert_eq!(code(&second), 0);
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&second);
    assert!(text.lines().next().unwrap().ends_with(",pin_check"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",pass")));
}

/// Guard for the committed example configuration.
#[test]
fn committed_catalog_file_round_trips_through_cube_audit() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .join("data")
        .join("catalog.json");
    let out = run(&["cube-audit", "--families", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).lines().count() > 100);
}
