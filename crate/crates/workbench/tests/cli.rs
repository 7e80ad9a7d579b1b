//! End-to-end checks of the shipped binary: the exit-code contract, output
//! determinism across reruns, the fault-injection self-test, CSV round-trips
//! through the bundled readers, and the spec-file / environment-variable
//! configuration paths.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gowers_workbench::plot::read_values;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_workbench"))
}

/// Fresh scratch directory, unique per test name.
fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("workbench-cli-{tag}"));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).expect("create scratch dir");
    dir
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn report_json(dir: &Path, suite: &str) -> serde_json::Value {
    let path = dir.join(format!("{suite}.json"));
    let text = fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("report {} should exist: {e}", path.display()));
    serde_json::from_str(&text).expect("report parses as JSON")
}

#[test]
fn list_prints_every_registered_suite() {
    let output = bin().args(["verify", "--list"]).output().expect("spawn");
    assert!(output.status.success());
    let text = stdout_of(&output);
    for name in [
        "norm-equivalence",
        "phase-invariance",
        "dilation-invariance",
        "substitution-identity",
        "flag-complexity",
        "flagification",
        "interval-chain",
        "packing-incidence",
        "cyclic-vonneumann",
        "qualitative-demo",
        "smoothing",
    ] {
        assert!(text.contains(name), "missing suite `{name}` in:\n{text}");
    }
}

#[test]
fn passing_suite_exits_zero_and_reruns_byte_identically() {
    let dir_a = scratch("rerun-a");
    let dir_b = scratch("rerun-b");
    for dir in [&dir_a, &dir_b] {
        let output = bin()
            .args(["verify", "--suite", "substitution-identity", "--out"])
            .arg(dir)
            .output()
            .expect("spawn");
        assert!(
            output.status.success(),
            "expected exit 0, got {:?}: {}",
            output.status.code(),
            stdout_of(&output)
        );
        assert!(stdout_of(&output).contains("substitution-identity: PASS"));
    }
    let mut a = report_json(&dir_a, "substitution-identity");
    let mut b = report_json(&dir_b, "substitution-identity");
    // Wall time is the one intentionally nondeterministic field.
    a["wall_ms"] = serde_json::json!(0);
    b["wall_ms"] = serde_json::json!(0);
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap(),
        "reruns must agree byte for byte outside wall_ms"
    );
}

#[test]
fn fault_injection_exits_one_and_names_the_failing_case() {
    let dir = scratch("fault");
    let output = bin()
        .args(["verify", "--suite", "flagification", "--self-test-fault", "--out"])
        .arg(&dir)
        .output()
        .expect("spawn");
    assert_eq!(output.status.code(), Some(1), "assertion failures exit 1");
    let text = stdout_of(&output);
    assert!(
        text.contains("flagification: FAIL") && text.contains("1/"),
        "failure line should name the suite and count: {text}"
    );
    let report = report_json(&dir, "flagification");
    assert_eq!(report["failed"], serde_json::json!(1));
}

#[test]
fn unknown_suite_is_a_usage_error_with_exit_two() {
    let output = bin()
        .args(["verify", "--suite", "no-such-suite"])
        .output()
        .expect("spawn");
    assert_eq!(output.status.code(), Some(2), "usage errors exit 2");
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("no-such-suite"), "stderr names the bad suite: {err}");
}

#[test]
fn values_csv_round_trips_through_the_bundled_reader() {
    let dir = scratch("csv");
    let output = bin()
        .args(["verify", "--suite", "dilation-invariance", "--out"])
        .arg(&dir)
        .output()
        .expect("spawn");
    assert!(output.status.success());
    let rows = read_values(&dir.join("dilation-invariance-values.csv")).expect("CSV parses");
    assert!(!rows.is_empty(), "a passing run records values");
    assert!(rows.iter().all(|row| row.value.is_finite()));
}

#[test]
fn spec_file_selects_the_suite_and_env_var_sets_the_output() {
    let dir = scratch("spec-env");
    let spec_path = dir.join("spec.json");
    fs::write(
        &spec_path,
        r#"{"suite": "dilation-invariance", "sizes": [16, 32]}"#,
    )
    .expect("write spec");
    let output = bin()
        .args(["verify", "--spec"])
        .arg(&spec_path)
        .env("WORKBENCH_OUT", &dir)
        .output()
        .expect("spawn");
    assert!(
        output.status.success(),
        "spec-driven run passes: {}",
        stdout_of(&output)
    );
    let report = report_json(&dir, "dilation-invariance");
    let inputs: Vec<String> = report["cases"]
        .as_array()
        .expect("cases array")
        .iter()
        .map(|case| case["inputs"].to_string())
        .collect();
    assert!(
        inputs.iter().any(|text| text.contains("16")),
        "the custom size schedule reaches the cases"
    );
}

#[test]
fn norm_routes_agree_from_the_command_line() {
    let value = |method: &str| -> f64 {
        let output = bin()
            .args([
                "norm",
                "--domain",
                "interval:-12..12",
                "--s",
                "2",
                "--method",
                method,
                "--gen",
                "pm1:5",
            ])
            .output()
            .expect("spawn");
        assert!(output.status.success(), "norm command runs");
        let parsed: serde_json::Value =
            serde_json::from_str(&stdout_of(&output)).expect("JSON output");
        parsed["report"]["norm_value"].as_f64().expect("norm value")
    };
    let fast = value("fast");
    let oracle = value("oracle");
    assert!(
        (fast - oracle).abs() <= 1e-9 * oracle.max(1.0),
        "fast ({fast}) and oracle ({oracle}) must agree"
    );
}
