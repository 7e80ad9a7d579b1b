//! Acceptance gate: one test per shipped criterion, each running the
//! corresponding verification suite end to end with its built-in schedule
//! and printing a single pass/fail line (plus evidence for any failing
//! assertion).  Wall-clock budgets are asserted where a criterion states
//! one.
//!
//! Run `cargo test --test acceptance -- --nocapture` to see every line.

use gowers_workbench::report::SuiteReport;
use gowers_workbench::suites::{default_spec, run_suite, RunContext};

fn run(suite: &str) -> SuiteReport {
    let spec = default_spec(suite).expect("suite name is registered");
    run_suite(&spec, &RunContext::default()).expect("suite runs to completion")
}

fn check(criterion: u32, suite: &str, budget_secs: Option<u64>) {
    let report = run(suite);
    let status = if report.all_pass() { "PASS" } else { "FAIL" };
    println!(
        "criterion {criterion} ({suite}): {status} — {}/{} cases passed in {} ms",
        report.passed,
        report.passed + report.failed,
        report.wall_ms
    );
    for case in report.cases.iter().filter(|case| !case.pass) {
        for assertion in case.assertions.iter().filter(|assertion| !assertion.pass) {
            println!(
                "  {} / {}: lhs={:.9e} rhs={:.9e} tol={:.1e}",
                case.name, assertion.name, assertion.lhs, assertion.rhs, assertion.tolerance
            );
        }
    }
    if let Some(secs) = budget_secs {
        assert!(
            report.wall_ms <= secs * 1000,
            "{suite} exceeded its {secs}s budget: {} ms",
            report.wall_ms
        );
    }
    assert!(
        report.all_pass(),
        "criterion {criterion} ({suite}): {} failing case(s): {:?}",
        report.failed,
        report.failing_cases()
    );
}

#[test]
fn criterion_01_norm_equivalence() {
    check(1, "norm-equivalence", Some(120));
}

#[test]
fn criterion_02_phase_invariance() {
    check(2, "phase-invariance", None);
}

#[test]
fn criterion_03_dilation_invariance() {
    check(3, "dilation-invariance", None);
}

#[test]
fn criterion_04_substitution_identity() {
    check(4, "substitution-identity", None);
}

#[test]
fn criterion_05_flag_complexity() {
    check(5, "flag-complexity", Some(60));
}

#[test]
fn criterion_06_flagification() {
    check(6, "flagification", None);
}

#[test]
fn criterion_07_interval_chain() {
    check(7, "interval-chain", None);
}

#[test]
fn criterion_08_packing_incidence() {
    check(8, "packing-incidence", None);
}

#[test]
fn criterion_09_cyclic_vonneumann() {
    check(9, "cyclic-vonneumann", Some(90));
}

#[test]
fn criterion_10_qualitative_demo() {
    check(10, "qualitative-demo", Some(600));
}

#[test]
fn criterion_11_smoothing() {
    check(11, "smoothing", None);
}
