//! Span-containment (flag) checks and complexity parameters on the shipped
//! and randomly sampled systems: exact integer linear algebra throughout.

use crate::corpus::{
    ap_system, non_flag_system, random_translation_invariant_system, suite_rng,
    NON_FLAG_VIOLATION,
};
use crate::report::{Assertion, CaseRecord, ExperimentSpec, ReportError};
use crate::suites::RunContext;
use rayon::prelude::*;
use serde_json::json;

const AP_KMAX: u32 = 6;
const TI_KMAX: u32 = 5;
const TI_COUNT: usize = 100;
const SALT: u64 = 0x05;

pub fn default_spec() -> ExperimentSpec {
    let mut spec = ExperimentSpec::named("flag-complexity");
    spec.systems = vec![ap_system(3), ap_system(4), ap_system(5), non_flag_system()];
    spec
}

pub fn run(_spec: &ExperimentSpec, _ctx: &RunContext) -> Result<Vec<CaseRecord>, ReportError> {
    let mut cases = Vec::new();

    for k in [3usize, 4, 5] {
        let system = ap_system(k);
        let expected_degree = k as u32 - 2;
        let mut case = CaseRecord::new(
            format!("ap{k}"),
            json!({"system": format!("{system}"), "kmax": AP_KMAX}),
        );
        let report = system.is_flag(AP_KMAX).expect("kmax is valid");
        case.assert(Assertion::exact_flag("flag-up-to-kmax", report.is_flag_up_to_kmax));
        let degree = system
            .independence_degree(expected_degree + 2)
            .expect("degree bound is valid");
        case.record(
            "independence_degree",
            degree.map_or(-1.0, |s| s as f64),
        );
        case.assert(Assertion::exact_count(
            "independence-degree",
            degree.map_or(u128::MAX, |s| s as u128),
            expected_degree as u128,
        ));
        let cs = system.cs_complexity().expect("progressions have a complexity");
        case.record("cs_complexity", cs as f64);
        case.assert(Assertion::exact_count(
            "cs-complexity",
            cs as u128,
            expected_degree as u128,
        ));
        cases.push(case);
    }

    let mut rng = suite_rng(SALT);
    let systems: Vec<_> = (0..TI_COUNT)
        .map(|_| random_translation_invariant_system(&mut rng, 4, 3, 3))
        .collect();
    let ti_cases: Vec<CaseRecord> = systems
        .into_par_iter()
        .enumerate()
        .map(|(index, system)| {
            let mut case = CaseRecord::new(
                format!("ti-{index:03}"),
                json!({"system": format!("{system}"), "kmax": TI_KMAX}),
            );
            case.assert(Assertion::exact_flag(
                "translation-invariant",
                system.is_translation_invariant(),
            ));
            let report = system.is_flag(TI_KMAX).expect("kmax is valid");
            case.record(
                "first_violation_low",
                report.first_violation.map_or(-1.0, |(k, _)| k as f64),
            );
            case.assert(Assertion::exact_flag("flag-up-to-kmax", report.is_flag_up_to_kmax));
            case
        })
        .collect();
    cases.extend(ti_cases);

    let mut case = CaseRecord::new(
        "non-flag-stability",
        json!({
            "system": format!("{}", non_flag_system()),
            "kmax": AP_KMAX,
            "expected_violation": NON_FLAG_VIOLATION,
        }),
    );
    let first = non_flag_system().is_flag(AP_KMAX).expect("kmax is valid");
    let second = non_flag_system().is_flag(AP_KMAX).expect("kmax is valid");
    case.assert(Assertion::exact_flag("violation-found", !first.is_flag_up_to_kmax));
    let (low, high) = first.first_violation.unwrap_or((0, 0));
    case.record("violation_low", low as f64);
    case.record("violation_high", high as f64);
    case.assert(Assertion::exact_count(
        "violation-pair-low",
        low as u128,
        NON_FLAG_VIOLATION.0 as u128,
    ));
    case.assert(Assertion::exact_count(
        "violation-pair-high",
        high as u128,
        NON_FLAG_VIOLATION.1 as u128,
    ));
    case.assert(Assertion::exact_flag("rerun-identical", first == second));
    cases.push(case);

    Ok(cases)
}
