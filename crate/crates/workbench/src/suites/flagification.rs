//! Witness rescaling: every sampled system must admit nonzero rescaling
//! factors whose application makes it translation invariant, without
//! disturbing its independence degree.

use crate::corpus::{random_system, suite_rng};
use crate::report::{Assertion, CaseRecord, ExperimentSpec, ReportError};
use crate::suites::RunContext;
use rayon::prelude::*;
use serde_json::json;

const SYSTEM_COUNT: usize = 100;
const SEARCH_BOUND: i64 = 16;
const DEGREE_BOUND: u32 = 4;
const SALT: u64 = 0x06;

pub fn default_spec() -> ExperimentSpec {
    ExperimentSpec::named("flagification")
}

pub fn run(_spec: &ExperimentSpec, _ctx: &RunContext) -> Result<Vec<CaseRecord>, ReportError> {
    let mut rng = suite_rng(SALT);
    let systems: Vec<_> = (0..SYSTEM_COUNT)
        .map(|_| random_system(&mut rng, 5, 3, 3))
        .collect();
    let cases: Vec<CaseRecord> = systems
        .into_par_iter()
        .enumerate()
        .map(|(index, system)| {
            let mut case = CaseRecord::new(
                format!("sys-{index:03}"),
                json!({"system": format!("{system}"), "search_bound": SEARCH_BOUND}),
            );
            let flag = match system.flagify(SEARCH_BOUND) {
                Ok(flag) => flag,
                Err(err) => {
                    case.assert(Assertion::exact_flag(
                        &format!("flagification-exists ({err})"),
                        false,
                    ));
                    return case;
                }
            };
            case.record("scale_bound", flag.scale_bound() as f64);
            case.assert(Assertion::exact_flag(
                "all-scales-nonzero",
                flag.a.iter().all(|&a| a != 0),
            ));
            case.assert(Assertion::exact_flag(
                "scale-product-constant",
                flag.a
                    .iter()
                    .zip(&flag.b)
                    .all(|(&a, &b)| a as i128 * b as i128 == flag.product as i128),
            ));
            case.assert(Assertion::exact_flag(
                "rescaled-translation-invariant",
                flag.rescaled.is_translation_invariant(),
            ));
            let before = system
                .independence_degree(DEGREE_BOUND)
                .expect("degree bound is valid");
            case.record("independence_degree", before.map_or(-1.0, |s| s as f64));
            if let Some(degree) = before {
                let after = flag
                    .rescaled
                    .independence_degree(DEGREE_BOUND)
                    .expect("degree bound is valid");
                case.assert(Assertion::exact_count(
                    "independence-degree-preserved",
                    after.map_or(u128::MAX, |s| s as u128),
                    degree as u128,
                ));
            }
            case
        })
        .collect();
    Ok(cases)
}
