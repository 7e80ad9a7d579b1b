//! Linear-phase invariance: multiplying by `e(θn)` must leave every interval
//! norm unchanged.

use crate::corpus::{bounded_series, suite_rng};
use crate::report::{Assertion, CaseRecord, ExperimentSpec, ReportError};
use crate::suites::RunContext;
use gowers_core::gowers::{norm_subset, Method, SubsetDomain};
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

const FUNCTION_COUNT: u64 = 10;
const THETA_COUNT: usize = 20;
const ORDERS: [u32; 2] = [1, 2];
const SALT: u64 = 0x02;

pub fn default_spec() -> ExperimentSpec {
    let mut spec = ExperimentSpec::named("phase-invariance");
    spec.sizes = vec![64];
    spec.params.tolerance = 1e-9;
    spec
}

pub fn run(spec: &ExperimentSpec, ctx: &RunContext) -> Result<Vec<CaseRecord>, ReportError> {
    let tolerance = ctx.tolerance_for(spec);
    let n = *spec.sizes.first().unwrap_or(&64);
    let mut rng = suite_rng(SALT);
    let thetas: Vec<f64> = (0..THETA_COUNT).map(|_| rng.random::<f64>()).collect();

    let mut grid = Vec::new();
    for seed in 0..FUNCTION_COUNT {
        for s in ORDERS {
            grid.push((seed, s));
        }
    }
    let cases: Vec<CaseRecord> = grid
        .into_par_iter()
        .map(|(seed, s)| {
            let mut case = CaseRecord::new(
                format!("f{seed:02}-s{s}"),
                json!({"n": n, "s": s, "seed": seed, "thetas": thetas}),
            );
            let f = bounded_series(seed, 1, n);
            let domain = SubsetDomain::Interval { lo: 1, hi: n };
            let base = match norm_subset(&f, &domain, s, Method::Fast) {
                Ok(report) => report.norm_value,
                Err(err) => {
                    case.assert(Assertion::exact_flag(&format!("norm-computed ({err})"), false));
                    return case;
                }
            };
            case.record("base_norm", base);
            for (k, &theta) in thetas.iter().enumerate() {
                match norm_subset(&f.modulate(theta), &domain, s, Method::Fast) {
                    Ok(report) => case.assert(Assertion::identity(
                        &format!("theta-{k:02}"),
                        report.norm_value,
                        base,
                        tolerance,
                    )),
                    Err(err) => case.assert(Assertion::exact_flag(
                        &format!("theta-{k:02}-computed ({err})"),
                        false,
                    )),
                }
            }
            case
        })
        .collect();
    Ok(cases)
}
