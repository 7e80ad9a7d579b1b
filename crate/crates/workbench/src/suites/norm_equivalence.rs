//! Norm-engine equivalence: the definition-faithful enumeration and the
//! transform-based fast path must agree on value and configuration count.

use crate::corpus::bounded_series;
use crate::report::{Assertion, CaseRecord, ExperimentSpec, ReportError};
use crate::suites::RunContext;
use gowers_core::gowers::{pp_sum_fast, pp_sum_oracle};
use rayon::prelude::*;
use serde_json::json;

const SERIES_PER_CELL: u64 = 50;
const ORDERS: [u32; 3] = [1, 2, 3];

pub fn default_spec() -> ExperimentSpec {
    let mut spec = ExperimentSpec::named("norm-equivalence");
    spec.sizes = vec![16, 32, 64];
    spec.params.tolerance = 1e-9;
    spec
}

fn case_seed(n: i64, s: u32, index: u64) -> u64 {
    n as u64 * 1_000_000 + s as u64 * 1_000 + index
}

pub fn run(spec: &ExperimentSpec, ctx: &RunContext) -> Result<Vec<CaseRecord>, ReportError> {
    let tolerance = ctx.tolerance_for(spec);
    let mut grid = Vec::new();
    for &n in &spec.sizes {
        for s in ORDERS {
            for index in 0..SERIES_PER_CELL {
                grid.push((n, s, index));
            }
        }
    }
    let cases: Vec<CaseRecord> = grid
        .into_par_iter()
        .map(|(n, s, index)| {
            let seed = case_seed(n, s, index);
            let mut case = CaseRecord::new(
                format!("n{n:03}-s{s}-{index:02}"),
                json!({"n": n, "s": s, "seed": seed}),
            );
            let f = bounded_series(seed, 1, n);
            match (pp_sum_oracle(&f, s), pp_sum_fast(&f, s)) {
                (Ok(oracle), Ok(fast)) => {
                    case.record("oracle_sum", oracle.value.re);
                    case.record("fast_sum", fast.value.re);
                    case.record("config_count", oracle.config_count as f64);
                    case.assert(Assertion::identity(
                        "sum-agreement",
                        fast.value.re,
                        oracle.value.re,
                        tolerance,
                    ));
                    case.assert(Assertion::exact_count(
                        "config-count-agreement",
                        fast.config_count,
                        oracle.config_count,
                    ));
                }
                (oracle, fast) => {
                    let reason = oracle.err().or(fast.err()).expect("one side failed");
                    case.assert(Assertion::exact_flag(
                        &format!("both-engines-run ({reason})"),
                        false,
                    ));
                }
            }
            case
        })
        .collect();
    Ok(cases)
}
