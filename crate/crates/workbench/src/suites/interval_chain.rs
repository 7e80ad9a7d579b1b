//! The small-interval comparison chain: every deduction link from the raw
//! multilinear average down to the headline interval-norm bound, checked one
//! inequality or identity at a time on progression systems.

use crate::corpus::{ap_system, bounded_series};
use crate::report::{Assertion, AssertionKind, CaseRecord, ExperimentSpec, ReportError};
use crate::suites::RunContext;
use gowers_core::averages::{small_n_chain, LinkKind};
use gowers_core::regions::preimage_region;
use rayon::prelude::*;
use serde_json::json;

const INSTANCES: usize = 50;
const SEED_BASE: u64 = 9100;

pub fn default_spec() -> ExperimentSpec {
    let mut spec = ExperimentSpec::named("interval-chain");
    spec.sizes = vec![32];
    spec.systems = vec![ap_system(3), ap_system(4)];
    spec.params.tolerance = 1e-9;
    spec
}

pub fn run(spec: &ExperimentSpec, ctx: &RunContext) -> Result<Vec<CaseRecord>, ReportError> {
    let tolerance = ctx.tolerance_for(spec);
    let n = *spec.sizes.first().unwrap_or(&32);
    let cases: Vec<CaseRecord> = (0..INSTANCES)
        .into_par_iter()
        .map(|index| {
            let k = if index < INSTANCES / 2 { 3 } else { 4 };
            let system = ap_system(k);
            let t = system.forms().len();
            let chosen = index % t;
            let s = system
                .cs_complexity()
                .expect("progressions have a complexity")
                .max(1);
            let seed_base = SEED_BASE + index as u64 * 8;
            let mut case = CaseRecord::new(
                format!("ap{k}-j{chosen}-{index:02}"),
                json!({
                    "n": n,
                    "system": format!("{system}"),
                    "chosen_index": chosen,
                    "s": s,
                    "seed_base": seed_base,
                    "shift": n + 1,
                }),
            );
            // The chain shifts every form by c = n + 1, mapping the region
            // image [-n, n] onto the comparison interval [1, 2n + 1].
            let shift = n + 1;
            let functions: Vec<_> = (0..t)
                .map(|i| bounded_series(seed_base + i as u64, 1, 2 * n + 1))
                .collect();
            let region = match preimage_region(&system, n) {
                Ok(region) => region,
                Err(err) => {
                    case.assert(Assertion::exact_flag(&format!("region-built ({err})"), false));
                    return case;
                }
            };
            let chain = match small_n_chain(&system, &functions, &region, shift, Some(chosen), s) {
                Ok(chain) => chain,
                Err(err) => {
                    case.assert(Assertion::exact_flag(&format!("chain-ran ({err})"), false));
                    return case;
                }
            };
            case.record("crowding_constant", chain.crowding_constant);
            case.record("monotonicity_ratio", chain.monotonicity_ratio);
            case.record("assembled_constant", chain.assembled_constant);
            for link in &chain.links {
                let kind = match link.kind {
                    LinkKind::Identity => AssertionKind::Identity,
                    LinkKind::Inequality => AssertionKind::Bound,
                };
                case.assert(Assertion {
                    name: link.name.clone(),
                    kind,
                    tolerance,
                    lhs: link.lhs,
                    rhs: link.rhs,
                    pass: link.holds,
                });
            }
            case.assert(Assertion::exact_flag("all-links-hold", chain.all_hold));
            case
        })
        .collect();
    Ok(cases)
}
