//! Dilation-embedding invariance: the norm of `f̃` over the image progression
//! `a_i·[−N, N] + aN` equals the norm of `f` over `[−N, N]`, exactly up to
//! rounding — the affine map is a bijection between the two domains.

use crate::corpus::bounded_series;
use crate::report::{Assertion, CaseRecord, ExperimentSpec, ReportError};
use crate::suites::RunContext;
use gowers_core::gowers::{norm_subset, Method, SubsetDomain};
use gowers_core::series::{dilate_embed, dilation_image};
use rayon::prelude::*;
use serde_json::json;

const SCALES: [i64; 4] = [1, 2, 3, -2];
const ORDERS: [u32; 2] = [1, 2];
const SEEDS_PER_CELL: u64 = 5;
const SALT: u64 = 0x0300;

pub fn default_spec() -> ExperimentSpec {
    let mut spec = ExperimentSpec::named("dilation-invariance");
    spec.sizes = vec![32];
    spec.params.tolerance = 1e-9;
    spec
}

pub fn run(spec: &ExperimentSpec, ctx: &RunContext) -> Result<Vec<CaseRecord>, ReportError> {
    let tolerance = ctx.tolerance_for(spec);
    let n = *spec.sizes.first().unwrap_or(&32);
    let outer = SCALES.iter().map(|a| a.abs()).max().expect("nonempty");

    let mut grid = Vec::new();
    for &a_i in &SCALES {
        for s in ORDERS {
            for index in 0..SEEDS_PER_CELL {
                grid.push((a_i, s, index));
            }
        }
    }
    let cases: Vec<CaseRecord> = grid
        .into_par_iter()
        .map(|(a_i, s, index)| {
            let seed = SALT + index;
            let mut case = CaseRecord::new(
                format!("ai{a_i:+}-s{s}-{index}"),
                json!({"n": n, "s": s, "a_i": a_i, "a": outer, "seed": seed}),
            );
            let f = bounded_series(seed, -n, n);
            let interval = SubsetDomain::Interval { lo: -n, hi: n };
            let image = SubsetDomain::from_progression(dilation_image(a_i, outer, n));
            let embedded = match dilate_embed(&f, a_i, outer, n) {
                Ok(series) => series,
                Err(err) => {
                    case.assert(Assertion::exact_flag(&format!("embedding-built ({err})"), false));
                    return case;
                }
            };
            match (
                norm_subset(&f, &interval, s, Method::Fast),
                norm_subset(&embedded, &image, s, Method::Fast),
            ) {
                (Ok(base), Ok(mapped)) => {
                    case.record("interval_norm", base.norm_value);
                    case.record("image_norm", mapped.norm_value);
                    case.assert(Assertion::identity(
                        "norm-invariance",
                        mapped.norm_value,
                        base.norm_value,
                        tolerance,
                    ));
                    case.assert(Assertion::exact_count(
                        "config-count-agreement",
                        mapped.config_count,
                        base.config_count,
                    ));
                }
                (base, mapped) => {
                    let reason = base.err().or(mapped.err()).expect("one side failed");
                    case.assert(Assertion::exact_flag(
                        &format!("norms-computed ({reason})"),
                        false,
                    ));
                }
            }
            case
        })
        .collect();
    Ok(cases)
}
