//! Substitution identity: the multilinear average of `f_i(ψ_i(x))` over the
//! preimage region equals the average of the embedded functions
//! `f̃_i(a_iψ_i(x) + aN)` — the rescaling changes bookkeeping, not the value.

use crate::corpus::{ap_system, random_translation_invariant_system, suite_rng};
use crate::report::{Assertion, CaseRecord, ExperimentSpec, ReportError};
use crate::suites::RunContext;
use gowers_core::averages::reduction_pipeline;
use gowers_core::linear_systems::LinearSystem;
use gowers_core::series::Series;
use rayon::prelude::*;
use serde_json::json;

const SALT: u64 = 0x04;
const SEED_BASE: u64 = 7000;

pub fn default_spec() -> ExperimentSpec {
    let mut spec = ExperimentSpec::named("substitution-identity");
    spec.sizes = vec![16, 32];
    spec.params.tolerance = 1e-12;
    spec.systems = pinned_systems();
    spec
}

/// Ten pinned systems mixing arithmetic progressions, translation-invariant
/// families, and non-translation-invariant ones (which exercise the witness
/// rescaling path).
fn pinned_systems() -> Vec<LinearSystem> {
    let rows: [&[&[i64]]; 6] = [
        &[&[1, 0], &[0, 1], &[1, 1], &[1, -1]], // non-TI, non-flag
        &[&[1, 0], &[1, 2], &[1, 4]],
        &[&[2, 0], &[2, 1], &[2, 2]],
        &[&[1, 0], &[0, 1], &[1, 2]], // non-TI
        &[&[1, 1], &[1, -1], &[1, 0]],
        &[&[1, 0], &[0, 1], &[2, 2]], // non-TI
    ];
    let mut systems = vec![ap_system(3), ap_system(4), ap_system(5)];
    systems.extend(
        rows.iter()
            .map(|r| LinearSystem::from_rows(r).expect("pinned rows are valid")),
    );
    systems.push(random_translation_invariant_system(
        &mut suite_rng(SALT),
        4,
        3,
        2,
    ));
    systems
}

fn functions_for(system: &LinearSystem, n: i64, seed_base: u64) -> Vec<Series> {
    (0..system.forms().len())
        .map(|i| crate::corpus::bounded_series(seed_base + i as u64, -n, n))
        .collect()
}

pub fn run(spec: &ExperimentSpec, ctx: &RunContext) -> Result<Vec<CaseRecord>, ReportError> {
    let tolerance = ctx.tolerance_for(spec);
    let systems = if spec.systems.is_empty() {
        pinned_systems()
    } else {
        spec.systems.clone()
    };
    let mut grid = Vec::new();
    for (which, &n) in spec.sizes.iter().enumerate() {
        for (index, system) in systems.iter().enumerate() {
            grid.push((which, n, index, system.clone()));
        }
    }
    let cases: Vec<CaseRecord> = grid
        .into_par_iter()
        .map(|(which, n, index, system)| {
            let seed_base = SEED_BASE + (which as u64 * systems.len() as u64 + index as u64) * 16;
            let translation_invariant = system.is_translation_invariant();
            let mut case = CaseRecord::new(
                format!("sys{index:02}-n{n:02}"),
                json!({
                    "n": n,
                    "system": format!("{system}"),
                    "translation_invariant": translation_invariant,
                    "seed_base": seed_base,
                }),
            );
            let functions = functions_for(&system, n, seed_base);
            let report = match reduction_pipeline(&system, &functions, n) {
                Ok(report) => report,
                Err(err) => {
                    case.assert(Assertion::exact_flag(&format!("pipeline-ran ({err})"), false));
                    return case;
                }
            };
            let trace = report.trace.as_ref().expect("pipeline reports carry a trace");
            case.record("original_re", trace.original_average.re);
            case.record("original_im", trace.original_average.im);
            case.record("substituted_re", trace.substituted_average.re);
            case.record("substituted_im", trace.substituted_average.im);
            case.record("identity_gap", trace.identity_gap);
            case.record("scale_bound", trace.scale_bound as f64);
            case.record("comparison_constant", trace.comparison_constant);
            case.assert(Assertion::identity(
                "substitution-identity",
                trace.identity_gap,
                0.0,
                tolerance,
            ));
            case.assert(Assertion::exact(
                "boundary-term-vanishes",
                trace.boundary_term,
                0.0,
            ));
            case
        })
        .collect();
    Ok(cases)
}
