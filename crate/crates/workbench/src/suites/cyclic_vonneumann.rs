//! Cyclic generalized von Neumann: on a prime modulus the progression
//! average of bounded functions is dominated by the smallest uniformity norm
//! among them.  The shipped average is cross-checked against a suite-local
//! brute-force double loop, and the bound is asserted against that ground
//! truth, not against the library's own margin field.

use crate::corpus::bounded_series;
use crate::report::{Assertion, CaseRecord, ExperimentSpec, ReportError};
use crate::suites::RunContext;
use gowers_core::averages::cyclic_ap_average;
use gowers_core::numeric::Complex64;
use gowers_core::series::Series;
use rayon::prelude::*;
use serde_json::json;

const TRIPLE_COUNT: usize = 100;
const QUAD_COUNT: usize = 25;
const TRIPLE_SEED_BASE: u64 = 11_000;
const QUAD_SEED_BASE: u64 = 12_000;

pub fn default_spec() -> ExperimentSpec {
    let mut spec = ExperimentSpec::named("cyclic-vonneumann");
    spec.sizes = vec![31];
    spec
}

/// `(1/N²) Σ_{x,d} ∏_i f_i(x + (i-1)d mod N)`, computed directly.
fn brute_force_average(functions: &[Vec<Complex64>], modulus: usize) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for x in 0..modulus {
        for d in 0..modulus {
            let mut product = Complex64::new(1.0, 0.0);
            for (i, values) in functions.iter().enumerate() {
                product *= values[(x + i * d) % modulus];
            }
            total += product;
        }
    }
    total / (modulus * modulus) as f64
}

fn run_case(name: String, seeds: &[u64], modulus: i64, tol: f64) -> CaseRecord {
    let mut case = CaseRecord::new(
        name,
        json!({"modulus": modulus, "arity": seeds.len(), "seeds": seeds}),
    );
    let functions: Vec<Series> = seeds
        .iter()
        .map(|&seed| bounded_series(seed, 0, modulus - 1))
        .collect();
    match cyclic_ap_average(&functions) {
        Ok(report) => {
            let values: Vec<Vec<Complex64>> =
                functions.iter().map(|f| f.values().to_vec()).collect();
            let brute = brute_force_average(&values, modulus as usize);
            case.record("abs_average", report.average.norm());
            case.record("brute_force_abs", brute.norm());
            case.record("min_norm", report.min_norm);
            case.record("margin", report.margin);
            for (i, norm) in report.norms.iter().enumerate() {
                case.record(&format!("norm_{i}"), *norm);
            }
            case.assert(Assertion::identity(
                "average-matches-brute-force",
                (report.average - brute).norm(),
                0.0,
                tol,
            ));
            case.assert(Assertion::bound(
                "von-neumann-bound",
                brute.norm(),
                report.min_norm,
                tol,
            ));
        }
        Err(err) => case.assert(Assertion::exact_flag(
            &format!("average-computed ({err})"),
            false,
        )),
    }
    case
}

pub fn run(spec: &ExperimentSpec, ctx: &RunContext) -> Result<Vec<CaseRecord>, ReportError> {
    let modulus = spec.sizes.first().copied().unwrap_or(31);
    let tol = ctx.tolerance_for(spec);
    let mut jobs: Vec<(String, Vec<u64>)> = Vec::new();
    for index in 0..TRIPLE_COUNT {
        let base = TRIPLE_SEED_BASE + 3 * index as u64;
        jobs.push((format!("triple-{index:03}"), vec![base, base + 1, base + 2]));
    }
    for index in 0..QUAD_COUNT {
        let base = QUAD_SEED_BASE + 4 * index as u64;
        jobs.push((
            format!("quad-{index:02}"),
            vec![base, base + 1, base + 2, base + 3],
        ));
    }
    Ok(jobs
        .into_par_iter()
        .map(|(name, seeds)| run_case(name, &seeds, modulus, tol))
        .collect())
}
