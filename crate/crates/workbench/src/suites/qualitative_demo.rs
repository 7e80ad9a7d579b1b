//! Qualitative headline demo: on a pinned corpus over the 4-AP system and
//! the shipped non-flag system, uniformity in the order matching the
//! system's independence degree predicts small multilinear averages, while
//! quadratic phases defeat the order-2 norm — they are nearly orthogonal to
//! linear phases yet produce averages of full size.
//!
//! Thresholds are corpus percentiles (10th percentile of the minimum
//! `U^{s+1}` norms, median of the absolute averages), never invented
//! constants.  The corpus mixes cancelling polynomial-phase patterns (whose
//! averages are exactly 1), non-cancelling phases, and random series; the
//! cancelling majority pins the median average at the structured level, so
//! the implication "below-percentile norm ⇒ below-median average" is tested
//! with a wide margin rather than at a knife edge.

use crate::corpus::{ap_system, bounded_series, non_flag_system, phase_series, unimodular_series};
use crate::report::{Assertion, CaseRecord, ExperimentSpec, ReportError};
use crate::suites::{nearest_rank, RunContext};
use gowers_core::averages::{multilinear_average, reduction_pipeline};
use gowers_core::gowers::{norm_subset, Method, SubsetDomain};
use gowers_core::linear_systems::LinearSystem;
use gowers_core::numeric::EXACT_TOL;
use gowers_core::regions::preimage_region;
use gowers_core::series::Series;
use rayon::prelude::*;
use serde_json::json;

const UNI_SEED_BASE: u64 = 21_000;
const PM1_SEED_BASE: u64 = 22_000;

/// Seven pinned irrational quadratic/linear frequencies.
fn phase_pool() -> [f64; 7] {
    [
        2f64.sqrt(),
        3f64.sqrt(),
        5f64.sqrt(),
        7f64.sqrt(),
        std::f64::consts::E,
        std::f64::consts::PI,
        (1.0 + 5f64.sqrt()) / 2.0,
    ]
}

pub fn default_spec() -> ExperimentSpec {
    let mut spec = ExperimentSpec::named("qualitative-demo");
    spec.sizes = vec![256];
    spec
}

struct Job {
    name: String,
    system: LinearSystem,
    system_label: &'static str,
    family: &'static str,
    functions: Vec<Series>,
    inputs: serde_json::Value,
}

/// Integer patterns `c` with `Σ c_i ψ_i^d = 0` for the degree-`d` family,
/// which force the product `∏ e(c_i α ψ_i^d)` to be constantly 1.
fn cancel_pattern(system_label: &str, degree: usize) -> Vec<i64> {
    match (system_label, degree) {
        ("ap4", _) => vec![1, -3, 3, -1],
        ("non-flag", 2) => vec![-2, -2, 1, 1],
        ("non-flag", 1) => vec![0, -2, 1, -1],
        other => unreachable!("no pinned pattern for {other:?}"),
    }
}

fn phase_family(pattern: &[i64], degree: usize, alpha: f64, n: i64) -> Vec<Series> {
    pattern
        .iter()
        .map(|&c| {
            // The generator maps coeffs[d] to the n^{d+1} term.
            let mut coeffs = vec![0.0; degree];
            coeffs[degree - 1] = c as f64 * alpha;
            phase_series(&coeffs, -n, n)
        })
        .collect()
}

fn build_jobs(n: i64) -> Vec<Job> {
    let phases = phase_pool();
    let systems: [(&'static str, LinearSystem); 2] =
        [("ap4", ap_system(4)), ("non-flag", non_flag_system())];
    let mut jobs = Vec::new();
    for (label, system) in systems {
        let t = system.forms().len();
        let mut push = |family: &'static str, index: usize, functions: Vec<Series>, detail| {
            jobs.push(Job {
                name: format!("{label}-{family}-{index:02}"),
                system: system.clone(),
                system_label: label,
                family,
                functions,
                inputs: json!({"system": label, "family": family, "n": n, "detail": detail}),
            });
        };
        for (index, &alpha) in phases.iter().enumerate() {
            let pattern = cancel_pattern(label, 2);
            push(
                "quad-cancel",
                index,
                phase_family(&pattern, 2, alpha, n),
                json!({"alpha": alpha, "pattern": pattern}),
            );
        }
        for (index, &alpha) in phases.iter().take(6).enumerate() {
            let pattern = cancel_pattern(label, 1);
            push(
                "lin-cancel",
                index,
                phase_family(&pattern, 1, alpha, n),
                json!({"alpha": alpha, "pattern": pattern}),
            );
        }
        for (index, &alpha) in [phases[0], phases[5]].iter().enumerate() {
            push(
                "quad-same",
                index,
                (0..t).map(|_| phase_series(&[0.0, alpha], -n, n)).collect(),
                json!({"alpha": alpha}),
            );
        }
        let label_salt = if label == "ap4" { 0 } else { 500 };
        for index in 0..7usize {
            let seeds: Vec<u64> = (0..t)
                .map(|i| UNI_SEED_BASE + label_salt + (index * t + i) as u64)
                .collect();
            push(
                "random-uni",
                index,
                seeds.iter().map(|&s| unimodular_series(s, -n, n)).collect(),
                json!({"seeds": seeds}),
            );
        }
        for index in 0..3usize {
            let seeds: Vec<u64> = (0..t)
                .map(|i| PM1_SEED_BASE + label_salt + 2 * (index * t + i) as u64 + 1)
                .collect();
            push(
                "random-pm1",
                index,
                seeds.iter().map(|&s| bounded_series(s, -n, n)).collect(),
                json!({"seeds": seeds}),
            );
        }
    }
    jobs
}

struct Numbers {
    s: u32,
    u_min: f64,
    u2_min: f64,
    abs_avg: f64,
    region_size: u64,
    pipeline_gap: Option<f64>,
}

struct Measurement {
    job: Job,
    numbers: Result<Numbers, String>,
}

fn try_measure(job: &Job, n: i64) -> Result<Numbers, String> {
    let domain = SubsetDomain::Interval { lo: -n, hi: n };
    let s = job
        .system
        .independence_degree(4)
        .map_err(|e| e.to_string())?
        .ok_or("no independence degree below the probe bound")?;
    let mut u_min = f64::INFINITY;
    let mut u2_min = f64::INFINITY;
    for f in &job.functions {
        u_min = u_min.min(
            norm_subset(f, &domain, s, Method::Fast)
                .map_err(|e| e.to_string())?
                .norm_value,
        );
        u2_min = u2_min.min(
            norm_subset(f, &domain, 1, Method::Fast)
                .map_err(|e| e.to_string())?
                .norm_value,
        );
    }
    let region = preimage_region(&job.system, n).map_err(|e| e.to_string())?;
    let report =
        multilinear_average(&job.system, &job.functions, &region, 0).map_err(|e| e.to_string())?;
    let pipeline_gap = if job.system_label == "non-flag" {
        let piped = reduction_pipeline(&job.system, &job.functions, n).map_err(|e| e.to_string())?;
        let trace = piped
            .trace
            .ok_or("rescaling reduction produced no trace")?;
        Some(trace.identity_gap)
    } else {
        None
    };
    Ok(Numbers {
        s,
        u_min,
        u2_min,
        abs_avg: report.value.norm(),
        region_size: report.region_size,
        pipeline_gap,
    })
}

pub fn run(spec: &ExperimentSpec, _ctx: &RunContext) -> Result<Vec<CaseRecord>, ReportError> {
    let n = spec.sizes.first().copied().unwrap_or(256);
    let measurements: Vec<Measurement> = build_jobs(n)
        .into_par_iter()
        .map(|job| {
            let numbers = try_measure(&job, n);
            Measurement { job, numbers }
        })
        .collect();

    let complete: Vec<&Numbers> = measurements
        .iter()
        .filter_map(|m| m.numbers.as_ref().ok())
        .collect();
    let norm_values: Vec<f64> = complete.iter().map(|v| v.u_min).collect();
    let avg_values: Vec<f64> = complete.iter().map(|v| v.abs_avg).collect();
    let p10_norm = nearest_rank(&norm_values, 0.10);
    let median_norm = nearest_rank(&norm_values, 0.50);
    let median_avg = nearest_rank(&avg_values, 0.50);
    let below_p10 = complete.iter().filter(|v| v.u_min < p10_norm).count();

    let mut cases = Vec::with_capacity(measurements.len() + 1);
    for m in &measurements {
        let mut case = CaseRecord::new(m.job.name.clone(), m.job.inputs.clone());
        let v = match &m.numbers {
            Ok(v) => v,
            Err(message) => {
                case.assert(Assertion::exact_flag(&format!("measured ({message})"), false));
                cases.push(case);
                continue;
            }
        };
        case.record("s", v.s as f64);
        case.record("min_norm", v.u_min);
        case.record("u2_min", v.u2_min);
        case.record("abs_avg", v.abs_avg);
        case.record("region_size", v.region_size as f64);
        case.assert(Assertion::qualitative(
            "below-p10-norm-implies-below-median-average",
            v.abs_avg,
            median_avg,
            !(v.u_min < p10_norm) || v.abs_avg < median_avg,
        ));
        if m.job.system_label == "ap4" && m.job.family == "quad-cancel" {
            // The order-1 vs order-2 separation: the order-2 norm of a
            // quadratic phase sits below the corpus-typical order-3 level,
            // its order-3 norm is far above the uniformity cutoff, and the
            // average is at the structured (median) level.
            case.assert(Assertion::qualitative(
                "quad-phase-u2-below-median-norm",
                v.u2_min,
                median_norm,
                v.u2_min < median_norm,
            ));
            case.assert(Assertion::qualitative(
                "quad-phase-norm-above-p10",
                v.u_min,
                p10_norm,
                v.u_min >= p10_norm,
            ));
            case.assert(Assertion::qualitative(
                "quad-phase-average-at-median",
                v.abs_avg,
                median_avg,
                v.abs_avg >= median_avg - 1e-9,
            ));
        }
        if let Some(gap) = v.pipeline_gap {
            case.record("pipeline_gap", gap);
            case.assert(Assertion::identity("reduction-identity", gap, 0.0, EXACT_TOL));
        }
        cases.push(case);
    }

    let mut summary = CaseRecord::new(
        "corpus-summary".to_string(),
        json!({"n": n, "cases": measurements.len()}),
    );
    summary.record("p10_min_norm", p10_norm);
    summary.record("median_min_norm", median_norm);
    summary.record("median_abs_avg", median_avg);
    summary.record("cases_below_p10", below_p10 as f64);
    summary.assert(Assertion::qualitative(
        "percentile-test-nonvacuous",
        below_p10 as f64,
        1.0,
        below_p10 >= 1 && p10_norm < median_norm,
    ));
    cases.push(summary);
    Ok(cases)
}
