//! The verification suites: one module per acceptance area, all dispatched
//! by name through [`run_suite`].
//!
//! Suites compute their cases in parallel (bounded by `--jobs`) but assemble
//! the report single-threaded in case order, so reports are byte-identical
//! across reruns regardless of thread count.

pub mod cyclic_vonneumann;
pub mod dilation_invariance;
pub mod flag_complexity;
pub mod flagification;
pub mod interval_chain;
pub mod norm_equivalence;
pub mod packing_incidence;
pub mod phase_invariance;
pub mod qualitative_demo;
pub mod smoothing;
pub mod substitution_identity;

use std::time::Instant;

use crate::report::{AssertionKind, CaseRecord, ExperimentSpec, ReportError, SuiteReport};
use gowers_core::numeric::close;

/// Execution knobs that are not part of the pinned experiment spec.
#[derive(Debug, Clone, Default)]
pub struct RunContext {
    /// Parallelism bound; 0 means the global default.
    pub jobs: usize,
    /// Overrides the spec's generic tolerance when set (CLI beats spec file).
    pub tolerance: Option<f64>,
    /// Corrupts one computed value before asserting — a harness self-test
    /// that must surface as a named failing case and a nonzero exit.
    pub fault: bool,
}

impl RunContext {
    /// The generic tolerance after applying precedence: CLI flag over spec
    /// file over built-in default.
    pub fn tolerance_for(&self, spec: &ExperimentSpec) -> f64 {
        self.tolerance.unwrap_or(spec.params.tolerance)
    }
}

type Runner = fn(&ExperimentSpec, &RunContext) -> Result<Vec<CaseRecord>, ReportError>;

/// All suites in acceptance order.
pub const SUITE_NAMES: [&str; 11] = [
    "norm-equivalence",
    "phase-invariance",
    "dilation-invariance",
    "substitution-identity",
    "flag-complexity",
    "flagification",
    "interval-chain",
    "packing-incidence",
    "cyclic-vonneumann",
    "qualitative-demo",
    "smoothing",
];

fn registry(name: &str) -> Option<(Runner, fn() -> ExperimentSpec)> {
    Some(match name {
        "norm-equivalence" => (
            norm_equivalence::run as Runner,
            norm_equivalence::default_spec as fn() -> ExperimentSpec,
        ),
        "phase-invariance" => (phase_invariance::run, phase_invariance::default_spec),
        "dilation-invariance" => (dilation_invariance::run, dilation_invariance::default_spec),
        "substitution-identity" => (
            substitution_identity::run,
            substitution_identity::default_spec,
        ),
        "flag-complexity" => (flag_complexity::run, flag_complexity::default_spec),
        "flagification" => (flagification::run, flagification::default_spec),
        "interval-chain" => (interval_chain::run, interval_chain::default_spec),
        "packing-incidence" => (packing_incidence::run, packing_incidence::default_spec),
        "cyclic-vonneumann" => (cyclic_vonneumann::run, cyclic_vonneumann::default_spec),
        "qualitative-demo" => (qualitative_demo::run, qualitative_demo::default_spec),
        "smoothing" => (smoothing::run, smoothing::default_spec),
        _ => return None,
    })
}

/// The pinned default spec for a suite.
pub fn default_spec(suite: &str) -> Result<ExperimentSpec, ReportError> {
    registry(suite)
        .map(|(_, spec)| spec())
        .ok_or_else(|| ReportError::UnknownSuite(suite.to_string()))
}

fn validate(spec: &ExperimentSpec) -> Result<(), ReportError> {
    if spec.params.q < 1 {
        return Err(ReportError::InvalidSpec(format!(
            "dilation modulus must be at least 1, got {}",
            spec.params.q
        )));
    }
    if !(spec.params.eps_prime > 0.0 && spec.params.eps_prime <= 1.0) {
        return Err(ReportError::InvalidSpec(format!(
            "side fraction must lie in (0, 1], got {}",
            spec.params.eps_prime
        )));
    }
    if !(spec.params.tolerance > 0.0) {
        return Err(ReportError::InvalidSpec(format!(
            "tolerance must be positive, got {}",
            spec.params.tolerance
        )));
    }
    if spec.sizes.iter().any(|&n| n < 2) {
        return Err(ReportError::InvalidSpec(
            "every schedule size must be at least 2".to_string(),
        ));
    }
    if spec.suite == "qualitative-demo" {
        if let Some(&n) = spec.sizes.iter().find(|&&n| n > 512) {
            return Err(ReportError::InvalidSpec(format!(
                "demo schedule entries must be at most 512, got {n}"
            )));
        }
    }
    Ok(())
}

/// Runs one suite: validates the spec, executes all cases (recording
/// per-case failures rather than aborting), and assembles the report.
pub fn run_suite(spec: &ExperimentSpec, ctx: &RunContext) -> Result<SuiteReport, ReportError> {
    validate(spec)?;
    let (runner, _) = registry(&spec.suite)
        .ok_or_else(|| ReportError::UnknownSuite(spec.suite.clone()))?;
    let start = Instant::now();
    let mut cases = if ctx.jobs > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(ctx.jobs)
            .build()
            .map_err(|e| ReportError::InvalidSpec(format!("thread pool: {e}")))?;
        pool.install(|| runner(spec, ctx))?
    } else {
        runner(spec, ctx)?
    };
    if ctx.fault {
        inject_fault(&mut cases);
    }
    let wall_ms = start.elapsed().as_millis() as u64;
    Ok(SuiteReport::assemble(spec, cases, wall_ms))
}

/// Corrupts the first quantitative assertion of the first case and
/// re-evaluates it, so the harness's failure path can be exercised on demand.
fn inject_fault(cases: &mut [CaseRecord]) {
    for case in cases.iter_mut() {
        let Some(assertion) = case
            .assertions
            .iter_mut()
            .find(|a| a.kind != AssertionKind::Qualitative)
        else {
            continue;
        };
        assertion.lhs += 1e-3 * assertion.lhs.abs().max(1.0);
        assertion.pass = match assertion.kind {
            AssertionKind::Exact => assertion.lhs == assertion.rhs,
            AssertionKind::Identity => close(assertion.lhs, assertion.rhs, assertion.tolerance),
            AssertionKind::Bound | AssertionKind::DerivedBound => {
                assertion.lhs <= assertion.rhs + assertion.tolerance
            }
            AssertionKind::Qualitative => unreachable!("filtered above"),
        };
        case.pass = case.assertions.iter().all(|a| a.pass);
        return;
    }
}

/// Nearest-rank percentile of an unsorted sample (`fraction` in `(0, 1]`).
pub(crate) fn nearest_rank(values: &[f64], fraction: f64) -> f64 {
    assert!(!values.is_empty(), "percentile of an empty sample");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite measurements"));
    let rank = ((fraction * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}
