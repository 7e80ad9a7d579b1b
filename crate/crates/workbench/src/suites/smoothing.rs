//! Trapezoid smoother measurements along a doubling schedule: Fourier mass
//! of the cutoff, the sharp-versus-smooth support discrepancy, and the
//! stability of uniformity norms under restriction to a fixed-step
//! subprogression, with the comparison constant derived at the smallest
//! scheduled size and asserted at every larger one.

use crate::corpus::{bounded_series, phase_series, unimodular_series};
use crate::report::{Assertion, CaseRecord, ExperimentSpec, ReportError};
use crate::suites::RunContext;
use gowers_core::gowers::{
    dilated_smoother, dlvp_kernel, dlvp_plateau_halfwidth, fourier_l1, norm_subset, Method,
    SubsetDomain,
};
use gowers_core::series::{generate, GeneratorKind, GeneratorSpec, Series};
use serde_json::json;

const EPSILONS: [f64; 2] = [0.25, 0.125];
const STEPS: [i64; 2] = [1, 3];
const RESIDUE: i64 = 1;
const ORDER: u32 = 1;
const UNI_SEED_BASE: u64 = 31_000;
const PM1_SEED_BASE: u64 = 31_900;

pub fn default_spec() -> ExperimentSpec {
    let mut spec = ExperimentSpec::named("smoothing");
    spec.sizes = (8..=14).map(|k| 1i64 << k).collect();
    spec
}

/// The eight-member function corpus on `[1, n]`, with stable labels.
fn corpus(n: i64) -> Vec<(String, Series)> {
    let mut members = Vec::new();
    for i in 0..3u64 {
        members.push((
            format!("uni-{i}"),
            unimodular_series(UNI_SEED_BASE + i, 1, n),
        ));
    }
    for i in 0..2u64 {
        members.push((
            format!("pm1-{i}"),
            bounded_series(PM1_SEED_BASE + 2 * i + 1, 1, n),
        ));
    }
    members.push(("lin-phase".to_string(), phase_series(&[2f64.sqrt()], 1, n)));
    members.push((
        "quad-phase".to_string(),
        phase_series(&[0.0, 3f64.sqrt()], 1, n),
    ));
    let indicator = GeneratorSpec::new(
        GeneratorKind::Indicator {
            start: RESIDUE,
            step: 3,
        },
        0,
    );
    members.push((
        "indicator-mod3".to_string(),
        generate(&indicator, 1, n).expect("indicator generator is valid"),
    ));
    members
}

/// Points where the smoother differs from the sharp plateau indicator: the
/// taper, where its value is strictly between 0 and 1.
fn taper_support(chi: &Series) -> u64 {
    chi.values()
        .iter()
        .filter(|v| v.re > 0.0 && v.re < 1.0)
        .count() as u64
}

fn progression_domain(n: i64, q: i64) -> SubsetDomain {
    SubsetDomain::Progression {
        start: RESIDUE,
        step: q,
        len: ((n - RESIDUE) / q + 1) as u64,
    }
}

pub fn run(spec: &ExperimentSpec, ctx: &RunContext) -> Result<Vec<CaseRecord>, ReportError> {
    let sizes = if spec.sizes.is_empty() {
        (8..=14).map(|k| 1i64 << k).collect()
    } else {
        spec.sizes.clone()
    };
    let tol = ctx.tolerance_for(spec);
    let mut cases = Vec::new();

    // Fourier mass of the plain trapezoid cutoff along the schedule.
    for &eps in &EPSILONS {
        let mut case = CaseRecord::new(
            format!("kernel-l1-eps{}", (1.0 / eps) as i64),
            json!({"eps": eps, "sizes": sizes}),
        );
        let mut measured = Vec::new();
        for &n in &sizes {
            let result = dlvp_kernel(eps, n as u64)
                .and_then(|kernel| fourier_l1(&kernel, 4 * n as u64));
            match result {
                Ok(l1) => {
                    case.record(&format!("l1_n{n}"), l1);
                    measured.push((n, l1));
                }
                Err(err) => case.assert(Assertion::exact_flag(
                    &format!("kernel-built-n{n} ({err})"),
                    false,
                )),
            }
        }
        for pair in measured.windows(2) {
            let ((a, la), (b, lb)) = (pair[0], pair[1]);
            case.assert(Assertion::derived_bound(
                &format!("l1-nonincreasing-n{a}-n{b}"),
                lb,
                la,
                tol,
            ));
        }
        cases.push(case);
    }

    // Sharp-minus-smooth support fraction along the schedule.
    for &eps in &EPSILONS {
        for &q in &STEPS {
            let mut case = CaseRecord::new(
                format!("taper-support-eps{}-q{q}", (1.0 / eps) as i64),
                json!({"eps": eps, "q": q, "residue": RESIDUE, "sizes": sizes}),
            );
            let mut measured = Vec::new();
            for &n in &sizes {
                match dilated_smoother(eps, n as u64, q as u64, RESIDUE) {
                    Ok(chi) => {
                        let ratio = taper_support(&chi) as f64 / n as f64;
                        case.record(&format!("support_ratio_n{n}"), ratio);
                        case.record(
                            &format!("plateau_halfwidth_n{n}"),
                            dlvp_plateau_halfwidth(eps, n as u64) as f64,
                        );
                        measured.push((n, ratio));
                    }
                    Err(err) => case.assert(Assertion::exact_flag(
                        &format!("smoother-built-n{n} ({err})"),
                        false,
                    )),
                }
            }
            for pair in measured.windows(2) {
                let ((a, ra), (b, rb)) = (pair[0], pair[1]);
                case.assert(Assertion::bound(
                    &format!("support-ratio-decreasing-n{a}-n{b}"),
                    rb,
                    ra,
                    0.0,
                ));
            }
            cases.push(case);
        }
    }

    // Subprogression-restriction norm ratios: constant derived at the first
    // scheduled size over the whole corpus, asserted at every larger size.
    let base_n = sizes[0];
    let mut ratio_table: Vec<(String, i64, Vec<(i64, f64)>)> = Vec::new();
    let mut derived_constant = f64::NEG_INFINITY;
    let mut errors: Vec<String> = Vec::new();
    for &q in &STEPS {
        for (label, _) in corpus(base_n) {
            ratio_table.push((label, q, Vec::new()));
        }
    }
    for &n in &sizes {
        let members = corpus(n);
        for &q in &STEPS {
            let domain_p = progression_domain(n, q);
            let domain_full = SubsetDomain::Interval { lo: 1, hi: n };
            for (label, f) in &members {
                let measured = norm_subset(f, &domain_p, ORDER, Method::Fast).and_then(|on_p| {
                    norm_subset(f, &domain_full, ORDER, Method::Fast)
                        .map(|on_full| (on_p.norm_value, on_full.norm_value))
                });
                match measured {
                    Ok((norm_p, norm_full)) => {
                        let ratio = norm_p / (norm_full + 1.0 / (n as f64).sqrt());
                        if n == base_n {
                            derived_constant = derived_constant.max(ratio);
                        }
                        let row = ratio_table
                            .iter_mut()
                            .find(|(l, step, _)| l == label && *step == q)
                            .expect("table rows cover the corpus");
                        row.2.push((n, ratio));
                    }
                    Err(err) => errors.push(format!("{label}-q{q}-n{n}: {err}")),
                }
            }
        }
    }
    for (label, q, rows) in ratio_table {
        let mut case = CaseRecord::new(
            format!("restriction-ratio-q{q}-{label}"),
            json!({"function": label, "q": q, "order": ORDER + 1, "derived_at": base_n}),
        );
        case.record("derived_constant", derived_constant);
        for &(n, ratio) in &rows {
            case.record(&format!("ratio_n{n}"), ratio);
            if n > base_n {
                case.assert(Assertion::derived_bound(
                    &format!("ratio-bounded-n{n}"),
                    ratio,
                    derived_constant,
                    tol,
                ));
            }
        }
        cases.push(case);
    }
    if !errors.is_empty() {
        let mut case = CaseRecord::new("restriction-errors".to_string(), json!({}));
        for message in errors {
            case.assert(Assertion::exact_flag(&format!("measured ({message})"), false));
        }
        cases.push(case);
    }
    Ok(cases)
}
