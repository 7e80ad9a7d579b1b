//! Multilinear averages over lattice regions, the rescaling reduction that
//! centers a system's image in a positive interval, the small-`N`
//! Cauchy-Schwarz inequality chain, and generalized-von-Neumann checks on
//! cyclic groups and intervals.
//!
//! Every reported value is produced by deterministic cascade summation over
//! a fixed chunking of the region (by first coordinate), so results are
//! independent of thread count.

use crate::gowers::{
    interval_config_count, norm_cyclic, norm_subset, GowersError, Method, NormReport,
    SubsetDomain,
};
use crate::linear_systems::{LinearSystem, SystemError};
use crate::numeric::{cascade_combine, close, CascadeSum, Complex64, EXACT_TOL, SUM_TOL};
use crate::regions::{preimage_region, LatticeRegion, RegionError};
use crate::series::{dilate_embed, Series, SeriesError};
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AverageError {
    #[error("region contains no lattice points")]
    EmptyRegion,
    #[error("system has {expected} forms but {got} series were supplied")]
    FunctionCount { expected: usize, got: usize },
    #[error("system dimension {system} does not match region dimension {region}")]
    DimensionMismatch { system: usize, region: usize },
    #[error("series {index} is not declared 1-bounded")]
    NotBounded { index: usize },
    #[error("cyclic averages need at least 3 series, got {got}")]
    TooFewFunctions { got: usize },
    #[error("cyclic series must share one window length; series {index} has {got}, expected {expected}")]
    WindowMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("modulus {n} shares a factor with progression gap {m}; the bound needs gcd(N, m) = 1")]
    ModulusNotCoprime { n: u64, m: u64 },
    #[error("shifted image value {value} escapes the comparison interval [{lo}, {hi}]")]
    ImageEscapesInterval { value: i64, lo: i64, hi: i64 },
    #[error("substitution identity violated: the two sides differ by {gap:.3e}")]
    IdentityViolated { gap: f64 },
    #[error("von Neumann bound violated: |average| = {average:.6} exceeds min norm {bound:.6}")]
    BoundViolated { average: f64, bound: f64 },
    #[error("average of 1-bounded inputs has modulus {modulus}, above 1")]
    AverageOutOfBounds { modulus: f64 },
    #[error("function index {got} is out of range for {count} series")]
    IndexOutOfRange { got: usize, count: usize },
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Gowers(#[from] GowersError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// One per-function uniformity-norm annotation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormAnnotation {
    pub index: usize,
    pub order: u32,
    pub value: f64,
}

/// Bookkeeping of the rescaling reduction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineTrace {
    pub n: i64,
    /// The per-form dilation factors `a_i`.
    pub scale_factors: Vec<i64>,
    /// `a = max |a_i|`.
    pub scale_bound: i64,
    /// The shift `c = a·N` applied to every rescaled form.
    pub shift: i64,
    pub region_size: u64,
    pub box_size: u64,
    /// `E_K ∏ f_i(ψ_i(x))`.
    pub original_average: Complex64,
    /// `E_K ∏ f̃_i(a_i·ψ_i(x) + aN)`, which equals the original exactly.
    pub substituted_average: Complex64,
    pub identity_gap: f64,
    /// `C = |box| / |K|`.
    pub comparison_constant: f64,
    /// `|K| / |box|`, the density the comparison constant inverts.
    pub reciprocal_density: f64,
    /// Largest `|∏ f̃_i(a_i·ψ_i(x) + aN)|` over box points outside the
    /// region, scaled by `|box∖K| / |box|` — the measured error term of the
    /// box-vs-region comparison (exactly 0 under the support convention).
    pub boundary_term: f64,
}

/// A multilinear average with provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AverageReport {
    pub value: Complex64,
    pub region_size: u64,
    pub shift: i64,
    pub norms: Vec<NormAnnotation>,
    pub trace: Option<PipelineTrace>,
}

fn form_value(coeffs: &[i64], point: &[i64]) -> i128 {
    coeffs
        .iter()
        .zip(point)
        .map(|(&c, &x)| c as i128 * x as i128)
        .sum()
}

fn series_value(f: &Series, at: i128) -> Complex64 {
    i64::try_from(at)
        .map(|n| f.value(n))
        .unwrap_or(Complex64::new(0.0, 0.0))
}

/// Mean of `term` over the region: per-first-coordinate cascade partials,
/// combined in fixed order.  Returns the total and the point count.
fn region_sum<F>(region: &LatticeRegion, term: F) -> (Complex64, u64)
where
    F: Fn(&[i64]) -> Complex64 + Sync,
{
    let firsts: Vec<i64> = region.first_axis().collect();
    let partials: Vec<(Complex64, u64)> = firsts
        .par_iter()
        .map(|&x0| {
            let mut acc = CascadeSum::new();
            let mut count = 0u64;
            for point in region.points_with_first(x0) {
                acc.push(term(&point));
                count += 1;
            }
            (acc.finish(), count)
        })
        .collect();
    let values: Vec<Complex64> = partials.iter().map(|p| p.0).collect();
    (cascade_combine(&values), partials.iter().map(|p| p.1).sum())
}

fn check_function_count(system: &LinearSystem, functions: &[Series]) -> Result<(), AverageError> {
    if functions.len() != system.forms().len() {
        return Err(AverageError::FunctionCount {
            expected: system.forms().len(),
            got: functions.len(),
        });
    }
    Ok(())
}

/// `E_{x ∈ K} ∏_i f_i(ψ_i(x) + c)` by exact enumeration; the mean is exact
/// up to cascade rounding and independent of thread count.
pub fn multilinear_average(
    system: &LinearSystem,
    functions: &[Series],
    region: &LatticeRegion,
    c: i64,
) -> Result<AverageReport, AverageError> {
    check_function_count(system, functions)?;
    if region.dimension() != system.dimension() {
        return Err(AverageError::DimensionMismatch {
            system: system.dimension(),
            region: region.dimension(),
        });
    }
    let coeffs: Vec<&[i64]> = system.forms().iter().map(|f| f.coeffs()).collect();
    let (total, count) = region_sum(region, |point| {
        let mut product = Complex64::new(1.0, 0.0);
        for (form, f) in coeffs.iter().zip(functions) {
            product *= series_value(f, form_value(form, point) + c as i128);
        }
        product
    });
    if count == 0 {
        return Err(AverageError::EmptyRegion);
    }
    let value = total / count as f64;
    if functions.iter().all(Series::is_declared_bounded) && value.norm() > 1.0 + SUM_TOL {
        return Err(AverageError::AverageOutOfBounds {
            modulus: value.norm(),
        });
    }
    Ok(AverageReport {
        value,
        region_size: count,
        shift: c,
        norms: Vec::new(),
        trace: None,
    })
}

/// The rescaling reduction on `K = preimage_region(system, N)`:
///
/// 1. translation-invariant systems keep `a_i = 1`; all others are
///    flagified (`a_i = ∏_{j≠i} ψ_j(x₀)`, gcd-reduced);
/// 2. each `f_i` (supported in `[-N, N]`) is embedded as
///    `f̃_i(x) = f_i((x - aN)/a_i)`;
/// 3. the exact substitution identity
///    `E_{x∈K} ∏ f_i(ψ_i(x)) = E_{x∈K} ∏ f̃_i(a_i·ψ_i(x) + aN)`
///    is evaluated on both sides and must agree to 1e-12;
/// 4. the boxed average `E_{x∈box} ∏ f̃_i(a_i·ψ_i(x) + aN)` is returned,
///    with the comparison constant `C = |box|/|K|` and the measured
///    boundary term in the trace.
pub fn reduction_pipeline(
    system: &LinearSystem,
    functions: &[Series],
    n: i64,
) -> Result<AverageReport, AverageError> {
    check_function_count(system, functions)?;
    let region = preimage_region(system, n)?;
    let original = multilinear_average(system, functions, &region, 0)?;

    let (scale_factors, scale_bound) = if system.is_translation_invariant() {
        (vec![1i64; functions.len()], 1i64)
    } else {
        let flag = system.flagify(64)?;
        let bound = flag.scale_bound();
        (flag.a, bound)
    };
    let shift = scale_bound
        .checked_mul(n)
        .ok_or(SeriesError::WindowOverflow { n: scale_bound })?;

    let embedded: Vec<Series> = functions
        .iter()
        .zip(&scale_factors)
        .map(|(f, &a_i)| dilate_embed(f, a_i, scale_bound, n))
        .collect::<Result<_, _>>()?;

    let coeffs: Vec<Vec<i64>> = system
        .forms()
        .iter()
        .zip(&scale_factors)
        .map(|(form, &a_i)| form.coeffs().iter().map(|&c| c * a_i).collect())
        .collect();
    let substituted_term = |point: &[i64]| {
        let mut product = Complex64::new(1.0, 0.0);
        for (form, f) in coeffs.iter().zip(&embedded) {
            product *= series_value(f, form_value(form, point) + shift as i128);
        }
        product
    };

    let (substituted_total, region_size) = region_sum(&region, substituted_term);
    let substituted = substituted_total / region_size as f64;
    let identity_gap = (original.value - substituted).norm();
    if !close(substituted.re, original.value.re, EXACT_TOL)
        || !close(substituted.im, original.value.im, EXACT_TOL)
    {
        return Err(AverageError::IdentityViolated { gap: identity_gap });
    }

    // Second route over the full box, tracking the largest stray product
    // outside K; under the support convention it is exactly zero.
    let full_box = LatticeRegion::cube_box(system.dimension(), n)?;
    let (boxed_total, box_size) = region_sum(&full_box, substituted_term);
    let boxed = boxed_total / box_size as f64;
    let stray = full_box
        .first_axis()
        .collect::<Vec<i64>>()
        .par_iter()
        .map(|&x0| {
            full_box
                .points_with_first(x0)
                .filter(|p| !region.contains(p).expect("box point has region dimension"))
                .map(|p| substituted_term(&p).norm())
                .fold(0.0f64, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    let outside = box_size - region_size;
    let boundary_term = stray * outside as f64 / box_size as f64;

    let trace = PipelineTrace {
        n,
        scale_factors,
        scale_bound,
        shift,
        region_size,
        box_size,
        original_average: original.value,
        substituted_average: substituted,
        identity_gap,
        comparison_constant: box_size as f64 / region_size as f64,
        reciprocal_density: region_size as f64 / box_size as f64,
        boundary_term,
    };
    Ok(AverageReport {
        value: boxed,
        region_size: box_size,
        shift,
        norms: Vec::new(),
        trace: Some(trace),
    })
}

/// Whether an inequality link or an exact identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    Inequality,
    Identity,
}

/// One verified step of the small-`N` chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainLink {
    pub name: String,
    pub kind: LinkKind,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl ChainLink {
    fn inequality(name: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.to_string(),
            kind: LinkKind::Inequality,
            lhs,
            rhs,
            holds: lhs <= rhs + SUM_TOL * rhs.abs().max(1.0),
        }
    }

    fn identity(name: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.to_string(),
            kind: LinkKind::Identity,
            lhs,
            rhs,
            holds: close(lhs, rhs, SUM_TOL),
        }
    }
}

/// The full small-`N` chain with its measured constants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    /// Index of the minimal-norm function the chain follows.
    pub chosen_index: usize,
    /// Norm order `s + 1` used in the final link.
    pub order: u32,
    /// The comparison interval (`[1, 2N+1]` for a radius-`N` region).
    pub interval: (i64, i64),
    /// Exact crowding constant `max_n #{x ∈ K : ψ_j(x)+c = n}·|I|/|K|`.
    pub crowding_constant: f64,
    /// Measured `‖f_j‖_{U²(I)} / ‖f_j‖_{U^{s+1}(I)}` (1 when both vanish).
    pub monotonicity_ratio: f64,
    /// The constant of the final link, assembled from the others.
    pub assembled_constant: f64,
    pub links: Vec<ChainLink>,
    pub all_hold: bool,
}

/// Evaluates and checks every link of the Cauchy-Schwarz chain that bounds
/// a multilinear average by a single uniformity norm:
///
/// * (a) `|E_K ∏ f_i(ψ_i+c)| ≤ (E_K |f_j(ψ_j+c)|²)^{1/2}` — Cauchy-Schwarz
///   against the other (1-bounded) factors;
/// * (b) `E_K |f_j(ψ_j+c)|² ≤ C_b · E_{n∈I} |f_j(n)|²` with the exact
///   crowding constant `C_b`;
/// * (c) `(E_n |f_j|²)² ≤ Σ_h |E_n f_j(n)·conj(f_j(n+h))|²`;
/// * (d) the exact identity `S₂(f_j·1_I) = config_count(1_I)·‖f_j‖⁴_{U²(I)}`,
///   left side by direct triple loop, right side through the FFT norm —
///   two independent routes;
/// * (e) `|E_K ∏ f_i| ≤ C·|I|^{1/4}·‖f_j‖_{U^{s+1}(I)}` with `C` assembled
///   from (b), (d) and the measured monotonicity ratio.
///
/// The comparison interval is `I = [1, 2N+1]` where `N` is the region's box
/// radius; the shifted image `ψ_j(K) + c` must land inside it.
pub fn small_n_chain(
    system: &LinearSystem,
    functions: &[Series],
    region: &LatticeRegion,
    c: i64,
    j: Option<usize>,
    s: u32,
) -> Result<ChainReport, AverageError> {
    check_function_count(system, functions)?;
    for (index, f) in functions.iter().enumerate() {
        if !f.is_declared_bounded() {
            return Err(AverageError::NotBounded { index });
        }
    }
    let interval_lo = 1i64;
    let interval_hi = 2 * region.radius() + 1;
    let interval_len = interval_hi as u64;
    let domain = SubsetDomain::Interval {
        lo: interval_lo,
        hi: interval_hi,
    };

    let norm_of = |f: &Series, order_s: u32| -> Result<NormReport, GowersError> {
        norm_subset(f, &domain, order_s, Method::Fast)
    };
    let chosen_index = match j {
        Some(index) => {
            if index >= functions.len() {
                return Err(AverageError::IndexOutOfRange {
                    got: index,
                    count: functions.len(),
                });
            }
            index
        }
        None => {
            let mut best = 0usize;
            let mut best_norm = f64::INFINITY;
            for (index, f) in functions.iter().enumerate() {
                let value = norm_of(f, s)?.norm_value;
                if value < best_norm {
                    best_norm = value;
                    best = index;
                }
            }
            best
        }
    };
    let f_j = &functions[chosen_index];
    let form_j = system.form(chosen_index).coeffs();

    // Image histogram of ψ_j + c over K; also the containment check.
    let mut histogram = vec![0u64; interval_len as usize];
    let mut region_size = 0u64;
    for point in region.points() {
        let value = form_value(form_j, &point) + c as i128;
        let Ok(value) = i64::try_from(value) else {
            return Err(AverageError::ImageEscapesInterval {
                value: i64::MAX,
                lo: interval_lo,
                hi: interval_hi,
            });
        };
        if value < interval_lo || value > interval_hi {
            return Err(AverageError::ImageEscapesInterval {
                value,
                lo: interval_lo,
                hi: interval_hi,
            });
        }
        histogram[(value - interval_lo) as usize] += 1;
        region_size += 1;
    }
    if region_size == 0 {
        return Err(AverageError::EmptyRegion);
    }
    let max_count = histogram.iter().copied().max().unwrap_or(0);
    let crowding_constant = max_count as f64 * interval_len as f64 / region_size as f64;

    // (a): the average against the square mean of the chosen factor.
    let average = multilinear_average(system, functions, region, c)?;
    let (square_total, _) = region_sum(region, |point| {
        let v = series_value(f_j, form_value(form_j, point) + c as i128);
        Complex64::new(v.norm_sqr(), 0.0)
    });
    let square_mean_region = square_total.re / region_size as f64;
    let link_a = ChainLink::inequality(
        "cauchy_schwarz",
        average.value.norm(),
        square_mean_region.max(0.0).sqrt(),
    );

    // (b): crowd the region mean into the interval mean.
    let mut interval_square = CascadeSum::new();
    for n in interval_lo..=interval_hi {
        interval_square.push(Complex64::new(f_j.value(n).norm_sqr(), 0.0));
    }
    let square_mean_interval = interval_square.finish().re / interval_len as f64;
    let link_b = ChainLink::inequality(
        "crowding",
        square_mean_region,
        crowding_constant * square_mean_interval,
    );

    // Links (c)-(e) all concern the restriction g = f_j·1_I.
    let g = |n: i64| -> Complex64 {
        if n < interval_lo || n > interval_hi {
            Complex64::new(0.0, 0.0)
        } else {
            f_j.value(n)
        }
    };

    // (c): the h = 0 autocorrelation term against the full square sum.
    let mut ac_square = CascadeSum::new();
    for h in -(interval_hi - 1)..=(interval_hi - 1) {
        let mut ac = CascadeSum::new();
        for n in interval_lo..=interval_hi {
            ac.push(g(n) * g(n + h).conj());
        }
        let ac = ac.finish() / interval_len as f64;
        ac_square.push(Complex64::new(ac.norm_sqr(), 0.0));
    }
    let ac_square = ac_square.finish().re;
    let link_c = ChainLink::inequality(
        "autocorrelation",
        square_mean_interval * square_mean_interval,
        ac_square,
    );

    // (d): raw parallelepiped sum of the restricted function, by direct
    // triple loop, against config_count · norm⁴ through the FFT route.
    let mut triple = CascadeSum::new();
    for n in interval_lo..=interval_hi {
        for h in -(interval_hi - 1)..=(interval_hi - 1) {
            for hp in -(interval_hi - 1)..=(interval_hi - 1) {
                let term = g(n) * g(n + h).conj() * g(n + hp).conj() * g(n + h + hp);
                triple.push(term);
            }
        }
    }
    let config_count = interval_config_count(interval_len, 1);
    let u2 = norm_of(f_j, 1)?;
    let link_d = ChainLink::identity(
        "norm_identity",
        triple.finish().re,
        config_count as f64 * u2.norm_value.powi(4),
    );

    // (e): assemble the final constant and check the headline bound.
    let u_high = norm_of(f_j, s)?;
    let monotonicity_ratio = if u_high.norm_value > 1e-15 {
        u2.norm_value / u_high.norm_value
    } else {
        1.0
    };
    let assembled_constant = crowding_constant.sqrt()
        * (config_count as f64 / (interval_len as f64).powi(3)).powf(0.25)
        * monotonicity_ratio;
    let link_e = ChainLink::inequality(
        "headline_bound",
        average.value.norm(),
        assembled_constant * (interval_len as f64).powf(0.25) * u_high.norm_value,
    );

    let links = vec![link_a, link_b, link_c, link_d, link_e];
    let all_hold = links.iter().all(|l| l.holds);
    Ok(ChainReport {
        chosen_index,
        order: s + 1,
        interval: (interval_lo, interval_hi),
        crowding_constant,
        monotonicity_ratio,
        assembled_constant,
        links,
        all_hold,
    })
}

/// A verified cyclic generalized-von-Neumann instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CyclicVnReport {
    pub average: Complex64,
    pub modulus: u64,
    /// `‖f_i‖_{U^{t-1}(Z_N)}` per function.
    pub norms: Vec<f64>,
    pub min_norm: f64,
    pub min_index: usize,
    /// `min_norm - |average|` (nonnegative up to tolerance).
    pub margin: f64,
}

/// `E_{x,d ∈ Z_N} ∏_i f_i(x + (i-1)d)` with the von Neumann bound
/// `|average| ≤ min_i ‖f_i‖_{U^{t-1}(Z_N)}` asserted (it is a theorem for
/// 1-bounded inputs when `N` is coprime to every gap `1, …, t-2`; violation
/// is reported as an error).
pub fn cyclic_ap_average(functions: &[Series]) -> Result<CyclicVnReport, AverageError> {
    let t = functions.len();
    if t < 3 {
        return Err(AverageError::TooFewFunctions { got: t });
    }
    let n = functions[0].len();
    for (index, f) in functions.iter().enumerate() {
        if f.len() != n {
            return Err(AverageError::WindowMismatch {
                index,
                expected: n,
                got: f.len(),
            });
        }
        if !f.is_declared_bounded() {
            return Err(AverageError::NotBounded { index });
        }
    }
    for m in 1..=(t as u64 - 2) {
        if (n as u64).gcd(&m) != 1 {
            return Err(AverageError::ModulusNotCoprime { n: n as u64, m });
        }
    }

    let tables: Vec<&[Complex64]> = functions.iter().map(Series::values).collect();
    let xs: Vec<usize> = (0..n).collect();
    let partials: Vec<Complex64> = xs
        .par_iter()
        .map(|&x| {
            let mut acc = CascadeSum::new();
            for d in 0..n {
                let mut product = Complex64::new(1.0, 0.0);
                for (i, table) in tables.iter().enumerate() {
                    product *= table[(x + i * d) % n];
                }
                acc.push(product);
            }
            acc.finish()
        })
        .collect();
    let average = cascade_combine(&partials) / (n as f64 * n as f64);

    let s = t as u32 - 2; // norm order t-1
    let norms: Vec<f64> = functions
        .iter()
        .map(|f| norm_cyclic(f, s).map(|r| r.norm_value))
        .collect::<Result<_, _>>()?;
    let (min_index, min_norm) = norms
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least three norms");
    if average.norm() > min_norm + SUM_TOL {
        return Err(AverageError::BoundViolated {
            average: average.norm(),
            bound: min_norm,
        });
    }
    Ok(CyclicVnReport {
        average,
        modulus: n as u64,
        norms,
        min_norm,
        min_index,
        margin: min_norm - average.norm(),
    })
}

/// The qualitative interval analogue: the average over the preimage region
/// next to the smallest interval uniformity norm at the system's
/// Cauchy-Schwarz complexity.  No inequality is asserted — the pair is
/// emitted for trend analysis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalVnReport {
    pub average: Complex64,
    pub abs_average: f64,
    pub order: u32,
    pub region_size: u64,
    pub norms: Vec<NormAnnotation>,
    pub min_norm: f64,
}

pub fn interval_vn_check(
    system: &LinearSystem,
    functions: &[Series],
    n: i64,
) -> Result<IntervalVnReport, AverageError> {
    check_function_count(system, functions)?;
    let region = preimage_region(system, n)?;
    let average = multilinear_average(system, functions, &region, 0)?;
    let s = system.cs_complexity()?.max(1);
    let domain = SubsetDomain::Interval { lo: -n, hi: n };
    let norms: Vec<NormAnnotation> = functions
        .iter()
        .enumerate()
        .map(|(index, f)| {
            norm_subset(f, &domain, s, Method::Fast).map(|r| NormAnnotation {
                index,
                order: s + 1,
                value: r.norm_value,
            })
        })
        .collect::<Result<_, _>>()?;
    let min_norm = norms
        .iter()
        .map(|a| a.value)
        .fold(f64::INFINITY, f64::min);
    Ok(IntervalVnReport {
        abs_average: average.value.norm(),
        average: average.value,
        order: s + 1,
        region_size: average.region_size,
        norms,
        min_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::e;
    use crate::series::{generate, GeneratorKind, GeneratorSpec};

    fn pm1(seed: u64, lo: i64, hi: i64) -> Series {
        generate(&GeneratorSpec::new(GeneratorKind::RandomPm1, seed), lo, hi).unwrap()
    }

    fn unimodular(seed: u64, lo: i64, hi: i64) -> Series {
        generate(&GeneratorSpec::new(GeneratorKind::RandomUnimodular, seed), lo, hi).unwrap()
    }

    fn ones(lo: i64, hi: i64) -> Series {
        generate(
            &GeneratorSpec::new(GeneratorKind::Constant { value: (1.0, 0.0) }, 0),
            lo,
            hi,
        )
        .unwrap()
    }

    fn three_ap() -> LinearSystem {
        LinearSystem::arithmetic_progression(3).unwrap()
    }

    #[test]
    fn average_matches_triple_loop_oracle() {
        let n = 32;
        let system = three_ap();
        let region = preimage_region(&system, n).unwrap();
        let functions = [pm1(11, -n, n), pm1(12, -n, n), pm1(13, -n, n)];
        let report = multilinear_average(&system, &functions, &region, 0).unwrap();

        let mut total = Complex64::new(0.0, 0.0);
        let mut count = 0u64;
        for x in -n..=n {
            for y in -n..=n {
                let (a, b, c) = (x, x + y, x + 2 * y);
                if b.abs() <= n && c.abs() <= n {
                    total += functions[0].value(a) * functions[1].value(b) * functions[2].value(c);
                    count += 1;
                }
            }
        }
        let oracle = total / count as f64;
        assert_eq!(report.region_size, count);
        assert!(
            (report.value - oracle).norm() <= 1e-12,
            "{} vs {}",
            report.value,
            oracle
        );
    }

    #[test]
    fn constant_functions_average_to_one() {
        let n = 10;
        let system = three_ap();
        let region = preimage_region(&system, n).unwrap();
        let functions = [ones(-n, n), ones(-n, n), ones(-n, n)];
        let report = multilinear_average(&system, &functions, &region, 0).unwrap();
        assert!((report.value - Complex64::new(1.0, 0.0)).norm() <= 1e-12);

        let zero = Series::new_bounded(-n, vec![Complex64::new(0.0, 0.0); 2 * n as usize + 1], "0")
            .unwrap();
        let functions = [ones(-n, n), zero, ones(-n, n)];
        let report = multilinear_average(&system, &functions, &region, 0).unwrap();
        assert_eq!(report.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn average_argument_validation() {
        let system = three_ap();
        let region = preimage_region(&system, 4).unwrap();
        let too_few = [ones(-4, 4)];
        assert!(matches!(
            multilinear_average(&system, &too_few, &region, 0),
            Err(AverageError::FunctionCount { .. })
        ));
        let wrong_dim = LatticeRegion::cube_box(3, 4).unwrap();
        let fs = [ones(-4, 4), ones(-4, 4), ones(-4, 4)];
        assert!(matches!(
            multilinear_average(&system, &fs, &wrong_dim, 0),
            Err(AverageError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn pipeline_translation_invariant_system() {
        let n = 8;
        let system = three_ap();
        let functions = [
            unimodular(21, -n, n),
            unimodular(22, -n, n),
            unimodular(23, -n, n),
        ];
        let report = reduction_pipeline(&system, &functions, n).unwrap();
        let trace = report.trace.as_ref().unwrap();
        assert_eq!(trace.scale_factors, vec![1, 1, 1]);
        assert_eq!(trace.scale_bound, 1);
        assert_eq!(trace.shift, n);
        assert_eq!(trace.identity_gap, 0.0);
        assert_eq!(trace.boundary_term, 0.0);
        // Box total equals region total exactly (everything outside K
        // contributes zero).
        let lhs = trace.original_average * trace.region_size as f64;
        let rhs = report.value * trace.box_size as f64;
        assert!((lhs - rhs).norm() <= 1e-9 * trace.region_size as f64);
    }

    #[test]
    fn pipeline_sign_flip_system() {
        let n = 16;
        let system = LinearSystem::from_rows(&[&[1], &[-1]]).unwrap();
        let functions = [unimodular(31, -n, n), unimodular(32, -n, n)];
        let report = reduction_pipeline(&system, &functions, n).unwrap();
        let trace = report.trace.as_ref().unwrap();
        assert_eq!(trace.scale_factors.len(), 2);
        assert_eq!(trace.scale_bound, 1);
        // a = (-1, 1) up to simultaneous sign: a_i·b_i constant.
        assert_eq!(
            trace.scale_factors[0].abs() + trace.scale_factors[1].abs(),
            2
        );
        assert_eq!(trace.identity_gap, 0.0);
        assert_eq!(trace.boundary_term, 0.0);
        assert!(trace.comparison_constant >= 1.0);
        assert!(close(
            trace.reciprocal_density * trace.comparison_constant,
            1.0,
            1e-12
        ));
    }

    #[test]
    fn pipeline_boundary_term_vanishes_under_support_convention() {
        for n in [8, 16] {
            let system = LinearSystem::arithmetic_progression(4).unwrap();
            let functions: Vec<Series> = (0..4).map(|i| pm1(40 + i, -n, n)).collect();
            let report = reduction_pipeline(&system, &functions, n).unwrap();
            let trace = report.trace.unwrap();
            assert_eq!(trace.boundary_term, 0.0, "N = {n}");
            // Box-vs-region comparison: |E_box| ≤ C⁻¹·|E_K| exactly here
            // (boxed = subst·|K|/|box|), so the recorded C inverts it.
            assert!(
                report.value.norm()
                    <= trace.reciprocal_density * trace.substituted_average.norm() + 1e-12
            );
        }
    }

    #[test]
    fn chain_holds_on_random_instances() {
        let radius = 16;
        for (k, seed) in [(3u32, 100u64), (4, 200)] {
            let system = LinearSystem::arithmetic_progression(k).unwrap();
            let region = preimage_region(&system, radius).unwrap();
            let s = system.cs_complexity().unwrap().max(1);
            for instance in 0..6 {
                let functions: Vec<Series> = (0..k as u64)
                    .map(|i| unimodular(seed + 17 * instance + i, -radius, radius))
                    .collect();
                let report = small_n_chain(
                    &system,
                    &functions,
                    &region,
                    radius + 1,
                    None,
                    s,
                )
                .unwrap();
                assert!(
                    report.all_hold,
                    "instance {instance} of {k}-AP failed: {:#?}",
                    report.links
                );
                assert_eq!(report.links.len(), 5);
                assert!(report.crowding_constant >= 1.0 - 1e-12);
            }
        }
    }

    #[test]
    fn chain_zero_function_is_all_zero() {
        let radius = 8;
        let system = three_ap();
        let region = preimage_region(&system, radius).unwrap();
        let zero = Series::new_bounded(
            -radius,
            vec![Complex64::new(0.0, 0.0); 2 * radius as usize + 1],
            "zero",
        )
        .unwrap();
        let functions = [ones(-radius, radius), zero, ones(-radius, radius)];
        let report =
            small_n_chain(&system, &functions, &region, radius + 1, Some(1), 1).unwrap();
        assert!(report.all_hold);
        for link in &report.links {
            assert!(link.lhs.abs() <= 1e-12, "{}: {}", link.name, link.lhs);
        }
        assert_eq!(report.monotonicity_ratio, 1.0);
    }

    #[test]
    fn chain_identity_link_across_sizes() {
        for radius in [8i64, 16, 32] {
            let system = three_ap();
            let region = preimage_region(&system, radius).unwrap();
            for seed in 0..4 {
                let functions: Vec<Series> = (0..3)
                    .map(|i| unimodular(300 + seed * 3 + i, -radius, radius))
                    .collect();
                let report =
                    small_n_chain(&system, &functions, &region, radius + 1, None, 1).unwrap();
                let identity = report
                    .links
                    .iter()
                    .find(|l| l.kind == LinkKind::Identity)
                    .unwrap();
                assert!(identity.holds, "radius {radius} seed {seed}: {identity:?}");
            }
        }
    }

    #[test]
    fn chain_rejects_escaping_shift() {
        let radius = 8;
        let system = three_ap();
        let region = preimage_region(&system, radius).unwrap();
        let fs = [
            ones(-radius, radius),
            ones(-radius, radius),
            ones(-radius, radius),
        ];
        assert!(matches!(
            small_n_chain(&system, &fs, &region, 0, None, 1),
            Err(AverageError::ImageEscapesInterval { .. })
        ));
    }

    #[test]
    fn cyclic_extremal_characters_meet_the_bound() {
        let n = 31i64;
        let make = |xi: i64| {
            Series::new_bounded(
                0,
                (0..n).map(|x| e(xi as f64 * x as f64 / n as f64)).collect(),
                format!("character({xi})"),
            )
            .unwrap()
        };
        // ξ = (1, -2, 1): Σξ_i = 0 and Σ(i-1)ξ_i = 0, so every term is 1.
        let report = cyclic_ap_average(&[make(1), make(-2), make(1)]).unwrap();
        assert!(close(report.average.norm(), 1.0, 1e-9));
        assert!(close(report.min_norm, 1.0, 1e-9));
        assert!(report.margin.abs() <= 1e-9);
    }

    #[test]
    fn cyclic_bound_holds_on_random_corpus() {
        let n = 31;
        for seed in 0..20 {
            let fs: Vec<Series> = (0..3).map(|i| unimodular(500 + seed * 3 + i, 0, n - 1)).collect();
            let report = cyclic_ap_average(&fs).unwrap();
            assert!(report.margin >= -1e-9);
        }
        for seed in 0..5 {
            let fs: Vec<Series> =
                (0..4).map(|i| unimodular(900 + seed * 4 + i, 0, n - 1)).collect();
            let report = cyclic_ap_average(&fs).unwrap();
            assert!(report.margin >= -1e-9);
            assert_eq!(report.norms.len(), 4);
        }
    }

    #[test]
    fn cyclic_preconditions() {
        let f = unimodular(1, 0, 29); // length 30, shares a factor with gap 1? gcd(30,1)=1, ok for t=3
        let fs = [f.clone(), f.clone(), f.clone(), f.clone()];
        // t = 4 needs gcd(N, 2) = 1; N = 30 fails.
        assert!(matches!(
            cyclic_ap_average(&fs),
            Err(AverageError::ModulusNotCoprime { .. })
        ));
        let fs = [f.clone(), f.clone()];
        assert!(matches!(
            cyclic_ap_average(&fs),
            Err(AverageError::TooFewFunctions { .. })
        ));
        let unbounded = Series::new(0, vec![Complex64::new(2.0, 0.0); 31], "big").unwrap();
        let g = unimodular(2, 0, 30);
        assert!(matches!(
            cyclic_ap_average(&[g.clone(), unbounded, g.clone()]),
            Err(AverageError::NotBounded { index: 1 })
        ));
    }

    #[test]
    fn interval_vn_structured_vs_random() {
        let n = 48;
        let system = three_ap();
        let alpha = 0.2378431;
        // Phase pattern (1, -2, 1)·α: the combination α(ψ₁ - 2ψ₂ + ψ₃)
        // vanishes identically on the 3-AP system, so the average is 1.
        let phase: Vec<Series> = [1.0, -2.0, 1.0]
            .iter()
            .map(|&c_i| {
                generate(
                    &GeneratorSpec::new(
                        GeneratorKind::PolynomialPhase {
                            coeffs: vec![c_i * alpha],
                        },
                        0,
                    ),
                    -n,
                    n,
                )
                .unwrap()
            })
            .collect();
        let structured = interval_vn_check(&system, &phase, n).unwrap();
        assert!(
            structured.abs_average > 0.9,
            "aligned phases should correlate: {}",
            structured.abs_average
        );
        assert!(structured.min_norm > 0.9);

        let random: Vec<Series> = (0..3).map(|i| pm1(70 + i, -n, n)).collect();
        let noise = interval_vn_check(&system, &random, n).unwrap();
        assert!(noise.abs_average < 0.3, "{}", noise.abs_average);
        assert!(noise.min_norm < 0.8, "{}", noise.min_norm);
        assert_eq!(noise.order, 2);
        assert_eq!(noise.norms.len(), 3);
    }

    #[test]
    fn reported_values_are_reproducible() {
        let n = 12;
        let system = three_ap();
        let functions = [
            unimodular(81, -n, n),
            unimodular(82, -n, n),
            unimodular(83, -n, n),
        ];
        let region = preimage_region(&system, n).unwrap();
        let first = multilinear_average(&system, &functions, &region, 0).unwrap();
        for _ in 0..3 {
            let again = multilinear_average(&system, &functions, &region, 0).unwrap();
            assert_eq!(first.value, again.value);
        }
        let p1 = reduction_pipeline(&system, &functions, n).unwrap();
        let p2 = reduction_pipeline(&system, &functions, n).unwrap();
        assert_eq!(p1.value, p2.value);
    }
}
