//! Gowers uniformity norms: a definition-faithful enumeration oracle, an
//! FFT-accelerated engine, norms over intervals / progressions / explicit
//! sets and cyclic groups, and the trapezoid smoothing kernels used in the
//! subprogression-uniformity experiments.
//!
//! The central object is the unnormalized parallelepiped sum
//!
//! ```text
//! S_{s+1}(f) = Σ_{x ∈ Z} Σ_{h ∈ Z^{s+1}} ∏_{ω ∈ {0,1}^{s+1}} C^{|ω|} f(x + ω·h)
//! ```
//!
//! (`C` is complex conjugation, applied at odd-weight corners).  Norms are
//! quotients of two such sums: `‖f‖_{U^{s+1}(A)} = (S(f·1_A)/S(1_A))^{1/2^{s+1}}`.
//! The oracle computes `S` by nested enumeration of the defining sum; the
//! fast path uses the derivative recursion `S_{s+1}(f) = Σ_h S_s(Δ_h f)`
//! with an FFT autocorrelation base case.  Both reduce with deterministic
//! cascade summation, so results are independent of thread count.

use crate::numeric::{cascade_combine, CascadeSum, Complex64, SUM_TOL};
use crate::series::{Progression, Series, SeriesError};
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Enumeration guard for [`pp_sum_oracle`]: `|supp|^{s+2}` must stay below
/// this (2^31, sized to admit the full `N = 64, s = 3` oracle corpus while
/// still refusing runaway enumerations).
pub const ORACLE_GUARD: f64 = 2147483648.0;

/// Guard for [`pp_sum_fast`]: `|supp|^s ≤ 10^9`.
pub const FAST_GUARD: f64 = 1e9;

#[derive(Debug, Error)]
pub enum GowersError {
    #[error("uniformity parameter s must be at least 1 (got {got})")]
    OrderTooSmall { got: u32 },
    #[error(
        "support length {support} with s = {s} needs ~{cost:.2e} operations, \
         beyond the {guard:.2e} guard"
    )]
    TooLarge {
        support: usize,
        s: u32,
        cost: f64,
        guard: f64,
    },
    #[error("parallelepiped sum is not real nonnegative: {re} + {im}i")]
    NotRealNonnegative { re: f64, im: f64 },
    #[error("norm domain is empty")]
    EmptyDomain,
    #[error("explicit domain points must be strictly increasing")]
    UnsortedDomain,
    #[error("progression step must be nonzero")]
    ZeroStep,
    #[error("epsilon must lie in (0, 1], got {eps}")]
    InvalidEpsilon { eps: f64 },
    #[error("kernel plateau is degenerate: need ε·N ≥ 4, got ε·N = {value}")]
    DegeneratePlateau { value: f64 },
    #[error("embedding group of size {group} cannot hold a window of span {span}")]
    GroupTooSmall { group: u64, span: u64 },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// The unnormalized sum `S_{s+1}(f)` together with the number of lattice
/// configurations `(x, h)` whose parallelepiped stays inside the support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParallelepipedSum {
    /// The norm order `s + 1 ≥ 2`.
    pub order: u32,
    /// The sum; real and nonnegative up to rounding (validated).
    pub value: Complex64,
    /// `S_{s+1}(1_{supp f})` as an exact integer.
    pub config_count: u128,
}

impl ParallelepipedSum {
    /// Validates that the computed sum is real and nonnegative within
    /// tolerance: `|Im| ≤ 1e-9·(1 + |value|)` and `Re ≥ -1e-9`.
    fn checked(order: u32, value: Complex64, config_count: u128) -> Result<Self, GowersError> {
        if value.im.abs() > SUM_TOL * (1.0 + value.norm()) || value.re < -SUM_TOL {
            return Err(GowersError::NotRealNonnegative {
                re: value.re,
                im: value.im,
            });
        }
        Ok(Self {
            order,
            value,
            config_count,
        })
    }

    /// The sum as a clamped nonnegative real.
    pub fn real(&self) -> f64 {
        self.value.re.max(0.0)
    }
}

/// `Δ_h g` on the overlap of `g` and its `h`-shift (0-based array layout).
fn derivative(g: &[Complex64], h: i64) -> Vec<Complex64> {
    let m = g.len() as i64;
    let lo = (-h).max(0);
    let hi = m - h.max(0); // overlap is lo..hi
    (lo..hi)
        .map(|x| g[x as usize] * g[(x + h) as usize].conj())
        .collect()
}

fn derivative_mask(mask: &[bool], h: i64) -> Vec<bool> {
    let m = mask.len() as i64;
    let lo = (-h).max(0);
    let hi = m - h.max(0);
    (lo..hi)
        .map(|x| mask[x as usize] && mask[(x + h) as usize])
        .collect()
}

/// The innermost three loops of the defining sum: `Σ_{h, h', x}` of the
/// four-corner product, together with the matching support-configuration
/// count.  `a_h[x]·conj(a_h[x+h'])` with `a_h = Δ_h g` is exactly the
/// definition's `g(x)·conj(g(x+h))·conj(g(x+h'))·g(x+h+h')`.
fn oracle_base(g: &[Complex64], mask: &[bool]) -> (Complex64, u128) {
    let m = g.len() as i64;
    let mut acc = CascadeSum::new();
    let mut count: u128 = 0;
    for h in -(m - 1)..=(m - 1) {
        let a = derivative(g, h);
        let am = derivative_mask(mask, h);
        let k = a.len() as i64;
        for hp in -(k - 1)..=(k - 1) {
            let lo = (-hp).max(0);
            let hi = k - hp.max(0);
            for x in lo..hi {
                acc.push(a[x as usize] * a[(x + hp) as usize].conj());
                count += (am[x as usize] && am[(x + hp) as usize]) as u128;
            }
        }
    }
    (acc.finish(), count)
}

/// Peels derivative variables `h` one at a time until the base triple loop;
/// `depth` is the number of `h`-variables left above the base pair.
fn oracle_level(g: &[Complex64], mask: &[bool], depth: u32) -> (Complex64, u128) {
    if depth == 0 {
        return oracle_base(g, mask);
    }
    let m = g.len() as i64;
    let mut acc = CascadeSum::new();
    let mut count: u128 = 0;
    for h in -(m - 1)..=(m - 1) {
        let (v, c) = oracle_level(&derivative(g, h), &derivative_mask(mask, h), depth - 1);
        acc.push(v);
        count += c;
    }
    (acc.finish(), count)
}

/// `S_{s+1}(f)` by direct enumeration of the defining sum over the support
/// hull, restricted to the configurations that can contribute (every term
/// with a corner outside the hull vanishes).  Partial products are hoisted
/// across the nested loops; no rearrangement identities or transforms are
/// used.  The top-level `h` loop runs in parallel with a deterministic
/// ordered reduction.
///
/// `config_count` is accumulated by the same enumeration with `f` replaced
/// by its support indicator (interior zeros excluded).
pub fn pp_sum_oracle(f: &Series, s: u32) -> Result<ParallelepipedSum, GowersError> {
    if s < 1 {
        return Err(GowersError::OrderTooSmall { got: s });
    }
    let trimmed = f.trimmed();
    let g: &[Complex64] = trimmed.values();
    let mask: Vec<bool> = g.iter().map(|v| v.norm_sqr() != 0.0).collect();
    let cost = (g.len() as f64).powi(s as i32 + 2);
    if cost > ORACLE_GUARD {
        return Err(GowersError::TooLarge {
            support: g.len(),
            s,
            cost,
            guard: ORACLE_GUARD,
        });
    }

    let m = g.len() as i64;
    let (value, count) = if s == 1 {
        // The whole sum is the base triple loop.
        oracle_base(g, &mask)
    } else {
        // Materialized so the collect is indexed: results come back in `h`
        // order no matter how the work is scheduled.
        let shifts: Vec<i64> = (-(m - 1)..=(m - 1)).collect();
        let tops: Vec<(Complex64, u128)> = shifts
            .into_par_iter()
            .map(|h| oracle_level(&derivative(g, h), &derivative_mask(&mask, h), s - 2))
            .collect();
        let value = cascade_combine(&tops.iter().map(|t| t.0).collect::<Vec<_>>());
        let count = tops.iter().map(|t| t.1).sum();
        (value, count)
    };
    ParallelepipedSum::checked(s + 1, value, count)
}

/// `S_2(g) = Σ_h |ac_g(h)|²` where `ac_g(h) = Σ_x g(x)·conj(g(x+h))`, via
/// FFT: zero-pad to the next power of two ≥ 2·len (so circular equals
/// linear autocorrelation), transform, take `|ĝ|²`, inverse-transform, and
/// scale by `1/L` (rustfft leaves the inverse unnormalized).
fn s2_fft(g: &[Complex64], planner: &mut FftPlanner<f64>) -> Complex64 {
    let m = g.len();
    let l = (2 * m).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); l];
    buf[..m].copy_from_slice(g);
    planner.plan_fft_forward(l).process(&mut buf);
    for v in buf.iter_mut() {
        *v = Complex64::new(v.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(l).process(&mut buf);
    let scale = 1.0 / l as f64;
    let mut acc = CascadeSum::new();
    for v in &buf {
        acc.push(Complex64::new((v * scale).norm_sqr(), 0.0));
    }
    acc.finish()
}

fn fast_level(g: &[Complex64], s: u32, planner: &mut FftPlanner<f64>) -> Complex64 {
    if s == 1 {
        return s2_fft(g, planner);
    }
    let m = g.len() as i64;
    let mut acc = CascadeSum::new();
    for h in -(m - 1)..=(m - 1) {
        acc.push(fast_level(&derivative(g, h), s - 1, planner));
    }
    acc.finish()
}

/// Exact integer `S_{s+1}` of a 0/1 support mask by the fast recursion
/// (derivative = pointwise AND, base = direct integer autocorrelation).
fn mask_count_fast(mask: &[bool], s: u32) -> u128 {
    if s == 1 {
        let m = mask.len() as i64;
        let mut total: u128 = 0;
        for h in 0..m {
            let mut ac: u128 = 0;
            for x in 0..m - h {
                ac += (mask[x as usize] && mask[(x + h) as usize]) as u128;
            }
            // lags h and -h contribute equal |ac|².
            total += ac * ac * if h == 0 { 1 } else { 2 };
        }
        return total;
    }
    let m = mask.len() as i64;
    let mut total: u128 = 0;
    for h in -(m - 1)..=(m - 1) {
        total += mask_count_fast(&derivative_mask(mask, h), s - 1);
    }
    total
}

/// `S_{s+1}(f)` by the derivative recursion with the FFT base case; agrees
/// with [`pp_sum_oracle`] within 1e-9 relative.  The top-level `h` loop is
/// parallel with an ordered deterministic reduction.
///
/// `config_count`: for gap-free supports this is [`interval_config_count`]
/// of the hull; supports with interior zeros use the exact integer
/// recursion, guarded at `|supp|^{s+1} ≤ 2^31`.
pub fn pp_sum_fast(f: &Series, s: u32) -> Result<ParallelepipedSum, GowersError> {
    if s < 1 {
        return Err(GowersError::OrderTooSmall { got: s });
    }
    let trimmed = f.trimmed();
    let g: &[Complex64] = trimmed.values();
    let cost = (g.len() as f64).powi(s as i32);
    if cost > FAST_GUARD {
        return Err(GowersError::TooLarge {
            support: g.len(),
            s,
            cost,
            guard: FAST_GUARD,
        });
    }

    let mask: Vec<bool> = g.iter().map(|v| v.norm_sqr() != 0.0).collect();
    let zero_series = !mask.iter().any(|&b| b);
    let count = if zero_series {
        0
    } else if mask.iter().all(|&b| b) {
        interval_config_count(g.len() as u64, s)
    } else {
        let count_cost = (g.len() as f64).powi(s as i32 + 1);
        if count_cost > ORACLE_GUARD {
            return Err(GowersError::TooLarge {
                support: g.len(),
                s,
                cost: count_cost,
                guard: ORACLE_GUARD,
            });
        }
        mask_count_fast(&mask, s)
    };

    let m = g.len() as i64;
    let value = if s == 1 {
        s2_fft(g, &mut FftPlanner::new())
    } else {
        let shifts: Vec<i64> = (-(m - 1)..=(m - 1)).collect();
        let tops: Vec<Complex64> = shifts
            .into_par_iter()
            .map_init(FftPlanner::<f64>::new, |planner, h| {
                fast_level(&derivative(g, h), s - 1, planner)
            })
            .collect();
        cascade_combine(&tops)
    };
    ParallelepipedSum::checked(s + 1, value, count)
}

/// Number of `(x, h_1, …, h_{s+1})` with every corner of the parallelepiped
/// inside an interval of `len` points, in closed form: grouping
/// configurations by the span `m = Σ|h_i|`, there are `len - m` choices of
/// `x` and `r(m) = Σ_j 2^j·C(s+1, j)·C(m-1, j-1)` sign-and-composition
/// choices of `h`, so the count is `Σ_{m < len} (len - m)·r(m)`.
pub fn interval_config_count(len: u64, s: u32) -> u128 {
    let dims = s as u64 + 1;
    let mut total: u128 = 0;
    for m in 0..len {
        let positions = (len - m) as u128;
        let arrangements: u128 = if m == 0 {
            1
        } else {
            (1..=dims.min(m))
                .map(|j| {
                    (1u128 << j)
                        * binomial_u128(dims, j)
                        * binomial_u128(m - 1, j - 1)
                })
                .sum()
        };
        total += positions * arrangements;
    }
    total
}

fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut result: u128 = 1;
    for i in 0..k {
        result = result * (n - i) as u128 / (i + 1) as u128;
    }
    result
}

/// How a norm is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Definition-faithful enumeration ([`pp_sum_oracle`]).
    Oracle,
    /// Derivative recursion with FFT base ([`pp_sum_fast`]).
    Fast,
}

/// A finite subset of `Z` over which a uniformity norm is taken.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubsetDomain {
    Interval { lo: i64, hi: i64 },
    Progression { start: i64, step: i64, len: u64 },
    Explicit { points: Vec<i64> },
}

impl SubsetDomain {
    pub fn from_progression(p: Progression) -> Self {
        SubsetDomain::Progression {
            start: p.start,
            step: p.step,
            len: p.len,
        }
    }

    pub fn validate(&self) -> Result<(), GowersError> {
        match self {
            SubsetDomain::Interval { lo, hi } => {
                if lo > hi {
                    return Err(GowersError::EmptyDomain);
                }
            }
            SubsetDomain::Progression { step, len, .. } => {
                if *step == 0 {
                    return Err(GowersError::ZeroStep);
                }
                if *len == 0 {
                    return Err(GowersError::EmptyDomain);
                }
            }
            SubsetDomain::Explicit { points } => {
                if points.is_empty() {
                    return Err(GowersError::EmptyDomain);
                }
                if points.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(GowersError::UnsortedDomain);
                }
            }
        }
        Ok(())
    }

    pub fn size(&self) -> u64 {
        match self {
            SubsetDomain::Interval { lo, hi } => (hi - lo + 1).max(0) as u64,
            SubsetDomain::Progression { len, .. } => *len,
            SubsetDomain::Explicit { points } => points.len() as u64,
        }
    }
}

/// Domain tag carried by a [`NormReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "group", rename_all = "snake_case")]
pub enum NormDomain {
    Cyclic { modulus: u64 },
    Interval { lo: i64, hi: i64 },
    Progression { start: i64, step: i64, len: u64 },
    Explicit { size: u64 },
}

/// A computed uniformity norm with its full provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormReport {
    /// `(numerator/denominator)^(1/2^order)`, nonnegative.
    pub norm_value: f64,
    /// The norm order `s + 1`.
    pub order: u32,
    pub domain: NormDomain,
    pub method: Method,
    /// Raw `S_{s+1}(f·1_A)` (real part).
    pub numerator: f64,
    /// Raw `S_{s+1}(1_A)` (an exact integer, reported as float).
    pub denominator: f64,
    /// Exact integer form of the denominator.
    pub config_count: u128,
    /// Tolerance the caller should apply when comparing norms.
    pub tolerance: f64,
}

fn norm_from_sums(
    numerator: f64,
    config_count: u128,
    order: u32,
    domain: NormDomain,
    method: Method,
) -> Result<NormReport, GowersError> {
    let denominator = config_count as f64;
    debug_assert!(denominator > 0.0, "nonempty domains have h = 0 configs");
    let ratio = (numerator.max(0.0) / denominator).max(0.0);
    let norm_value = ratio.powf(1.0 / f64::from(1u32 << order));
    Ok(NormReport {
        norm_value,
        order,
        domain,
        method,
        numerator,
        denominator,
        config_count,
        tolerance: SUM_TOL,
    })
}

fn pp_sum(f: &Series, s: u32, method: Method) -> Result<ParallelepipedSum, GowersError> {
    match method {
        Method::Oracle => pp_sum_oracle(f, s),
        Method::Fast => pp_sum_fast(f, s),
    }
}

/// `‖f‖_{U^{s+1}(A)} = (S_{s+1}(f·1_A) / S_{s+1}(1_A))^{1/2^{s+1}}` for a
/// finite `A ⊂ Z`; `f` is zero-extended off its window.
///
/// Intervals and progressions get exact closed-form denominators (an affine
/// bijection of an interval onto a progression carries parallelepiped
/// configurations to parallelepiped configurations both ways, so the
/// progression case reduces to the interval count of its length, and the
/// numerator to the sum of the index-compressed restriction).  Explicit sets
/// use the enumerated integer count of their indicator.
pub fn norm_subset(
    f: &Series,
    domain: &SubsetDomain,
    s: u32,
    method: Method,
) -> Result<NormReport, GowersError> {
    if s < 1 {
        return Err(GowersError::OrderTooSmall { got: s });
    }
    domain.validate()?;
    match domain {
        SubsetDomain::Interval { lo, hi } => {
            let g = f.restricted(*lo, *hi)?;
            let numerator = pp_sum(&g, s, method)?.real();
            let count = match method {
                Method::Fast => interval_config_count((hi - lo + 1) as u64, s),
                // The oracle route counts by enumeration, independently of
                // the closed form.
                Method::Oracle => {
                    let ones = Series::new_bounded(
                        *lo,
                        vec![Complex64::new(1.0, 0.0); (hi - lo + 1) as usize],
                        "1_A",
                    )?;
                    pp_sum_oracle(&ones, s)?.config_count
                }
            };
            norm_from_sums(
                numerator,
                count,
                s + 1,
                NormDomain::Interval { lo: *lo, hi: *hi },
                method,
            )
        }
        SubsetDomain::Progression { start, step, len } => {
            let compressed: Vec<Complex64> = (0..*len as i64)
                .map(|k| f.value(start + k * step))
                .collect();
            let g = Series::new(0, compressed, "compressed")?;
            let numerator = pp_sum(&g, s, method)?.real();
            let count = match method {
                Method::Fast => interval_config_count(*len, s),
                Method::Oracle => {
                    let ones =
                        Series::new_bounded(0, vec![Complex64::new(1.0, 0.0); *len as usize], "1_A")?;
                    pp_sum_oracle(&ones, s)?.config_count
                }
            };
            norm_from_sums(
                numerator,
                count,
                s + 1,
                NormDomain::Progression {
                    start: *start,
                    step: *step,
                    len: *len,
                },
                method,
            )
        }
        SubsetDomain::Explicit { points } => {
            let lo = points[0];
            let hi = *points.last().expect("validated nonempty");
            let mut values = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
            let mut mask = vec![false; values.len()];
            for &n in points {
                values[(n - lo) as usize] = f.value(n);
                mask[(n - lo) as usize] = true;
            }
            let g = Series::new(lo, values, "restricted")?;
            let numerator = pp_sum(&g, s, method)?.real();
            let indicator = Series::new_bounded(
                lo,
                mask.iter()
                    .map(|&b| Complex64::new(if b { 1.0 } else { 0.0 }, 0.0))
                    .collect(),
                "1_A",
            )?;
            let count = match method {
                Method::Oracle => pp_sum_oracle(&indicator, s)?.config_count,
                Method::Fast => pp_sum_fast(&indicator, s)?.config_count,
            };
            norm_from_sums(
                numerator,
                count,
                s + 1,
                NormDomain::Explicit {
                    size: points.len() as u64,
                },
                method,
            )
        }
    }
}

fn cyclic_derivative(g: &[Complex64], h: usize) -> Vec<Complex64> {
    let n = g.len();
    (0..n).map(|x| g[x] * g[(x + h) % n].conj()).collect()
}

fn cyclic_s2_fft(g: &[Complex64], planner: &mut FftPlanner<f64>) -> Complex64 {
    // Circular autocorrelation: no padding, the group is Z_N itself.
    let n = g.len();
    let mut buf = g.to_vec();
    planner.plan_fft_forward(n).process(&mut buf);
    for v in buf.iter_mut() {
        *v = Complex64::new(v.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let mut acc = CascadeSum::new();
    for v in &buf {
        acc.push(Complex64::new((v * scale).norm_sqr(), 0.0));
    }
    acc.finish()
}

fn cyclic_level(g: &[Complex64], s: u32, planner: &mut FftPlanner<f64>) -> Complex64 {
    if s == 1 {
        return cyclic_s2_fft(g, planner);
    }
    let mut acc = CascadeSum::new();
    for h in 0..g.len() {
        acc.push(cyclic_level(&cyclic_derivative(g, h), s - 1, planner));
    }
    acc.finish()
}

/// The parallelepiped sum over `Z_N` (all `N^{s+2}` configurations), taking
/// the stored window of `f` as the cyclic value table.
pub fn pp_sum_cyclic(f: &Series, s: u32) -> Result<ParallelepipedSum, GowersError> {
    if s < 1 {
        return Err(GowersError::OrderTooSmall { got: s });
    }
    let g = f.values();
    let n = g.len();
    let cost = (n as f64).powi(s as i32);
    if cost > FAST_GUARD {
        return Err(GowersError::TooLarge {
            support: n,
            s,
            cost,
            guard: FAST_GUARD,
        });
    }
    let value = if s == 1 {
        cyclic_s2_fft(g, &mut FftPlanner::new())
    } else {
        let tops: Vec<Complex64> = (0..n)
            .into_par_iter()
            .map_init(FftPlanner::<f64>::new, |planner, h| {
                cyclic_level(&cyclic_derivative(g, h), s - 1, planner)
            })
            .collect();
        cascade_combine(&tops)
    };
    let count = (n as u128).pow(s + 2);
    ParallelepipedSum::checked(s + 1, value, count)
}

/// The standard cyclic-group norm `‖f‖_{U^{s+1}(Z_N)}`, with `N` the stored
/// window length of `f`.
pub fn norm_cyclic(f: &Series, s: u32) -> Result<NormReport, GowersError> {
    let sum = pp_sum_cyclic(f, s)?;
    norm_from_sums(
        sum.real(),
        sum.config_count,
        s + 1,
        NormDomain::Cyclic {
            modulus: f.len() as u64,
        },
        Method::Fast,
    )
}

/// The trapezoid cutoff: 1 on the plateau `|x| ≤ εN/2`, 0 beyond the edge
/// `(1 + 1/√N)·εN/2`, linear in between, sampled at integer points.
pub fn dlvp_kernel(eps: f64, n: u64) -> Result<Series, GowersError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(GowersError::InvalidEpsilon { eps });
    }
    let nf = n as f64;
    let spread = eps * nf;
    if spread < 4.0 {
        return Err(GowersError::DegeneratePlateau { value: spread });
    }
    let plateau = spread / 2.0;
    let edge = (1.0 + 1.0 / nf.sqrt()) * plateau;
    let x_max = edge.floor() as i64;
    let values: Vec<Complex64> = (-x_max..=x_max)
        .map(|x| {
            let ax = (x as f64).abs();
            let value = if ax <= plateau {
                1.0
            } else if ax >= edge {
                0.0
            } else {
                (edge - ax) / (edge - plateau)
            };
            Complex64::new(value, 0.0)
        })
        .collect();
    Ok(Series::new_bounded(
        -x_max,
        values,
        format!("dlvp(eps={eps}, N={n})"),
    )?)
}

/// The plateau of the trapezoid as an integer half-width: the kernel is
/// exactly 1 on `[-half, half]`.
pub fn dlvp_plateau_halfwidth(eps: f64, n: u64) -> i64 {
    (eps * n as f64 / 2.0).floor() as i64
}

/// The kernel pushed onto one residue class:
/// `χ(x) = χ₀((x - c)/q)` for `x ≡ c (mod q)`, zero otherwise.
pub fn dilated_smoother(eps: f64, n: u64, q: u64, c: i64) -> Result<Series, GowersError> {
    if q < 1 {
        return Err(GowersError::ZeroStep);
    }
    let kernel = dlvp_kernel(eps, n)?;
    let (klo, khi) = kernel.window();
    let q = q as i64;
    let start = c + q * klo;
    let end = c + q * khi;
    let values: Vec<Complex64> = (start..=end)
        .map(|x| {
            if (x - c).rem_euclid(q) == 0 {
                kernel.value((x - c) / q)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(Series::new_bounded(
        start,
        values,
        format!("{} dilated(q={q}, c={c})", kernel.label()),
    )?)
}

/// `Σ_ξ |f̂(ξ)|` for `f` embedded in `Z_L`, with
/// `f̂(ξ) = (1/L)·Σ_x f(x) e(-xξ/L)`.  The embedding sends `n` to
/// `n mod L`; `L` must be at least the window span so distinct points stay
/// distinct.
pub fn fourier_l1(f: &Series, group_len: u64) -> Result<f64, GowersError> {
    let span = f.len() as u64;
    if group_len < span {
        return Err(GowersError::GroupTooSmall {
            group: group_len,
            span,
        });
    }
    let l = group_len as usize;
    let mut buf = vec![Complex64::new(0.0, 0.0); l];
    for (n, v) in f.support_points() {
        buf[n.rem_euclid(group_len as i64) as usize] += v;
    }
    FftPlanner::new().plan_fft_forward(l).process(&mut buf);
    let scale = 1.0 / l as f64;
    let mut acc = CascadeSum::new();
    for v in &buf {
        acc.push(Complex64::new(v.norm() * scale, 0.0));
    }
    Ok(acc.finish().re)
}
