//! Integer linear forms and systems of forms: evaluation, exact power-span
//! algebra, the flag (span-containment) condition, independence degree,
//! Cauchy-Schwarz complexity, translation invariance, and the rescaling of a
//! system into a translation-invariant one.
//!
//! Every decision in this module (ranks, span containments, partition
//! searches) is made in exact arbitrary-precision arithmetic; floating point
//! never enters.

use crate::linalg::IntBasis;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Subset dynamic programming over the other `t - 1` forms is `O(3^t)`;
/// beyond this bound [`LinearSystem::cs_complexity`] refuses to run.
pub const MAX_COMPLEXITY_FORMS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error("a linear form needs at least one coordinate")]
    EmptyForm,
    #[error("linear forms must be nonzero")]
    ZeroForm,
    #[error("a system needs at least one form")]
    EmptySystem,
    #[error("form {index} has dimension {found}, expected {expected}")]
    MixedDimensions {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("point has dimension {found}, the system expects {expected}")]
    PointDimension { expected: usize, found: usize },
    #[error("form evaluation overflows 64-bit integers")]
    EvaluationOverflow,
    #[error("degree parameter must be at least {min}, got {got}")]
    DegreeTooSmall { min: u32, got: u32 },
    #[error("complexity search needs at least two forms")]
    TooFewForms,
    #[error(
        "complexity search supports at most {MAX_COMPLEXITY_FORMS} forms, got {got} \
         (the partition search is exponential in the form count)"
    )]
    TooManyForms { got: usize },
    #[error("forms {first} and {second} are proportional; no finite partition complexity exists")]
    ProportionalForms { first: usize, second: usize },
    #[error("search bound must be at least 1")]
    SearchBoundTooSmall,
    #[error("no witness point with all forms nonzero has max-norm at most {bound}")]
    NoWitness { bound: i64 },
    #[error("form {index} vanishes at the witness point")]
    ZeroWitnessValue { index: usize },
    #[error("rescaling coefficients overflow 64-bit integers; pick a smaller witness")]
    RescaleOverflow,
}

/// An integer linear form `ψ: Z^D → Z`, stored by its coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct LinearForm {
    coeffs: Vec<i64>,
}

impl LinearForm {
    /// A form from its coefficients; must be nonzero and nonempty.
    pub fn new(coeffs: Vec<i64>) -> Result<Self, SystemError> {
        if coeffs.is_empty() {
            return Err(SystemError::EmptyForm);
        }
        if coeffs.iter().all(|&c| c == 0) {
            return Err(SystemError::ZeroForm);
        }
        Ok(Self { coeffs })
    }

    pub fn dimension(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// The dot product of the coefficients with `point`.
    pub fn evaluate(&self, point: &[i64]) -> Result<i64, SystemError> {
        if point.len() != self.coeffs.len() {
            return Err(SystemError::PointDimension {
                expected: self.coeffs.len(),
                found: point.len(),
            });
        }
        let acc: i128 = self
            .coeffs
            .iter()
            .zip(point)
            .map(|(&c, &x)| c as i128 * x as i128)
            .sum();
        i64::try_from(acc).map_err(|_| SystemError::EvaluationOverflow)
    }

    /// The form `a·ψ`; `a` must be nonzero.
    pub fn scaled(&self, a: i64) -> Result<Self, SystemError> {
        if a == 0 {
            return Err(SystemError::ZeroForm);
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| c.checked_mul(a).ok_or(SystemError::RescaleOverflow))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { coeffs })
    }

    /// Whether the two forms span the same line (`c_i d_j = c_j d_i` for all
    /// pairs), decided exactly.
    pub fn is_proportional_to(&self, other: &Self) -> bool {
        if self.coeffs.len() != other.coeffs.len() {
            return false;
        }
        let n = self.coeffs.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let lhs = self.coeffs[i] as i128 * other.coeffs[j] as i128;
                let rhs = self.coeffs[j] as i128 * other.coeffs[i] as i128;
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }

    fn coeff_row(&self) -> Vec<BigInt> {
        self.coeffs.iter().map(|&c| BigInt::from(c)).collect()
    }
}

impl TryFrom<Vec<i64>> for LinearForm {
    type Error = SystemError;
    fn try_from(coeffs: Vec<i64>) -> Result<Self, Self::Error> {
        LinearForm::new(coeffs)
    }
}

impl From<LinearForm> for Vec<i64> {
    fn from(form: LinearForm) -> Self {
        form.coeffs
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 4] = ["x", "y", "z", "w"];
        let mut first = true;
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let var = if self.coeffs.len() <= NAMES.len() {
                NAMES[j].to_string()
            } else {
                format!("x{}", j + 1)
            };
            if first {
                match c {
                    1 => write!(out, "{var}")?,
                    -1 => write!(out, "-{var}")?,
                    _ => write!(out, "{c}{var}")?,
                }
                first = false;
            } else {
                let sign = if c > 0 { '+' } else { '-' };
                match c.abs() {
                    1 => write!(out, " {sign} {var}")?,
                    m => write!(out, " {sign} {m}{var}")?,
                }
            }
        }
        if first {
            write!(out, "0")?;
        }
        Ok(())
    }
}

/// Serialized shape of a [`LinearSystem`]: `{"D": int, "forms": [[int,...]]}`.
#[derive(Serialize, Deserialize)]
struct SystemSpec {
    #[serde(rename = "D")]
    dimension: usize,
    forms: Vec<Vec<i64>>,
}

/// An ordered family `Ψ = (ψ_1, …, ψ_t)` of nonzero linear forms sharing one
/// ambient dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SystemSpec", into = "SystemSpec")]
pub struct LinearSystem {
    forms: Vec<LinearForm>,
    dimension: usize,
}

impl TryFrom<SystemSpec> for LinearSystem {
    type Error = SystemError;
    fn try_from(spec: SystemSpec) -> Result<Self, Self::Error> {
        let forms = spec
            .forms
            .into_iter()
            .map(LinearForm::new)
            .collect::<Result<Vec<_>, _>>()?;
        let system = LinearSystem::new(forms)?;
        if system.dimension != spec.dimension {
            return Err(SystemError::MixedDimensions {
                index: 0,
                expected: spec.dimension,
                found: system.dimension,
            });
        }
        Ok(system)
    }
}

impl From<LinearSystem> for SystemSpec {
    fn from(system: LinearSystem) -> Self {
        SystemSpec {
            dimension: system.dimension,
            forms: system.forms.into_iter().map(Vec::from).collect(),
        }
    }
}

impl fmt::Display for LinearSystem {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "(")?;
        for (i, form) in self.forms.iter().enumerate() {
            if i > 0 {
                write!(out, ", ")?;
            }
            write!(out, "{form}")?;
        }
        write!(out, ")")
    }
}

impl LinearSystem {
    pub fn new(forms: Vec<LinearForm>) -> Result<Self, SystemError> {
        let Some(first) = forms.first() else {
            return Err(SystemError::EmptySystem);
        };
        let dimension = first.dimension();
        for (index, form) in forms.iter().enumerate() {
            if form.dimension() != dimension {
                return Err(SystemError::MixedDimensions {
                    index,
                    expected: dimension,
                    found: form.dimension(),
                });
            }
        }
        Ok(Self { forms, dimension })
    }

    /// Convenience constructor from raw coefficient rows.
    pub fn from_rows(rows: &[&[i64]]) -> Result<Self, SystemError> {
        LinearSystem::new(
            rows.iter()
                .map(|r| LinearForm::new(r.to_vec()))
                .collect::<Result<Vec<_>, _>>()?,
        )
    }

    /// The `k`-term arithmetic-progression system
    /// `(x, x+y, …, x+(k-1)y)` in two variables.
    pub fn arithmetic_progression(k: u32) -> Result<Self, SystemError> {
        if k < 1 {
            return Err(SystemError::EmptySystem);
        }
        LinearSystem::new(
            (0..k)
                .map(|i| LinearForm::new(vec![1, i as i64]))
                .collect::<Result<Vec<_>, _>>()?,
        )
    }

    /// Number of forms `t`.
    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the constructor rejects empty systems
    }

    /// Ambient dimension `D`.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn forms(&self) -> &[LinearForm] {
        &self.forms
    }

    pub fn form(&self, i: usize) -> &LinearForm {
        &self.forms[i]
    }

    /// Evaluates every form at `point`.
    pub fn evaluate(&self, point: &[i64]) -> Result<Vec<i64>, SystemError> {
        if point.len() != self.dimension {
            return Err(SystemError::PointDimension {
                expected: self.dimension,
                found: point.len(),
            });
        }
        self.forms.iter().map(|f| f.evaluate(point)).collect()
    }

    /// The span of `(ψ_1(x)^k, …, ψ_t(x)^k)` over all `x ∈ Z^D`.
    ///
    /// Each `ψ_i^k` is expanded in the degree-`k` monomial basis (multinomial
    /// theorem) into a `t × M` exact integer matrix, `M = C(D+k-1, k)`; the
    /// span equals the column space of that matrix because distinct monomials
    /// are linearly independent as functions on `Z^D`.
    pub fn power_span(&self, k: u32) -> Result<PowerSpan, SystemError> {
        if k < 1 {
            return Err(SystemError::DegreeTooSmall { min: 1, got: k });
        }
        let t = self.forms.len();
        let exponents = monomial_exponents(self.dimension, k);
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(exponents.len());
        for alpha in &exponents {
            let scale = multinomial(k, alpha);
            let row: Vec<BigInt> = self
                .forms
                .iter()
                .map(|form| {
                    let mut entry = scale.clone();
                    for (&c, &e) in form.coeffs.iter().zip(alpha) {
                        if e > 0 {
                            entry *= BigInt::from(c).pow(e);
                        }
                    }
                    entry
                })
                .collect();
            rows.push(row);
        }
        Ok(PowerSpan {
            degree: k,
            monomial_count: exponents.len(),
            basis: IntBasis::from_rows(&rows, t),
        })
    }

    /// Checks `Ψ^[k] ⊆ Ψ^[l]` for every pair `1 ≤ k < l ≤ kmax`, exactly.
    pub fn is_flag(&self, kmax: u32) -> Result<FlagReport, SystemError> {
        if kmax < 2 {
            return Err(SystemError::DegreeTooSmall { min: 2, got: kmax });
        }
        let spans = (1..=kmax)
            .map(|k| self.power_span(k))
            .collect::<Result<Vec<_>, _>>()?;
        let mut entries = Vec::new();
        let mut first_violation = None;
        for k in 1..=kmax {
            for l in (k + 1)..=kmax {
                let contained = spans[(l - 1) as usize]
                    .basis
                    .contains_span(&spans[(k - 1) as usize].basis);
                if !contained && first_violation.is_none() {
                    first_violation = Some((k, l));
                }
                entries.push(ContainmentEntry {
                    low: k,
                    high: l,
                    contained,
                });
            }
        }
        Ok(FlagReport {
            kmax,
            is_flag_up_to_kmax: first_violation.is_none(),
            first_violation,
            span_dims: spans.iter().map(|s| s.dim()).collect(),
            entries,
        })
    }

    /// The least `s ≥ 1` such that `ψ_1^{s+1}, …, ψ_t^{s+1}` are linearly
    /// independent (`dim Ψ^[s+1] = t`), or `None` if no `s ≤ smax` qualifies.
    pub fn independence_degree(&self, smax: u32) -> Result<Option<u32>, SystemError> {
        if smax < 1 {
            return Err(SystemError::DegreeTooSmall { min: 1, got: smax });
        }
        for s in 1..=smax {
            if self.power_span(s + 1)?.dim() == self.forms.len() {
                return Ok(Some(s));
            }
        }
        Ok(None)
    }

    /// The least `s` such that for every index `i` the remaining forms can be
    /// partitioned into at most `s + 1` classes whose spans each omit `ψ_i`.
    ///
    /// A class is admissible iff `ψ_i` is outside its rational span;
    /// admissible classes are downward-closed, so the minimal class count is
    /// found by dynamic programming over subsets.
    pub fn cs_complexity(&self) -> Result<u32, SystemError> {
        let t = self.forms.len();
        if t < 2 {
            return Err(SystemError::TooFewForms);
        }
        if t > MAX_COMPLEXITY_FORMS {
            return Err(SystemError::TooManyForms { got: t });
        }
        for i in 0..t {
            for j in (i + 1)..t {
                if self.forms[i].is_proportional_to(&self.forms[j]) {
                    return Err(SystemError::ProportionalForms { first: i, second: j });
                }
            }
        }

        let rows: Vec<Vec<BigInt>> = self.forms.iter().map(|f| f.coeff_row()).collect();
        let mut worst = 0u32;
        for i in 0..t {
            let others: Vec<usize> = (0..t).filter(|&j| j != i).collect();
            let m = others.len();
            let full: usize = (1 << m) - 1;

            // admissible[mask] = ψ_i ∉ span{ψ_j : j ∈ mask}; the empty class
            // is not admissible (partition classes are nonempty).
            let mut admissible = vec![false; full + 1];
            for (mask, slot) in admissible.iter_mut().enumerate().skip(1) {
                let class: Vec<Vec<BigInt>> = others
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, &j)| rows[j].clone())
                    .collect();
                *slot = !IntBasis::from_rows(&class, self.dimension).contains(&rows[i]);
            }

            // dp[mask] = minimal number of admissible classes covering mask;
            // each step peels the class containing mask's lowest element.
            let mut dp = vec![u32::MAX; full + 1];
            dp[0] = 0;
            for mask in 1..=full {
                let low = mask & mask.wrapping_neg();
                let mut sub = mask;
                while sub > 0 {
                    if sub & low != 0 && admissible[sub] && dp[mask ^ sub] != u32::MAX {
                        dp[mask] = dp[mask].min(1 + dp[mask ^ sub]);
                    }
                    sub = (sub - 1) & mask;
                }
            }
            // Pairwise non-proportional forms make every singleton class
            // admissible, so a full partition always exists.
            debug_assert_ne!(dp[full], u32::MAX);
            worst = worst.max(dp[full] - 1);
        }
        Ok(worst)
    }

    /// Whether `(1, …, 1)` lies in `Ψ^[1]`, decided exactly.
    pub fn is_translation_invariant(&self) -> bool {
        let span = self
            .power_span(1)
            .expect("degree 1 is always a valid power span");
        let ones = vec![BigInt::one(); self.forms.len()];
        span.basis.contains(&ones)
    }

    /// Default degree bound for flag checks:
    /// `max(independence_degree + 1, 2t)`, and at least 2.
    pub fn default_flag_degree(&self) -> u32 {
        let t = self.forms.len() as u32;
        let smax = (2 * t).max(2);
        let s = self.independence_degree(smax).ok().flatten();
        match s {
            Some(s) => (s + 1).max(2 * t),
            None => 2 * t,
        }
        .max(2)
    }

    /// Finds a witness `x₀` with `‖x₀‖_∞ ≤ search_bound` and `ψ_i(x₀) ≠ 0`
    /// for all `i` — enumerated in increasing `‖·‖_∞` shells, lexicographic
    /// within a shell — and rescales the system by `a_i = ∏_{j≠i} ψ_j(x₀)`
    /// (gcd-reduced) so that the result is translation invariant.
    ///
    /// A witness always exists once `search_bound ≥ t·max|coeff|` (the shell
    /// then cannot be covered by the `t` kernel hyperplanes), so `NoWitness`
    /// signals the bound was too small.
    pub fn flagify(&self, search_bound: i64) -> Result<Flagification, SystemError> {
        if search_bound < 1 {
            return Err(SystemError::SearchBoundTooSmall);
        }
        let mut point = vec![0i64; self.dimension];
        for radius in 1..=search_bound {
            if let Some(flag) = self.search_shell(radius, 0, &mut point)? {
                return Ok(flag);
            }
        }
        Err(SystemError::NoWitness {
            bound: search_bound,
        })
    }

    /// Lexicographic scan of the `‖·‖_∞ = radius` shell.
    fn search_shell(
        &self,
        radius: i64,
        coord: usize,
        point: &mut Vec<i64>,
    ) -> Result<Option<Flagification>, SystemError> {
        if coord == self.dimension {
            if point.iter().all(|&c| c.abs() < radius) {
                return Ok(None); // interior of the cube, not on the shell
            }
            return match Flagification::from_witness(self, point) {
                Ok(flag) => Ok(Some(flag)),
                Err(SystemError::ZeroWitnessValue { .. }) => Ok(None),
                Err(other) => Err(other),
            };
        }
        for value in -radius..=radius {
            point[coord] = value;
            if let Some(found) = self.search_shell(radius, coord + 1, point)? {
                return Ok(Some(found));
            }
        }
        Ok(None)
    }
}

/// Exact basis of the span `Ψ^[k]` of `k`-th powers, a subspace of `Q^t`.
#[derive(Debug, Clone)]
pub struct PowerSpan {
    degree: u32,
    monomial_count: usize,
    basis: IntBasis,
}

impl PowerSpan {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Dimension of the span (`0 ≤ dim ≤ t`).
    pub fn dim(&self) -> usize {
        self.basis.rank()
    }

    /// Number of degree-`k` monomials, `C(D+k-1, k)`.
    pub fn monomial_count(&self) -> usize {
        self.monomial_count
    }

    /// Canonical basis vectors in `Q^t` (integer representatives of the
    /// reduced rational basis; linearly independent by construction).
    pub fn basis_vectors(&self) -> Vec<Vec<BigRational>> {
        self.basis
            .rows()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| BigRational::from_integer(v.clone()))
                    .collect()
            })
            .collect()
    }

    /// Exact membership of an integer vector in the span.
    pub fn contains_vector(&self, v: &[BigInt]) -> bool {
        self.basis.contains(v)
    }

    /// Exact containment `other ⊆ self` of spans.
    pub fn contains_span(&self, other: &PowerSpan) -> bool {
        self.basis.contains_span(&other.basis)
    }
}

/// One `(k, l)` containment answer of a flag check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainmentEntry {
    pub low: u32,
    pub high: u32,
    pub contained: bool,
}

/// Result of checking `Ψ^[k] ⊆ Ψ^[l]` for all `1 ≤ k < l ≤ kmax`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagReport {
    pub kmax: u32,
    /// Entries in lexicographic `(k, l)` order.
    pub entries: Vec<ContainmentEntry>,
    pub is_flag_up_to_kmax: bool,
    /// Lexicographically first failing pair, if any.
    pub first_violation: Option<(u32, u32)>,
    /// `dim Ψ^[k]` for `k = 1..=kmax`.
    pub span_dims: Vec<usize>,
}

impl FlagReport {
    pub fn contained(&self, k: u32, l: u32) -> Option<bool> {
        self.entries
            .iter()
            .find(|e| e.low == k && e.high == l)
            .map(|e| e.contained)
    }
}

/// A witness-based rescaling `ψ_i ↦ a_i ψ_i` making the system translation
/// invariant: `b_i = ψ_i(x₀)` are all nonzero and `a_i b_i` is constant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flagification {
    pub witness_point: Vec<i64>,
    /// `b_i = ψ_i(witness)`, all nonzero.
    pub b: Vec<i64>,
    /// `a_i = ∏_{j≠i} b_j`, divided by the gcd of the `|a_i|`.
    pub a: Vec<i64>,
    /// The common value `a_i b_i` (a nonzero multiple of `(1,…,1)` in the
    /// rescaled system's image).
    pub product: i64,
    pub rescaled: LinearSystem,
}

impl Flagification {
    /// Builds the rescaling from an explicit witness point; every form must
    /// be nonzero there.
    pub fn from_witness(system: &LinearSystem, witness: &[i64]) -> Result<Self, SystemError> {
        let b = system.evaluate(witness)?;
        if let Some(index) = b.iter().position(|&v| v == 0) {
            return Err(SystemError::ZeroWitnessValue { index });
        }
        let t = b.len();
        let big_b: Vec<BigInt> = b.iter().map(|&v| BigInt::from(v)).collect();
        let raw: Vec<BigInt> = (0..t)
            .map(|i| {
                let mut p = BigInt::one();
                for (j, v) in big_b.iter().enumerate() {
                    if j != i {
                        p *= v;
                    }
                }
                p
            })
            .collect();
        let mut divisor = BigInt::zero();
        for v in &raw {
            divisor = divisor.gcd(v);
        }
        debug_assert!(divisor.is_positive());
        let a: Vec<i64> = raw
            .iter()
            .map(|v| i64::try_from(v / &divisor).map_err(|_| SystemError::RescaleOverflow))
            .collect::<Result<Vec<_>, _>>()?;
        let rescaled = LinearSystem::new(
            system
                .forms()
                .iter()
                .zip(&a)
                .map(|(form, &ai)| form.scaled(ai))
                .collect::<Result<Vec<_>, _>>()?,
        )?;
        let product = a[0]
            .checked_mul(b[0])
            .ok_or(SystemError::RescaleOverflow)?;
        debug_assert!(a
            .iter()
            .zip(&b)
            .all(|(&ai, &bi)| ai as i128 * bi as i128 == product as i128));
        Ok(Flagification {
            witness_point: witness.to_vec(),
            b,
            a,
            product,
            rescaled,
        })
    }

    /// Largest rescaling magnitude `a = max_i |a_i|`.
    pub fn scale_bound(&self) -> i64 {
        self.a.iter().map(|v| v.abs()).max().unwrap_or(1)
    }
}

/// All exponent vectors `α ∈ N^D` with `Σ α_j = k`, lexicographically.
fn monomial_exponents(dimension: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(dim_left: usize, degree_left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if dim_left == 1 {
            prefix.push(degree_left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=degree_left).rev() {
            prefix.push(e);
            rec(dim_left - 1, degree_left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dimension, degree, &mut Vec::new(), &mut out);
    out
}

/// `k! / (α_1! ⋯ α_D!)` as a product of binomials.
fn multinomial(k: u32, alpha: &[u32]) -> BigInt {
    let mut remaining = u64::from(k);
    let mut result = BigInt::one();
    for &e in alpha {
        result *= num_integer::binomial(BigInt::from(remaining), BigInt::from(u64::from(e)));
        remaining -= u64::from(e);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(rows: &[&[i64]]) -> LinearSystem {
        LinearSystem::from_rows(rows).unwrap()
    }

    fn big(values: &[i64]) -> Vec<BigInt> {
        values.iter().map(|&v| BigInt::from(v)).collect()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(
            LinearForm::new(vec![1, 2]).unwrap().evaluate(&[3, 4]),
            Ok(11)
        );
        assert_eq!(LinearForm::new(vec![-1]).unwrap().evaluate(&[5]), Ok(-5));
        assert_eq!(
            LinearForm::new(vec![1, -2]).unwrap().evaluate(&[2, 1]),
            Ok(0)
        );
        assert_eq!(
            LinearForm::new(vec![1, 2]).unwrap().evaluate(&[3]),
            Err(SystemError::PointDimension {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn constructors_reject_degenerate_forms() {
        assert_eq!(LinearForm::new(vec![]), Err(SystemError::EmptyForm));
        assert_eq!(LinearForm::new(vec![0, 0]), Err(SystemError::ZeroForm));
        assert_eq!(LinearSystem::new(vec![]), Err(SystemError::EmptySystem));
        let mixed = LinearSystem::new(vec![
            LinearForm::new(vec![1, 0]).unwrap(),
            LinearForm::new(vec![1]).unwrap(),
        ]);
        assert!(matches!(mixed, Err(SystemError::MixedDimensions { .. })));
    }

    #[test]
    fn power_span_of_three_term_progression() {
        let psi = system(&[&[1, 0], &[0, 1], &[1, 1]]);
        let k1 = psi.power_span(1).unwrap();
        assert_eq!(k1.dim(), 2);
        // Canonical basis of span{(1,0,1),(0,1,1)}.
        assert!(k1.contains_vector(&big(&[1, 0, 1])));
        assert!(k1.contains_vector(&big(&[0, 1, 1])));
        assert!(!k1.contains_vector(&big(&[1, 1, 1])));
        let k2 = psi.power_span(2).unwrap();
        assert_eq!(k2.dim(), 3);
        assert_eq!(k2.monomial_count(), 3);
    }

    #[test]
    fn power_span_single_form_is_a_line() {
        let psi = system(&[&[1]]);
        for k in 1..=5 {
            assert_eq!(psi.power_span(k).unwrap().dim(), 1);
        }
        assert!(matches!(
            psi.power_span(0),
            Err(SystemError::DegreeTooSmall { .. })
        ));
    }

    #[test]
    fn ap_systems_are_flags_up_to_degree_six() {
        for k in [3u32, 4, 5] {
            let psi = LinearSystem::arithmetic_progression(k).unwrap();
            let report = psi.is_flag(6).unwrap();
            assert!(report.is_flag_up_to_kmax, "AP({k}) must be a flag");
            assert_eq!(report.first_violation, None);
            assert_eq!(report.entries.len(), 15);
        }
    }

    #[test]
    fn known_non_flag_system_violates_at_one_two() {
        let psi = system(&[&[1, 0], &[0, 1], &[1, 1], &[1, -1]]);
        for kmax in [2u32, 3, 4, 6] {
            let report = psi.is_flag(kmax).unwrap();
            assert!(!report.is_flag_up_to_kmax);
            assert_eq!(report.first_violation, Some((1, 2)));
            assert_eq!(report.contained(1, 2), Some(false));
        }
        // The violation heals at higher degree: squares span a 3-dim space
        // while cubes already span everything.
        let report = psi.is_flag(3).unwrap();
        assert_eq!(report.contained(1, 3), Some(true));
        assert_eq!(report.contained(2, 3), Some(true));
        assert_eq!(report.span_dims, vec![2, 3, 4]);
    }

    #[test]
    fn independence_degree_of_progressions() {
        for k in [3u32, 4, 5] {
            let psi = LinearSystem::arithmetic_progression(k).unwrap();
            assert_eq!(psi.independence_degree(8).unwrap(), Some(k - 2));
        }
        let three = system(&[&[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(three.independence_degree(8).unwrap(), Some(1));
        let twin = system(&[&[1], &[1]]);
        assert_eq!(twin.independence_degree(10).unwrap(), None);
        let non_flag = system(&[&[1, 0], &[0, 1], &[1, 1], &[1, -1]]);
        assert_eq!(non_flag.independence_degree(8).unwrap(), Some(2));
    }

    #[test]
    fn cs_complexity_examples() {
        assert_eq!(
            LinearSystem::arithmetic_progression(3)
                .unwrap()
                .cs_complexity()
                .unwrap(),
            1
        );
        assert_eq!(
            LinearSystem::arithmetic_progression(4)
                .unwrap()
                .cs_complexity()
                .unwrap(),
            2
        );
        assert_eq!(system(&[&[1, 0], &[0, 1]]).cs_complexity().unwrap(), 0);
        assert_eq!(
            system(&[&[1], &[2]]).cs_complexity(),
            Err(SystemError::ProportionalForms {
                first: 0,
                second: 1
            })
        );
        let too_many = LinearSystem::new(
            (0..13)
                .map(|i| LinearForm::new(vec![1, i]).unwrap())
                .collect(),
        )
        .unwrap();
        assert_eq!(
            too_many.cs_complexity(),
            Err(SystemError::TooManyForms { got: 13 })
        );
    }

    #[test]
    fn translation_invariance_examples() {
        assert!(LinearSystem::arithmetic_progression(4)
            .unwrap()
            .is_translation_invariant());
        assert!(!system(&[&[1], &[-1]]).is_translation_invariant());
        // Invariance is rational: (2x, 2x) contains (2,2), a multiple of ones.
        assert!(system(&[&[2], &[2]]).is_translation_invariant());
    }

    #[test]
    fn flagify_search_takes_first_shell_witness() {
        // (x, y, x-y): the first all-nonzero point in shell order is (-1, 1).
        let psi = system(&[&[1, 0], &[0, 1], &[1, -1]]);
        let flag = psi.flagify(8).unwrap();
        assert_eq!(flag.witness_point, vec![-1, 1]);
        assert_eq!(flag.b, vec![-1, 1, -2]);
        assert_eq!(flag.a, vec![-2, 2, -1]);
        assert_eq!(flag.product, 2);
        assert!(flag.rescaled.is_translation_invariant());
    }

    #[test]
    fn flagification_from_spec_witnesses() {
        // (x, y, x-y) at x₀ = (1,2): b = (1,2,-1), a = (-2,-1,2).
        let psi = system(&[&[1, 0], &[0, 1], &[1, -1]]);
        let flag = Flagification::from_witness(&psi, &[1, 2]).unwrap();
        assert_eq!(flag.b, vec![1, 2, -1]);
        assert_eq!(flag.a, vec![-2, -1, 2]);
        assert_eq!(flag.product, -2);
        assert!(flag.rescaled.is_translation_invariant());

        // (x, -x) at x₀ = 1: b = (1,-1), a = (-1,1), rescaled (-x, -x).
        let pair = system(&[&[1], &[-1]]);
        let flag = Flagification::from_witness(&pair, &[1]).unwrap();
        assert_eq!(flag.b, vec![1, -1]);
        assert_eq!(flag.a, vec![-1, 1]);
        assert_eq!(
            flag.rescaled,
            LinearSystem::from_rows(&[&[-1], &[-1]]).unwrap()
        );

        // A witness mapping to (1,…,1) rescales by all-ones.
        let ap = LinearSystem::arithmetic_progression(4).unwrap();
        let flag = Flagification::from_witness(&ap, &[1, 0]).unwrap();
        assert_eq!(flag.b, vec![1, 1, 1, 1]);
        assert_eq!(flag.a, vec![1, 1, 1, 1]);
        assert_eq!(flag.rescaled, ap);
    }

    #[test]
    fn flagify_search_skips_zero_witnesses() {
        let pair = system(&[&[1], &[-1]]);
        let flag = pair.flagify(4).unwrap();
        assert_eq!(flag.witness_point, vec![-1]);
        assert_eq!(flag.b, vec![-1, 1]);
        assert_eq!(flag.a, vec![1, -1]);
        assert_eq!(
            flag.rescaled,
            LinearSystem::from_rows(&[&[1], &[1]]).unwrap()
        );
        assert!(matches!(
            pair.flagify(0),
            Err(SystemError::SearchBoundTooSmall)
        ));
    }

    #[test]
    fn default_flag_degree_covers_independence() {
        let ap = LinearSystem::arithmetic_progression(4).unwrap();
        assert_eq!(ap.default_flag_degree(), 8); // max(2+1, 2*4)
        let twin = system(&[&[1], &[1]]);
        assert_eq!(twin.default_flag_degree(), 4);
    }

    #[test]
    fn serde_round_trip_uses_capital_d() {
        let psi = LinearSystem::arithmetic_progression(3).unwrap();
        let json = serde_json::to_string(&psi).unwrap();
        assert!(json.contains("\"D\":2"), "got {json}");
        let back: LinearSystem = serde_json::from_str(&json).unwrap();
        assert_eq!(back, psi);
        let parsed: LinearSystem =
            serde_json::from_str(r#"{"D": 2, "forms": [[1,0],[1,1],[1,2]]}"#).unwrap();
        assert_eq!(parsed, psi);
        assert!(serde_json::from_str::<LinearSystem>(r#"{"D": 2, "forms": [[0,0]]}"#).is_err());
        assert!(serde_json::from_str::<LinearSystem>(r#"{"D": 1, "forms": [[1,0]]}"#).is_err());
    }

    #[test]
    fn display_is_readable() {
        let psi = system(&[&[1, 0], &[1, 1], &[1, -2]]);
        assert_eq!(psi.to_string(), "(x, x + y, x - 2y)");
        let neg = LinearForm::new(vec![-1, 0, 3]).unwrap();
        assert_eq!(neg.to_string(), "-x + 3z");
    }

    #[test]
    fn monomials_and_multinomials() {
        assert_eq!(monomial_exponents(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(monomial_exponents(1, 5), vec![vec![5]]);
        assert_eq!(monomial_exponents(3, 2).len(), 6);
        assert_eq!(multinomial(4, &[2, 2]), BigInt::from(6));
        assert_eq!(multinomial(3, &[1, 1, 1]), BigInt::from(6));
        assert_eq!(multinomial(5, &[5]), BigInt::one());
    }
}
