//! Scalar helpers shared across the crate: the unit exponential `e(x)`,
//! deterministic cascade summation, and tolerance predicates.
//!
//! Floating-point sums in this crate must be reproducible run-to-run and
//! independent of how work is distributed across threads.  Every bulk sum is
//! therefore expressed as a sequence of terms in a fixed order and reduced
//! with [`CascadeSum`] (pairwise summation driven by a binary counter), or as
//! ordered per-chunk partial sums combined with [`cascade_combine`].

pub use num_complex::Complex64;

/// Default relative tolerance for floating-point sums and norms.
///
/// Interpreted via [`close`]: absolute below magnitude one, relative above.
pub const SUM_TOL: f64 = 1e-9;

/// Tolerance for identities that are exact up to rounding (for example two
/// evaluations of the same sum through different bookkeeping).
pub const EXACT_TOL: f64 = 1e-12;

/// `e(x) = exp(2*pi*i*x)`, the standard unit-modulus exponential.
pub fn e(x: f64) -> Complex64 {
    let (sin, cos) = (std::f64::consts::TAU * x).sin_cos();
    Complex64::new(cos, sin)
}

/// `|a - b| <= tol * max(1, |a|, |b|)`: relative comparison for values of
/// magnitude at least one, absolute below.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (a.abs().max(b.abs())).max(1.0)
}

/// Complex counterpart of [`close`].
pub fn close_c(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (a.norm().max(b.norm())).max(1.0)
}

/// Number of consecutive terms summed sequentially before the running chunk
/// is carried into the pairwise cascade.
const CASCADE_CHUNK: usize = 64;

/// Deterministic pairwise (cascade) summation.
///
/// Terms are accumulated sequentially in chunks of [`CASCADE_CHUNK`]; full
/// chunks are merged pairwise through a binary counter of partial sums.  The
/// result depends only on the sequence of pushed terms, so any two runs that
/// push the same terms in the same order produce bit-identical results.  The
/// pairwise tree also keeps rounding error logarithmic in the term count
/// rather than linear.
#[derive(Debug, Clone, Default)]
pub struct CascadeSum {
    levels: Vec<Option<Complex64>>,
    chunk: Complex64,
    chunk_len: usize,
}

impl CascadeSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, term: Complex64) {
        self.chunk += term;
        self.chunk_len += 1;
        if self.chunk_len == CASCADE_CHUNK {
            let full = self.chunk;
            self.chunk = Complex64::new(0.0, 0.0);
            self.chunk_len = 0;
            self.carry(full);
        }
    }

    fn carry(&mut self, mut value: Complex64) {
        for slot in self.levels.iter_mut() {
            match slot.take() {
                None => {
                    *slot = Some(value);
                    return;
                }
                Some(prev) => value = prev + value,
            }
        }
        self.levels.push(Some(value));
    }

    /// Folds the remaining partial sums, lowest level first.
    pub fn finish(self) -> Complex64 {
        let mut acc = self.chunk;
        for level in self.levels {
            if let Some(v) = level {
                acc = v + acc;
            }
        }
        acc
    }
}

/// Sums an ordered slice of partial sums with a fixed pairwise tree
/// (split-in-half recursion).  Used to merge per-chunk partials produced in
/// parallel; the tree shape depends only on `parts.len()`.
pub fn cascade_combine(parts: &[Complex64]) -> Complex64 {
    match parts.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => parts[0],
        n => {
            let (lo, hi) = parts.split_at(n / 2);
            cascade_combine(lo) + cascade_combine(hi)
        }
    }
}

/// Number of consecutive indices evaluated per parallel chunk in
/// [`parallel_cascade_sum`].  Fixed so that chunk boundaries (and hence the
/// floating-point result) do not depend on the thread count.
pub const PARALLEL_CHUNK: usize = 4096;

/// Deterministic parallel sum of `term(0) + ... + term(count - 1)`.
///
/// Indices are split into fixed chunks of [`PARALLEL_CHUNK`]; each chunk is
/// summed sequentially with [`CascadeSum`], chunk sums are combined in index
/// order with [`cascade_combine`].  The result is a pure function of the term
/// sequence, independent of how rayon schedules the chunks.
pub fn parallel_cascade_sum<F>(count: usize, term: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    use rayon::prelude::*;
    let chunks: Vec<Complex64> = (0..count.div_ceil(PARALLEL_CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * PARALLEL_CHUNK;
            let hi = ((c + 1) * PARALLEL_CHUNK).min(count);
            let mut acc = CascadeSum::new();
            for i in lo..hi {
                acc.push(term(i));
            }
            acc.finish()
        })
        .collect();
    cascade_combine(&chunks)
}
