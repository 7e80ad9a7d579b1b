//! Exact linear algebra over the rationals, computed fraction-free on
//! arbitrary-precision integers.
//!
//! Span computations here back the power-span and complexity analysis of
//! linear-form systems, where floating point is not acceptable: containment
//! answers must be exact.  Vectors are integer rows; a rational subspace is
//! represented by its canonical integer basis ([`IntBasis`]): reduced row
//! echelon pivot structure, each row divided by the gcd of its entries with a
//! positive leading coefficient.  Two subspaces are equal iff their canonical
//! bases are identical.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Canonical basis of the rational row space of an integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntBasis {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    cols: usize,
}

/// Divides a row by the gcd of its entries and makes the leading nonzero
/// entry positive.  Zero rows are left untouched.
fn normalize_row(row: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for v in row.iter() {
        g = g.gcd(v);
    }
    if g.is_zero() {
        return;
    }
    if let Some(lead) = row.iter().find(|v| !v.is_zero()) {
        if lead.is_negative() {
            g = -g;
        }
    }
    for v in row.iter_mut() {
        *v /= &g;
    }
}

/// Replaces `target` with `pivot[pc] * target - target[pc] * pivot`, the
/// fraction-free elimination step that zeroes column `pc` of `target`.
fn eliminate(target: &mut [BigInt], pivot: &[BigInt], pc: usize) {
    if target[pc].is_zero() {
        return;
    }
    let a = pivot[pc].clone();
    let b = target[pc].clone();
    for (t, p) in target.iter_mut().zip(pivot.iter()) {
        *t = &a * &*t - &b * p;
    }
    normalize_row(target);
}

impl IntBasis {
    /// Computes the canonical basis of the row space of `rows`.
    ///
    /// All rows must share the same length `cols` (callers guarantee this; a
    /// mismatch is a programming error and panics).
    pub fn from_rows(rows: &[Vec<BigInt>], cols: usize) -> Self {
        let mut work: Vec<Vec<BigInt>> = Vec::new();
        for row in rows {
            assert_eq!(row.len(), cols, "row length must match column count");
            let mut r = row.clone();
            normalize_row(&mut r);
            work.push(r);
        }

        // Forward elimination with gcd normalization after every update: the
        // arithmetic never leaves the integers and entry growth stays tame.
        let mut echelon: Vec<Vec<BigInt>> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        for col in 0..cols {
            let Some(found) = work.iter().position(|r| !r[col].is_zero()) else {
                continue;
            };
            let pivot = work.swap_remove(found);
            for r in work.iter_mut() {
                eliminate(r, &pivot, col);
            }
            echelon.push(pivot);
            pivots.push(col);
            work.retain(|r| r.iter().any(|v| !v.is_zero()));
            if work.is_empty() {
                break;
            }
        }

        // Back-substitution: clear each pivot column above its pivot row,
        // yielding the unique gcd-reduced, leading-positive basis.
        for i in (0..echelon.len()).rev() {
            let pivot = echelon[i].clone();
            let pc = pivots[i];
            let (above, _) = echelon.split_at_mut(i);
            for r in above.iter_mut() {
                eliminate(r, &pivot, pc);
            }
        }

        IntBasis {
            rows: echelon,
            pivots,
            cols,
        }
    }

    /// Dimension of the spanned subspace.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Canonical basis rows (gcd-reduced, leading entry positive, reduced
    /// echelon pivot structure).
    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    /// Reduces `v` against the basis, returning the canonical residue:
    /// the zero vector iff `v` lies in the span.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        let mut r = v.to_vec();
        normalize_row(&mut r);
        for (row, &pc) in self.rows.iter().zip(self.pivots.iter()) {
            eliminate(&mut r, row, pc);
        }
        r
    }

    /// Exact rational-span membership.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Whether every row of `other` lies in this span, i.e. whether
    /// `span(other)` is a subspace of `span(self)`.
    pub fn contains_span(&self, other: &IntBasis) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }
}

/// Convenience: rank of a set of integer rows.
pub fn rank_of(rows: &[Vec<BigInt>], cols: usize) -> usize {
    IntBasis::from_rows(rows, cols).rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(m: &[&[i64]]) -> Vec<Vec<BigInt>> {
        m.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn rank_and_canonical_basis() {
        let b = IntBasis::from_rows(&rows(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 2]]), 3);
        assert_eq!(b.rank(), 2);
        assert_eq!(b.rows(), &rows(&[&[1, 0, 1], &[0, 1, 1]]));
    }

    #[test]
    fn canonical_basis_is_representation_independent() {
        let a = IntBasis::from_rows(&rows(&[&[2, 4, 6], &[1, 1, 1]]), 3);
        let b = IntBasis::from_rows(&rows(&[&[3, 5, 7], &[-1, -2, -3], &[4, 6, 8]]), 3);
        assert_eq!(a, b);
    }

    #[test]
    fn membership_is_rational_not_integral() {
        // (1,1) = ((2,0) + (0,2)) / 2 lies in the rational span.
        let b = IntBasis::from_rows(&rows(&[&[2, 0], &[0, 2]]), 2);
        assert!(b.contains(&rows(&[&[1, 1]])[0]));
        let line = IntBasis::from_rows(&rows(&[&[2, 4]]), 2);
        assert!(line.contains(&rows(&[&[1, 2]])[0]));
        assert!(line.contains(&rows(&[&[-3, -6]])[0]));
        assert!(!line.contains(&rows(&[&[1, 3]])[0]));
    }

    #[test]
    fn span_containment() {
        let plane = IntBasis::from_rows(&rows(&[&[1, 0, 0], &[0, 1, 0]]), 3);
        let line = IntBasis::from_rows(&rows(&[&[3, -2, 0]]), 3);
        let other = IntBasis::from_rows(&rows(&[&[0, 0, 5]]), 3);
        assert!(plane.contains_span(&line));
        assert!(!plane.contains_span(&other));
        assert!(!line.contains_span(&plane));
    }

    #[test]
    fn zero_and_empty_inputs() {
        let b = IntBasis::from_rows(&rows(&[&[0, 0, 0]]), 3);
        assert_eq!(b.rank(), 0);
        assert!(b.contains(&rows(&[&[0, 0, 0]])[0]));
        assert!(!b.contains(&rows(&[&[1, 0, 0]])[0]));
        let e = IntBasis::from_rows(&[], 2);
        assert_eq!(e.rank(), 0);
    }

    #[test]
    fn elimination_handles_large_entries_exactly() {
        // Rows engineered so naive f64 elimination would lose precision.
        let big = 1_000_000_007i64;
        let b = IntBasis::from_rows(
            &rows(&[&[big, 1, 0], &[big, 1, 1], &[0, 0, 1]]),
            3,
        );
        assert_eq!(b.rank(), 2);
        assert!(b.contains(&rows(&[&[big, 1, 7]])[0]));
        assert!(!b.contains(&rows(&[&[big, 2, 0]])[0]));
    }
}
