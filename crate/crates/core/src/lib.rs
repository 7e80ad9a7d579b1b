//! Exact linear-form systems, Gowers box norms, lattice regions, and
//! multilinear averages over the integers.
//!
//! The crate is organised around five subsystems:
//!
//! - [`linear_systems`]: integer linear forms, power spans with exact
//!   arithmetic, flag/containment analysis, complexity measures, and the
//!   rescaling ("flagification") of a system into a translation-invariant one.
//! - [`series`]: finitely supported complex-valued functions on the integers,
//!   seeded generators for test signals, dilation/embedding maps, and CSV/JSON
//!   persistence.
//! - [`gowers`]: parallelepiped sums and Gowers uniformity norms over
//!   intervals, progressions, explicit sets, and cyclic groups, with both a
//!   definition-faithful oracle and an FFT-accelerated path.
//! - [`regions`]: lattice regions cut out by box and half-space constraints,
//!   cube packings with dilated sub-cubes, and incidence counts of linear
//!   forms against packed cells.
//! - [`averages`]: multilinear averages of function tuples over regions, the
//!   rescaling pipeline that reduces a general system to a
//!   translation-invariant one, and von Neumann style norm-control reports.
//!
//! Everything that must be exact (form algebra, spans, counts, region
//! membership) is computed over arbitrary-precision integers; everything
//! floating-point (sums, norms) uses deterministic cascade summation so that
//! results are independent of thread count.

pub mod averages;
pub mod gowers;
pub mod linalg;
pub mod linear_systems;
pub mod numeric;
pub mod regions;
pub mod series;

pub use numeric::Complex64;
