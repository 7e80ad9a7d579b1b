//! Lattice-point geometry: polytope-cut regions of `[-N,N]^D`, grid packing
//! into dilated cubes, subprogression extraction from cells, and incidence
//! counting of a linear form's values across a packing.
//!
//! All membership decisions are exact integer arithmetic (`i128`
//! accumulators); the packing is a partition by construction and the tests
//! re-verify it point by point.

use crate::linear_systems::LinearForm;
use crate::series::Progression;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

/// Hard ceiling on enumerable region size (box point count).
pub const MAX_REGION_POINTS: f64 = 1e8;

#[derive(Debug, Error)]
pub enum RegionError {
    #[error("region dimension must be at least 1")]
    ZeroDimension,
    #[error("box radius must be at least 1, got {got}")]
    InvalidRadius { got: i64 },
    #[error("halfspace normal has {got} coordinates, region dimension is {expected}")]
    NormalDimension { expected: usize, got: usize },
    #[error("coset residue vector has {got} coordinates, region dimension is {expected}")]
    ResidueDimension { expected: usize, got: usize },
    #[error("coset modulus must be at least 1, got {got}")]
    InvalidModulus { got: i64 },
    #[error("box holds ~{points:.2e} lattice points, beyond the {budget:.0e} budget")]
    TooManyPoints { points: f64, budget: f64 },
    #[error("cube side would be {side}; need ε′·N ≥ 1 (got ε′·N = {eps_n})")]
    SideTooSmall { side: i64, eps_n: f64 },
    #[error("ε′ must lie in (0, 1], got {got}")]
    EpsilonOutOfRange { got: f64 },
    #[error("spacing q must be at least 1, got {got}")]
    InvalidSpacing { got: i64 },
    #[error("cube packing is not defined for regions with a coset constraint")]
    CosetUnsupported,
    #[error("point has {got} coordinates, region dimension is {expected}")]
    PointDimension { expected: usize, got: usize },
    #[error("form acts on {got} coordinates, partition dimension is {expected}")]
    FormDimension { expected: usize, got: usize },
}

/// One linear constraint `normal · x ≤ bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Halfspace {
    #[serde(rename = "g")]
    pub normal: Vec<i64>,
    #[serde(rename = "beta")]
    pub bound: i64,
}

impl Halfspace {
    pub fn new(normal: Vec<i64>, bound: i64) -> Self {
        Self { normal, bound }
    }

    fn admits(&self, point: &[i64]) -> bool {
        dot(&self.normal, point) <= self.bound as i128
    }
}

fn dot(coeffs: &[i64], point: &[i64]) -> i128 {
    coeffs
        .iter()
        .zip(point)
        .map(|(&c, &x)| c as i128 * x as i128)
        .sum()
}

/// Per-coordinate congruence `x_i ≡ r_i (mod q)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetConstraint {
    #[serde(rename = "q")]
    pub modulus: i64,
    #[serde(rename = "r")]
    pub residues: Vec<i64>,
}

impl CosetConstraint {
    fn admits(&self, point: &[i64]) -> bool {
        point
            .iter()
            .zip(&self.residues)
            .all(|(&x, &r)| (x - r).rem_euclid(self.modulus) == 0)
    }
}

/// A finite set of lattice points: the box `[-N,N]^D` cut by halfspaces and
/// optionally restricted to a coset of `(qZ)^D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RegionSpec", into = "RegionSpec")]
pub struct LatticeRegion {
    dimension: usize,
    radius: i64,
    halfspaces: Vec<Halfspace>,
    coset: Option<CosetConstraint>,
}

/// Wire format: `{D, N, halfspaces: [{g, beta}], coset: {q, r}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RegionSpec {
    #[serde(rename = "D")]
    dimension: usize,
    #[serde(rename = "N")]
    radius: i64,
    #[serde(default)]
    halfspaces: Vec<Halfspace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coset: Option<CosetConstraint>,
}

impl TryFrom<RegionSpec> for LatticeRegion {
    type Error = RegionError;
    fn try_from(spec: RegionSpec) -> Result<Self, RegionError> {
        let mut region = LatticeRegion::new(spec.dimension, spec.radius, spec.halfspaces)?;
        if let Some(coset) = spec.coset {
            region = region.with_coset(coset)?;
        }
        Ok(region)
    }
}

impl From<LatticeRegion> for RegionSpec {
    fn from(region: LatticeRegion) -> RegionSpec {
        RegionSpec {
            dimension: region.dimension,
            radius: region.radius,
            halfspaces: region.halfspaces,
            coset: region.coset,
        }
    }
}

impl LatticeRegion {
    pub fn new(
        dimension: usize,
        radius: i64,
        halfspaces: Vec<Halfspace>,
    ) -> Result<Self, RegionError> {
        if dimension == 0 {
            return Err(RegionError::ZeroDimension);
        }
        if radius < 1 {
            return Err(RegionError::InvalidRadius { got: radius });
        }
        let points = (2.0 * radius as f64 + 1.0).powi(dimension as i32);
        if points > MAX_REGION_POINTS {
            return Err(RegionError::TooManyPoints {
                points,
                budget: MAX_REGION_POINTS,
            });
        }
        for h in &halfspaces {
            if h.normal.len() != dimension {
                return Err(RegionError::NormalDimension {
                    expected: dimension,
                    got: h.normal.len(),
                });
            }
        }
        Ok(Self {
            dimension,
            radius,
            halfspaces,
            coset: None,
        })
    }

    /// The plain box `[-N,N]^D`.
    pub fn cube_box(dimension: usize, radius: i64) -> Result<Self, RegionError> {
        Self::new(dimension, radius, Vec::new())
    }

    pub fn with_coset(mut self, coset: CosetConstraint) -> Result<Self, RegionError> {
        if coset.modulus < 1 {
            return Err(RegionError::InvalidModulus { got: coset.modulus });
        }
        if coset.residues.len() != self.dimension {
            return Err(RegionError::ResidueDimension {
                expected: self.dimension,
                got: coset.residues.len(),
            });
        }
        self.coset = Some(coset);
        Ok(self)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// The box radius `N`.
    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn coset(&self) -> Option<&CosetConstraint> {
        self.coset.as_ref()
    }

    /// Number of linear constraints bounding the region (box faces plus
    /// explicit halfspaces) — an upper bound on the hull's face count,
    /// recorded but never capped.
    pub fn face_count(&self) -> usize {
        2 * self.dimension + self.halfspaces.len()
    }

    pub fn contains(&self, point: &[i64]) -> Result<bool, RegionError> {
        if point.len() != self.dimension {
            return Err(RegionError::PointDimension {
                expected: self.dimension,
                got: point.len(),
            });
        }
        Ok(self.admits(point))
    }

    fn admits(&self, point: &[i64]) -> bool {
        point.iter().all(|&x| x.abs() <= self.radius)
            && self.halfspaces.iter().all(|h| h.admits(point))
            && self.coset.as_ref().is_none_or(|c| c.admits(point))
    }

    /// All region points in lexicographic order, each exactly once.
    pub fn points(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        let radius = self.radius;
        BoxOdometer::new(self.dimension, radius).filter(|p| self.admits(p))
    }

    /// The region points whose first coordinate equals `x0`, in
    /// lexicographic order of the remaining coordinates.  Concatenating over
    /// ascending `x0` reproduces [`points`](Self::points); parallel
    /// consumers chunk by this.
    pub fn points_with_first(&self, x0: i64) -> impl Iterator<Item = Vec<i64>> + '_ {
        BoxOdometer::new(self.dimension - 1, self.radius)
            .map(move |rest| {
                let mut p = Vec::with_capacity(rest.len() + 1);
                p.push(x0);
                p.extend_from_slice(&rest);
                p
            })
            .filter(|p| self.admits(p))
    }

    /// Range of first coordinates (the chunking axis).
    pub fn first_axis(&self) -> std::ops::RangeInclusive<i64> {
        -self.radius..=self.radius
    }

    pub fn point_count(&self) -> u64 {
        self.points().count() as u64
    }

    pub fn is_region_empty(&self) -> bool {
        self.points().next().is_none()
    }
}

/// Lexicographic odometer over `[-radius, radius]^dimension`; dimension 0
/// yields the single empty point.
struct BoxOdometer {
    radius: i64,
    state: Option<Vec<i64>>,
}

impl BoxOdometer {
    fn new(dimension: usize, radius: i64) -> Self {
        Self {
            radius,
            state: Some(vec![-radius; dimension]),
        }
    }
}

impl Iterator for BoxOdometer {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        let state = self.state.as_mut()?;
        let current = state.clone();
        // Advance the rightmost coordinate, carrying leftward.
        let mut axis = state.len();
        loop {
            if axis == 0 {
                self.state = None;
                break;
            }
            axis -= 1;
            if state[axis] < self.radius {
                state[axis] += 1;
                for later in state.iter_mut().skip(axis + 1) {
                    *later = -self.radius;
                }
                break;
            }
        }
        Some(current)
    }
}

/// `K = [-N,N]^D ∩ Ψ^{-1}([-N,N]^t)`: the box cut by `±ψ_i(x) ≤ N` for
/// every form of the system.
pub fn preimage_region(
    system: &crate::linear_systems::LinearSystem,
    n: i64,
) -> Result<LatticeRegion, RegionError> {
    let mut halfspaces = Vec::with_capacity(2 * system.forms().len());
    for form in system.forms() {
        let coeffs = form.coeffs().to_vec();
        let negated = coeffs.iter().map(|&c| -c).collect();
        halfspaces.push(Halfspace::new(coeffs, n));
        halfspaces.push(Halfspace::new(negated, n));
    }
    LatticeRegion::new(system.dimension(), n, halfspaces)
}

/// A product of arithmetic progressions `{anchor_i + spacing·v : 0 ≤ v < side_count}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DilatedCube {
    pub anchor: Vec<i64>,
    pub spacing: i64,
    pub side_count: i64,
}

impl DilatedCube {
    /// Lattice points of the cube in lexicographic order of the index
    /// vector `v`.
    pub fn points(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        let side = self.side_count;
        IndexOdometer::new(self.anchor.len(), side).map(move |v| {
            v.iter()
                .zip(&self.anchor)
                .map(|(&vi, &ai)| ai + self.spacing * vi)
                .collect()
        })
    }

    pub fn point_count(&self) -> u64 {
        (self.side_count as u64).pow(self.anchor.len() as u32)
    }

    pub fn contains(&self, point: &[i64]) -> bool {
        point.len() == self.anchor.len()
            && point.iter().zip(&self.anchor).all(|(&x, &a)| {
                let offset = x - a;
                offset.rem_euclid(self.spacing) == 0 && {
                    let v = offset.div_euclid(self.spacing);
                    (0..self.side_count).contains(&v)
                }
            })
    }
}

/// Odometer over `[0, side)^dimension`, lexicographic.
struct IndexOdometer {
    side: i64,
    state: Option<Vec<i64>>,
}

impl IndexOdometer {
    fn new(dimension: usize, side: i64) -> Self {
        Self {
            side,
            state: (side > 0).then(|| vec![0; dimension]),
        }
    }
}

impl Iterator for IndexOdometer {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        let state = self.state.as_mut()?;
        let current = state.clone();
        let mut axis = state.len();
        loop {
            if axis == 0 {
                self.state = None;
                break;
            }
            axis -= 1;
            if state[axis] + 1 < self.side {
                state[axis] += 1;
                for later in state.iter_mut().skip(axis + 1) {
                    *later = 0;
                }
                break;
            }
        }
        Some(current)
    }
}

/// A packing of a region into dilated cubes plus an explicit leftover set.
///
/// Invariant (by construction, re-checked in tests): the cubes are pairwise
/// disjoint, disjoint from `boundary`, and their union with `boundary` is
/// the region exactly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellPartition {
    pub cells: Vec<DilatedCube>,
    /// Points of the region not covered by any cell (the set `S`),
    /// lexicographically sorted.
    pub boundary: Vec<Vec<i64>>,
    pub spacing: i64,
    pub eps_prime: f64,
    /// Points per axis of each dilated cube.
    pub side_count: i64,
    /// The box radius of the packed region.
    pub radius: i64,
    pub dimension: usize,
}

impl CellPartition {
    /// Total points covered by cells plus boundary.
    pub fn covered_points(&self) -> u64 {
        let cells: u64 = self.cells.iter().map(DilatedCube::point_count).sum();
        cells + self.boundary.len() as u64
    }
}

/// Packs `region` by a grid of cubes of side `q·L` (`L = floor(ε′·N)`)
/// anchored at the box corner `(-N, …, -N)`.  A grid cube is kept when all
/// `2^D` corners and the center satisfy every halfspace (sufficient for a
/// convex cut); kept cubes split into `q^D` dilated cubes, one per residue
/// class mod `q`, and every remaining region point goes to the boundary
/// set.
pub fn pack_cubes(
    region: &LatticeRegion,
    q: i64,
    eps_prime: f64,
    n: i64,
) -> Result<CellPartition, RegionError> {
    if region.coset().is_some() {
        return Err(RegionError::CosetUnsupported);
    }
    if q < 1 {
        return Err(RegionError::InvalidSpacing { got: q });
    }
    if !(eps_prime > 0.0 && eps_prime <= 1.0) {
        return Err(RegionError::EpsilonOutOfRange { got: eps_prime });
    }
    let eps_n = eps_prime * n as f64;
    if eps_n < 1.0 {
        return Err(RegionError::SideTooSmall {
            side: q * eps_n.floor() as i64,
            eps_n,
        });
    }
    let side_count = eps_n.floor() as i64; // L ≥ 1
    let cube_side = q * side_count;
    let dim = region.dimension();
    let radius = region.radius();
    let axis_points = 2 * radius + 1;
    let full_cubes_per_axis = axis_points / cube_side;

    // Kept grid cubes, decided by exact corner + center checks.
    let mut kept: HashSet<Vec<i64>> = HashSet::new();
    let mut cells = Vec::new();
    for grid in IndexOdometer::new(dim, full_cubes_per_axis) {
        let anchor: Vec<i64> = grid.iter().map(|&k| -radius + k * cube_side).collect();
        if cube_inside(region, &anchor, cube_side) {
            for residue in IndexOdometer::new(dim, q) {
                cells.push(DilatedCube {
                    anchor: anchor.iter().zip(&residue).map(|(&a, &r)| a + r).collect(),
                    spacing: q,
                    side_count,
                });
            }
            kept.insert(grid);
        }
    }

    // Everything else in the region is boundary.  Region enumeration is
    // lexicographic, so the boundary comes out sorted.
    let mut boundary = Vec::new();
    for point in region.points() {
        let in_kept_cube = point.iter().all(|&x| (x + radius) / cube_side < full_cubes_per_axis)
            && kept.contains(
                &point
                    .iter()
                    .map(|&x| (x + radius) / cube_side)
                    .collect::<Vec<i64>>(),
            );
        if !in_kept_cube {
            boundary.push(point);
        }
    }

    Ok(CellPartition {
        cells,
        boundary,
        spacing: q,
        eps_prime,
        side_count,
        radius,
        dimension: dim,
    })
}

/// Exact containment test for a grid cube `anchor + [0, side)^D`: the box
/// bound, every halfspace at all `2^D` corners, and the center (doubled
/// coordinates keep the center integral).
fn cube_inside(region: &LatticeRegion, anchor: &[i64], side: i64) -> bool {
    let radius = region.radius();
    let hi_offset = side - 1;
    if !anchor
        .iter()
        .all(|&a| a >= -radius && a + hi_offset <= radius)
    {
        return false;
    }
    let dim = anchor.len();
    for h in region.halfspaces() {
        for corner_bits in 0u64..(1 << dim) {
            let value: i128 = (0..dim)
                .map(|i| {
                    let x = anchor[i] + if corner_bits >> i & 1 == 1 { hi_offset } else { 0 };
                    h.normal[i] as i128 * x as i128
                })
                .sum();
            if value > h.bound as i128 {
                return false;
            }
        }
        // Center check in doubled coordinates: 2·center = 2·anchor + side-1.
        let doubled: i128 = (0..dim)
            .map(|i| h.normal[i] as i128 * (2 * anchor[i] + hi_offset) as i128)
            .sum();
        if doubled > 2 * h.bound as i128 {
            return false;
        }
    }
    true
}

/// The image progression of one cell under `form`, shifted by `c`: the
/// coordinate of the lowest-index nonzero coefficient varies over the cell
/// while all others sit at the anchor, giving `side_count` values in
/// arithmetic progression with common difference `spacing · coeff`.
pub fn extract_subprogression(
    cell: &DilatedCube,
    form: &LinearForm,
    c: i64,
) -> Result<Progression, RegionError> {
    if form.dimension() != cell.anchor.len() {
        return Err(RegionError::FormDimension {
            expected: cell.anchor.len(),
            got: form.dimension(),
        });
    }
    let j = form
        .coeffs()
        .iter()
        .position(|&coeff| coeff != 0)
        .expect("linear forms have a nonzero coefficient");
    let start = dot(form.coeffs(), &cell.anchor) as i64 + c;
    Ok(Progression::new(
        start,
        cell.spacing * form.coeffs()[j],
        cell.side_count as u64,
    ))
}

/// Number of cells `P` of the partition with `n ∈ form(P) + c`.
///
/// Per cell this is a bounded integer feasibility check: writing cell
/// points as `anchor + q·v` with `v ∈ [0, L)^D`, membership means
/// `Σ coeff_i·v_i = (n - c - form(anchor))/q` (no solution when `q` does
/// not divide the left side).  The check enumerates all but the last
/// nonzero coordinate and solves for the last — never the full cube.
pub fn incidence_count(
    partition: &CellPartition,
    form: &LinearForm,
    c: i64,
    n: i64,
) -> Result<u64, RegionError> {
    if form.dimension() != partition.dimension {
        return Err(RegionError::FormDimension {
            expected: partition.dimension,
            got: form.dimension(),
        });
    }
    let nonzero: Vec<(usize, i64)> = form
        .coeffs()
        .iter()
        .enumerate()
        .filter(|&(_, &coeff)| coeff != 0)
        .map(|(i, &coeff)| (i, coeff))
        .collect();
    let mut count = 0;
    for cell in &partition.cells {
        let offset = n as i128 - c as i128 - dot(form.coeffs(), &cell.anchor);
        let q = cell.spacing as i128;
        if offset.rem_euclid(q) != 0 {
            continue;
        }
        let target = offset.div_euclid(q);
        if feasible(&nonzero, target, cell.side_count as i128) {
            count += 1;
        }
    }
    Ok(count)
}

/// Does `Σ coeff_i·v_i = target` admit a solution with each `v_i ∈ [0, side)`?
/// Enumerates all nonzero coordinates but the last; zero-coefficient
/// coordinates are free and irrelevant.
fn feasible(nonzero: &[(usize, i64)], target: i128, side: i128) -> bool {
    match nonzero {
        [] => target == 0,
        [(_, coeff)] => {
            let coeff = *coeff as i128;
            target.rem_euclid(coeff.abs()) == 0 && {
                let v = target / coeff;
                (0..side).contains(&v)
            }
        }
        [(_, coeff), rest @ ..] => {
            let coeff = *coeff as i128;
            (0..side).any(|v| feasible(rest, target - coeff * v, side))
        }
    }
}
