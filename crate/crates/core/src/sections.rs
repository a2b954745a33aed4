//! Framed Lagrangian sections and their line-bundle degrees.
//!
//! A section assigns a covector `n_s` to every cell `s`. Across an interior edge
//! `{a, b}` separating cells `s < s'` the values must satisfy
//! `<n_s - n_s', a - b> = 0`, and the degree on that edge is
//! `d = <n_s - n_s', (b - a)^perp>` with `a` the lexicographically smaller endpoint.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::geometry::{Edge, HeightedPolygon, Triangulation};
use crate::lattice::{int, Covector, LatticePoint, Rational};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SectionError {
    #[error("UnknownCell: section refers to cell {0}, which is not in the triangulation")]
    UnknownCell(usize),
    #[error("UnknownCell: cell {0} has no value")]
    MissingCell(usize),
    #[error("InvalidSection: compatibility fails across interior edge {edge}")]
    InvalidSection { edge: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FramedSection {
    pub values: BTreeMap<usize, Covector>,
}

impl FramedSection {
    pub fn constant(tri: &Triangulation, n: &Covector) -> Self {
        Self { values: (0..tri.cells().len()).map(|c| (c, n.clone())).collect() }
    }

    pub fn from_values(values: impl IntoIterator<Item = Covector>) -> Self {
        Self { values: values.into_iter().enumerate().collect() }
    }

    /// Cellwise sum; cells present in only one operand keep their value.
    pub fn add(&self, other: &Self) -> Self {
        let mut values = self.values.clone();
        for (c, n) in &other.values {
            let slot = values.entry(*c).or_insert_with(Covector::zero);
            *slot = &*slot + n;
        }
        Self { values }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LineBundleClass {
    pub degrees: BTreeMap<usize, BigInt>,
}

impl LineBundleClass {
    pub fn is_trivial(&self) -> bool {
        self.degrees.values().all(Zero::is_zero)
    }
}

/// Endpoints of an edge ordered `(alpha, beta)` with `alpha` lexicographically smaller.
fn oriented_endpoints<'a>(poly: &'a HeightedPolygon, edge: &Edge) -> (&'a LatticePoint, &'a LatticePoint) {
    let p = poly.point(edge.vertices[0]);
    let q = poly.point(edge.vertices[1]);
    if (&p.x, &p.y) <= (&q.x, &q.y) {
        (p, q)
    } else {
        (q, p)
    }
}

fn cell_pair(edge: &Edge) -> (usize, usize) {
    let (a, b) = (edge.cells[0], edge.cells[1]);
    (a.min(b), a.max(b))
}

fn value(s: &FramedSection, cell: usize) -> Result<&Covector, SectionError> {
    s.values.get(&cell).ok_or(SectionError::MissingCell(cell))
}

fn check_ids(tri: &Triangulation, s: &FramedSection) -> Result<(), SectionError> {
    let cells = tri.cells().len();
    if let Some((&bad, _)) = s.values.iter().find(|(&c, _)| c >= cells) {
        return Err(SectionError::UnknownCell(bad));
    }
    if let Some(missing) = (0..cells).find(|c| !s.values.contains_key(c)) {
        return Err(SectionError::MissingCell(missing));
    }
    Ok(())
}

fn edge_ok(poly: &HeightedPolygon, edge: &Edge, s: &FramedSection) -> Result<bool, SectionError> {
    let (lo, hi) = cell_pair(edge);
    let diff = value(s, lo)? - value(s, hi)?;
    let (alpha, beta) = oriented_endpoints(poly, edge);
    Ok(diff.pair(&(alpha - beta)).is_zero())
}

/// Whether every interior-edge compatibility condition holds.
pub fn check_section(poly: &HeightedPolygon, tri: &Triangulation, s: &FramedSection) -> Result<bool, SectionError> {
    check_ids(tri, s)?;
    for (_, edge) in tri.interior_edges() {
        if !edge_ok(poly, edge, s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn degree_vector(poly: &HeightedPolygon, tri: &Triangulation, s: &FramedSection) -> Result<LineBundleClass, SectionError> {
    check_ids(tri, s)?;
    let mut degrees = BTreeMap::new();
    for (id, edge) in tri.interior_edges() {
        if !edge_ok(poly, edge, s)? {
            return Err(SectionError::InvalidSection { edge: id });
        }
        let (lo, hi) = cell_pair(edge);
        let diff = value(s, lo)? - value(s, hi)?;
        let (alpha, beta) = oriented_endpoints(poly, edge);
        degrees.insert(id, diff.pair(&(beta - alpha).perp()));
    }
    Ok(LineBundleClass { degrees })
}

/// Subtracts the value on the lowest-indexed cell.
pub fn shift_normalize(s: &FramedSection) -> FramedSection {
    let Some(base) = s.values.values().next().cloned() else {
        return s.clone();
    };
    FramedSection { values: s.values.iter().map(|(&c, n)| (c, n - &base)).collect() }
}

/// All sections with entries in `[-bound, bound]^2`, one normalized
/// representative per shift class, in sorted order.
pub fn enumerate_sections(poly: &HeightedPolygon, tri: &Triangulation, bound: i64) -> Vec<FramedSection> {
    let cells = tri.cells().len();
    let bound = bound.max(0);
    let choices: Vec<Covector> = (-bound..=bound)
        .flat_map(|x| (-bound..=bound).map(move |y| Covector::new(x, y)))
        .collect();
    // Constraints whose larger cell id is `c` are checked once `c` is assigned.
    let mut checks: Vec<Vec<&Edge>> = vec![Vec::new(); cells];
    for (_, edge) in tri.interior_edges() {
        checks[cell_pair(edge).1].push(edge);
    }
    let mut found = BTreeSet::new();
    let mut current = FramedSection::default();
    search(poly, &choices, &checks, 0, &mut current, &mut found);
    found.into_iter().collect()
}

fn search(
    poly: &HeightedPolygon,
    choices: &[Covector],
    checks: &[Vec<&Edge>],
    cell: usize,
    current: &mut FramedSection,
    found: &mut BTreeSet<FramedSection>,
) {
    if cell == checks.len() {
        found.insert(shift_normalize(current));
        return;
    }
    for n in choices {
        current.values.insert(cell, n.clone());
        if checks[cell].iter().all(|e| edge_ok(poly, e, current).unwrap_or(false)) {
            search(poly, choices, checks, cell + 1, current, found);
        }
    }
    current.values.remove(&cell);
}

/// Ranks of the section lattice and of the degree map on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeRankReport {
    /// Rank of the lattice of valid sections, constants included.
    pub section_rank: usize,
    /// Rank of the kernel of the degree map on sections modulo constants.
    pub kernel_rank: usize,
    pub interior_edges: usize,
}

impl DegreeRankReport {
    pub fn injective(&self) -> bool {
        self.kernel_rank == 0
    }
}

pub fn degree_rank_report(poly: &HeightedPolygon, tri: &Triangulation) -> DegreeRankReport {
    let cells = tri.cells().len();
    let width = 2 * cells;
    let mut constraints = Vec::new();
    let mut degrees = Vec::new();
    for (_, edge) in tri.interior_edges() {
        let (lo, hi) = cell_pair(edge);
        let (alpha, beta) = oriented_endpoints(poly, edge);
        let push = |rows: &mut Vec<Vec<Rational>>, m: &LatticePoint| {
            let mut row = vec![Rational::zero(); width];
            row[2 * lo] = int(m.x.clone());
            row[2 * lo + 1] = int(m.y.clone());
            row[2 * hi] = -int(m.x.clone());
            row[2 * hi + 1] = -int(m.y.clone());
            rows.push(row);
        };
        push(&mut constraints, &(alpha - beta));
        push(&mut degrees, &(beta - alpha).perp());
    }
    let interior_edges = constraints.len();
    let section_rank = width - rank(constraints.clone());
    constraints.extend(degrees);
    let joint_kernel = width - rank(constraints);
    DegreeRankReport { section_rank, kernel_rank: joint_kernel.saturating_sub(2), interior_edges }
}

/// Rank by exact Gaussian elimination.
fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let width = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..width {
        let Some(pivot) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, pivot);
        let p = rows[r][col].clone();
        let pivot_row = rows[r].clone();
        for row in rows.iter_mut().skip(r + 1) {
            if row[col].is_zero() {
                continue;
            }
            let f = &row[col] / &p;
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= &f * pv;
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// The integer `k` with `n_s - n_s' = k * primitive((b - a)^perp)` on an
/// interior edge, if the section satisfies that edge's condition.
pub fn edge_multiple(poly: &HeightedPolygon, edge: &Edge, s: &FramedSection) -> Option<BigInt> {
    let (lo, hi) = cell_pair(edge);
    let diff = s.values.get(&lo)? - s.values.get(&hi)?;
    let (alpha, beta) = oriented_endpoints(poly, edge);
    let dir = (beta - alpha).perp().primitive();
    let k = if !dir.x.is_zero() { &diff.x / &dir.x } else { &diff.y / &dir.y };
    (dir.scale(&k).as_covector() == diff).then_some(k)
}
