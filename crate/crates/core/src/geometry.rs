//! Heighted lattice polygons and their regular triangulations.
//!
//! A height function `nu: A -> Q` lifts every point of `A` to `(m, nu(m))`; the
//! projections of the lower facets of the lifted convex hull form the regular
//! subdivision `P_nu`. All predicates are evaluated exactly: heights are scaled
//! by the lcm of their denominators so every orientation test is an integer
//! determinant.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lattice::{int, is_unit_abs, LatticePoint, Rational};
use crate::lp;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("DegeneratePolygon: the convex hull of the points is not two-dimensional")]
    DegeneratePolygon,
    #[error("DuplicatePoint: point {0} appears more than once")]
    DuplicatePoint(usize),
    #[error("HeightCountMismatch: {points} points but {heights} heights")]
    HeightCountMismatch { points: usize, heights: usize },
    #[error("NonTriangularCell: lower facet through points {points:?} is not a triangle")]
    NonTriangularCell { points: Vec<usize> },
    #[error("MissingLatticePoints: {missing} lattice points of the polygon are not in A")]
    MissingLatticePoints { missing: usize },
    #[error("InvalidTriangulation: {0}")]
    InvalidTriangulation(&'static str),
    #[error("IndexOutOfRange: point index {0}")]
    IndexOutOfRange(usize),
}

/// The seed of every construction: a point set `A` in `M` with heights `nu`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightedPolygon {
    points: Vec<LatticePoint>,
    heights: Vec<Rational>,
}

impl HeightedPolygon {
    pub fn new(points: Vec<LatticePoint>, heights: Vec<Rational>) -> Result<Self, GeometryError> {
        if points.len() != heights.len() {
            return Err(GeometryError::HeightCountMismatch { points: points.len(), heights: heights.len() });
        }
        let mut seen = BTreeSet::new();
        for (i, p) in points.iter().enumerate() {
            if !seen.insert(p) {
                return Err(GeometryError::DuplicatePoint(i));
            }
        }
        let poly = Self { points, heights };
        if poly.hull().len() < 3 {
            return Err(GeometryError::DegeneratePolygon);
        }
        Ok(poly)
    }

    /// Convenience constructor from integer coordinates.
    pub fn from_coords(coords: &[(i64, i64)], heights: Vec<Rational>) -> Result<Self, GeometryError> {
        Self::new(coords.iter().map(|&(x, y)| LatticePoint::new(x, y)).collect(), heights)
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn heights(&self) -> &[Rational] {
        &self.heights
    }

    pub fn point(&self, i: usize) -> &LatticePoint {
        &self.points[i]
    }

    pub fn height(&self, i: usize) -> &Rational {
        &self.heights[i]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, p: &LatticePoint) -> Option<usize> {
        self.points.iter().position(|q| q == p)
    }

    /// Same points, new heights.
    pub fn with_heights(&self, heights: Vec<Rational>) -> Result<Self, GeometryError> {
        Self::new(self.points.clone(), heights)
    }

    /// Indices of the convex hull vertices in counterclockwise order,
    /// collinear boundary points excluded.
    pub fn hull(&self) -> Vec<usize> {
        convex_hull(&self.points)
    }

    /// Twice the area of the convex hull.
    pub fn doubled_area(&self) -> BigInt {
        let hull = self.hull();
        let mut acc = BigInt::zero();
        for (k, &i) in hull.iter().enumerate() {
            let j = hull[(k + 1) % hull.len()];
            acc += self.points[i].cross(&self.points[j]);
        }
        acc.abs()
    }

    /// Whether `m` lies in the closed convex hull.
    pub fn hull_contains(&self, m: &LatticePoint) -> bool {
        let hull = self.hull();
        hull.iter().enumerate().all(|(k, &i)| {
            let j = hull[(k + 1) % hull.len()];
            let a = &self.points[i];
            let b = &self.points[j];
            !(b - a).cross(&(m - a)).is_negative()
        })
    }

    /// Whether `m` lies in the interior of the convex hull.
    pub fn hull_interior_contains(&self, m: &LatticePoint) -> bool {
        let hull = self.hull();
        hull.iter().enumerate().all(|(k, &i)| {
            let j = hull[(k + 1) % hull.len()];
            let a = &self.points[i];
            let b = &self.points[j];
            (b - a).cross(&(m - a)).is_positive()
        })
    }

    /// All of `Delta ∩ M`, in lexicographic order.
    pub fn lattice_points_of_hull(&self) -> Vec<LatticePoint> {
        let (lo_x, hi_x, lo_y, hi_y) = self.bounding_box();
        let mut out = Vec::new();
        let mut x = lo_x;
        while x <= hi_x {
            let mut y = lo_y.clone();
            while y <= hi_y {
                let m = LatticePoint { x: x.clone(), y: y.clone() };
                if self.hull_contains(&m) {
                    out.push(m);
                }
                y += 1;
            }
            x += 1;
        }
        out
    }

    /// Errors unless `A` contains every lattice point of `Delta`.
    pub fn require_saturated(&self) -> Result<(), GeometryError> {
        let missing = self
            .lattice_points_of_hull()
            .iter()
            .filter(|m| self.index_of(m).is_none())
            .count();
        if missing == 0 {
            Ok(())
        } else {
            Err(GeometryError::MissingLatticePoints { missing })
        }
    }

    fn bounding_box(&self) -> (BigInt, BigInt, BigInt, BigInt) {
        let xs = self.points.iter().map(|p| &p.x);
        let ys = self.points.iter().map(|p| &p.y);
        (
            xs.clone().min().cloned().unwrap_or_default(),
            xs.max().cloned().unwrap_or_default(),
            ys.clone().min().cloned().unwrap_or_default(),
            ys.max().cloned().unwrap_or_default(),
        )
    }

    /// Breaks height ties deterministically: adds `eps * k_i` with distinct
    /// pseudo-random `k_i` drawn from `seed`.
    ///
    /// `eps` is small enough that no strict orientation predicate of the
    /// original heights changes sign, so a generic input keeps its
    /// triangulation.
    pub fn perturb_heights(&self, seed: u64) -> Self {
        const SPREAD: u64 = 1 << 20;
        let denom_lcm = self
            .heights
            .iter()
            .fold(BigInt::one(), |acc, h| acc.lcm(h.denom()));
        let (lo_x, hi_x, lo_y, hi_y) = self.bounding_box();
        let diam = core::cmp::max(hi_x - lo_x, hi_y - lo_y);
        let scale = BigInt::from(16u32) * BigInt::from(SPREAD) * denom_lcm * (&diam * &diam + BigInt::one());

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut used = BTreeSet::new();
        let heights = self
            .heights
            .iter()
            .map(|h| {
                let k = loop {
                    let k = rng.random_range(1..=SPREAD);
                    if used.insert(k) {
                        break k;
                    }
                };
                h + Rational::new(BigInt::from(k), scale.clone())
            })
            .collect();
        Self { points: self.points.clone(), heights }
    }
}

/// Andrew's monotone chain; returns hull vertex indices counterclockwise.
fn convex_hull(points: &[LatticePoint]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].cmp(&points[b]));
    if order.len() < 3 {
        return order;
    }
    let turn = |o: usize, a: usize, b: usize| (&points[a] - &points[o]).cross(&(&points[b] - &points[o]));
    let mut lower: Vec<usize> = Vec::new();
    for &i in &order {
        while lower.len() >= 2 && !turn(lower[lower.len() - 2], lower[lower.len() - 1], i).is_positive() {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in order.iter().rev() {
        while upper.len() >= 2 && !turn(upper[upper.len() - 2], upper[upper.len() - 1], i).is_positive() {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// An edge of a triangulation with its adjacent cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    /// Point indices, ascending.
    pub vertices: [usize; 2],
    pub interior: bool,
    /// One cell for boundary edges, two (ascending) for interior edges.
    pub cells: Vec<usize>,
}

/// A triangulation of `conv(A)` by triangles with vertices in `A`.
///
/// Cells are stored as ascending index triples and sorted, so two
/// triangulations with the same cells compare equal regardless of input order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    cells: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    vertices_used: Vec<usize>,
}

impl Triangulation {
    /// Validates `cells` as a triangulation of `conv(A)`: non-degenerate
    /// triangles with pairwise disjoint interiors whose areas add up to the
    /// area of the polygon, meeting face to face.
    pub fn from_cells(poly: &HeightedPolygon, cells: Vec<[usize; 3]>) -> Result<Self, GeometryError> {
        let pts = poly.points();
        for cell in &cells {
            for &v in cell {
                if v >= pts.len() {
                    return Err(GeometryError::IndexOutOfRange(v));
                }
            }
            if doubled_signed_area(pts, cell).is_zero() {
                return Err(GeometryError::InvalidTriangulation("degenerate cell"));
            }
        }
        let tri = Self::assemble(cells);
        let total: BigInt = tri.cells.iter().map(|c| doubled_signed_area(pts, c).abs()).sum();
        if total != poly.doubled_area() {
            return Err(GeometryError::InvalidTriangulation("cell areas do not add up to the polygon area"));
        }
        for (a, ca) in tri.cells.iter().enumerate() {
            for cb in &tri.cells[a + 1..] {
                if ca == cb || !separated(pts, ca, cb) {
                    return Err(GeometryError::InvalidTriangulation("overlapping cells"));
                }
            }
        }
        for edge in &tri.edges {
            let p = &pts[edge.vertices[0]];
            let q = &pts[edge.vertices[1]];
            for &v in &tri.vertices_used {
                if edge.vertices.contains(&v) {
                    continue;
                }
                if on_open_segment(p, q, &pts[v]) {
                    return Err(GeometryError::InvalidTriangulation("vertex in the interior of an edge"));
                }
            }
            if edge.cells.len() > 2 {
                return Err(GeometryError::InvalidTriangulation("edge with more than two cells"));
            }
            if !edge.interior {
                let d = q - p;
                let mut pos = false;
                let mut neg = false;
                for m in pts {
                    let s = d.cross(&(m - p));
                    pos |= s.is_positive();
                    neg |= s.is_negative();
                }
                if pos && neg {
                    return Err(GeometryError::InvalidTriangulation("unpaired edge inside the polygon"));
                }
            }
        }
        Ok(tri)
    }

    fn assemble(cells: Vec<[usize; 3]>) -> Self {
        let mut cells: Vec<[usize; 3]> = cells
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        cells.sort_unstable();
        let mut incidence: BTreeMap<[usize; 2], Vec<usize>> = BTreeMap::new();
        for (id, c) in cells.iter().enumerate() {
            for (a, b) in [(c[0], c[1]), (c[0], c[2]), (c[1], c[2])] {
                incidence.entry([a, b]).or_default().push(id);
            }
        }
        let edges = incidence
            .into_iter()
            .map(|(vertices, cells)| Edge { vertices, interior: cells.len() == 2, cells })
            .collect();
        let vertices_used: BTreeSet<usize> = cells.iter().flatten().copied().collect();
        Self { cells, edges, vertices_used: vertices_used.into_iter().collect() }
    }

    pub fn cells(&self) -> &[[usize; 3]] {
        &self.cells
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertices_used(&self) -> &[usize] {
        &self.vertices_used
    }

    pub fn interior_edges(&self) -> impl Iterator<Item = (usize, &Edge)> {
        self.edges.iter().enumerate().filter(|(_, e)| e.interior)
    }

    pub fn boundary_edges(&self) -> impl Iterator<Item = (usize, &Edge)> {
        self.edges.iter().enumerate().filter(|(_, e)| !e.interior)
    }

    /// The id of the edge with the given endpoints, in either order.
    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        let key = if a < b { [a, b] } else { [b, a] };
        self.edges.iter().position(|e| e.vertices == key)
    }

    /// The id of the cell with the given vertices, in any order.
    pub fn cell_id(&self, mut cell: [usize; 3]) -> Option<usize> {
        cell.sort_unstable();
        self.cells.binary_search(&cell).ok()
    }

    /// Sum over cells of twice their area.
    pub fn doubled_area(&self, poly: &HeightedPolygon) -> BigInt {
        self.cells.iter().map(|c| doubled_signed_area(poly.points(), c).abs()).sum()
    }
}

fn doubled_signed_area(pts: &[LatticePoint], c: &[usize; 3]) -> BigInt {
    (&pts[c[1]] - &pts[c[0]]).cross(&(&pts[c[2]] - &pts[c[0]]))
}

fn on_open_segment(p: &LatticePoint, q: &LatticePoint, v: &LatticePoint) -> bool {
    let d = q - p;
    d.cross(&(v - p)).is_zero() && (v - p).dot(&d).is_positive() && (v - q).dot(&(p - q)).is_positive()
}

/// Separating-axis test for two triangles: true iff their interiors are disjoint.
fn separated(pts: &[LatticePoint], a: &[usize; 3], b: &[usize; 3]) -> bool {
    let test = |t: &[usize; 3], other: &[usize; 3]| {
        (0..3).any(|k| {
            let p = &pts[t[k]];
            let q = &pts[t[(k + 1) % 3]];
            let r = &pts[t[(k + 2) % 3]];
            let d = q - p;
            let side = d.cross(&(r - p)).signum();
            other.iter().all(|&v| !(d.cross(&(&pts[v] - p)) * &side).is_positive())
        })
    };
    test(a, b) || test(b, a)
}

/// The regular triangulation `P_nu`: projections of the lower facets of the
/// lifted point set.
pub fn regular_triangulation(poly: &HeightedPolygon) -> Result<Triangulation, GeometryError> {
    let pts = poly.points();
    let denom_lcm = poly.heights().iter().fold(BigInt::one(), |acc, h| acc.lcm(h.denom()));
    let lifted: Vec<[BigInt; 3]> = pts
        .iter()
        .zip(poly.heights())
        .map(|(p, h)| [p.x.clone(), p.y.clone(), (h * int(denom_lcm.clone())).to_integer()])
        .collect();

    let n = pts.len();
    let mut cells = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let u = diff(&lifted[j], &lifted[i]);
                let v = diff(&lifted[k], &lifted[i]);
                let orient = &u[0] * &v[1] - &u[1] * &v[0];
                if orient.is_zero() {
                    continue;
                }
                let mut coplanar = vec![i, j, k];
                let mut lower = true;
                for a in 0..n {
                    if a == i || a == j || a == k {
                        continue;
                    }
                    let w = diff(&lifted[a], &lifted[i]);
                    let side = det3(&u, &v, &w) * orient.signum();
                    if side.is_negative() {
                        lower = false;
                        break;
                    }
                    if side.is_zero() {
                        coplanar.push(a);
                    }
                }
                if !lower {
                    continue;
                }
                if coplanar.len() > 3 {
                    coplanar.sort_unstable();
                    return Err(GeometryError::NonTriangularCell { points: coplanar });
                }
                cells.push([i, j, k]);
            }
        }
    }
    Ok(Triangulation::assemble(cells))
}

fn diff(a: &[BigInt; 3], b: &[BigInt; 3]) -> [BigInt; 3] {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

fn det3(u: &[BigInt; 3], v: &[BigInt; 3], w: &[BigInt; 3]) -> BigInt {
    &u[0] * (&v[1] * &w[2] - &v[2] * &w[1]) - &u[1] * (&v[0] * &w[2] - &v[2] * &w[0])
        + &u[2] * (&v[0] * &w[1] - &v[1] * &w[0])
}

/// True iff every cell has normalized area one.
///
/// Errors when `A` misses lattice points of `Delta`.
pub fn is_unimodular(poly: &HeightedPolygon, tri: &Triangulation) -> Result<bool, GeometryError> {
    poly.require_saturated()?;
    Ok(tri.cells().iter().all(|c| is_unit_abs(&doubled_signed_area(poly.points(), c))))
}

/// True iff `tri` is the regular triangulation induced by the heights of `poly`.
pub fn is_adapted(poly: &HeightedPolygon, tri: &Triangulation) -> bool {
    matches!(regular_triangulation(poly), Ok(t) if t == *tri)
}

/// Exact LP search for heights inducing `tri`; the heights stored in `poly`
/// are ignored. Returns `None` when `tri` is not coherent.
///
/// For every cell, the affine function interpolating its lifted vertices must
/// stay strictly below every other lifted point. The three vertices of the
/// first cell are pinned to height zero to remove the affine gauge.
pub fn coherence_witness(poly: &HeightedPolygon, tri: &Triangulation) -> Option<Vec<Rational>> {
    let pts = poly.points();
    let n = pts.len();
    let first = *tri.cells().first()?;
    let free: Vec<usize> = (0..n).filter(|i| !first.contains(i)).collect();
    let slot: BTreeMap<usize, usize> = free.iter().enumerate().map(|(s, &i)| (i, s)).collect();

    // Variables: nu = plus - minus on the free points.
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for cell in tri.cells() {
        let det = doubled_signed_area(pts, cell);
        for (p_idx, p) in pts.iter().enumerate() {
            if cell.contains(&p_idx) {
                continue;
            }
            // nu(p) - sum_v lambda_v(p) nu(v) >= 1, with barycentric lambda.
            let mut coeff: BTreeMap<usize, Rational> = BTreeMap::new();
            *coeff.entry(p_idx).or_insert_with(Rational::zero) += Rational::one();
            for k in 0..3 {
                let a = &pts[cell[(k + 1) % 3]];
                let b = &pts[cell[(k + 2) % 3]];
                let lambda = Rational::new((b - a).cross(&(p - a)), det.clone());
                *coeff.entry(cell[k]).or_insert_with(Rational::zero) -= lambda;
            }
            let mut row = vec![Rational::zero(); 2 * free.len()];
            for (idx, c) in coeff {
                if let Some(&s) = slot.get(&idx) {
                    row[2 * s] += &c;
                    row[2 * s + 1] -= &c;
                }
            }
            rows.push(row);
            rhs.push(Rational::one());
        }
    }
    let x = lp::feasible_point(&rows, &rhs)?;
    let mut heights = vec![Rational::zero(); n];
    for (s, &i) in free.iter().enumerate() {
        heights[i] = &x[2 * s] - &x[2 * s + 1];
    }
    Some(heights)
}
