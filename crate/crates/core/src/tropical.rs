//! The tropical polynomial `L_nu(n) = max_a (<a, n> - nu(a))`, its curve
//! `Pi_inf` dual to the regular triangulation, and the chambers of the
//! complement.
//!
//! Conventions: `(a, b)^perp = (-b, a)`. A leg dual to the boundary edge
//! `{alpha, beta}` points along the primitive vector of `(alpha - beta)^perp`;
//! the endpoints are labelled so that this holds, which makes the leg the set
//! `r_{alpha-beta} = nu(alpha) - nu(beta)`, `r_{(alpha-beta)^perp} >= a`.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::geometry::{HeightedPolygon, Triangulation};
use crate::lattice::{int, Covector, LatticePoint, Rational, RationalPoint};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TropicalError {
    #[error("InconsistentInput: the triangulation is not adapted to the heights ({0})")]
    InconsistentInput(&'static str),
}

/// `L_nu` as a list of `(exponent, height)` terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalPolynomial {
    terms: Vec<(LatticePoint, Rational)>,
}

impl TropicalPolynomial {
    pub fn new(poly: &HeightedPolygon) -> Self {
        Self { terms: poly.points().iter().cloned().zip(poly.heights().iter().cloned()).collect() }
    }

    pub fn terms(&self) -> &[(LatticePoint, Rational)] {
        &self.terms
    }

    /// Value of `L_nu` at `n` and every term index attaining it.
    pub fn eval(&self, n: &RationalPoint) -> (Rational, Vec<usize>) {
        let mut best: Option<Rational> = None;
        let mut argmax = Vec::new();
        for (i, (alpha, nu)) in self.terms.iter().enumerate() {
            let value = n.pair(alpha) - nu;
            match &best {
                Some(b) if value < *b => {}
                Some(b) if value == *b => argmax.push(i),
                _ => {
                    best = Some(value);
                    argmax.clear();
                    argmax.push(i);
                }
            }
        }
        (best.unwrap_or_else(Rational::zero), argmax)
    }
}

/// `eval_tropical` on the heights of `poly`.
pub fn eval_tropical(poly: &HeightedPolygon, n: &RationalPoint) -> (Rational, Vec<usize>) {
    TropicalPolynomial::new(poly).eval(n)
}

/// The chamber `C_alpha` containing `n`, or `None` when `n` lies on the curve.
pub fn chamber_of(poly: &HeightedPolygon, n: &RationalPoint) -> Option<usize> {
    match eval_tropical(poly, n).1.as_slice() {
        [alpha] => Some(*alpha),
        _ => None,
    }
}

/// A vertex of `Pi_inf`, dual to a cell of the triangulation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalVertex {
    pub point: RationalPoint,
    /// Cell id in the triangulation.
    pub cell: usize,
}

/// A compact edge of `Pi_inf`, dual to an interior edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedEdge {
    /// Vertex ids (equal to the ids of the two adjacent cells).
    pub ends: [usize; 2],
    /// Edge id in the triangulation.
    pub dual_edge: usize,
}

/// An unbounded ray of `Pi_inf`, dual to a boundary edge `{alpha, beta}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leg {
    /// The vertex the leg emanates from.
    pub vertex: usize,
    pub base: RationalPoint,
    /// Edge id in the triangulation.
    pub dual_edge: usize,
    /// Point index of `alpha`, labelled so that `direction ∥ (alpha - beta)^perp`.
    pub alpha: usize,
    pub beta: usize,
    /// Primitive direction of the ray.
    pub direction: Covector,
    /// `r_{(alpha-beta)^perp}` at the base, the lower bound of the leg.
    pub a: Rational,
    /// `c^2 = 1 / |alpha - beta|^2`. `c` itself is usually irrational.
    pub c_squared: Rational,
    /// `alpha . (alpha - beta) / |alpha - beta|^2`.
    pub c_prime: Rational,
    /// `alpha . (alpha - beta)^perp / |alpha - beta|^2`.
    pub c_dblprime: Rational,
}

impl Leg {
    /// `c = 1 / |alpha - beta|` as a float.
    pub fn c(&self) -> f64 {
        let inv = crate::lattice::rational_to_f64(&self.c_squared);
        libm::sqrt(inv)
    }

    /// The point `base + t * direction`.
    pub fn point_at(&self, t: &Rational) -> RationalPoint {
        self.base.offset(&self.direction, t)
    }
}

/// The tropical curve `Pi_inf` with its vertices, compact edges and legs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalCurve {
    vertices: Vec<TropicalVertex>,
    edges: Vec<BoundedEdge>,
    legs: Vec<Leg>,
}

impl TropicalCurve {
    pub fn vertices(&self) -> &[TropicalVertex] {
        &self.vertices
    }

    pub fn bounded_edges(&self) -> &[BoundedEdge] {
        &self.edges
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    /// `Pi_{inf,c}`: the maximal compact subcomplex.
    pub fn compact_part(&self) -> (&[TropicalVertex], &[BoundedEdge]) {
        (&self.vertices, &self.edges)
    }

    /// Outgoing primitive directions at a vertex, each with its weight (the
    /// lattice length of the dual edge).
    pub fn outgoing_directions(&self, poly: &HeightedPolygon, tri: &Triangulation, vertex: usize) -> Vec<(Covector, BigInt)> {
        let mut out = Vec::new();
        let here = &self.vertices[vertex].point;
        for e in &self.edges {
            let other = if e.ends[0] == vertex {
                e.ends[1]
            } else if e.ends[1] == vertex {
                e.ends[0]
            } else {
                continue;
            };
            let [a, b] = tri.edges()[e.dual_edge].vertices;
            let d = poly.point(a) - poly.point(b);
            let perp = d.perp().as_covector();
            let dir = perp.primitive();
            let delta = self.vertices[other].point.sub(here);
            let along = &delta.x * int(dir.x.clone()) + &delta.y * int(dir.y.clone());
            let dir = if along < Rational::zero() { -dir } else { dir };
            out.push((dir, d.lattice_length()));
        }
        for leg in self.legs.iter().filter(|l| l.vertex == vertex) {
            let d = poly.point(leg.alpha) - poly.point(leg.beta);
            out.push((leg.direction.clone(), d.lattice_length()));
        }
        out
    }
}

/// Builds `Pi_inf` from a triangulation adapted to the heights of `poly`.
pub fn tropical_curve(poly: &HeightedPolygon, tri: &Triangulation) -> Result<TropicalCurve, TropicalError> {
    let lnu = TropicalPolynomial::new(poly);
    let mut vertices = Vec::with_capacity(tri.cells().len());
    for (id, cell) in tri.cells().iter().enumerate() {
        let point = dual_vertex(poly, cell);
        let (_, argmax) = lnu.eval(&point);
        if argmax.as_slice() != cell.as_slice() {
            return Err(TropicalError::InconsistentInput("cell vertices do not tie alone at the dual vertex"));
        }
        vertices.push(TropicalVertex { point, cell: id });
    }

    let mut edges = Vec::new();
    let mut legs = Vec::new();
    for (eid, edge) in tri.edges().iter().enumerate() {
        if edge.interior {
            edges.push(BoundedEdge { ends: [edge.cells[0], edge.cells[1]], dual_edge: eid });
            continue;
        }
        let vertex = edge.cells[0];
        let base = vertices[vertex].point.clone();
        let [p, q] = edge.vertices;
        let direction = (poly.point(p) - poly.point(q)).perp().as_covector().primitive();
        let pair = [p, q];
        let (alpha, beta, direction) = if lnu.eval(&base.offset(&direction, &Rational::one())).1 == pair {
            (p, q, direction)
        } else if lnu.eval(&base.offset(&-&direction, &Rational::one())).1 == pair {
            (q, p, -direction)
        } else {
            return Err(TropicalError::InconsistentInput("no ray direction keeps the boundary pair tied"));
        };
        let a_pt = poly.point(alpha);
        let diff = a_pt - poly.point(beta);
        let norm2 = diff.norm_squared();
        let perp = diff.perp();
        legs.push(Leg {
            vertex,
            a: base.pair(&perp),
            base,
            dual_edge: eid,
            alpha,
            beta,
            direction,
            c_squared: Rational::new(BigInt::one(), norm2.clone()),
            c_prime: Rational::new(a_pt.dot(&diff), norm2.clone()),
            c_dblprime: Rational::new(a_pt.dot(&perp), norm2),
        });
    }
    Ok(TropicalCurve { vertices, edges, legs })
}

/// The unique point where the three terms of `cell` tie.
fn dual_vertex(poly: &HeightedPolygon, cell: &[usize; 3]) -> RationalPoint {
    let [i, j, k] = *cell;
    let u = poly.point(i) - poly.point(j);
    let v = poly.point(i) - poly.point(k);
    let ru = poly.height(i) - poly.height(j);
    let rv = poly.height(i) - poly.height(k);
    // <u, n> = ru, <v, n> = rv, solved by Cramer's rule.
    let det = int(u.cross(&v));
    let x = (&ru * int(v.y.clone()) - &rv * int(u.y.clone())) / &det;
    let y = (&rv * int(u.x.clone()) - &ru * int(v.x.clone())) / &det;
    RationalPoint::new(x, y)
}
