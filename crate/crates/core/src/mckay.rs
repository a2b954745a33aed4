//! Finite covers: the quotient `G = N / N0`, the `G`-graded pieces of the theta
//! ring and the cover algebra `sum_{g,h} Hom(L_g, L_h)`.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::geometry::HeightedPolygon;
use crate::lattice::{Covector, LatticePoint};
use crate::sparse::SparseVec;
use crate::theta::{ThetaElement, ThetaGen, ThetaRing};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum McKayError {
    #[error("SingularMatrix: sublattice basis has zero determinant")]
    SingularMatrix,
    #[error("InconsistentEntry: projection of {} is not h - g for the block ({:?}, {:?})", .0.n, .0.g, .0.h)]
    InconsistentEntry(Box<CoverIndex>),
}

type Mat = [[BigInt; 2]; 2];

/// A full-rank sublattice `N0` of `N`, generated by the columns of a 2x2 matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    rows: Mat,
}

impl Sublattice {
    /// `rows = [[a, c], [b, d]]` has columns `(a, b)` and `(c, d)`.
    pub fn new(rows: [[BigInt; 2]; 2]) -> Result<Self, McKayError> {
        let s = Self { rows };
        if s.det().is_zero() {
            return Err(McKayError::SingularMatrix);
        }
        Ok(s)
    }

    pub fn from_rows(rows: [[i64; 2]; 2]) -> Result<Self, McKayError> {
        Self::new(rows.map(|r| r.map(BigInt::from)))
    }

    pub fn from_columns(u: (i64, i64), v: (i64, i64)) -> Result<Self, McKayError> {
        Self::from_rows([[u.0, v.0], [u.1, v.1]])
    }

    /// `N0 = N`.
    pub fn full() -> Self {
        Self { rows: [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]] }
    }

    pub fn rows(&self) -> &[[BigInt; 2]; 2] {
        &self.rows
    }

    pub fn columns(&self) -> [Covector; 2] {
        let r = &self.rows;
        [Covector::new(r[0][0].clone(), r[1][0].clone()), Covector::new(r[0][1].clone(), r[1][1].clone())]
    }

    pub fn det(&self) -> BigInt {
        let r = &self.rows;
        &r[0][0] * &r[1][1] - &r[0][1] * &r[1][0]
    }

    pub fn index(&self) -> BigInt {
        self.det().abs()
    }

    /// Membership by Cramer's rule.
    pub fn contains(&self, n: &Covector) -> bool {
        let r = &self.rows;
        let det = self.det();
        let k0 = &r[1][1] * &n.x - &r[0][1] * &n.y;
        let k1 = &r[0][0] * &n.y - &r[1][0] * &n.x;
        k0.is_multiple_of(&det) && k1.is_multiple_of(&det)
    }
}

/// Residues against the invariant factors `(d1, d2)`; also used as character labels.
pub type GroupElement = [BigInt; 2];

/// `G = N / N0` in Smith normal form: `n -> (U n) mod (d1, d2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientGroup {
    factors: [BigInt; 2],
    u: Mat,
}

impl QuotientGroup {
    pub fn invariant_factors(&self) -> &[BigInt; 2] {
        &self.factors
    }

    /// Invariant factors greater than one.
    pub fn nontrivial_factors(&self) -> Vec<BigInt> {
        self.factors.iter().filter(|d| !d.is_one()).cloned().collect()
    }

    pub fn order(&self) -> BigInt {
        &self.factors[0] * &self.factors[1]
    }

    pub fn is_trivial(&self) -> bool {
        self.order().is_one()
    }

    pub fn identity(&self) -> GroupElement {
        [BigInt::zero(), BigInt::zero()]
    }

    pub fn project(&self, n: &Covector) -> GroupElement {
        let u = &self.u;
        let r0 = &u[0][0] * &n.x + &u[0][1] * &n.y;
        let r1 = &u[1][0] * &n.x + &u[1][1] * &n.y;
        [r0.mod_floor(&self.factors[0]), r1.mod_floor(&self.factors[1])]
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        [(&a[0] + &b[0]).mod_floor(&self.factors[0]), (&a[1] + &b[1]).mod_floor(&self.factors[1])]
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        [(&a[0] - &b[0]).mod_floor(&self.factors[0]), (&a[1] - &b[1]).mod_floor(&self.factors[1])]
    }

    pub fn elements(&self) -> Vec<GroupElement> {
        let mut out = Vec::new();
        let mut a = BigInt::zero();
        while a < self.factors[0] {
            let mut b = BigInt::zero();
            while b < self.factors[1] {
                out.push([a.clone(), b.clone()]);
                b += 1;
            }
            a += 1;
        }
        out
    }
}

/// Smith normal form of a nonsingular 2x2 matrix: returns `U` and `(d1, d2)`
/// with `U A V = diag(d1, d2)` for some unimodular `V`, `0 < d1 | d2`.
fn smith(a: &Mat) -> (Mat, [BigInt; 2]) {
    let mut a = a.clone();
    let mut u: Mat = [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]];
    loop {
        // Bring the smallest nonzero entry to the corner.
        let (pi, pj) = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[i][j].is_zero())
            .min_by_key(|&(i, j)| a[i][j].abs())
            .expect("nonsingular matrix has a nonzero entry");
        if pi == 1 {
            a.swap(0, 1);
            u.swap(0, 1);
        }
        if pj == 1 {
            for row in a.iter_mut() {
                row.swap(0, 1);
            }
        }
        let p = a[0][0].clone();
        let q = a[1][0].div_floor(&p);
        for j in 0..2 {
            let t = &q * &a[0][j];
            a[1][j] -= t;
            let t = &q * &u[0][j];
            u[1][j] -= t;
        }
        let q = a[0][1].div_floor(&p);
        for row in a.iter_mut() {
            let t = &q * &row[0];
            row[1] -= t;
        }
        if !a[1][0].is_zero() || !a[0][1].is_zero() {
            continue;
        }
        if a[1][1].is_multiple_of(&a[0][0]) {
            break;
        }
        for j in 0..2 {
            let t = a[1][j].clone();
            a[0][j] += t;
            let t = u[1][j].clone();
            u[0][j] += t;
        }
    }
    for i in 0..2 {
        if a[i][i].is_negative() {
            a[i][i] = -a[i][i].clone();
            u[i] = [-u[i][0].clone(), -u[i][1].clone()];
        }
    }
    let factors = [a[0][0].clone(), a[1][1].clone()];
    (u, factors)
}

pub fn quotient(sub: &Sublattice) -> QuotientGroup {
    let (u, factors) = smith(&sub.rows);
    let group = QuotientGroup { factors, u };
    debug_assert!(sub.columns().iter().all(|c| group.project(c) == group.identity()));
    group
}

/// Splits a theta element by the coset of `n` in `N / N0`.
pub fn character_decomposition(group: &QuotientGroup, x: &ThetaElement) -> BTreeMap<GroupElement, ThetaElement> {
    let mut pieces: BTreeMap<GroupElement, ThetaElement> = BTreeMap::new();
    for (gen, c) in x.iter() {
        pieces.entry(group.project(&gen.n)).or_default().add_term(gen.clone(), c.clone());
    }
    pieces
}

/// A basis morphism of degree `(n, i)` from `L_g` to `L_h`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoverIndex {
    pub g: GroupElement,
    pub h: GroupElement,
    pub n: Covector,
    pub i: BigInt,
}

pub type CoverAlgebraElement = SparseVec<CoverIndex>;

#[derive(Clone, Debug)]
pub struct CoverAlgebra {
    group: QuotientGroup,
    theta: ThetaRing,
}

impl CoverAlgebra {
    pub fn new(poly: &HeightedPolygon, sub: &Sublattice) -> Self {
        Self { group: quotient(sub), theta: ThetaRing::new(poly) }
    }

    pub fn group(&self) -> &QuotientGroup {
        &self.group
    }

    pub fn entry(&self, g: GroupElement, h: GroupElement, n: Covector, i: impl Into<BigInt>) -> Result<CoverAlgebraElement, McKayError> {
        let x = CoverAlgebraElement::basis(CoverIndex { g, h, n, i: i.into() });
        self.check(&x)?;
        Ok(x)
    }

    pub fn check(&self, x: &CoverAlgebraElement) -> Result<(), McKayError> {
        for idx in x.keys() {
            if self.group.project(&idx.n) != self.group.sub(&idx.h, &idx.g) {
                return Err(McKayError::InconsistentEntry(Box::new(idx.clone())));
            }
        }
        Ok(())
    }

    /// `x: L_g -> L_h` followed by `y: L_h -> L_k` gives `L_g -> L_k`; blocks
    /// that do not chain contribute nothing.
    pub fn compose(&self, x: &CoverAlgebraElement, y: &CoverAlgebraElement) -> Result<CoverAlgebraElement, McKayError> {
        self.check(x)?;
        self.check(y)?;
        let mut out = CoverAlgebraElement::zero();
        for (a, ca) in x.iter() {
            for (b, cb) in y.iter() {
                if a.h != b.g {
                    continue;
                }
                let c = ca * cb;
                let product = self.theta.multiply_gens(&ThetaGen { n: a.n.clone(), i: a.i.clone() }, &ThetaGen { n: b.n.clone(), i: b.i.clone() });
                for (t, ct) in product.iter() {
                    out.add_term(CoverIndex { g: a.g.clone(), h: b.h.clone(), n: t.n.clone(), i: t.i.clone() }, &c * ct);
                }
            }
        }
        Ok(out)
    }

    /// `sum_g id_{L_g}`.
    pub fn unit(&self) -> CoverAlgebraElement {
        self.group
            .elements()
            .into_iter()
            .map(|g| (CoverIndex { g: g.clone(), h: g, n: Covector::zero(), i: BigInt::zero() }, crate::lattice::int(1)))
            .collect()
    }

    /// A theta element placed in the `(0, 0)` block; only consistent on `N0`.
    pub fn lift_base(&self, x: &ThetaElement) -> CoverAlgebraElement {
        let e = self.group.identity();
        x.map_keys(|t| CoverIndex { g: e.clone(), h: e.clone(), n: t.n.clone(), i: t.i.clone() })
    }

    /// Number of `(n, i)` with `|n|_inf <= bound`, `|i| <= bound` in `Hom(L_g, L_h)`.
    pub fn truncated_hom_dim(&self, g: &GroupElement, h: &GroupElement, bound: i64) -> u64 {
        let target = self.group.sub(h, g);
        let mut count = 0u64;
        for x in -bound..=bound {
            for y in -bound..=bound {
                if self.group.project(&Covector::new(x, y)) == target {
                    count += 2 * bound as u64 + 1;
                }
            }
        }
        count
    }
}

pub fn cover_compose(
    poly: &HeightedPolygon,
    sub: &Sublattice,
    x: &CoverAlgebraElement,
    y: &CoverAlgebraElement,
) -> Result<CoverAlgebraElement, McKayError> {
    CoverAlgebra::new(poly, sub).compose(x, y)
}

/// Heuristic: whether the cover's polygon has an interior lattice point, i.e.
/// whether some `m` in the interior of `Delta` pairs integrally with all of `N0`.
pub fn has_compact_divisor(poly: &HeightedPolygon, sub: &Sublattice) -> bool {
    let d = sub.index();
    let hull: Vec<LatticePoint> = poly.hull().into_iter().map(|i| poly.point(i).scale(&d)).collect();
    let [c0, c1] = sub.columns();
    let (lo_x, hi_x) = min_max(hull.iter().map(|p| &p.x));
    let (lo_y, hi_y) = min_max(hull.iter().map(|p| &p.y));
    // Candidates m = p / d with p in d * Delta.
    let mut px = lo_x;
    while px <= hi_x {
        let mut py = lo_y.clone();
        while py <= hi_y {
            let p = LatticePoint::new(px.clone(), py.clone());
            let integral = c0.pair(&p).is_multiple_of(&d) && c1.pair(&p).is_multiple_of(&d);
            if integral && strictly_inside(&hull, &p) {
                return true;
            }
            py += 1;
        }
        px += 1;
    }
    false
}

fn min_max<'a>(mut it: impl Iterator<Item = &'a BigInt>) -> (BigInt, BigInt) {
    let first = it.next().expect("nonempty hull").clone();
    it.fold((first.clone(), first), |(lo, hi), v| (lo.min(v.clone()), hi.max(v.clone())))
}

fn strictly_inside(ccw_hull: &[LatticePoint], p: &LatticePoint) -> bool {
    (0..ccw_hull.len()).all(|k| {
        let a = &ccw_hull[k];
        let b = &ccw_hull[(k + 1) % ccw_hull.len()];
        (b - a).cross(&(p - a)).is_positive()
    })
}
