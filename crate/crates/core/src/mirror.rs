//! The mirror coordinate ring `H^0(O_{X_Sigma})[p^{-1}]`.
//!
//! `X_Sigma` is the toric variety of the fan over the triangulation; only the
//! dual cone `C = {(m, k) : <m, a> + k >= 0 for all a in A}` and the support
//! function `l1(n) = max_a <n, a>` are needed. The ring has the basis
//! `p^i chi_{-n, l1(n)}` for `(n, i)` in `N x Z`, where `p = chi_{0,1} - 1`.
//!
//! Two multiplication engines live here:
//!
//! * [`MirrorRing::multiply`] works directly on the basis with the closed form
//!   `e_{n,i} e_{n',i'} = sum_j C(l2, j) e_{n+n', i+i'+j}`,
//!   `l2 = l1(n) + l1(n') - l1(n + n')`;
//! * [`MirrorRing::oracle_multiply`] multiplies raw characters additively and
//!   [`MirrorRing::canonicalize`] rewrites the result on the basis using only
//!   `chi_{0,1} = 1 + p` and the cone inequalities.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::geometry::HeightedPolygon;
use crate::lattice::{int, Covector, LatticePoint, Rational};
use crate::sparse::{binomial_row, SparseVec};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum MirrorError {
    #[error("NotRegular: character ({m}, {k}) lies outside the cone")]
    NotRegular { m: Covector, k: BigInt },
}

/// The support function of `Delta`, evaluated on its hull vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Support {
    vertices: Vec<LatticePoint>,
}

impl Support {
    pub fn new(poly: &HeightedPolygon) -> Self {
        Self { vertices: poly.hull().into_iter().map(|i| poly.point(i).clone()).collect() }
    }

    /// `l1(n) = min { l : (-n, l) in C } = max_a <n, a>`.
    pub fn ell1(&self, n: &Covector) -> BigInt {
        self.vertices.iter().map(|a| n.pair(a)).max().expect("polygon has vertices")
    }

    /// `l2(n, n') = l1(n) + l1(n') - l1(n + n') >= 0`.
    pub fn ell2(&self, n: &Covector, n2: &Covector) -> BigInt {
        self.ell1(n) + self.ell1(n2) - self.ell1(&(n + n2))
    }
}

pub fn ell1(poly: &HeightedPolygon, n: &Covector) -> BigInt {
    Support::new(poly).ell1(n)
}

pub fn ell2(poly: &HeightedPolygon, n: &Covector, n2: &Covector) -> BigInt {
    Support::new(poly).ell2(n, n2)
}

/// Index of the basis element `p^i chi_{-n, l1(n)}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MirrorBasisIndex {
    pub n: Covector,
    pub i: BigInt,
}

impl MirrorBasisIndex {
    pub fn new(n: Covector, i: impl Into<BigInt>) -> Self {
        Self { n, i: i.into() }
    }
}

pub type MirrorElement = SparseVec<MirrorBasisIndex>;

/// `p^i chi_{m,k}` with `(m, k)` in the cone; no basis normalization.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RawIndex {
    pub m: Covector,
    pub k: BigInt,
    pub i: BigInt,
}

pub type RawCharacterSum = SparseVec<RawIndex>;

pub(crate) fn binomial_len(l: &BigInt) -> u64 {
    l.to_u64().expect("binomial exponent is a small non-negative integer")
}

#[derive(Clone, Debug)]
pub struct MirrorRing {
    poly: HeightedPolygon,
    support: Support,
}

impl MirrorRing {
    pub fn new(poly: &HeightedPolygon) -> Self {
        Self { poly: poly.clone(), support: Support::new(poly) }
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn one() -> MirrorElement {
        MirrorElement::basis(MirrorBasisIndex::new(Covector::zero(), 0))
    }

    /// The anticanonical function `p`, on the basis.
    pub fn p() -> MirrorElement {
        MirrorElement::basis(MirrorBasisIndex::new(Covector::zero(), 1))
    }

    /// Closed-form product on the canonical basis.
    pub fn multiply(&self, x: &MirrorElement, y: &MirrorElement) -> MirrorElement {
        let mut out = MirrorElement::zero();
        for (a, ca) in x.iter() {
            for (b, cb) in y.iter() {
                let l2 = self.support.ell2(&a.n, &b.n);
                let n = &a.n + &b.n;
                let base_i = &a.i + &b.i;
                let c = ca * cb;
                for (j, binom) in binomial_row(binomial_len(&l2)).into_iter().enumerate() {
                    out.add_term(MirrorBasisIndex { n: n.clone(), i: &base_i + j }, &c * int(binom));
                }
            }
        }
        out
    }

    /// `(n, i) -> p^i chi_{-n, l1(n)}`.
    pub fn embed(&self, x: &MirrorElement) -> RawCharacterSum {
        x.map_keys(|idx| RawIndex { m: -&idx.n, k: self.support.ell1(&idx.n), i: idx.i.clone() })
    }

    /// Whether `(m, k)` satisfies every cone inequality `<m, a> + k >= 0`, `a in A`.
    pub fn in_cone(&self, m: &Covector, k: &BigInt) -> bool {
        self.poly.points().iter().all(|a| !(m.pair(a) + k).is_negative())
    }

    fn check_regular(&self, x: &RawCharacterSum) -> Result<(), MirrorError> {
        for idx in x.keys() {
            if !self.in_cone(&idx.m, &idx.k) {
                return Err(MirrorError::NotRegular { m: idx.m.clone(), k: idx.k.clone() });
            }
        }
        Ok(())
    }

    /// Character multiplication: `chi_{m,k} chi_{m',k'} = chi_{m+m',k+k'}`,
    /// powers of `p` add.
    pub fn oracle_multiply(&self, x: &RawCharacterSum, y: &RawCharacterSum) -> Result<RawCharacterSum, MirrorError> {
        self.check_regular(x)?;
        self.check_regular(y)?;
        let mut out = RawCharacterSum::zero();
        for (a, ca) in x.iter() {
            for (b, cb) in y.iter() {
                out.add_term(RawIndex { m: &a.m + &b.m, k: &a.k + &b.k, i: &a.i + &b.i }, ca * cb);
            }
        }
        Ok(out)
    }

    /// Rewrites raw characters on the canonical basis.
    ///
    /// The lowest admissible level of `chi_{m, .}` is found by scanning every
    /// cone inequality; surplus levels are expanded through `chi_{0,1} = 1 + p`.
    pub fn canonicalize(&self, x: &RawCharacterSum) -> Result<MirrorElement, MirrorError> {
        self.check_regular(x)?;
        let mut out = MirrorElement::zero();
        for (idx, c) in x.iter() {
            let floor = self
                .poly
                .points()
                .iter()
                .map(|a| -idx.m.pair(a))
                .max()
                .expect("polygon has points");
            let slack = &idx.k - floor;
            let n = -&idx.m;
            for (j, binom) in binomial_row(binomial_len(&slack)).into_iter().enumerate() {
                out.add_term(MirrorBasisIndex { n: n.clone(), i: &idx.i + j }, c * int(binom));
            }
        }
        Ok(out)
    }
}

/// The standard simplex with zero heights, the Newton polygon of `1 + w1 + w2`,
/// together with the coordinate names of its mirror `Spec C[x,y,z][(xyz-1)^{-1}]`.
///
/// The names sit on the canonical basis as `x = e_{(-1,0),0}`,
/// `y = e_{(0,-1),0}`, `z = e_{(1,1),0}`, i.e. the characters `chi_{(1,0),0}`,
/// `chi_{(0,1),0}` and `chi_{(-1,-1),1}` that generate the cone. With this
/// choice `xyz = chi_{0,1} = 1 + p`, so `xyz - 1 = p` is invertible.
pub fn c3_preset() -> (HeightedPolygon, [(&'static str, MirrorBasisIndex); 3]) {
    let poly = HeightedPolygon::from_coords(&[(0, 0), (1, 0), (0, 1)], alloc::vec![Rational::zero(); 3])
        .expect("standard simplex is a valid polygon");
    let names = [
        ("x", MirrorBasisIndex::new(Covector::new(-1, 0), 0)),
        ("y", MirrorBasisIndex::new(Covector::new(0, -1), 0)),
        ("z", MirrorBasisIndex::new(Covector::new(1, 1), 0)),
    ];
    (poly, names)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rat;
    use alloc::vec;

    fn simplex() -> HeightedPolygon {
        HeightedPolygon::from_coords(&[(0, 0), (1, 0), (0, 1)], vec![rat(0, 1); 3]).unwrap()
    }

    fn e(x: i64, y: i64, i: i64) -> MirrorElement {
        MirrorElement::basis(MirrorBasisIndex::new(Covector::new(x, y), i))
    }

    #[test]
    fn ell_examples() {
        let p = simplex();
        assert_eq!(ell1(&p, &Covector::new(0, 0)), BigInt::from(0));
        assert_eq!(ell1(&p, &Covector::new(1, 0)), BigInt::from(1));
        assert_eq!(ell1(&p, &Covector::new(-1, -1)), BigInt::from(0));
        assert_eq!(ell2(&p, &Covector::new(1, 0), &Covector::new(0, 1)), BigInt::from(1));
        assert_eq!(ell2(&p, &Covector::new(1, 0), &Covector::new(-1, 0)), BigInt::from(1));
        assert_eq!(ell2(&p, &Covector::new(5, -3), &Covector::zero()), BigInt::from(0));
    }

    #[test]
    fn multiply_examples() {
        let ring = MirrorRing::new(&simplex());
        assert_eq!(ring.multiply(&e(1, 0, 0), &e(0, 1, 0)), e(1, 1, 0).plus(&e(1, 1, 1)));
        let x = e(2, -1, 3).plus(&e(0, 1, -2).scaled(&rat(1, 3)));
        assert_eq!(ring.multiply(&MirrorRing::one(), &x), x);
        assert_eq!(ring.multiply(&e(-1, -1, 0), &e(-1, -1, 0)), e(-2, -2, 0));
    }

    #[test]
    fn oracle_examples() {
        let ring = MirrorRing::new(&simplex());
        let raw = ring.oracle_multiply(&ring.embed(&e(1, 0, 0)), &ring.embed(&e(0, 1, 0))).unwrap();
        let expect_raw = RawCharacterSum::basis(RawIndex { m: Covector::new(-1, -1), k: BigInt::from(2), i: BigInt::zero() });
        assert_eq!(raw, expect_raw);
        assert_eq!(ring.canonicalize(&raw).unwrap(), e(1, 1, 0).plus(&e(1, 1, 1)));

        let chi01 = RawCharacterSum::basis(RawIndex { m: Covector::zero(), k: BigInt::from(1), i: BigInt::zero() });
        assert_eq!(ring.canonicalize(&chi01).unwrap(), e(0, 0, 0).plus(&e(0, 0, 1)));
        let chi00 = RawCharacterSum::basis(RawIndex { m: Covector::zero(), k: BigInt::zero(), i: BigInt::zero() });
        assert_eq!(ring.canonicalize(&chi00).unwrap(), MirrorRing::one());
    }

    #[test]
    fn oracle_rejects_characters_outside_the_cone() {
        let ring = MirrorRing::new(&simplex());
        let bad = RawCharacterSum::basis(RawIndex { m: Covector::new(-1, 0), k: BigInt::zero(), i: BigInt::zero() });
        assert!(matches!(ring.canonicalize(&bad), Err(MirrorError::NotRegular { .. })));
        assert!(ring.oracle_multiply(&bad, &bad).is_err());
    }

    #[test]
    fn canonicalize_inverts_embed() {
        let ring = MirrorRing::new(&simplex());
        let x = e(3, -2, 1).plus(&e(-1, 4, -5).scaled(&rat(-2, 7)));
        assert_eq!(ring.canonicalize(&ring.embed(&x)).unwrap(), x);
    }

    #[test]
    fn c3_relation() {
        let (poly, names) = c3_preset();
        let ring = MirrorRing::new(&poly);
        let [x, y, z] = names.map(|(_, idx)| MirrorElement::basis(idx));
        let xyz = ring.multiply(&ring.multiply(&x, &y), &z);
        assert_eq!(xyz.minus(&MirrorRing::one()), MirrorRing::p());
        // The generators are the cone's primitive characters.
        for (_, idx) in c3_preset().1 {
            let raw = ring.embed(&MirrorElement::basis(idx));
            let (key, _) = raw.iter().next().unwrap();
            assert!(ring.in_cone(&key.m, &key.k));
        }
    }
}
