//! The wrapped Floer ring of the zero section, on generators `p_{n,i}`.
//!
//! Structure constants: `p_{n,i} p_{n',i'} = sum_{j=0}^{l2} C(l2, j) p_{n+n', i+i'+j}`
//! with `l2 = l2(n, n')`. The mirror map sends `p_{n,i}` to `p^i chi_{-n, l1(n)}`.

use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::geometry::HeightedPolygon;
use crate::lattice::{int, Covector};
use crate::mirror::{binomial_len, MirrorBasisIndex, MirrorElement, MirrorRing, Support};
use crate::sparse::{binomial_row, SparseVec};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ThetaGen {
    pub n: Covector,
    pub i: BigInt,
}

impl ThetaGen {
    pub fn new(n: Covector, i: impl Into<BigInt>) -> Self {
        Self { n, i: i.into() }
    }
}

pub type ThetaElement = SparseVec<ThetaGen>;

#[derive(Clone, Debug)]
pub struct ThetaRing {
    support: Support,
}

impl ThetaRing {
    pub fn new(poly: &HeightedPolygon) -> Self {
        Self { support: Support::new(poly) }
    }

    pub fn one() -> ThetaElement {
        ThetaElement::basis(ThetaGen::new(Covector::zero(), 0))
    }

    pub fn gen(n: Covector, i: impl Into<BigInt>) -> ThetaElement {
        ThetaElement::basis(ThetaGen::new(n, i))
    }

    /// Product of two generators.
    pub fn multiply_gens(&self, a: &ThetaGen, b: &ThetaGen) -> ThetaElement {
        let mut out = ThetaElement::zero();
        self.accumulate(&mut out, a, b, &int(1));
        out
    }

    fn accumulate(&self, out: &mut ThetaElement, a: &ThetaGen, b: &ThetaGen, c: &crate::lattice::Rational) {
        let m = self.support.ell2(&a.n, &b.n);
        let n = &a.n + &b.n;
        let i = &a.i + &b.i;
        for (j, binom) in binomial_row(binomial_len(&m)).into_iter().enumerate() {
            out.add_term(ThetaGen { n: n.clone(), i: &i + j }, c * int(binom));
        }
    }

    pub fn multiply(&self, x: &ThetaElement, y: &ThetaElement) -> ThetaElement {
        let mut out = ThetaElement::zero();
        for (a, ca) in x.iter() {
            for (b, cb) in y.iter() {
                self.accumulate(&mut out, a, b, &(ca * cb));
            }
        }
        out
    }
}

pub fn theta_multiply(poly: &HeightedPolygon, x: &ThetaElement, y: &ThetaElement) -> ThetaElement {
    ThetaRing::new(poly).multiply(x, y)
}

/// `p_{n,i} -> p^i chi_{-n, l1(n)}`, which is the canonical basis element `(n, i)`.
pub fn mir(x: &ThetaElement) -> MirrorElement {
    x.map_keys(|g| MirrorBasisIndex { n: g.n.clone(), i: g.i.clone() })
}

pub fn mir_inverse(x: &MirrorElement) -> ThetaElement {
    x.map_keys(|e| ThetaGen { n: e.n.clone(), i: e.i.clone() })
}

/// All generators with `|n|_inf <= bound_n` and `|i| <= bound_i`.
pub fn generator_box(bound_n: i64, bound_i: i64) -> Vec<ThetaGen> {
    let mut out = Vec::new();
    for x in -bound_n..=bound_n {
        for y in -bound_n..=bound_n {
            for i in -bound_i..=bound_i {
                out.push(ThetaGen::new(Covector::new(x, y), i));
            }
        }
    }
    out
}

/// Whether `mir(a b) = mir(a) mir(b)` when the right side is computed by
/// multiplying characters and re-expanding on the basis.
pub fn check_pair(theta: &ThetaRing, mirror: &MirrorRing, a: &ThetaGen, b: &ThetaGen) -> bool {
    let lhs = mir(&theta.multiply_gens(a, b));
    let xa = mirror.embed(&mir(&ThetaElement::basis(a.clone())));
    let xb = mirror.embed(&mir(&ThetaElement::basis(b.clone())));
    match mirror.oracle_multiply(&xa, &xb).and_then(|raw| mirror.canonicalize(&raw)) {
        Ok(rhs) => lhs == rhs,
        Err(_) => false,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MirrorIsoReport {
    pub pairs_checked: u64,
    pub failures: Vec<(ThetaGen, ThetaGen)>,
}

impl MirrorIsoReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(mut self, other: MirrorIsoReport) -> MirrorIsoReport {
        self.pairs_checked += other.pairs_checked;
        self.failures.extend(other.failures);
        self
    }
}

/// Checks the homomorphism property of `mir` on every ordered pair of
/// generators in the box. Bounds are clamped below at zero.
pub fn verify_mirror_iso(poly: &HeightedPolygon, bound_n: i64, bound_i: i64) -> MirrorIsoReport {
    let theta = ThetaRing::new(poly);
    let mirror = MirrorRing::new(poly);
    let gens = generator_box(bound_n.max(0), bound_i.max(0));
    let mut report = MirrorIsoReport::default();
    for a in &gens {
        report = report.merge(verify_row(&theta, &mirror, a, &gens));
    }
    report
}

/// One row of [`verify_mirror_iso`]: `a` against every generator in `gens`.
pub fn verify_row(theta: &ThetaRing, mirror: &MirrorRing, a: &ThetaGen, gens: &[ThetaGen]) -> MirrorIsoReport {
    let mut report = MirrorIsoReport::default();
    for b in gens {
        report.pairs_checked += 1;
        if !check_pair(theta, mirror, a, b) {
            report.failures.push((a.clone(), b.clone()));
        }
    }
    report
}
