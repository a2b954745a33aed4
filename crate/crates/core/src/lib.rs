//! Exact combinatorial core for mirror symmetry of conic bundles over toric
//! surfaces: heighted polygons and their coherent triangulations, tropical
//! curves, the theta ring of the zero section, the mirror coordinate ring,
//! framed sections and finite covers.
//!
//! Everything here is `no_std` with `alloc`; arithmetic is exact.

#![no_std]

extern crate alloc;

pub mod geometry;
pub mod lattice;
mod lp;
pub mod mckay;
pub mod mirror;
pub mod sections;
pub mod sparse;
pub mod theta;
pub mod tropical;

pub use geometry::{
    coherence_witness, is_adapted, is_unimodular, regular_triangulation, Edge, GeometryError, HeightedPolygon,
    Triangulation,
};
pub use lattice::{Covector, LatticePoint, Rational, RationalPoint};
pub use mckay::{cover_compose, quotient, CoverAlgebra, CoverAlgebraElement, McKayError, QuotientGroup, Sublattice};
pub use mirror::{MirrorBasisIndex, MirrorElement, MirrorError, MirrorRing, RawCharacterSum};
pub use sections::{check_section, degree_vector, enumerate_sections, shift_normalize, FramedSection, LineBundleClass, SectionError};
pub use sparse::SparseVec;
pub use theta::{mir, mir_inverse, theta_multiply, verify_mirror_iso, ThetaElement, ThetaGen, ThetaRing};
pub use tropical::{tropical_curve, TropicalCurve, TropicalError, TropicalPolynomial};
