use conic_mirror_core::geometry::{regular_triangulation, HeightedPolygon, Triangulation};
use conic_mirror_core::lattice::{rat, Covector};
use conic_mirror_core::mckay::{character_decomposition, CoverAlgebra, CoverAlgebraElement, CoverIndex, Sublattice};
use conic_mirror_core::sections::{check_section, degree_vector, enumerate_sections, shift_normalize, FramedSection};
use conic_mirror_core::theta::{ThetaElement, ThetaRing};
use num_bigint::BigInt;
use proptest::prelude::*;

fn star() -> (HeightedPolygon, Triangulation) {
    let poly = HeightedPolygon::from_coords(
        &[(0, 0), (1, 0), (0, 1), (-1, -1)],
        vec![rat(-1, 4), rat(0, 1), rat(0, 1), rat(0, 1)],
    )
    .unwrap();
    let tri = regular_triangulation(&poly).unwrap();
    (poly, tri)
}

fn simplex() -> HeightedPolygon {
    HeightedPolygon::from_coords(&[(0, 0), (1, 0), (0, 1)], vec![rat(0, 1); 3]).unwrap()
}

/// Valid star sections are `c + k * s0` with `s0` a generator of the
/// nonconstant direction; `s0` is read off the brute-force enumeration.
fn star_generator() -> FramedSection {
    let (poly, tri) = star();
    enumerate_sections(&poly, &tri, 1)
        .into_iter()
        .find(|s| !degree_vector(&poly, &tri, s).unwrap().is_trivial())
        .unwrap()
}

fn scaled(s: &FramedSection, k: i64) -> FramedSection {
    FramedSection { values: s.values.iter().map(|(&c, n)| (c, n.scale(&BigInt::from(k)))).collect() }
}

fn arb_section() -> impl Strategy<Value = FramedSection> {
    (-6i64..=6, -9i64..=9, -9i64..=9).prop_map(|(k, x, y)| {
        let (_, tri) = star();
        scaled(&star_generator(), k).add(&FramedSection::constant(&tri, &Covector::new(x, y)))
    })
}

fn arb_cover_entry(alg: &CoverAlgebra) -> impl Strategy<Value = CoverAlgebraElement> {
    let alg = alg.clone();
    (0usize..3, -3i64..=3, -3i64..=3, -2i64..=2).prop_map(move |(g, x, y, i)| {
        let group = alg.group();
        let g = group.elements()[g].clone();
        let n = Covector::new(x, y);
        let h = group.add(&g, &group.project(&n));
        CoverAlgebraElement::basis(CoverIndex { g, h, n, i: BigInt::from(i) })
    })
}

fn z3_algebra() -> CoverAlgebra {
    CoverAlgebra::new(&simplex(), &Sublattice::from_columns((1, 1), (0, 3)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn degrees_are_shift_invariant_and_additive(s in arb_section(), t in arb_section()) {
        let (poly, tri) = star();
        prop_assert!(check_section(&poly, &tri, &s).unwrap());
        let sum = s.add(&t);
        prop_assert!(check_section(&poly, &tri, &sum).unwrap());
        let ds = degree_vector(&poly, &tri, &s).unwrap();
        let dt = degree_vector(&poly, &tri, &t).unwrap();
        let dsum = degree_vector(&poly, &tri, &sum).unwrap();
        prop_assert_eq!(&degree_vector(&poly, &tri, &shift_normalize(&s)).unwrap(), &ds);
        for (id, d) in &dsum.degrees {
            prop_assert_eq!(d, &(&ds.degrees[id] + &dt.degrees[id]));
        }
    }

    #[test]
    fn cover_composition_is_associative(
        (x, y, z) in {
            let alg = z3_algebra();
            (arb_cover_entry(&alg), arb_cover_entry(&alg), arb_cover_entry(&alg))
        }
    ) {
        let alg = z3_algebra();
        let left = alg.compose(&alg.compose(&x, &y).unwrap(), &z).unwrap();
        let right = alg.compose(&x, &alg.compose(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn graded_pieces_multiply_into_sum_coset(a in (-4i64..=4, -4i64..=4, -2i64..=2), b in (-4i64..=4, -4i64..=4, -2i64..=2)) {
        let alg = z3_algebra();
        let group = alg.group();
        let ring = ThetaRing::new(&simplex());
        let x = ThetaRing::gen(Covector::new(a.0, a.1), a.2);
        let y = ThetaRing::gen(Covector::new(b.0, b.1), b.2);
        let target = group.add(&group.project(&Covector::new(a.0, a.1)), &group.project(&Covector::new(b.0, b.1)));
        let pieces = character_decomposition(group, &ring.multiply(&x, &y));
        prop_assert!(pieces.keys().all(|k| *k == target));
    }
}

#[test]
fn trivial_cover_is_the_theta_ring() {
    let poly = simplex();
    let alg = CoverAlgebra::new(&poly, &Sublattice::full());
    let ring = ThetaRing::new(&poly);
    for (a, b) in [((1, 0, 0), (0, 1, 0)), ((2, -1, 1), (-3, 2, -2)), ((-1, -1, 0), (1, 1, 4))] {
        let x: ThetaElement = ThetaRing::gen(Covector::new(a.0, a.1), a.2);
        let y: ThetaElement = ThetaRing::gen(Covector::new(b.0, b.1), b.2);
        let composed = alg.compose(&alg.lift_base(&x), &alg.lift_base(&y)).unwrap();
        assert_eq!(composed, alg.lift_base(&ring.multiply(&x, &y)));
    }
}
