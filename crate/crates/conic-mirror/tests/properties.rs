use conic_mirror::io::{parse_polygon, parse_rational_value, polygon_json, rational_json};
use conic_mirror::numerics::{moment_map, stratum_of, MomentParams, Patchwork, PatchworkParams};
use conic_mirror_core::geometry::{regular_triangulation, HeightedPolygon};
use conic_mirror_core::lattice::rat;
use proptest::prelude::*;

fn four_point() -> HeightedPolygon {
    HeightedPolygon::from_coords(&[(0, 0), (1, 0), (0, 1), (-1, -1)], vec![rat(-1, 4), rat(0, 1), rat(0, 1), rat(0, 1)])
        .unwrap()
}

proptest! {
    #[test]
    fn rationals_survive_json(num in -1_000_000i64..1_000_000, den in 1i64..10_000) {
        let q = rat(num, den);
        prop_assert_eq!(parse_rational_value(&rational_json(&q), "q").unwrap(), q);
    }

    #[test]
    fn polygons_survive_json(h in proptest::collection::vec((-50i64..50, 1i64..20), 4)) {
        let heights = h.iter().map(|&(n, d)| rat(n, d)).collect();
        let poly = four_point().with_heights(heights).unwrap();
        prop_assert_eq!(parse_polygon(&polygon_json(&poly)).unwrap(), poly);
    }

    #[test]
    fn moment_map_increases_in_u(eps in 0.01f64..5.0, h in 0.0f64..10.0, u in 0.0f64..10.0, du in 1e-3f64..5.0, chi in prop_oneof![Just(0.0), Just(1.0)]) {
        let params = MomentParams::new(eps, chi).unwrap();
        let h = if chi == 1.0 && u == 0.0 { h.max(1e-3) } else { h };
        prop_assert!(moment_map(&params, u + du, h).unwrap() > moment_map(&params, u, h).unwrap());
    }

    #[test]
    fn cutoffs_lie_in_unit_interval(x in -40.0f64..40.0, y in -40.0f64..40.0) {
        let poly = four_point();
        let params = PatchworkParams::new(&poly, 6f64.exp(), 0.05).unwrap();
        let pw = Patchwork::new(&poly, &params).unwrap();
        for a in 0..pw.len() {
            let phi = pw.phi(a, [x, y]);
            prop_assert!((0.0..=1.0).contains(&phi));
        }
    }

    #[test]
    fn every_point_has_exactly_one_stratum(x in -40.0f64..40.0, y in -40.0f64..40.0) {
        let poly = four_point();
        let tri = regular_triangulation(&poly).unwrap();
        let params = PatchworkParams::new(&poly, 6f64.exp(), 0.05).unwrap();
        let pw = Patchwork::new(&poly, &params).unwrap();
        prop_assert!(stratum_of(&pw, &tri, [x, y]).is_some());
    }
}
