//! SVG rendering of a tropical curve, optionally over an amoeba point cloud.

use std::fmt::Write;

use conic_mirror_core::geometry::HeightedPolygon;
use conic_mirror_core::lattice::rational_to_f64;
use conic_mirror_core::tropical::TropicalCurve;
use num_traits::ToPrimitive;

use crate::numerics::{clipped_parts, Viewport};

const SCALE: f64 = 60.0;
const MARGIN: f64 = 20.0;

struct Frame {
    viewport: Viewport,
}

impl Frame {
    fn width(&self) -> f64 {
        (self.viewport.x[1] - self.viewport.x[0]) * SCALE + 2.0 * MARGIN
    }

    fn height(&self) -> f64 {
        (self.viewport.y[1] - self.viewport.y[0]) * SCALE + 2.0 * MARGIN
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (MARGIN + (p[0] - self.viewport.x[0]) * SCALE, MARGIN + (self.viewport.y[1] - p[1]) * SCALE)
    }
}

/// Centroid of a coarse grid sample of each chamber inside the viewport,
/// keyed by point index. Chambers are convex, so the centroid lies inside.
fn chamber_label_points(poly: &HeightedPolygon, viewport: &Viewport) -> Vec<(usize, [f64; 2])> {
    const STEPS: usize = 48;
    let heights: Vec<f64> = poly.heights().iter().map(rational_to_f64).collect();
    let points: Vec<[f64; 2]> = poly
        .points()
        .iter()
        .map(|m| [m.x.to_f64().unwrap_or(0.0), m.y.to_f64().unwrap_or(0.0)])
        .collect();
    let mut sums = vec![([0.0f64; 2], 0usize); poly.len()];
    for i in 0..=STEPS {
        for j in 0..=STEPS {
            let n = [
                viewport.x[0] + (viewport.x[1] - viewport.x[0]) * i as f64 / STEPS as f64,
                viewport.y[0] + (viewport.y[1] - viewport.y[0]) * j as f64 / STEPS as f64,
            ];
            let values: Vec<f64> = points.iter().zip(&heights).map(|(a, h)| a[0] * n[0] + a[1] * n[1] - h).collect();
            let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let winners: Vec<usize> = (0..values.len()).filter(|&k| values[k] > best - 1e-9).collect();
            if let [k] = winners[..] {
                sums[k].0[0] += n[0];
                sums[k].0[1] += n[1];
                sums[k].1 += 1;
            }
        }
    }
    sums.into_iter()
        .enumerate()
        .filter(|(_, (_, count))| *count > 0)
        .map(|(k, (s, count))| (k, [s[0] / count as f64, s[1] / count as f64]))
        .collect()
}

/// Renders vertices, bounded edges (class `edge`), clipped legs (class `leg`)
/// and chamber labels; `cloud` points are drawn underneath (class `amoeba`).
pub fn render(poly: &HeightedPolygon, curve: &TropicalCurve, viewport: &Viewport, cloud: Option<&[[f64; 2]]>) -> String {
    let frame = Frame { viewport: *viewport };
    let mut out = String::new();
    let (w, h) = (frame.width(), frame.height());
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1}" height="{h:.1}" viewBox="0 0 {w:.1} {h:.1}">"#
    );
    let _ = writeln!(
        out,
        "<style>.edge{{stroke:#222;stroke-width:2}}.leg{{stroke:#1f5fbf;stroke-width:2}}.vertex{{fill:#c0392b}}.amoeba{{fill:#999;fill-opacity:0.4}}.chamber{{font:12px sans-serif;fill:#555}}</style>"
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{w:.1}" height="{h:.1}" fill="white"/>"#);

    if let Some(cloud) = cloud {
        let _ = writeln!(out, r#"<g id="amoeba">"#);
        for p in cloud.iter().filter(|p| viewport.contains(**p)) {
            let (x, y) = frame.map(*p);
            let _ = writeln!(out, r#"<circle class="amoeba" cx="{x:.2}" cy="{y:.2}" r="0.8"/>"#);
        }
        let _ = writeln!(out, "</g>");
    }

    let (edges, legs) = clipped_parts(curve, viewport);
    let line = |out: &mut String, class: &str, (a, b): ([f64; 2], [f64; 2])| {
        let (x1, y1) = frame.map(a);
        let (x2, y2) = frame.map(b);
        let _ = writeln!(out, r#"<line class="{class}" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}"/>"#);
    };
    for s in edges {
        line(&mut out, "edge", s);
    }
    for s in legs {
        line(&mut out, "leg", s);
    }

    for v in curve.vertices() {
        let p = v.point.to_f64();
        if viewport.contains(p) {
            let (x, y) = frame.map(p);
            let _ = writeln!(out, r#"<circle class="vertex" cx="{x:.2}" cy="{y:.2}" r="4"/>"#);
        }
    }

    for (k, p) in chamber_label_points(poly, viewport) {
        let (x, y) = frame.map(p);
        let m = poly.point(k);
        let _ = writeln!(out, r#"<text class="chamber" x="{x:.2}" y="{y:.2}">C({},{})</text>"#, m.x, m.y);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use conic_mirror_core::geometry::regular_triangulation;
    use conic_mirror_core::lattice::rat;
    use conic_mirror_core::tropical::tropical_curve;

    #[test]
    fn four_point_picture() {
        let poly = HeightedPolygon::from_coords(
            &[(0, 0), (1, 0), (0, 1), (-1, -1)],
            vec![rat(-1, 4), rat(0, 1), rat(0, 1), rat(0, 1)],
        )
        .unwrap();
        let curve = tropical_curve(&poly, &regular_triangulation(&poly).unwrap()).unwrap();
        let vp = Viewport::around(&curve);
        let svg = render(&poly, &curve, &vp, Some(&[[0.0, 0.0], [100.0, 100.0]]));
        assert_eq!(svg.matches(r#"class="leg""#).count(), 3);
        assert_eq!(svg.matches(r#"class="edge""#).count(), 3);
        assert_eq!(svg.matches(r#"class="vertex""#).count(), 3);
        assert_eq!(svg.matches(r#"class="chamber""#).count(), 4);
        assert_eq!(svg.matches(r#"<circle class="amoeba""#).count(), 1);
        assert!(svg.ends_with("</svg>\n"));
    }
}
