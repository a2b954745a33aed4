//! Floating-point side: patchworking polynomials, tropical localization,
//! amoeba sampling and the moment map of the conic fibration.
//!
//! Points of `N_R` are passed in `r = log|w|` coordinates unless a function
//! says "log_t units"; the two differ by the factor `L = log t`.

use std::f64::consts::PI;

use conic_mirror_core::geometry::{HeightedPolygon, Triangulation};
use conic_mirror_core::lattice::{rational_to_f64, LatticePoint};
use conic_mirror_core::tropical::TropicalCurve;
use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum NumericsError {
    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),
    #[error("UndefinedAtOrigin: the moment map is undefined at u = h = 0 when chi > 0 (limit along u = 0 is 0)")]
    UndefinedAtOrigin,
    #[error("RootFindingFailure: {0}")]
    RootFindingFailure(String),
}

/// `t`, the localization width `epsilon` and the coefficients `c_alpha`.
#[derive(Clone, Debug, PartialEq)]
pub struct PatchworkParams {
    pub t: f64,
    pub epsilon_loc: f64,
    /// One coefficient per point of `A`, in input order.
    pub coefficients: Vec<Complex64>,
}

impl PatchworkParams {
    /// Unit coefficients.
    pub fn new(poly: &HeightedPolygon, t: f64, epsilon_loc: f64) -> Result<Self, NumericsError> {
        Self::with_coefficients(t, epsilon_loc, vec![Complex64::new(1.0, 0.0); poly.len()])
    }

    pub fn with_coefficients(t: f64, epsilon_loc: f64, coefficients: Vec<Complex64>) -> Result<Self, NumericsError> {
        if !(t > 1.0 && t.is_finite()) {
            return Err(NumericsError::InvalidParameter(format!("t must be a finite number > 1, got {t}")));
        }
        if !(epsilon_loc > 0.0 && epsilon_loc.is_finite()) {
            return Err(NumericsError::InvalidParameter(format!("epsilon_loc must be > 0, got {epsilon_loc}")));
        }
        Ok(Self { t, epsilon_loc, coefficients })
    }

    pub fn log_t(&self) -> f64 {
        self.t.ln()
    }
}

/// Quintic smoothstep on `[0, 1]`, clamped outside.
pub fn smoothstep(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        x * x * x * (x * (6.0 * x - 15.0) + 10.0)
    }
}

/// A closed convex region `{x : a_k . x >= b_k}`.
#[derive(Clone, Debug)]
struct Polyhedron {
    constraints: Vec<([f64; 2], f64)>,
}

impl Polyhedron {
    fn feasible(&self, p: [f64; 2]) -> bool {
        self.constraints.iter().all(|(a, b)| {
            let v = a[0] * p[0] + a[1] * p[1];
            let tol = 1e-9 * (1.0 + b.abs() + (a[0].abs() + a[1].abs()) * (p[0].abs() + p[1].abs()));
            v >= b - tol
        })
    }

    /// Euclidean distance; infinite for an empty region.
    fn distance(&self, p: [f64; 2]) -> f64 {
        if self.feasible(p) {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        let cs = &self.constraints;
        for (a, b) in cs {
            let nn = a[0] * a[0] + a[1] * a[1];
            let s = (b - (a[0] * p[0] + a[1] * p[1])) / nn;
            let q = [p[0] + s * a[0], p[1] + s * a[1]];
            if self.feasible(q) {
                best = best.min(dist(p, q));
            }
        }
        for i in 0..cs.len() {
            for j in i + 1..cs.len() {
                let ((a, b), (c, d)) = (cs[i], cs[j]);
                let det = a[0] * c[1] - a[1] * c[0];
                if det.abs() < 1e-14 {
                    continue;
                }
                let q = [(b * c[1] - a[1] * d) / det, (a[0] * d - b * c[0]) / det];
                if self.feasible(q) {
                    best = best.min(dist(p, q));
                }
            }
        }
        best
    }
}

fn dist(p: [f64; 2], q: [f64; 2]) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

/// Precomputed float data for `h_t`, `h_{t,s}` and the cutoffs `phi_alpha`.
#[derive(Clone, Debug)]
pub struct Patchwork {
    exponents: Vec<[i64; 2]>,
    /// `c_alpha t^{-nu(alpha)}`.
    weights: Vec<Complex64>,
    /// `C_{alpha,t}` in `r` coordinates.
    chambers: Vec<Polyhedron>,
    params: PatchworkParams,
}

impl Patchwork {
    pub fn new(poly: &HeightedPolygon, params: &PatchworkParams) -> Result<Self, NumericsError> {
        if params.coefficients.len() != poly.len() {
            return Err(NumericsError::InvalidParameter(format!(
                "{} coefficients for {} points",
                params.coefficients.len(),
                poly.len()
            )));
        }
        let l = params.log_t();
        let exponents: Vec<[i64; 2]> = poly
            .points()
            .iter()
            .map(|m| {
                let x = m.x.to_i64().ok_or_else(|| NumericsError::InvalidParameter("exponent out of range".into()))?;
                let y = m.y.to_i64().ok_or_else(|| NumericsError::InvalidParameter("exponent out of range".into()))?;
                Ok([x, y])
            })
            .collect::<Result<_, NumericsError>>()?;
        let nu: Vec<f64> = poly.heights().iter().map(rational_to_f64).collect();
        let weights = params
            .coefficients
            .iter()
            .zip(&nu)
            .map(|(c, v)| c * (-v * l).exp())
            .collect();
        let chambers = (0..exponents.len())
            .map(|a| Polyhedron {
                constraints: (0..exponents.len())
                    .filter(|&b| b != a)
                    .map(|b| {
                        let d = [(exponents[a][0] - exponents[b][0]) as f64, (exponents[a][1] - exponents[b][1]) as f64];
                        (d, l * (nu[a] - nu[b]))
                    })
                    .collect(),
            })
            .collect();
        Ok(Self { exponents, weights, chambers, params: params.clone() })
    }

    pub fn params(&self) -> &PatchworkParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    /// `d(r, C_{alpha,t})`.
    pub fn chamber_distance(&self, alpha: usize, r: [f64; 2]) -> f64 {
        self.chambers[alpha].distance(r)
    }

    /// The cutoff `phi_alpha`: 0 within `eps L / 2` of `C_{alpha,t}`, 1 beyond
    /// `eps L`, quintic smoothstep in between.
    pub fn phi(&self, alpha: usize, r: [f64; 2]) -> f64 {
        let width = self.params.epsilon_loc * self.params.log_t();
        let d = self.chamber_distance(alpha, r);
        smoothstep((d - width / 2.0) / (width / 2.0))
    }

    /// `c_alpha t^{-nu(alpha)} w^alpha`.
    pub fn term(&self, alpha: usize, w: [Complex64; 2]) -> Complex64 {
        let [a, b] = self.exponents[alpha];
        self.weights[alpha] * w[0].powi(a as i32) * w[1].powi(b as i32)
    }

    pub fn h_t(&self, w: [Complex64; 2]) -> Complex64 {
        (0..self.len()).map(|a| self.term(a, w)).sum()
    }

    /// `sum_alpha c_alpha t^{-nu(alpha)} (1 - s phi_alpha(Log w)) w^alpha`.
    pub fn h_ts(&self, s: f64, w: [Complex64; 2]) -> Complex64 {
        let r = log_abs(w);
        (0..self.len()).map(|a| self.term(a, w) * (1.0 - s * self.phi(a, r))).sum()
    }

    pub fn h_localized(&self, w: [Complex64; 2]) -> Complex64 {
        self.h_ts(1.0, w)
    }

    /// Indices `alpha` with `phi_alpha(r) != 1`, sorted.
    pub fn stratum(&self, r: [f64; 2]) -> Vec<usize> {
        (0..self.len()).filter(|&a| self.phi(a, r) != 1.0).collect()
    }

    /// `sum |term|`, the scale for relative residuals.
    pub fn term_scale(&self, w: [Complex64; 2]) -> f64 {
        (0..self.len()).map(|a| self.term(a, w).norm()).sum()
    }
}

pub fn log_abs(w: [Complex64; 2]) -> [f64; 2] {
    [w[0].norm().ln(), w[1].norm().ln()]
}

/// `phi_alpha(n)` with `n` in `r = log|w|` coordinates.
pub fn phi_alpha(poly: &HeightedPolygon, params: &PatchworkParams, alpha: &LatticePoint, n: [f64; 2]) -> Result<f64, NumericsError> {
    let idx = poly
        .index_of(alpha)
        .ok_or_else(|| NumericsError::InvalidParameter(format!("{alpha} is not a point of A")))?;
    Ok(Patchwork::new(poly, params)?.phi(idx, n))
}

pub fn h_localized(poly: &HeightedPolygon, params: &PatchworkParams, w: [Complex64; 2]) -> Result<Complex64, NumericsError> {
    Ok(Patchwork::new(poly, params)?.h_localized(w))
}

pub fn h_ts(poly: &HeightedPolygon, params: &PatchworkParams, s: f64, w: [Complex64; 2]) -> Result<Complex64, NumericsError> {
    Ok(Patchwork::new(poly, params)?.h_ts(s, w))
}

/// A face of the triangulation, as sorted point indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Face {
    Vertex(usize),
    Edge([usize; 2]),
    Cell([usize; 3]),
}

impl Face {
    pub fn points(&self) -> Vec<usize> {
        match self {
            Face::Vertex(a) => vec![*a],
            Face::Edge(e) => e.to_vec(),
            Face::Cell(c) => c.to_vec(),
        }
    }
}

/// The face `tau` with `n in O_tau`, or `None` when the set of surviving
/// terms is not a face (localization width too large for the curve).
pub fn stratum_of(patchwork: &Patchwork, tri: &Triangulation, r: [f64; 2]) -> Option<Face> {
    let s = patchwork.stratum(r);
    match s.as_slice() {
        [a] if tri.vertices_used().contains(a) => Some(Face::Vertex(*a)),
        [a, b] if tri.edge_id(*a, *b).is_some() => Some(Face::Edge([*a, *b])),
        [a, b, c] if tri.cell_id([*a, *b, *c]).is_some() => Some(Face::Cell([*a, *b, *c])),
        _ => None,
    }
}

/// Whether `epsilon` is small against the shortest compact edge of the curve.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalizationReport {
    /// Shortest bounded edge of the curve in log_t units (infinite if none).
    pub min_feature: f64,
    pub epsilon_loc: f64,
    pub ok: bool,
}

pub fn localization_report(curve: &TropicalCurve, params: &PatchworkParams) -> LocalizationReport {
    let min_feature = curve
        .bounded_edges()
        .iter()
        .map(|e| {
            let [a, b] = e.ends.map(|v| curve.vertices()[v].point.to_f64());
            dist(a, b)
        })
        .fold(f64::INFINITY, f64::min);
    LocalizationReport { min_feature, epsilon_loc: params.epsilon_loc, ok: params.epsilon_loc < min_feature / 2.0 }
}

/// Sampling grid: `rows` values of `log_t |w2|` times `phases` values of `arg w2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    pub rows: usize,
    pub phases: usize,
}

impl std::str::FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("grid must look like 200x64, got {s:?}"))?;
        let rows = a.trim().parse().map_err(|_| format!("bad grid rows {a:?}"))?;
        let phases = b.trim().parse().map_err(|_| format!("bad grid phases {b:?}"))?;
        if rows < 2 || phases < 1 {
            return Err("grid needs at least 2 rows and 1 phase".into());
        }
        Ok(Grid { rows, phases })
    }
}

/// An axis-aligned box in log_t units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Viewport {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl Viewport {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.x[0] && p[0] <= self.x[1] && p[1] >= self.y[0] && p[1] <= self.y[1]
    }

    /// Twice the bounding box of the compact part of the curve, plus 3 units.
    pub fn around(curve: &TropicalCurve) -> Viewport {
        let pts: Vec<[f64; 2]> = curve.vertices().iter().map(|v| v.point.to_f64()).collect();
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &pts {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let span = |k: usize| {
            let c = (lo[k] + hi[k]) / 2.0;
            let half = (hi[k] - lo[k]) + 3.0;
            [c - half, c + half]
        };
        Viewport { x: span(0), y: span(1) }
    }
}

impl std::str::FromStr for Viewport {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad viewport number {p:?}")))
            .collect::<Result<_, _>>()?;
        match v.as_slice() {
            &[x0, x1, y0, y1] if x0 < x1 && y0 < y1 => Ok(Viewport { x: [x0, x1], y: [y0, y1] }),
            _ => Err("viewport must be x0,x1,y0,y1 with x0 < x1 and y0 < y1".into()),
        }
    }
}

/// A grid line whose polynomial could not be solved reliably.
#[derive(Clone, Debug, PartialEq)]
pub struct RootFailure {
    pub row: usize,
    pub phase: usize,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AmoebaSample {
    /// `Log_t` of the roots, in log_t units, in grid order.
    pub points: Vec<[f64; 2]>,
    pub failures: Vec<RootFailure>,
}

/// Samples `Log_t(Z_t)` by solving `h_t(., w2) = 0` for `w1` on a grid of `w2`.
pub fn amoeba_sample(patchwork: &Patchwork, grid: Grid, viewport: &Viewport) -> AmoebaSample {
    let l = patchwork.params.log_t();
    let lines: Vec<(Vec<[f64; 2]>, Vec<RootFailure>)> = (0..grid.rows)
        .into_par_iter()
        .map(|row| {
            let r2 = viewport.y[0] + (viewport.y[1] - viewport.y[0]) * row as f64 / (grid.rows - 1) as f64;
            let mut points = Vec::new();
            let mut failures = Vec::new();
            for phase in 0..grid.phases {
                let theta = 2.0 * PI * (phase as f64 + 0.5) / grid.phases as f64;
                let w2 = Complex64::from_polar((l * r2).exp(), theta);
                match solve_line(patchwork, w2) {
                    Ok(roots) => points.extend(roots.into_iter().map(|w1| [w1.norm().ln() / l, r2])),
                    Err(reason) => failures.push(RootFailure { row, phase, reason }),
                }
            }
            (points, failures)
        })
        .collect();
    let mut out = AmoebaSample::default();
    for (p, f) in lines {
        out.points.extend(p);
        out.failures.extend(f);
    }
    out
}

/// Nonzero roots `w1` of `h_t(w1, w2)`, residual-checked.
fn solve_line(patchwork: &Patchwork, w2: Complex64) -> Result<Vec<Complex64>, String> {
    let lo = patchwork.exponents.iter().map(|e| e[0]).min().unwrap_or(0);
    let hi = patchwork.exponents.iter().map(|e| e[0]).max().unwrap_or(0);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
    for (a, e) in patchwork.exponents.iter().enumerate() {
        coeffs[(e[0] - lo) as usize] += patchwork.weights[a] * w2.powi(e[1] as i32);
    }
    // Roots at zero are not in the torus.
    while coeffs.len() > 1 && coeffs[0].norm() == 0.0 {
        coeffs.remove(0);
    }
    while coeffs.len() > 1 && coeffs[coeffs.len() - 1].norm() == 0.0 {
        coeffs.pop();
    }
    let roots = polynomial_roots(&coeffs)?;
    let mut kept = Vec::with_capacity(roots.len());
    let mut rejected = 0;
    for w1 in roots {
        let w = [w1, w2];
        if patchwork.h_t(w).norm() < 1e-8 * patchwork.term_scale(w) {
            kept.push(w1);
        } else {
            rejected += 1;
        }
    }
    if rejected > 0 {
        return Err(format!("{rejected} root(s) failed the residual check"));
    }
    Ok(kept)
}

/// Roots of `sum_k c_k z^k` (lowest degree first) via the eigenvalues of the
/// balanced companion matrix.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>, String> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[n];
    if lead.norm() == 0.0 || !lead.is_finite() {
        return Err("vanishing or non-finite leading coefficient".into());
    }
    if n == 1 {
        return Ok(vec![-coeffs[0] / lead]);
    }
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        m[(0, k)] = -coeffs[n - 1 - k] / lead;
    }
    for k in 1..n {
        m[(k, k - 1)] = Complex64::new(1.0, 0.0);
    }
    balance(&mut m);
    let schur = Schur::try_new(m, 1e-14, 10_000).ok_or("Schur iteration did not converge")?;
    let eig = schur.eigenvalues().ok_or("Schur form is not triangular")?;
    if eig.iter().any(|z| !z.is_finite()) {
        return Err("non-finite eigenvalue".into());
    }
    Ok(eig.iter().copied().collect())
}

/// Diagonal similarity scaling by powers of two that evens out row and column norms.
fn balance(m: &mut DMatrix<Complex64>) {
    let n = m.nrows();
    let radix = 2.0f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let (mut c, mut r) = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].l1_norm();
                    r += m[(i, j)].l1_norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            while c < r / radix {
                f *= radix;
                c *= radix * radix;
            }
            while c >= r * radix {
                f /= radix;
                c /= radix * radix;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

pub type Segment = ([f64; 2], [f64; 2]);

/// Bounded edges and legs in log_t units, each clipped to the viewport.
pub fn clipped_parts(curve: &TropicalCurve, viewport: &Viewport) -> (Vec<Segment>, Vec<Segment>) {
    let edges = curve
        .bounded_edges()
        .iter()
        .filter_map(|e| {
            let [a, b] = e.ends.map(|v| curve.vertices()[v].point.to_f64());
            clip(a, [b[0] - a[0], b[1] - a[1]], 1.0, viewport)
        })
        .collect();
    let legs = curve
        .legs()
        .iter()
        .filter_map(|leg| {
            let d = [leg.direction.x.to_f64().unwrap_or(0.0), leg.direction.y.to_f64().unwrap_or(0.0)];
            clip(leg.base.to_f64(), d, f64::INFINITY, viewport)
        })
        .collect();
    (edges, legs)
}

/// All clipped segments of the curve, bounded edges first.
pub fn clipped_segments(curve: &TropicalCurve, viewport: &Viewport) -> Vec<Segment> {
    let (mut edges, legs) = clipped_parts(curve, viewport);
    edges.extend(legs);
    edges
}

/// Liang-Barsky clipping of `p + s d`, `s in [0, s_max]`.
fn clip(p: [f64; 2], d: [f64; 2], s_max: f64, v: &Viewport) -> Option<Segment> {
    let (mut lo, mut hi) = (0.0f64, s_max);
    for k in 0..2 {
        let bounds = if k == 0 { v.x } else { v.y };
        if d[k] == 0.0 {
            if p[k] < bounds[0] || p[k] > bounds[1] {
                return None;
            }
            continue;
        }
        let s0 = (bounds[0] - p[k]) / d[k];
        let s1 = (bounds[1] - p[k]) / d[k];
        lo = lo.max(s0.min(s1));
        hi = hi.min(s0.max(s1));
    }
    (lo <= hi).then(|| ([p[0] + lo * d[0], p[1] + lo * d[1]], [p[0] + hi * d[0], p[1] + hi * d[1]]))
}

fn point_segment_distance(p: [f64; 2], (a, b): Segment) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    if len2 == 0.0 {
        return dist(p, a);
    }
    let s = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0);
    dist(p, [a[0] + s * d[0], a[1] + s * d[1]])
}

/// Symmetric Hausdorff distance between the cloud and the curve, both clipped
/// to the viewport. Curve points are sampled every `0.01` log_t units.
pub fn hausdorff_to_tropical(cloud: &[[f64; 2]], curve: &TropicalCurve, viewport: &Viewport) -> f64 {
    let segs = clipped_segments(curve, viewport);
    let inside: Vec<[f64; 2]> = cloud.iter().copied().filter(|p| viewport.contains(*p)).collect();
    if inside.is_empty() || segs.is_empty() {
        return f64::INFINITY;
    }
    let to_curve = inside
        .par_iter()
        .map(|p| segs.iter().map(|s| point_segment_distance(*p, *s)).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max);
    let samples: Vec<[f64; 2]> = segs
        .iter()
        .flat_map(|(a, b)| {
            let steps = (dist(*a, *b) / 0.01).ceil().max(1.0) as usize;
            (0..=steps).map(move |k| {
                let s = k as f64 / steps as f64;
                [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
            })
        })
        .collect();
    let to_cloud = samples
        .par_iter()
        .map(|q| inside.iter().map(|p| dist(*p, *q)).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max);
    to_curve.max(to_cloud)
}

/// Blow-up size `epsilon` and the cutoff value `chi` at the query point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentParams {
    pub epsilon_blowup: f64,
    pub chi: f64,
}

impl MomentParams {
    pub fn new(epsilon_blowup: f64, chi: f64) -> Result<Self, NumericsError> {
        if !(epsilon_blowup > 0.0 && epsilon_blowup.is_finite()) {
            return Err(NumericsError::InvalidParameter(format!("epsilon_blowup must be > 0, got {epsilon_blowup}")));
        }
        if !(0.0..=1.0).contains(&chi) {
            return Err(NumericsError::InvalidParameter(format!("chi must lie in [0, 1], got {chi}")));
        }
        Ok(Self { epsilon_blowup, chi })
    }

    /// The level `lambda = epsilon` over which the reduced space is singular.
    pub fn critical_level(&self) -> f64 {
        self.epsilon_blowup
    }

    pub fn is_critical_level(&self, lambda: f64) -> bool {
        (lambda - self.epsilon_blowup).abs() <= 1e-12 * self.epsilon_blowup.max(1.0)
    }
}

/// `mu = pi |u|^2 + chi * eps |u|^2 / (|h|^2 + |u|^2)`.
pub fn moment_map(params: &MomentParams, abs_u: f64, abs_h: f64) -> Result<f64, NumericsError> {
    if abs_u < 0.0 || abs_h < 0.0 {
        return Err(NumericsError::InvalidParameter("moduli must be non-negative".into()));
    }
    let u2 = abs_u * abs_u;
    let base = PI * u2;
    if params.chi == 0.0 {
        return Ok(base);
    }
    let denom = abs_h * abs_h + u2;
    if denom == 0.0 {
        return Err(NumericsError::UndefinedAtOrigin);
    }
    Ok(base + params.chi * params.epsilon_blowup * u2 / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use conic_mirror_core::geometry::regular_triangulation;
    use conic_mirror_core::lattice::rat;
    use conic_mirror_core::tropical::tropical_curve;

    fn four_point() -> HeightedPolygon {
        HeightedPolygon::from_coords(&[(0, 0), (1, 0), (0, 1), (-1, -1)], vec![rat(-1, 4), rat(0, 1), rat(0, 1), rat(0, 1)]).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn smoothstep_shape() {
        assert_eq!(smoothstep(-1.0), 0.0);
        assert_eq!(smoothstep(0.0), 0.0);
        assert_eq!(smoothstep(1.0), 1.0);
        assert_eq!(smoothstep(0.5), 0.5);
        let mut prev = 0.0;
        for k in 0..=1000 {
            let v = smoothstep(k as f64 / 1000.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn phi_regions() {
        let poly = four_point();
        let params = PatchworkParams::new(&poly, 4f64.exp(), 0.1).unwrap();
        let pw = Patchwork::new(&poly, &params).unwrap();
        let l = 4.0;
        let width = 0.1 * l;
        // Deep inside C_(1,0): n = (3, 0) in log_t units.
        assert_eq!(pw.phi(1, [3.0 * l, 0.0]), 0.0);
        // Chamber of (1,0) is {n1 >= 1/4 ...}; move left of its wall n1 = 1/4 at n2 = -0.1.
        let wall = [0.25 * l, -0.1 * l];
        assert_eq!(pw.chamber_distance(1, wall), 0.0);
        let at = |d: f64| pw.phi(1, [wall[0] - d, wall[1]]);
        assert_eq!(at(width), 1.0);
        assert_eq!(at(width / 2.0), 0.0);
        let mid = at(0.75 * width);
        assert!(mid > 0.0 && mid < 1.0);
        assert!(at(0.7 * width) < mid && mid < at(0.8 * width));
    }

    #[test]
    fn phi_gradient_bound() {
        let poly = four_point();
        let params = PatchworkParams::new(&poly, 8f64.exp(), 0.05).unwrap();
        let pw = Patchwork::new(&poly, &params).unwrap();
        let width = 0.05 * 8.0;
        let bound = 4.0 / width;
        let h = 1e-6;
        for k in 0..400 {
            let p = [-3.0 + 0.015 * k as f64, 0.37 - 0.011 * k as f64];
            for a in 0..4 {
                let gx = (pw.phi(a, [p[0] + h, p[1]]) - pw.phi(a, [p[0] - h, p[1]])) / (2.0 * h);
                let gy = (pw.phi(a, [p[0], p[1] + h]) - pw.phi(a, [p[0], p[1] - h])) / (2.0 * h);
                assert!(gx.hypot(gy) < bound, "{p:?} {a}");
            }
        }
    }

    #[test]
    fn ht_at_s0_is_plain_sum() {
        let poly = four_point();
        let params = PatchworkParams::new(&poly, 3f64.exp(), 0.1).unwrap();
        let pw = Patchwork::new(&poly, &params).unwrap();
        let w = [c(0.3, -1.2), c(2.0, 0.5)];
        assert_eq!(pw.h_ts(0.0, w), pw.h_t(w));
        let t = 3f64.exp();
        let direct = t.powf(0.25) + w[0] + w[1] + 1.0 / (w[0] * w[1]);
        assert!((pw.h_t(w) - direct).norm() < 1e-12 * direct.norm());
    }

    #[test]
    fn strata() {
        let poly = four_point();
        let tri = regular_triangulation(&poly).unwrap();
        let params = PatchworkParams::new(&poly, 6f64.exp(), 0.05).unwrap();
        let pw = Patchwork::new(&poly, &params).unwrap();
        let l = 6.0;
        assert_eq!(stratum_of(&pw, &tri, [3.0 * l, 0.0]), Some(Face::Vertex(1)));
        // Leg dual to {(1,0),(0,1)} runs along (1,1) from (1/4,1/4).
        assert_eq!(stratum_of(&pw, &tri, [2.0 * l, 2.0 * l]), Some(Face::Edge([1, 2])));
        assert_eq!(stratum_of(&pw, &tri, [0.25 * l, 0.25 * l]), Some(Face::Cell([0, 1, 2])));
        // Partition: every grid point lies in exactly one face's stratum.
        for i in -30..=30 {
            for j in -30..=30 {
                let r = [i as f64 * 0.1 * l, j as f64 * 0.1 * l];
                assert!(stratum_of(&pw, &tri, r).is_some(), "{r:?}");
            }
        }
    }

    #[test]
    fn amoeba_of_a_line() {
        let poly = HeightedPolygon::from_coords(&[(0, 0), (1, 0), (0, 1)], vec![rat(0, 1); 3]).unwrap();
        let params = PatchworkParams::new(&poly, 5f64.exp(), 0.1).unwrap();
        let pw = Patchwork::new(&poly, &params).unwrap();
        let vp = Viewport { x: [-3.0, 3.0], y: [-3.0, 3.0] };
        let sample = amoeba_sample(&pw, Grid { rows: 11, phases: 8 }, &vp);
        assert!(sample.failures.is_empty());
        assert_eq!(sample.points.len(), 88);
        // w1 = -1 - w2, so |w1| <= 1 + |w2|.
        for p in &sample.points {
            let r2 = p[1];
            let upper = ((5.0 * r2).exp() + 1.0).ln() / 5.0;
            assert!(p[0] <= upper + 1e-12);
        }
    }

    #[test]
    fn one_variable_amoeba_is_exact() {
        // 1 + w1: every root has |w1| = 1.
        let poly = HeightedPolygon::from_coords(&[(0, 0), (1, 0), (0, 1), (1, 1)], vec![rat(0, 1), rat(0, 1), rat(0, 1), rat(0, 1)]).unwrap();
        let params = PatchworkParams::with_coefficients(
            2f64.exp(),
            0.1,
            vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let pw = Patchwork::new(&poly, &params).unwrap();
        let vp = Viewport { x: [-2.0, 2.0], y: [-2.0, 2.0] };
        let sample = amoeba_sample(&pw, Grid { rows: 9, phases: 4 }, &vp);
        assert!(!sample.points.is_empty());
        assert!(sample.points.iter().all(|p| p[0].abs() < 1e-12));
    }

    #[test]
    fn roots_of_known_polynomials() {
        // (z - 2)(z + 3i)(z - 1e-3)
        let r = [c(2.0, 0.0), c(0.0, -3.0), c(1e-3, 0.0)];
        let c0 = -(r[0] * r[1] * r[2]);
        let c1 = r[0] * r[1] + r[0] * r[2] + r[1] * r[2];
        let c2 = -(r[0] + r[1] + r[2]);
        let roots = polynomial_roots(&[c0, c1, c2, c(1.0, 0.0)]).unwrap();
        for want in r {
            assert!(roots.iter().any(|z| (z - want).norm() < 1e-10), "{want}");
        }
        assert!(polynomial_roots(&[c(1.0, 0.0)]).unwrap().is_empty());
    }

    #[test]
    fn hausdorff_shrinks_with_t() {
        let poly = four_point();
        let tri = regular_triangulation(&poly).unwrap();
        let curve = tropical_curve(&poly, &tri).unwrap();
        let vp = Viewport::around(&curve);
        let mut last = f64::INFINITY;
        for l in [2.0, 4.0, 8.0] {
            let params = PatchworkParams::new(&poly, f64::exp(l), 0.05).unwrap();
            let pw = Patchwork::new(&poly, &params).unwrap();
            let sample = amoeba_sample(&pw, Grid { rows: 200, phases: 64 }, &vp);
            let d = hausdorff_to_tropical(&sample.points, &curve, &vp);
            assert!(d < last, "{d} after {last}");
            last = d;
        }
        assert!(last < 0.35);
    }

    #[test]
    fn default_viewport() {
        let poly = four_point();
        let curve = tropical_curve(&poly, &regular_triangulation(&poly).unwrap()).unwrap();
        let vp = Viewport::around(&curve);
        assert!((vp.x[1] - vp.x[0] - 2.0 * (0.75 + 3.0)).abs() < 1e-12);
        assert!(vp.contains([0.25, 0.25]));
    }

    #[test]
    fn moment_map_branches() {
        let zero = MomentParams::new(0.3, 0.0).unwrap();
        assert_eq!(moment_map(&zero, 1.0, 5.0).unwrap(), PI);
        let one = MomentParams::new(0.3, 1.0).unwrap();
        assert!((moment_map(&one, 1.0, 1.0).unwrap() - (PI + 0.15)).abs() < 1e-15);
        assert_eq!(moment_map(&one, 0.0, 2.0).unwrap(), 0.0);
        assert_eq!(moment_map(&one, 0.0, 0.0), Err(NumericsError::UndefinedAtOrigin));
        assert!(one.is_critical_level(0.3));
        assert!(!one.is_critical_level(0.31));
        for p in [zero, one] {
            let mut prev = -1.0;
            for k in 0..100 {
                let v = moment_map(&p, k as f64 * 0.05, 0.7).unwrap();
                assert!(v > prev);
                prev = v;
            }
        }
        assert!(MomentParams::new(0.0, 1.0).is_err());
        assert!(MomentParams::new(1.0, 1.5).is_err());
    }
}
