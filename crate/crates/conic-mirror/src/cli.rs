//! Argument parsing and command dispatch for the `conic-mirror` binary.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use conic_mirror_core::geometry::{
    coherence_witness, is_adapted, is_unimodular, regular_triangulation, GeometryError, HeightedPolygon, Triangulation,
};
use conic_mirror_core::mckay::{has_compact_divisor, CoverAlgebra, Sublattice};
use conic_mirror_core::mirror::MirrorRing;
use conic_mirror_core::sections::{check_section, degree_rank_report, degree_vector, enumerate_sections};
use conic_mirror_core::theta::{mir, ThetaRing};
use conic_mirror_core::tropical::tropical_curve;
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::acceptance::{run, verify_mirror_parallel};
use crate::io::{self, SchemaError};
use crate::numerics::{
    amoeba_sample, hausdorff_to_tropical, localization_report, moment_map, Grid, MomentParams, Patchwork, PatchworkParams,
    Viewport,
};
use crate::svg;

/// Failure classes, each with its own exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Domain(String),
    #[error("IoError: {0}")]
    Io(String),
    #[error("AcceptanceFailed: criteria {0:?} failed")]
    Acceptance(Vec<u8>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) | CliError::Io(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Acceptance(_) => 1,
        }
    }
}

impl From<SchemaError> for CliError {
    fn from(e: SchemaError) -> Self {
        CliError::Schema(e.to_string())
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "conic-mirror", version, about = "Tropical curves, mirror rings and conic bundle numerics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Io {
    /// Input JSON file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleOpts {
    #[arg(long, default_value_t = 54.598)]
    pub t: f64,
    #[arg(long = "eps-loc", default_value_t = 0.05)]
    pub eps_loc: f64,
    /// Rows x phases, e.g. `200x64`.
    #[arg(long, default_value = "200x64")]
    pub grid: Grid,
    /// `x0,x1,y0,y1` in log_t units; defaults to a box around the curve.
    #[arg(long, allow_hyphen_values = true)]
    pub viewport: Option<Viewport>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Overlay {
    None,
    Amoeba,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regular triangulation induced by the heights.
    Triangulate {
        #[command(flatten)]
        io: Io,
        /// Perturb the heights with this seed before triangulating.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Tropical curve: vertices, bounded edges and legs.
    Tropical {
        #[command(flatten)]
        io: Io,
    },
    /// Sample the amoeba of the patchworking polynomial.
    Amoeba {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        sample: SampleOpts,
    },
    /// Product `x * y` in the mirror ring.
    RingMul {
        #[command(flatten)]
        io: Io,
    },
    /// Product `x * y` of theta functions.
    ThetaMul {
        #[command(flatten)]
        io: Io,
    },
    /// Exhaustive check that theta and mirror products agree on a box.
    VerifyMirror {
        #[command(flatten)]
        io: Io,
        #[arg(long = "bound-n", default_value_t = 3)]
        bound_n: i64,
        #[arg(long = "bound-i", default_value_t = 2)]
        bound_i: i64,
    },
    /// Check a framed section or enumerate sections in a box.
    Sections {
        #[command(flatten)]
        io: Io,
        #[arg(long = "box", default_value_t = 2)]
        bound: i64,
    },
    /// Quotient group, Hom dimensions and products for a McKay cover.
    Mckay {
        #[command(flatten)]
        io: Io,
        /// Generators `a,b;c,d` of the sublattice.
        #[arg(long, allow_hyphen_values = true)]
        sublattice: Option<String>,
        #[arg(long = "box", default_value_t = 2)]
        bound: i64,
    },
    /// Moment map of the blown-up conic fibration.
    Moment {
        #[arg(long = "eps-blowup")]
        eps_blowup: f64,
        #[arg(long, default_value_t = 1.0)]
        chi: f64,
        #[arg(long = "abs-u")]
        abs_u: f64,
        #[arg(long = "abs-h", default_value_t = 0.0)]
        abs_h: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG picture of the tropical curve.
    Plot {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        sample: SampleOpts,
        #[arg(long, value_enum, default_value_t = Overlay::None)]
        overlay: Overlay,
    },
    /// Run the acceptance suite.
    Acceptance {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Run a single criterion.
        #[arg(long)]
        only: Option<u8>,
    },
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(io::parse_json(&text)?)
}

fn write_text(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit(out: Option<&Path>, payload: Value) -> Result<(), CliError> {
    write_text(out, &io::to_pretty(&io::envelope(payload)))
}

fn load_polygon(v: &Value) -> Result<HeightedPolygon, CliError> {
    let (points, heights) = io::parse_polygon_parts(v)?;
    HeightedPolygon::new(points, heights).map_err(domain)
}

fn triangulate(poly: &HeightedPolygon) -> Result<Triangulation, CliError> {
    regular_triangulation(poly).map_err(domain)
}

fn element<'a>(v: &'a Value, key: &str) -> Result<&'a Value, CliError> {
    v.get(key).ok_or_else(|| CliError::Schema(format!("SchemaError: missing field {key:?}")))
}

fn parse_sublattice_flag(text: &str) -> Result<[[BigInt; 2]; 2], CliError> {
    let bad = || CliError::Schema(format!("SchemaError: --sublattice expects a,b;c,d, got {text:?}"));
    let cols: Vec<Vec<BigInt>> = text
        .split(';')
        .map(|c| c.split(',').map(|x| x.trim().parse::<BigInt>()).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    match cols.as_slice() {
        [u, v] if u.len() == 2 && v.len() == 2 => Ok([[u[0].clone(), v[0].clone()], [u[1].clone(), v[1].clone()]]),
        _ => Err(bad()),
    }
}

pub fn run_cli(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Triangulate { io: f, seed } => {
            let input = read_json(&f.input)?;
            let mut poly = load_polygon(&input)?;
            if let Some(seed) = seed {
                poly = poly.perturb_heights(seed);
            }
            let tri = match input.get("cells") {
                Some(_) => Triangulation::from_cells(&poly, io::parse_cells(&input)?).map_err(domain)?,
                None => triangulate(&poly)?,
            };
            let unimodular = match is_unimodular(&poly, &tri) {
                Ok(u) => json!(u),
                Err(GeometryError::MissingLatticePoints { .. }) => Value::Null,
                Err(e) => return Err(domain(e)),
            };
            let witness = coherence_witness(&poly, &tri).map(|h| h.iter().map(io::rational_json).collect::<Vec<_>>());
            let mut payload = io::triangulation_json(&tri);
            payload["unimodular"] = unimodular;
            payload["adapted"] = json!(is_adapted(&poly, &tri));
            payload["coherence_witness"] = json!(witness);
            payload["polygon"] = io::polygon_json(&poly);
            emit(f.out.as_deref(), payload)
        }
        Command::Tropical { io: f } => {
            let input = read_json(&f.input)?;
            let poly = load_polygon(&input)?;
            let tri = triangulate(&poly)?;
            let curve = tropical_curve(&poly, &tri).map_err(domain)?;
            let vertices: Vec<Value> = curve
                .vertices()
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    let balancing: Vec<Value> = curve
                        .outgoing_directions(&poly, &tri, k)
                        .iter()
                        .map(|(d, w)| json!({ "direction": io::covector_json(d), "weight": io::int_json(w) }))
                        .collect();
                    json!({ "point": io::point_json(&v.point), "cell": v.cell, "outgoing": balancing })
                })
                .collect();
            let edges: Vec<Value> =
                curve.bounded_edges().iter().map(|e| json!({ "ends": e.ends, "dual_edge": e.dual_edge })).collect();
            let legs: Vec<Value> = curve
                .legs()
                .iter()
                .map(|l| {
                    json!({
                        "vertex": l.vertex,
                        "base": io::point_json(&l.base),
                        "dual_edge": l.dual_edge,
                        "alpha": io::lattice_json(poly.point(l.alpha)),
                        "beta": io::lattice_json(poly.point(l.beta)),
                        "direction": io::covector_json(&l.direction),
                        "a": io::rational_json(&l.a),
                        "c_squared": io::rational_json(&l.c_squared),
                        "c": l.c(),
                        "c_prime": io::rational_json(&l.c_prime),
                        "c_dblprime": io::rational_json(&l.c_dblprime),
                    })
                })
                .collect();
            let chambers: Vec<Value> = tri.vertices_used().iter().map(|&a| io::lattice_json(poly.point(a))).collect();
            emit(
                f.out.as_deref(),
                json!({
                    "vertices": vertices,
                    "bounded_edges": edges,
                    "legs": legs,
                    "chambers": chambers,
                    "triangulation": io::triangulation_json(&tri),
                }),
            )
        }
        Command::Amoeba { io: f, sample } => {
            let input = read_json(&f.input)?;
            let poly = load_polygon(&input)?;
            let tri = triangulate(&poly)?;
            let curve = tropical_curve(&poly, &tri).map_err(domain)?;
            let coefficients = match input.get("coefficients") {
                Some(c) => array_of(c, |z| io::parse_complex(z, "coefficient"))?,
                None => vec![num_complex::Complex64::new(1.0, 0.0); poly.len()],
            };
            let params = PatchworkParams::with_coefficients(sample.t, sample.eps_loc, coefficients).map_err(domain)?;
            let pw = Patchwork::new(&poly, &params).map_err(domain)?;
            let vp = sample.viewport.unwrap_or_else(|| Viewport::around(&curve));
            let cloud = amoeba_sample(&pw, sample.grid, &vp);
            let loc = localization_report(&curve, &params);
            if !loc.ok {
                eprintln!(
                    "warning: eps-loc {} is not below half the shortest compact edge ({})",
                    loc.epsilon_loc, loc.min_feature
                );
            }
            if !cloud.failures.is_empty() {
                eprintln!("warning: {} grid lines failed the root residual check", cloud.failures.len());
            }
            let is_csv = f.out.as_deref().and_then(Path::extension).is_some_and(|e| e.eq_ignore_ascii_case("csv"));
            if is_csv {
                let path = f.out.as_deref().expect("checked above");
                let file = fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                io::write_cloud_csv(file, &cloud.points).map_err(|e| CliError::Io(e.to_string()))
            } else {
                let hausdorff = hausdorff_to_tropical(&cloud.points, &curve, &vp);
                emit(
                    f.out.as_deref(),
                    json!({
                        "t": sample.t,
                        "eps_loc": sample.eps_loc,
                        "grid": [sample.grid.rows, sample.grid.phases],
                        "viewport": [vp.x[0], vp.x[1], vp.y[0], vp.y[1]],
                        "points": cloud.points,
                        "failures": cloud.failures.iter().map(|r| json!({ "row": r.row, "phase": r.phase, "reason": r.reason })).collect::<Vec<_>>(),
                        "hausdorff": if hausdorff.is_finite() { json!(hausdorff) } else { Value::Null },
                        "localization": { "min_feature": loc.min_feature, "ok": loc.ok },
                    }),
                )
            }
        }
        Command::RingMul { io: f } => {
            let input = read_json(&f.input)?;
            let poly = load_polygon(&input)?;
            let x = io::parse_mirror_element(element(&input, "x")?)?;
            let y = io::parse_mirror_element(element(&input, "y")?)?;
            let ring = MirrorRing::new(&poly);
            let product = ring.multiply(&x, &y);
            let oracle = ring.oracle_multiply(&ring.embed(&x), &ring.embed(&y)).and_then(|r| ring.canonicalize(&r)).map_err(domain)?;
            emit(
                f.out.as_deref(),
                json!({ "product": io::mirror_element_json(&product), "oracle_agrees": oracle == product }),
            )
        }
        Command::ThetaMul { io: f } => {
            let input = read_json(&f.input)?;
            let poly = load_polygon(&input)?;
            let x = io::parse_theta_element(element(&input, "x")?)?;
            let y = io::parse_theta_element(element(&input, "y")?)?;
            let theta = ThetaRing::new(&poly);
            let product = theta.multiply(&x, &y);
            let mirror = MirrorRing::new(&poly).multiply(&mir(&x), &mir(&y));
            emit(
                f.out.as_deref(),
                json!({ "product": io::theta_element_json(&product), "mirror_agrees": mir(&product) == mirror }),
            )
        }
        Command::VerifyMirror { io: f, bound_n, bound_i } => {
            if bound_n < 0 || bound_i < 0 {
                return Err(CliError::Schema("SchemaError: bounds must be non-negative".into()));
            }
            let input = read_json(&f.input)?;
            let poly = load_polygon(&input)?;
            let report = verify_mirror_parallel(&poly, bound_n, bound_i);
            println!("pairs: {}", report.pairs_checked);
            println!("failures: {}", report.failures.len());
            if let Some(out) = f.out.as_deref() {
                let failures: Vec<Value> = report
                    .failures
                    .iter()
                    .map(|(a, b)| {
                        json!([
                            { "n": io::covector_json(&a.n), "i": io::int_json(&a.i) },
                            { "n": io::covector_json(&b.n), "i": io::int_json(&b.i) },
                        ])
                    })
                    .collect();
                emit(
                    Some(out),
                    json!({ "bound_n": bound_n, "bound_i": bound_i, "pairs_checked": report.pairs_checked, "failures": failures }),
                )?;
            }
            Ok(())
        }
        Command::Sections { io: f, bound } => {
            let input = read_json(&f.input)?;
            let poly = load_polygon(&input)?;
            let tri = triangulate(&poly)?;
            let payload = match input.get("section") {
                Some(_) => {
                    let s = io::parse_section(&input)?;
                    let valid = check_section(&poly, &tri, &s).map_err(domain)?;
                    let degrees = if valid {
                        io::degrees_json(&degree_vector(&poly, &tri, &s).map_err(domain)?)
                    } else {
                        Value::Null
                    };
                    json!({ "valid": valid, "degrees": degrees })
                }
                None => {
                    let classes: Vec<Value> = enumerate_sections(&poly, &tri, bound)
                        .iter()
                        .map(|s| {
                            let d = degree_vector(&poly, &tri, s).map_err(domain)?;
                            Ok(json!({ "section": io::section_json(s), "degrees": io::degrees_json(&d) }))
                        })
                        .collect::<Result<_, CliError>>()?;
                    let rank = degree_rank_report(&poly, &tri);
                    json!({
                        "box": bound,
                        "shift_classes": classes.len(),
                        "classes": classes,
                        "section_rank": rank.section_rank,
                        "degree_kernel_rank": rank.kernel_rank,
                        "interior_edges": rank.interior_edges,
                        "degree_injective_mod_shifts": rank.injective(),
                    })
                }
            };
            emit(f.out.as_deref(), payload)
        }
        Command::Mckay { io: f, sublattice, bound } => {
            let input = read_json(&f.input)?;
            let poly = load_polygon(&input)?;
            let rows = match &sublattice {
                Some(text) => parse_sublattice_flag(text)?,
                None => io::parse_sublattice_rows(element(&input, "sublattice")?)?,
            };
            let sub = Sublattice::new(rows).map_err(domain)?;
            let alg = CoverAlgebra::new(&poly, &sub);
            let group = alg.group();
            let elements = group.elements();
            let alg_ref = &alg;
            let hom: Vec<Value> = elements
                .iter()
                .flat_map(|g| {
                    elements.iter().map(move |h| {
                        json!({
                            "g": io::group_element_json(g),
                            "h": io::group_element_json(h),
                            "dim": alg_ref.truncated_hom_dim(g, h, bound),
                        })
                    })
                })
                .collect();
            let mut payload = json!({
                "sublattice": io::sublattice_json(&sub),
                "invariant_factors": group.invariant_factors().iter().map(io::int_json).collect::<Vec<_>>(),
                "order": io::int_json(&group.order()),
                "elements": elements.iter().map(io::group_element_json).collect::<Vec<_>>(),
                "hom_dims": hom,
                "box": bound,
                "compact_divisor": has_compact_divisor(&poly, &sub),
            });
            if let (Some(x), Some(y)) = (input.get("x"), input.get("y")) {
                let x = io::parse_cover_element(x)?;
                let y = io::parse_cover_element(y)?;
                payload["product"] = io::cover_element_json(&alg.compose(&x, &y).map_err(domain)?);
            }
            emit(f.out.as_deref(), payload)
        }
        Command::Moment { eps_blowup, chi, abs_u, abs_h, out } => {
            if abs_u < 0.0 || abs_h < 0.0 {
                return Err(CliError::Domain("InvalidParameter: |u| and |h| must be non-negative".into()));
            }
            let params = MomentParams::new(eps_blowup, chi).map_err(domain)?;
            let value = moment_map(&params, abs_u, abs_h).map_err(domain)?;
            emit(
                out.as_deref(),
                json!({
                    "value": value,
                    "critical_level": params.critical_level(),
                    "at_critical_level": params.is_critical_level(value),
                }),
            )
        }
        Command::Plot { io: f, sample, overlay } => {
            let input = read_json(&f.input)?;
            let poly = load_polygon(&input)?;
            let tri = triangulate(&poly)?;
            let curve = tropical_curve(&poly, &tri).map_err(domain)?;
            let vp = sample.viewport.unwrap_or_else(|| Viewport::around(&curve));
            let cloud = match overlay {
                Overlay::None => None,
                Overlay::Amoeba => {
                    let params = PatchworkParams::new(&poly, sample.t, sample.eps_loc).map_err(domain)?;
                    let pw = Patchwork::new(&poly, &params).map_err(domain)?;
                    Some(amoeba_sample(&pw, sample.grid, &vp).points)
                }
            };
            write_text(f.out.as_deref(), &svg::render(&poly, &curve, &vp, cloud.as_deref()))
        }
        Command::Acceptance { seed, only } => {
            let ids: Vec<u8> = match only {
                Some(id) => vec![id],
                None => (1..=9).collect(),
            };
            let mut failed = Vec::new();
            for id in ids {
                let result = run(id, seed);
                println!("{result}");
                if !result.passed {
                    failed.push(id);
                }
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Acceptance(failed))
            }
        }
    }
}

fn array_of<T>(v: &Value, f: impl Fn(&Value) -> Result<T, SchemaError>) -> Result<Vec<T>, CliError> {
    let items = v.as_array().ok_or_else(|| CliError::Schema("SchemaError: expected an array".into()))?;
    Ok(items.iter().map(f).collect::<Result<_, _>>()?)
}

/// Sizes the global thread pool from `CONIC_MIRROR_THREADS` when set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(text) = std::env::var("CONIC_MIRROR_THREADS") else {
        return Ok(());
    };
    let threads: usize = text
        .trim()
        .parse()
        .map_err(|_| CliError::Schema(format!("SchemaError: CONIC_MIRROR_THREADS must be a positive integer, got {text:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn sublattice_flag() {
        let rows = parse_sublattice_flag("1,1;0,3").unwrap();
        let sub = Sublattice::new(rows).unwrap();
        assert_eq!(sub.index(), BigInt::from(3));
        assert!(parse_sublattice_flag("1,1").is_err());
    }
}
