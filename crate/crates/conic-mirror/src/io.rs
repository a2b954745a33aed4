//! JSON and CSV formats.
//!
//! Rationals travel as `"p/q"` strings, complex numbers as `[re, im]`. Every
//! document written by the tool is `{"header": {"tool", "version"}, "payload"}`
//! with keys sorted, so identical inputs give byte-identical output.

use std::collections::BTreeMap;

use conic_mirror_core::geometry::{HeightedPolygon, Triangulation};
use conic_mirror_core::lattice::{format_rational, parse_rational, Covector, LatticePoint, Rational, RationalPoint};
use conic_mirror_core::mckay::{CoverAlgebraElement, CoverIndex, GroupElement, Sublattice};
use conic_mirror_core::mirror::{MirrorBasisIndex, MirrorElement};
use conic_mirror_core::sections::{FramedSection, LineBundleClass};
use conic_mirror_core::theta::{ThetaElement, ThetaGen};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

pub const TOOL: &str = "conic-mirror";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// An input that does not match the expected schema.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("SchemaError: {0}")]
pub struct SchemaError(pub String);

fn schema<T>(msg: impl Into<String>) -> Result<T, SchemaError> {
    Err(SchemaError(msg.into()))
}

pub fn envelope(payload: Value) -> Value {
    json!({ "header": { "tool": TOOL, "version": VERSION }, "payload": payload })
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn parse_json(text: &str) -> Result<Value, SchemaError> {
    serde_json::from_str(text).map_err(|e| SchemaError(format!("invalid JSON: {e}")))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, SchemaError> {
    v.get(key).ok_or_else(|| SchemaError(format!("missing field {key:?}")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, SchemaError> {
    v.as_array().ok_or_else(|| SchemaError(format!("{what} must be an array")))
}

/// Integers as JSON numbers when they fit in `i64`, strings otherwise.
pub fn int_json(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(i) => json!(i),
        None => json!(v.to_string()),
    }
}

pub fn parse_int(v: &Value, what: &str) -> Result<BigInt, SchemaError> {
    match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string().parse().expect("integer literal")),
        Value::String(s) => s.trim().parse().map_err(|_| SchemaError(format!("{what}: {s:?} is not an integer"))),
        _ => schema(format!("{what} must be an integer")),
    }
}

fn parse_usize(v: &Value, what: &str) -> Result<usize, SchemaError> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| SchemaError(format!("{what} must be a non-negative integer")))
}

pub fn rational_json(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

/// `"p/q"`, a decimal string, or a JSON number (read through its decimal text).
pub fn parse_rational_value(v: &Value, what: &str) -> Result<Rational, SchemaError> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return schema(format!("{what} must be a rational string or number")),
    };
    parse_rational(&text).map_err(|e| SchemaError(format!("{what}: {e}")))
}

fn pair(v: &Value, what: &str) -> Result<[BigInt; 2], SchemaError> {
    match array(v, what)?.as_slice() {
        [a, b] => Ok([parse_int(a, what)?, parse_int(b, what)?]),
        _ => schema(format!("{what} must have two entries")),
    }
}

pub fn parse_covector(v: &Value, what: &str) -> Result<Covector, SchemaError> {
    let [x, y] = pair(v, what)?;
    Ok(Covector::new(x, y))
}

pub fn covector_json(n: &Covector) -> Value {
    json!([int_json(&n.x), int_json(&n.y)])
}

pub fn lattice_json(m: &LatticePoint) -> Value {
    json!([int_json(&m.x), int_json(&m.y)])
}

pub fn point_json(p: &RationalPoint) -> Value {
    json!([rational_json(&p.x), rational_json(&p.y)])
}

pub fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn parse_complex(v: &Value, what: &str) -> Result<Complex64, SchemaError> {
    match array(v, what)?.as_slice() {
        [re, im] => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
            _ => schema(format!("{what} entries must be numbers")),
        },
        _ => schema(format!("{what} must be [re, im]")),
    }
}

/// `{"points": [[x, y], ...], "heights": ["p/q", ...]}`; may be nested under `"polygon"`.
pub fn parse_polygon_parts(v: &Value) -> Result<(Vec<LatticePoint>, Vec<Rational>), SchemaError> {
    let v = v.get("polygon").unwrap_or(v);
    let points = array(field(v, "points")?, "points")?
        .iter()
        .map(|p| {
            let [x, y] = pair(p, "point")?;
            Ok(LatticePoint::new(x, y))
        })
        .collect::<Result<Vec<_>, SchemaError>>()?;
    let heights = array(field(v, "heights")?, "heights")?
        .iter()
        .map(|h| parse_rational_value(h, "height"))
        .collect::<Result<Vec<_>, SchemaError>>()?;
    if points.len() != heights.len() {
        return schema(format!("{} points but {} heights", points.len(), heights.len()));
    }
    Ok((points, heights))
}

/// Like [`parse_polygon_parts`], folding geometric failures into the error.
pub fn parse_polygon(v: &Value) -> Result<HeightedPolygon, SchemaError> {
    let (points, heights) = parse_polygon_parts(v)?;
    HeightedPolygon::new(points, heights).map_err(|e| SchemaError(e.to_string()))
}

pub fn polygon_json(poly: &HeightedPolygon) -> Value {
    json!({
        "points": poly.points().iter().map(lattice_json).collect::<Vec<_>>(),
        "heights": poly.heights().iter().map(rational_json).collect::<Vec<_>>(),
    })
}

pub fn triangulation_json(tri: &Triangulation) -> Value {
    json!({
        "cells": tri.cells(),
        "edges": tri.edges().iter().map(|e| json!({ "v": e.vertices, "interior": e.interior, "cells": e.cells })).collect::<Vec<_>>(),
        "vertices_used": tri.vertices_used(),
    })
}

/// Reads `{"cells": [[i, j, k], ...]}`; edges are recomputed and not trusted.
pub fn parse_cells(v: &Value) -> Result<Vec<[usize; 3]>, SchemaError> {
    array(field(v, "cells")?, "cells")?
        .iter()
        .map(|c| match array(c, "cell")?.as_slice() {
            [a, b, c] => Ok([parse_usize(a, "cell index")?, parse_usize(b, "cell index")?, parse_usize(c, "cell index")?]),
            _ => schema("each cell must list three point indices"),
        })
        .collect()
}

fn terms(v: &Value) -> Result<&Vec<Value>, SchemaError> {
    match v {
        Value::Array(a) => Ok(a),
        Value::Object(_) => array(field(v, "terms")?, "terms"),
        _ => schema("an element must be a list of terms or {\"terms\": [...]}"),
    }
}

fn parse_term(t: &Value) -> Result<(Covector, BigInt, Rational), SchemaError> {
    let n = parse_covector(field(t, "n")?, "n")?;
    let i = parse_int(field(t, "i")?, "i")?;
    let c = match t.get("c") {
        Some(c) => parse_rational_value(c, "c")?,
        None => Rational::from_integer(1.into()),
    };
    Ok((n, i, c))
}

/// `[{"n": [a, b], "i": k, "c": "p/q"}, ...]`.
pub fn parse_mirror_element(v: &Value) -> Result<MirrorElement, SchemaError> {
    terms(v)?
        .iter()
        .map(|t| {
            let (n, i, c) = parse_term(t)?;
            Ok((MirrorBasisIndex { n, i }, c))
        })
        .collect()
}

pub fn mirror_element_json(x: &MirrorElement) -> Value {
    Value::Array(
        x.iter()
            .map(|(k, c)| json!({ "n": covector_json(&k.n), "i": int_json(&k.i), "c": rational_json(c) }))
            .collect(),
    )
}

/// Same terms as a mirror element; an object form must carry `"theta": true`.
pub fn parse_theta_element(v: &Value) -> Result<ThetaElement, SchemaError> {
    if let Some(flag) = v.get("theta") {
        if flag != &Value::Bool(true) {
            return schema("theta elements must carry \"theta\": true");
        }
    }
    terms(v)?
        .iter()
        .map(|t| {
            let (n, i, c) = parse_term(t)?;
            Ok((ThetaGen { n, i }, c))
        })
        .collect()
}

pub fn theta_element_json(x: &ThetaElement) -> Value {
    let terms: Vec<Value> = x
        .iter()
        .map(|(k, c)| json!({ "n": covector_json(&k.n), "i": int_json(&k.i), "c": rational_json(c) }))
        .collect();
    json!({ "theta": true, "terms": terms })
}

/// `{"section": {"0": [a, b], "1": [c, d], ...}}` or the inner map itself.
pub fn parse_section(v: &Value) -> Result<FramedSection, SchemaError> {
    let v = v.get("section").unwrap_or(v);
    let map = v.as_object().ok_or_else(|| SchemaError("section must map cell ids to covectors".into()))?;
    let mut values = BTreeMap::new();
    for (k, n) in map {
        let id: usize = k.parse().map_err(|_| SchemaError(format!("cell id {k:?} is not an integer")))?;
        values.insert(id, parse_covector(n, "section value")?);
    }
    Ok(FramedSection { values })
}

pub fn section_json(s: &FramedSection) -> Value {
    let map: Map<String, Value> = s.values.iter().map(|(c, n)| (c.to_string(), covector_json(n))).collect();
    Value::Object(map)
}

pub fn degrees_json(d: &LineBundleClass) -> Value {
    let map: Map<String, Value> = d.degrees.iter().map(|(e, v)| (e.to_string(), int_json(v))).collect();
    Value::Object(map)
}

/// `{"basis": [[a, c], [b, d]]}`: the columns `(a, b)`, `(c, d)` generate `N0`.
pub fn parse_sublattice_rows(v: &Value) -> Result<[[BigInt; 2]; 2], SchemaError> {
    let v = v.get("sublattice").unwrap_or(v);
    let rows = array(field(v, "basis")?, "basis")?;
    match rows.as_slice() {
        [r0, r1] => Ok([pair(r0, "basis row")?, pair(r1, "basis row")?]),
        _ => schema("basis must be a 2x2 matrix"),
    }
}

pub fn parse_sublattice(v: &Value) -> Result<Sublattice, SchemaError> {
    Sublattice::new(parse_sublattice_rows(v)?).map_err(|e| SchemaError(e.to_string()))
}

pub fn sublattice_json(s: &Sublattice) -> Value {
    let r = s.rows();
    json!({ "basis": [[int_json(&r[0][0]), int_json(&r[0][1])], [int_json(&r[1][0]), int_json(&r[1][1])]] })
}

pub fn group_element_json(g: &GroupElement) -> Value {
    json!([int_json(&g[0]), int_json(&g[1])])
}

/// `[{"g": [..], "h": [..], "n": [a, b], "i": k, "c": "p/q"}, ...]`.
pub fn parse_cover_element(v: &Value) -> Result<CoverAlgebraElement, SchemaError> {
    terms(v)?
        .iter()
        .map(|t| {
            let (n, i, c) = parse_term(t)?;
            let g = pair(field(t, "g")?, "g")?;
            let h = pair(field(t, "h")?, "h")?;
            Ok((CoverIndex { g, h, n, i }, c))
        })
        .collect()
}

pub fn cover_element_json(x: &CoverAlgebraElement) -> Value {
    Value::Array(
        x.iter()
            .map(|(k, c)| {
                json!({
                    "g": group_element_json(&k.g),
                    "h": group_element_json(&k.h),
                    "n": covector_json(&k.n),
                    "i": int_json(&k.i),
                    "c": rational_json(c),
                })
            })
            .collect(),
    )
}

/// Point cloud as `r1,r2` CSV with a header row.
pub fn write_cloud_csv<W: std::io::Write>(out: W, points: &[[f64; 2]]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r1", "r2"])?;
    for p in points {
        w.serialize((p[0], p[1]))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_cloud_csv<R: std::io::Read>(input: R) -> Result<Vec<[f64; 2]>, csv::Error> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize::<(f64, f64)>().map(|row| row.map(|(a, b)| [a, b])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use conic_mirror_core::lattice::rat;

    #[test]
    fn polygon_round_trip() {
        let v = parse_json(r#"{"points": [[0,0],[1,0],[0,1],[-1,-1]], "heights": ["-1/4", 0, "0.0", "0"]}"#).unwrap();
        let poly = parse_polygon(&v).unwrap();
        assert_eq!(poly.height(0), &rat(-1, 4));
        let again = parse_polygon(&polygon_json(&poly)).unwrap();
        assert_eq!(again, poly);
    }

    #[test]
    fn schema_errors() {
        assert!(parse_polygon(&json!({"points": [[0, 0]]})).is_err());
        assert!(parse_polygon(&json!({"points": [[0, 0], [1, 0], [0, 1]], "heights": ["x", 0, 0]})).is_err());
        assert!(parse_polygon(&json!({"points": [[0, 0], [1, 1], [2, 2]], "heights": [0, 0, 0]})).is_err());
        assert!(parse_sublattice(&json!({"basis": [[1, 2], [2, 4]]})).is_err());
        assert!(parse_theta_element(&json!({"theta": false, "terms": []})).is_err());
    }

    #[test]
    fn elements_round_trip() {
        let v = json!([{"n": [1, 0], "i": 0, "c": "1/2"}, {"n": [0, 1], "i": -3}]);
        let x = parse_mirror_element(&v).unwrap();
        assert_eq!(x.len(), 2);
        assert_eq!(parse_mirror_element(&mirror_element_json(&x)).unwrap(), x);
        let t = parse_theta_element(&json!({"theta": true, "terms": v})).unwrap();
        assert_eq!(parse_theta_element(&theta_element_json(&t)).unwrap(), t);
    }

    #[test]
    fn sublattice_layout() {
        let s = parse_sublattice(&json!({"basis": [[1, 0], [1, 3]]})).unwrap();
        assert_eq!(s.columns()[0], Covector::new(1, 1));
        assert_eq!(s.columns()[1], Covector::new(0, 3));
    }

    #[test]
    fn sorted_keys_and_big_integers() {
        let text = to_pretty(&envelope(json!({"zeta": 1, "alpha": int_json(&BigInt::from(10).pow(30))})));
        assert!(text.find("alpha").unwrap() < text.find("zeta").unwrap());
        assert!(text.contains("\"1000000000000000000000000000000\""));
        assert!(text.find("header").unwrap() < text.find("payload").unwrap());
    }

    #[test]
    fn csv_round_trip() {
        let pts = vec![[0.5, -1.25], [3.0, 2.0]];
        let mut buf = Vec::new();
        write_cloud_csv(&mut buf, &pts).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("r1,r2\n"));
        assert_eq!(read_cloud_csv(buf.as_slice()).unwrap(), pts);
    }
}
