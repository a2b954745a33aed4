use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_conic-mirror"))
}

fn preset(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("presets").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn payload(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).expect("JSON output");
    assert_eq!(v["header"]["tool"], "conic-mirror");
    v["payload"].clone()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn triangulate_four_point() {
    let p = preset("four_point.json");
    let v = payload(&run(&["triangulate", "--in", path(&p)]));
    assert_eq!(v["cells"].as_array().unwrap().len(), 3);
    assert_eq!(v["unimodular"], true);
    assert_eq!(v["adapted"], true);
}

#[test]
fn non_generic_heights_are_a_domain_error() {
    let p = preset("paraboloid.json");
    let out = run(&["triangulate", "--in", path(&p)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("NonTriangularCell"));
    let v = payload(&run(&["triangulate", "--in", path(&p), "--seed", "3"]));
    assert_eq!(v["cells"].as_array().unwrap().len(), 2);
}

#[test]
fn schema_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"points": [[0, 0], [1, 0]], "heights": ["0"]}"#).unwrap();
    let out = run(&["tropical", "--in", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("SchemaError"));
    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(run(&["tropical", "--in", bad.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["tropical", "--in", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn tropical_legs_and_chambers() {
    let p = preset("four_point.json");
    let v = payload(&run(&["tropical", "--in", path(&p)]));
    assert_eq!(v["legs"].as_array().unwrap().len(), 3);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 3);
    assert_eq!(v["chambers"].as_array().unwrap().len(), 4);
    for leg in v["legs"].as_array().unwrap() {
        assert!(leg["c_squared"].is_string());
    }
}

#[test]
fn verify_mirror_reports_zero_failures() {
    let p = preset("simplex.json");
    let out = run(&["verify-mirror", "--in", path(&p), "--bound-n", "3", "--bound-i", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().any(|l| l == "failures: 0"), "{text}");
    assert!(text.lines().any(|l| l == "pairs: 60025"), "{text}");
}

#[test]
fn c3_preset_products() {
    let p = preset("c3_preset.json");
    let v = payload(&run(&["ring-mul", "--in", path(&p)]));
    assert_eq!(v["oracle_agrees"], true);
    assert_eq!(v["product"], serde_json::json!([{"n": [-1, -1], "i": 0, "c": "1"}]));
}

#[test]
fn theta_mul_matches_mirror() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("theta.json");
    std::fs::write(
        &input,
        r#"{"polygon": {"points": [[0,0],[1,0],[0,1],[-1,-1]], "heights": ["-1/4","0","0","0"]},
            "x": {"theta": true, "terms": [{"n": [2, -1], "i": 0, "c": "1/2"}]},
            "y": {"theta": true, "terms": [{"n": [-1, 3], "i": 1, "c": "3"}]}}"#,
    )
    .unwrap();
    let v = payload(&run(&["theta-mul", "--in", input.to_str().unwrap()]));
    assert_eq!(v["mirror_agrees"], true);
    assert_eq!(v["product"]["theta"], true);
}

#[test]
fn sections_and_mckay() {
    let v = payload(&run(&["sections", "--in", path(&preset("simplex.json")), "--box", "2"]));
    assert_eq!(v["shift_classes"], 1);
    let v = payload(&run(&["sections", "--in", path(&preset("four_point_section.json"))]));
    assert_eq!(v["valid"], true);
    let v = payload(&run(&["mckay", "--in", path(&preset("z3_cover.json")), "--box", "1"]));
    assert_eq!(v["order"], 3);
    assert_eq!(v["invariant_factors"], serde_json::json!([1, 3]));
    let dims: Vec<u64> = v["hom_dims"].as_array().unwrap().iter().map(|h| h["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, vec![9; 9]);
    let out = run(&["mckay", "--in", path(&preset("z3_cover.json")), "--sublattice", "1,2;2,4"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("SingularMatrix"));
}

#[test]
fn moment_values() {
    let v = payload(&run(&["moment", "--eps-blowup", "0.5", "--chi", "0", "--abs-u", "1"]));
    assert_eq!(v["value"].as_f64().unwrap(), std::f64::consts::PI);
    let v = payload(&run(&["moment", "--eps-blowup", "0.5", "--chi", "1", "--abs-u", "1", "--abs-h", "1"]));
    assert!((v["value"].as_f64().unwrap() - (std::f64::consts::PI + 0.25)).abs() < 1e-15);
    let out = run(&["moment", "--eps-blowup", "0.5", "--chi", "1", "--abs-u", "0", "--abs-h", "0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("UndefinedAtOrigin"));
}

#[test]
fn amoeba_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cloud.csv");
    let p = preset("four_point.json");
    let out = run(&["amoeba", "--in", path(&p), "--t", "54.598", "--grid", "20x8", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("r1,r2"));
    assert!(text.lines().count() > 100);

    let svg = dir.path().join("plot.svg");
    let out = run(&[
        "plot", "--in", path(&p), "--t", "54.598", "--overlay", "amoeba", "--grid", "40x16", "--viewport", "-4,4,-4,4",
        "--out", svg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(svg.matches(r#"class="leg""#).count(), 3);
    assert!(svg.contains(r#"class="amoeba""#));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let p = preset("four_point.json");
    for args in [vec!["tropical", "--in", path(&p)], vec!["amoeba", "--in", path(&p), "--grid", "16x8"]] {
        let a = run(&args);
        let b = bin().args(&args).env("CONIC_MIRROR_THREADS", "1").output().unwrap();
        assert!(a.status.success() && b.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn bad_thread_count_is_rejected() {
    let p = preset("simplex.json");
    let out = bin().args(["tropical", "--in", path(&p)]).env("CONIC_MIRROR_THREADS", "many").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
