use std::path::Path;
use std::process::{Command, Output};

use containment::extremal;
use containment::io::{read_polygon, write_polygon};
use containment::Vec2;
use serde_json::Value;

const PHI: f64 = 1.618_033_988_749_895;

fn containment(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_containment"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn num(v: &Value, path: &str) -> f64 {
    v.pointer(path)
        .and_then(Value::as_f64)
        .unwrap_or_else(|| panic!("missing {path} in {v}"))
}

#[test]
fn analyze_golden_house() {
    let dir = tempfile::tempdir().unwrap();
    write_polygon(dir.path().join("gh.json"), &extremal::golden_house()).unwrap();
    let out = containment(&["analyze", "gh.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!((num(&v, "/s") - PHI).abs() < 1e-8);
    assert!((num(&v, "/tau") - 1.0).abs() < 1e-8);
    assert!((num(&v, "/alpha") - 1.0).abs() < 1e-8);
    assert!((num(&v, "/gauge/dw") - (PHI + 1.0) / 2.0).abs() < 1e-7);
    assert_eq!(v["region"]["tau_in_region"], true);
    assert_eq!(v["tau_certificate"]["optimal"], true);
}

#[test]
fn analyze_square_and_triangle() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("square.json"),
        r#"{"vertices": [[0, 0], [2, 0], [2, 2], [0, 2]]}"#,
    )
    .unwrap();
    let v = json(&containment(&["analyze", "square.json"], dir.path()));
    for key in ["/s", "/tau", "/alpha", "/gamma"] {
        assert!((num(&v, key) - 1.0).abs() < 1e-9, "{key}");
    }
    write_polygon(dir.path().join("tri.json"), &extremal::regular_triangle()).unwrap();
    let v = json(&containment(&["analyze", "tri.json"], dir.path()));
    assert!((num(&v, "/s") - 2.0).abs() < 1e-9);
    assert!((num(&v, "/tau") - 2.0 / 3.0).abs() < 1e-9);
}

#[test]
fn analyze_with_supplied_gauge() {
    let dir = tempfile::tempdir().unwrap();
    let out = containment(
        &["generate", "dw-witness", "--s", "1.618", "--rho", "1.309", "--out", "w.json"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&containment(
        &["analyze", "w.json", "--gauge", "w.gauge.json"],
        dir.path(),
    ));
    assert_eq!(v["gauge"]["origin"], "supplied");
    assert_eq!(v["gauge"]["pseudo_complete"]["is_pseudo_complete"], true);
    assert!((num(&v, "/gauge/dw") - 1.309).abs() < 1e-5);
}

#[test]
fn analyze_bad_input_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\"vertices\": [[0, 0], [1, 1]]}").unwrap();
    let out = containment(&["analyze", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = containment(&["analyze", "missing.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generate_k_s_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = containment(&["generate", "k-s", "--s", "1.5", "--out", "k.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read_polygon(dir.path().join("k.json")).unwrap().len(), 6);
    let meta: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("k.meta.json")).unwrap()).unwrap();
    assert!((num(&meta, "/tau") - 0.8).abs() < 1e-9);
    assert!((num(&meta, "/s") - 1.5).abs() < 1e-9);
    assert_eq!(meta["params"]["family"], "k-s");
    assert!(!dir.path().join("k.gauge.json").exists());
}

#[test]
fn generate_heptagon_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = containment(&["generate", "heptagon", "--tau", "0.7", "--nu", "0.9"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!((num(&v, "/invariants/tau") - 0.7).abs() < 1e-6);
    let want_s = containment::bounds::s_of_tau_nu(0.7, 0.9).unwrap();
    assert!((num(&v, "/invariants/s") - want_s).abs() < 1e-6);
    assert!(v["body"]["vertices"].as_array().unwrap().len() >= 4);
}

#[test]
fn generate_errors() {
    let dir = tempfile::tempdir().unwrap();
    // Missing parameter.
    let out = containment(&["generate", "k-s"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    // Outside the domain.
    let out = containment(&["generate", "k-s", "--s", "2.5"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    // Unknown family.
    let out = containment(&["generate", "circle"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

fn region_csv(args: &[&str], dir: &Path) -> String {
    let out = containment(args, dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rows(csv: &str) -> Vec<(f64, f64, String, String)> {
    let mut r = csv::Reader::from_reader(csv.as_bytes());
    assert_eq!(
        r.headers().unwrap().iter().collect::<Vec<_>>(),
        ["s", "value", "source", "in_region"]
    );
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            (
                rec[0].parse().unwrap(),
                rec[1].parse().unwrap(),
                rec[2].to_string(),
                rec[3].to_string(),
            )
        })
        .collect()
}

#[test]
fn tau_region_has_triangle_corner() {
    let dir = tempfile::tempdir().unwrap();
    let csv = region_csv(&["region", "tau", "--grid", "100", "--samples", "10"], dir.path());
    let rows = rows(&csv);
    assert!(rows
        .iter()
        .any(|(s, v, src, _)| src == "lower-bound" && *s == 2.0 && (v - 0.6667).abs() < 1e-4));
    assert!(rows.iter().all(|r| r.3 == "true"));
}

#[test]
fn dw_region_peak() {
    let dir = tempfile::tempdir().unwrap();
    let csv = region_csv(&["region", "dw", "--grid", "100", "--samples", "10"], dir.path());
    let rows = rows(&csv);
    let (s, v, _, _) = rows
        .iter()
        .filter(|r| r.2 == "upper-bound")
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert!((v - 1.3090).abs() < 1e-4, "{v}");
    assert!((s - 1.6180).abs() < 1e-4, "{s}");
}

#[test]
fn thousand_random_polygons_in_region() {
    let dir = tempfile::tempdir().unwrap();
    let csv = region_csv(
        &["region", "tau", "--samples", "1000", "--seed", "42"],
        dir.path(),
    );
    let random: Vec<_> = rows(&csv)
        .into_iter()
        .filter(|r| r.2.starts_with("random-polygon(seed=42;"))
        .collect();
    assert_eq!(random.len(), 1000);
    assert!(random.iter().all(|r| r.3 == "true"));
}

#[test]
fn region_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for which in ["tau", "dw"] {
        let args = ["region", which, "--grid", "30", "--samples", "200", "--seed", "7"];
        let a = containment(&args, dir.path());
        let b = containment(&args, dir.path());
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{which}");
    }
}

#[test]
fn region_json_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = containment(
        &["region", "tau", "--grid", "5", "--samples", "3", "--format", "json", "--out", "r.json"],
        dir.path(),
    );
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert!(rows.iter().all(|r| r["in_region"] == true));
    assert!(rows.iter().any(|r| r["source"]["kind"] == "random-polygon"));
}

#[test]
fn region_zero_grid_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = containment(&["region", "tau", "--grid", "0"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_suites() {
    let dir = tempfile::tempdir().unwrap();
    for suite in ["functionals", "bounds", "generators", "pipeline", "regions"] {
        let out = containment(&["verify", suite, "--samples", "20"], dir.path());
        assert_eq!(out.status.code(), Some(0), "{suite}: {}", String::from_utf8_lossy(&out.stdout));
        let v = json(&out);
        assert_eq!(v["suite"], suite);
        let checks = v["checks"].as_array().unwrap();
        assert!(!checks.is_empty());
        for c in checks {
            assert_eq!(c["pass"], true, "{c}");
            for key in ["name", "measured", "expected", "tol"] {
                assert!(c.get(key).is_some(), "{key} missing in {c}");
            }
        }
    }
    let v = json(&containment(&["verify", "bounds"], dir.path()));
    let names: Vec<_> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap().to_string()).collect();
    for want in ["s_hat", "tau_hat", "c jump at phi", "c non-increasing (largest rise)"] {
        assert!(names.iter().any(|n| n == want), "{want}");
    }
}

#[test]
fn unknown_suite_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = containment(&["verify", "everything"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = containment(&[], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generated_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = containment(&["generate", "c-lambda", "--s", "1.8", "--lambda", "0.5", "--out", "c.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let k = read_polygon(dir.path().join("c.json")).unwrap();
    let again = dir.path().join("again.json");
    write_polygon(&again, &k).unwrap();
    assert!(read_polygon(&again).unwrap().same_vertices(&k, 1e-12));
    assert!(k.contains_point(Vec2::ZERO, 0.0));
}

#[test]
fn region_violations_are_dumped() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("run")).unwrap();
    // A negative tolerance shrinks the region to nothing, so every sample
    // counts as a violation.
    let out = containment(
        &["region", "tau", "--grid", "3", "--samples", "2", "--tol=-1", "--out", "run/r.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let dump = dir.path().join("run/region-violation-0.json");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dump).unwrap()).unwrap();
    assert_eq!(v["sample"]["in_region"], false);
    assert!(v["body"]["vertices"].as_array().unwrap().len() >= 3);
    assert!(std::fs::read_to_string(dir.path().join("run/r.csv")).unwrap().contains(",false"));
}
