use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn gelfand(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gelfand"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn linking_fixture_has_two_point_spectrum() {
    let out = gelfand(&["--json", "spectrum", path(&fixture("linking_category.json"))]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["output"]["base_points"].as_array().unwrap().len(), 2);
    assert_eq!(report["data"]["classes"].as_array().unwrap().len(), 2);
}

#[test]
fn diagonal_fixture_has_trivial_spectrum() {
    let out = gelfand(&["--json", "spectrum", path(&fixture("diagonal_category.json"))]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["output"]["base_points"].as_array().unwrap().len(), 3);
    assert!(report["output"]["lambda"].as_array().unwrap().is_empty());
}

#[test]
fn noncommutative_fixture_is_rejected() {
    let f = fixture("invalid/noncommutative_category.json");
    for cmd in ["spectrum", "roundtrip"] {
        let out = gelfand(&[cmd, path(&f)]);
        assert_eq!(code(&out), 2, "{cmd}");
    }
    let out = gelfand(&["validate", path(&f)]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("commutative: false"));
}

#[test]
fn every_valid_fixture_roundtrips() {
    for name in [
        "linking_category.json",
        "linking_phased_category.json",
        "diagonal_category.json",
        "z6_groupoid.json",
        "trivial_spaceoid.json",
        "linking_spaceoid.json",
        "torsor_spaceoid.json",
        "empty_spaceoid.json",
    ] {
        let out = gelfand(&["roundtrip", path(&fixture(name))]);
        assert_eq!(code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn corrupted_lambda_fails_verification() {
    let f = fixture("invalid/corrupted_spaceoid.json");
    assert_eq!(code(&gelfand(&["roundtrip", path(&f)])), 1);
    assert_eq!(code(&gelfand(&["sections", path(&f)])), 2);
    assert_eq!(code(&gelfand(&["validate", path(&f)])), 2);
}

#[test]
fn sections_then_spectrum_recovers_the_base() {
    let dir = tempdir("sections");
    let cat = dir.join("sections.json");
    let out = gelfand(&["--out", path(&cat), "sections", path(&fixture("torsor_spaceoid.json"))]);
    assert_eq!(code(&out), 0);
    let out = gelfand(&["--json", "spectrum", path(&cat)]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["output"]["base_points"].as_array().unwrap().len(), 2);
}

#[test]
fn made_groupoids_report_commutativity() {
    let out = gelfand(&["--json", "make", "groupoid", "--group", "Z6", "--objects", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["data"]["commutative"], Value::Bool(true));

    let out = gelfand(&["--json", "make", "groupoid", "--group", "S3"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["data"]["commutative"], Value::Bool(false));
    assert_eq!(report["data"]["full"], Value::Bool(true));
}

#[test]
fn made_files_validate() {
    let dir = tempdir("make");
    for kind in ["trivial", "linking", "torsor", "groupoid"] {
        let file = dir.join(format!("{kind}.json"));
        let out = gelfand(&["--seed", "5", "--out", path(&file), "make", kind, "--points", "3", "--objects", "2"]);
        assert_eq!(code(&out), 0, "{kind}");
        let out = gelfand(&["validate", path(&file)]);
        assert_eq!(code(&out), 0, "{kind}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn funcalc_square_root_table() {
    let out = gelfand(&[
        "--json",
        "funcalc",
        path(&fixture("matrices/matrix_3_4.json")),
        "--function",
        r#"{"table": [[[5, 0], [2.23606797749979, 0]]]}"#,
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let row = &json(&out)["output"]["entries"][0];
    let s5 = 5f64.sqrt();
    assert!((row[0][0].as_f64().unwrap() - 3.0 / s5).abs() < 1e-12);
    assert!((row[1][0].as_f64().unwrap() - 4.0 / s5).abs() < 1e-12);
}

#[test]
fn funcalc_rejects_points_off_the_spectrum() {
    let out = gelfand(&[
        "funcalc",
        path(&fixture("matrices/matrix_3_4.json")),
        "--function",
        r#"{"table": [[[25, 0], [5, 0]]]}"#,
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn selftest_tiny_sizes_pass() {
    let out = gelfand(&["selftest", "--cases", "3", "--max-points", "1", "--max-objects", "1", "--max-dim", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn selftest_default_sizes_pass() {
    let out = gelfand(&["--seed", "11", "selftest", "--cases", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn selftest_with_broken_tolerance_fails() {
    let out = gelfand(&["--tol", "1e-30", "selftest", "--cases", "3", "--max-dim", "8"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn invalid_input_exits_two() {
    assert_eq!(code(&gelfand(&["--tol", "-1", "selftest"])), 2);
    assert_eq!(code(&gelfand(&["spectrum", "/nonexistent.json"])), 2);
    assert_eq!(code(&gelfand(&["make", "groupoid", "--group", "Q8"])), 2);
    assert_eq!(code(&gelfand(&["roundtrip", path(&fixture("matrices/matrix_3_4.json"))])), 2);
}

#[test]
fn identical_runs_are_byte_identical() {
    let f = fixture("torsor_spaceoid.json");
    let args = ["--json", "--seed", "42", "roundtrip", path(&f)];
    let (a, b) = (gelfand(&args), gelfand(&args));
    assert_eq!(a.stdout, b.stdout);
    let args = ["--json", "--seed", "42", "make", "torsor", "--points", "3", "--objects", "3"];
    assert_eq!(gelfand(&args).stdout, gelfand(&args).stdout);
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gelfand-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
