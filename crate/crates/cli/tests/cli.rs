//! End-to-end runs of the `midsub` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const CUBE: &str = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1\n\
                    f 1 4 3 2\nf 5 6 7 8\nf 1 2 6 5\nf 2 3 7 6\nf 3 4 8 7\nf 4 1 5 8\n";

fn midsub(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_midsub")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn regular_certificate() {
    let o = midsub(&["certify", "regular", "--word", "AAR"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["verdict"], "C1-certified-regular");
    assert_eq!(v["subject"]["analysed"], "AARAAR");
    assert!(v["evidence"].as_array().unwrap().iter().any(|e| e["name"] == "diff2_bound"));
}

#[test]
fn extraordinary_verdicts_map_to_exit_codes() {
    let o = midsub(&["certify", "extraordinary", "--word", "VAV", "--valence", "7"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["verdict"], "C1-certified-extraordinary");

    let o = midsub(&["certify", "extraordinary", "--word", "VRVR", "--valence", "5"]);
    assert_eq!(code(&o), 2);
    assert_eq!(stdout_json(&o)["verdict"], "technique-inapplicable");
}

#[test]
fn invalid_inputs_exit_three() {
    let o = midsub(&["certify", "extraordinary", "--word", "AAR", "--valence", "2"]);
    assert_eq!(code(&o), 3);
    assert_eq!(stdout_json(&o)["verdict"], "invalid-input");

    let o = midsub(&["certify", "regular", "--word", "AXR"]);
    assert_eq!(code(&o), 3);
    let e = stderr_json(&o);
    assert_eq!(e["schema"], 1);
    assert_eq!(e["error"], "syntax");

    let o = midsub(&["certify", "regular", "--word", "R"]);
    assert_eq!(code(&o), 3);
    assert_eq!(stdout_json(&o)["verdict"], "invalid-input");
}

#[test]
fn subdivide_writes_the_refined_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("cube.obj");
    let out = dir.path().join("out.obj");
    std::fs::write(&input, CUBE).unwrap();
    let o = midsub(&["subdivide", "--in", path(&input), "--word", "AAR", "--steps", "2", "--out", path(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["rounds"].as_array().unwrap().len(), 2);
    assert_eq!(v["rounds"][1]["vertices"], 98);
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 98);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 96);
}

#[test]
fn broken_meshes_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.obj");
    let out = dir.path().join("out.obj");
    // Three faces on one edge.
    std::fs::write(&input, "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 0 0 1\nv 1 0 1\nf 1 2 3 4\nf 2 1 5 6\nf 1 2 6 5\n")
        .unwrap();
    let o = midsub(&["subdivide", "--in", path(&input), "--word", "AAR", "--out", path(&out)]);
    assert_eq!(code(&o), 3);
    assert!(!out.exists());

    let o = midsub(&["subdivide", "--in", path(&dir.path().join("missing.obj")), "--word", "AAR", "--out", path(&out)]);
    assert_eq!(code(&o), 3);
    assert_eq!(stderr_json(&o)["error"], "io");
}

#[test]
fn spectrum_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("eig.csv");
    let o = midsub(&["spectrum", "--word", "AAR", "--valence", "5", "--csv", path(&csv)]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["frequencies"].as_array().unwrap().len(), 5);
    let lambda = v["lambda_subdominant"].as_f64().unwrap();
    assert!((lambda - 0.5499883545182973).abs() < 1e-9, "{lambda}");
    assert!(std::fs::read_to_string(&csv).unwrap().lines().count() > 5);
}

#[test]
fn charmap_writes_obj_and_edge_table() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("char.obj");
    let o = midsub(&["charmap", "--word", "VAV", "--valence", "5", "--out", path(&obj)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["contained"], true);
    assert!(std::fs::read_to_string(&obj).unwrap().lines().any(|l| l.starts_with("f ")));
    let table = std::fs::read_to_string(obj.with_extension("csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("i,j,re,im,angle,in_cone"));
    assert_eq!(lines.count() as u64, v["edges"].as_u64().unwrap());
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, "cone_levels = 2\neigen_tol = 1e-11\n").unwrap();
    let o = midsub(&["--config", path(&cfg), "--cone-levels", "3", "certify", "regular", "--word", "AR"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["config"]["cone_levels"], 3);
    assert!((v["config"]["eigen_tol"].as_f64().unwrap() - 1e-11).abs() < 1e-20);

    std::fs::write(&cfg, "no_such_knob = 1\n").unwrap();
    assert_eq!(code(&midsub(&["--config", path(&cfg), "certify", "regular", "--word", "AR"])), 3);
}

#[test]
fn verify_paper_reports_tap_and_catches_a_planted_error() {
    let o = midsub(&["verify-paper", "--only", "1,2"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("ok 1 ")));
    assert!(text.lines().any(|l| l.starts_with("ok 2 ")));

    let o = midsub(&["verify-paper", "--only", "1,2", "--inject-r-norm", "1/3"]);
    assert_eq!(code(&o), 2);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("not ok 1 ")));
    assert!(text.lines().any(|l| l.starts_with("ok 2 ")));

    assert_eq!(code(&midsub(&["verify-paper", "--only", "12"])), 3);
}
