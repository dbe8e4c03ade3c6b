use std::process::{Command, Output};

use bergman_cli::{report_schema, CRITERIA};
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bergman-lab")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad report ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn half_plane_suite_passes() {
    let out = bin(&["suite", "--domain", "halfplane"]);
    let report = json(&out);
    assert_eq!(out.status.code(), Some(0), "{report:#}");
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.len() >= 10);
    assert!(checks.iter().all(|c| c["check_id"].as_str().unwrap().contains("half-plane") || c["criterion"] == "half-plane-b"
        || c["criterion"] == "half-plane-transform"));
}

#[test]
fn malformed_domain_file_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "variant = \"sector\"\n[parameters]\nvertex = [0.0, 0.0]\nbisector = 0.5\n").unwrap();
    let out = bin(&["kernel", "--domain", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
    assert!(out.stdout.is_empty());

    let out = bin(&["kernel", "--domain", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = bin(&["reflect", "--domain", "halfplane", "--points", "gen:spiral:3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = bin(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wedge.toml");
    std::fs::write(&path, "variant = \"sector\"\n[parameters]\nvertex = [0.0, 0.0]\nbisector = 0.7853981633974483\nopening = 1.5707963267948966\n").unwrap();
    let out = bin(&["reflect", "--domain", path.to_str().unwrap(), "--points", "gen:annulus:6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["config"]["resolved_domain"]["variant"], "sector");
}

#[test]
fn transform_with_interior_point_fails_the_check() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.txt");
    std::fs::write(&pts, "# xi\n0 -2\n0.5, 1.0\n").unwrap();
    let out = bin(&["transform", "--domain", "halfplane", "--fn", "rational:0,-1", "--points", pts.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert!(report["error"].as_str().unwrap().contains("exterior"), "{report:#}");
    assert_eq!(report["pass"], false);
    // The first point was evaluated before the failure.
    assert_eq!(report["tables"]["transform"]["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn transform_matches_the_half_plane_closed_form() {
    let out = bin(&["transform", "--domain", "halfplane", "--fn", "rational:0,-1", "--fn", "kernel:0.5,1", "--points", "gen:annulus:4"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["tables"]["transform"]["rows"].as_array().unwrap().len(), 8);
    assert_eq!(report["checks"][0]["check_id"], "transform/half-plane-closed-form");
}

#[test]
fn budget_exhaustion_exits_three() {
    let out = bin(&["transform", "--domain", "quadrant", "--fn", "rational:-0.5,-0.5", "--points", "gen:annulus:1", "--tol", "1e-290"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(json(&out)["error"].as_str().unwrap().contains("budget"));
}

#[test]
fn injected_check_failure_exits_one() {
    // Parseval holds to about 1e-13; a tolerance of 1e-30 cannot be met.
    let out = bin(&["operators", "verify", "--domain", "halfplane", "--points", "gen:annulus:4", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    let failed: Vec<&str> =
        report["checks"].as_array().unwrap().iter().filter(|c| c["pass"] == false).map(|c| c["check_id"].as_str().unwrap()).collect();
    assert_eq!(failed.len(), 1, "{failed:?}");
    assert!(failed[0].starts_with("operators/parseval/"));

    let out = bin(&["operators", "verify", "--domain", "halfplane", "--points", "gen:annulus:4"]);
    assert_eq!(out.status.code(), Some(0), "{:#}", json(&out));
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        &["lipschitz", "--domain", "quadrant", "--seed", "7"][..],
        &["kernel", "--domain", "quadrant", "--points", "gen:annulus:5", "--format", "csv"][..],
        &["operators", "build", "--domain", "quadrant", "--points", "gen:annulus:6"][..],
    ] {
        let a = bin(args);
        let b = bin(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn out_file_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let out = bin(&["reflect", "--domain", "quadrant", "--points", "gen:annulus:5", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("check_id,criterion,value,expected,tol,relation,pass,error\n"));
    assert!(csv.contains("\n# reflection\nxi_re,xi_im,rho_re,rho_im\n"));
}

#[test]
fn schema_lists_every_criterion() {
    let schema = report_schema();
    for field in ["check_id", "value", "expected", "tol", "pass"] {
        assert!(schema["check"].get(field).is_some(), "{field}");
    }
    let listed: Vec<&str> = schema["criteria"].as_array().unwrap().iter().map(|c| c["criterion"].as_str().unwrap()).collect();
    assert_eq!(listed.len(), 13);
    for crit in CRITERIA {
        assert!(listed.contains(&crit.id));
        assert!(!crit.check_ids.is_empty());
    }
    assert_eq!(schema["schema_version"], "bergman-lab-report/1");
    let printed = bin(&["schema"]);
    assert_eq!(printed.status.code(), Some(0));
    assert_eq!(json(&printed), schema);
}
