//! Exit-code contract and report plumbing of the `courant` binary.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name).display().to_string()
}

fn scratch(name: &str, contents: &str) -> String {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::write(&path, contents).unwrap();
    path.display().to_string()
}

fn courant(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_courant")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let (code, stdout, stderr) = courant(&a);
    let v = serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("{e}: {stdout}{stderr}"));
    (code, v)
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap()
}

#[test]
fn passing_run_exits_zero_with_schema() {
    let (code, r) = json(&["verify-algebroid", &data("standard2.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["command"], "verify-algebroid");
    assert_eq!(r["config"]["battery_degree"], 2);
    assert_eq!(r["config"]["extras"], 3);
    assert!(r["battery"]["sections"].as_u64().unwrap() > 4);
    for c in r["checks"].as_array().unwrap() {
        assert_eq!(c["status"], "pass");
        assert!(c["paper_ref"].is_string());
        assert!(c.get("witness").is_none());
    }
}

#[test]
fn failing_check_exits_one_with_witness() {
    let (code, r) = json(&["verify-algebroid", &data("su2_bad_metric.json")]);
    assert_eq!(code, 1);
    let c = check(&r, "compatibility");
    assert_eq!(c["status"], "fail");
    assert_eq!(c["witness"]["residual"], "1");
}

#[test]
fn malformed_input_exits_two() {
    let broken = scratch("broken.json", "{ \"n\": 1, ");
    let (code, stdout, stderr) = courant(&["verify-algebroid", &broken]);
    assert_eq!(code, 2);
    assert!(stdout.is_empty());
    assert!(stderr.contains("broken.json"), "{stderr}");

    let unknown = scratch(
        "unknown_var.json",
        r#"{"n": 1, "rank": 2, "pairing": [["0","1"],["1","0"]], "anchor": [["1","x2"]]}"#,
    );
    assert_eq!(courant(&["verify-algebroid", &unknown]).0, 2);

    let bad_key = scratch(
        "bad_key.json",
        r#"{"n": 0, "rank": 1, "pairing": [["1"]], "anchor": [], "bracket": {"0,1": ["0"]}}"#,
    );
    assert_eq!(courant(&["verify-algebroid", &bad_key]).0, 2);
    assert_eq!(courant(&["verify-algebroid", "/nonexistent/algebroid.json"]).0, 2);
}

#[test]
fn semantic_preconditions_exit_three() {
    let (code, r) = json(&["bott", &data("standard2.json"), &data("bad_dirac.json")]);
    assert_eq!(code, 3);
    let c = check(&r, "dirac-isotropic");
    assert_eq!(c["witness"]["args"], serde_json::json!(["l1", "l1"]));
    assert_eq!(c["witness"]["residual"], "2");

    let (code, r) = json(&["cohomology", &data("standard2.json")]);
    assert_eq!(code, 3);
    assert_eq!(r["checks"][0]["name"], "point-complex");

    // AᵀP ≠ ρ: P pairs b with dx only.
    let predual = scratch("bad_predual.json", r#"{"rank": 1, "pairing_P": [["0","1"]], "alpha_A": [["1"]]}"#);
    let (code, r) = json(&["predual-diagnose", &data("standard1.json"), &predual]);
    assert_eq!(code, 3);
    assert_eq!(r["checks"][0]["name"], "predual-constraint");

    let singular = scratch("singular.json", r#"{"n": 0, "rank": 2, "pairing": [["1","1"],["1","1"]], "anchor": []}"#);
    assert_eq!(courant(&["verify-algebroid", &singular]).0, 3);

    let (code, _) = json(&["connection-build", &data("su2.json"), "--christoffel", &data("christoffel_zero2.json")]);
    assert_eq!(code, 3);
}

#[test]
fn built_connection_round_trips_through_verify() {
    let (code, r) = json(&["connection-build", &data("port_hamiltonian.json"), "--predual", &data("port_hamiltonian_b.json")]);
    assert_eq!(code, 0);
    let conn = scratch("ph_built.json", &serde_json::to_string(&r["result"]).unwrap());
    let (code, r) = json(&[
        "connection-verify",
        &data("port_hamiltonian.json"),
        &conn,
        "--predual",
        &data("port_hamiltonian_b.json"),
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["checks"].as_array().unwrap().len(), 3);
}

#[test]
fn perturbed_connection_fails_axiom_three() {
    // ∇_{∂1}dx1 = dx1 on standard(1) is tensorial but breaks ∇_e(d_Bf) = d_B(ρ(e)f).
    let conn = scratch("perturbed.json", r#"{"gamma": {"1,2": ["0", "1"]}}"#);
    let (code, r) = json(&["connection-verify", &data("standard1.json"), &conn]);
    assert_eq!(code, 1);
    assert_eq!(check(&r, "dorfman-axiom-3")["status"], "fail");
    assert_eq!(check(&r, "dorfman-axiom-1")["status"], "pass");
}

#[test]
fn curvature_reports_flatness_without_failing() {
    let (code, r) = json(&["curvature", &data("standard2.json"), &data("mjl_poly2_connection.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["induced_linear_connection"], "case K");
    assert_eq!(r["result"]["flatness"]["flat-r1"]["status"], "fail");
}

#[test]
fn cohomology_table_in_text_and_json() {
    let (code, text, _) = courant(&["cohomology", &data("su2_plus_line.json"), "--max-p", "3"]);
    assert_eq!(code, 0);
    assert!(text.contains("   p  dim  rank d  betti"), "{text}");
    assert!(text.contains("   2    6       3      0"), "{text}");
    let (_, r) = json(&["cohomology", &data("su2_plus_line.json")]);
    assert_eq!(r["result"]["betti"], serde_json::json!([1, 1, 0, 1, 1]));
    assert_eq!(r["result"]["table"][4]["dim"], 1);
}

#[test]
fn predual_diagnosis_names_the_splitting() {
    let (code, r) = json(&["predual-diagnose", &data("port_hamiltonian.json"), &data("port_hamiltonian_b.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["splitting"], "QuotientOfE");
    assert_eq!(r["result"]["f_rank"], 2);
}

#[test]
fn output_flag_writes_the_report() {
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("report.json");
    let out_s = out.display().to_string();
    let (code, stdout, _) = courant(&["bott", &data("standard2.json"), &data("dirac_tangent.json"), "--format", "json", "-o", &out_s]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let written: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(written["command"], "bott");
}

#[test]
fn seed_changes_only_what_it_should() {
    let (_, a) = json(&["verify-algebroid", &data("standard1.json"), "--seed", "1"]);
    let (_, b) = json(&["verify-algebroid", &data("standard1.json"), "--seed", "2"]);
    assert_eq!(a["config"]["seed"], 1);
    assert_eq!(b["config"]["seed"], 2);
    assert_eq!(a["checks"].as_array().unwrap().len(), b["checks"].as_array().unwrap().len());
    let (_, c) = json(&["verify-algebroid", &data("standard1.json"), "--battery-degree", "1", "--extras", "0"]);
    assert!(c["battery"]["sections"].as_u64() < a["battery"]["sections"].as_u64());
}
