use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coble-lab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn non_symmetric_tau_is_a_config_error_without_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(
        &config,
        r#"{"tau": [[{"re": 0.0, "im": 1.0}, {"re": 0.3, "im": 0.1}],
                    [{"re": 0.0, "im": 0.0}, {"re": 0.0, "im": 1.0}]]}"#,
    )
    .unwrap();
    let report = dir.path().join("report.json");
    let o = lab(&["run-all", "--config", config.to_str().unwrap(), "--json", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(255));
    assert!(!report.exists());
    assert!(String::from_utf8_lossy(&o.stderr).contains("configuration error"));
}

#[test]
fn chow_eval_prints_the_degree_of_sigma() {
    let o = lab(&["chow", "eval", "--ring", "su2xJ.ring", "--expr", "((h+2*t)+4*t)^5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "45\n");
}

#[test]
fn chow_eval_reads_a_ring_file() {
    let dir = tempfile::tempdir().unwrap();
    let ring = dir.path().join("p2.ring");
    std::fs::write(&ring, "gen h:1;\nrel h^3;\nint h^2 = 1;\ncover 2;\n").unwrap();
    let o = lab(&["chow", "eval", "--ring", ring.to_str().unwrap(), "--expr", "(3*h)^2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "9/2\n");
}

#[test]
fn chow_deg_sigma_reports_the_breakdown() {
    let o = lab(&["chow", "deg-sigma"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["total"], "45");
    assert_eq!(v["breakdown"][1]["contribution"], "20");
}

#[test]
fn invariants_table_has_five_cubics() {
    let o = lab(&["invariants", "--character", "0000"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let dims: Vec<u64> = v["degrees"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["characters"][0]["dimension"].as_u64().unwrap())
        .collect();
    assert_eq!(dims, [0, 0, 5]);
    assert!(v["degrees"][0]["characters"][0]["obstruction"].is_string());
}

#[test]
fn case_analysis_lists_all_decompositions() {
    let o = lab(&["case-analysis"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["plane_curve_nodes"], 8);
    assert_eq!(v["adjunction"]["genus"], -35);
    assert_eq!(v["decompositions"].as_array().unwrap().len(), 7);
}

#[test]
fn fit_cubic_writes_polyring_files_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = lab(&[
        "fit-cubic",
        "--poly-dir",
        d.to_str().unwrap(),
        "--csv-dir",
        d.join("csv").to_str().unwrap(),
        "--json",
        d.join("r.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let cubic = std::fs::read_to_string(d.join("coble_cubic.poly")).unwrap();
    assert!(cubic.starts_with("# polyring kind=float nvars=9"));
    let quadrics = std::fs::read_to_string(d.join("quadrics.poly")).unwrap();
    let q: Vec<coble_core::poly::MultiPoly<num_complex::Complex64>> = coble_lab::formats::read_polyring_list(&quadrics).unwrap();
    assert_eq!(q.len(), 9);
    let points = coble_lab::formats::read_point_csv(&std::fs::read_to_string(d.join("csv/jacobian.csv")).unwrap()).unwrap();
    assert_eq!(points.len(), 120);
}

#[test]
fn overrides_show_up_in_the_config_echo() {
    let o = lab(&["verify-duality", "--seed", "11", "--tol", "1e-8", "--samples", "30"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config_echo"]["seed"], 11);
    assert_eq!(v["config_echo"]["tol_rank"], 1e-8);
    assert_eq!(v["config_echo"]["samples"]["held_out"], 30);
    assert_eq!(o.status.code(), Some(0));
}
