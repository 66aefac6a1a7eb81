use cat0lab_cli::{run, Outcome, EXIT_OK, EXIT_VALIDATION};
use serde_json::Value;

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("cat0lab").chain(args.iter().copied()))
}

fn json(out: &Outcome) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout))
}

#[test]
fn classify_unipotent_case_one() {
    let out = cli(&["classify", "--matrix", "1,0,0,0,1,1,0,0,1", "--steps", "0"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let v = json(&out);
    assert_eq!(v["schema"], "cat0lab/1");
    assert_eq!(v["case"], 1);
    assert_eq!(v["kind"], "parabolic");
    assert_eq!(v["translation_length"]["closed_form"], 0.0);
    assert!(v["translation_length"]["numeric"].is_null());
}

#[test]
fn classify_diagonal_case_five() {
    let out = cli(&["classify", "--matrix", "2,0,0,0,1,0,0,0,0.5", "--steps", "50"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let v = json(&out);
    assert_eq!(v["case"], 5);
    assert_eq!(v["kind"], "hyperbolic");
    let expected = 2.0 * 2f64.sqrt() * 2f64.ln();
    let closed = v["translation_length"]["closed_form"].as_f64().unwrap();
    assert!((closed - expected).abs() < 1e-12);
    // e lies on the axis, so the flow cannot improve on |g|
    let gap = v["translation_length"]["gap"].as_f64().unwrap();
    assert!(gap.abs() < 1e-9, "gap {gap}");
}

#[test]
fn determinant_must_be_one_unless_normalized() {
    let bad = cli(&["classify", "--matrix", "2,0,0,0,1,0,0,0,1", "--steps", "0"]);
    assert_eq!(bad.code, EXIT_VALIDATION);
    assert_eq!(json(&bad)["error"]["kind"], "validation");
    let ok = cli(&["classify", "--matrix", "2,0,0,0,1,0,0,0,1", "--normalize", "--steps", "0"]);
    assert_eq!(ok.code, EXIT_OK);
    assert_eq!(json(&ok)["case"], 6);
}

#[test]
fn malformed_matrices_exit_two() {
    for m in ["1,0,0,0,1,0,0,0", "1,0,0,0,1,0,0,0,x", "1,0,0,0,1,0,0,0,1,0", "nan,0,0,0,1,0,0,0,1"] {
        let out = cli(&["classify", "--matrix", m]);
        assert_eq!(out.code, EXIT_VALIDATION, "{m}");
    }
    assert_eq!(cli(&["classify"]).code, EXIT_VALIDATION);
    assert_eq!(cli(&["frobnicate"]).code, EXIT_VALIDATION);
}

#[test]
fn negative_entries_parse() {
    let out = cli(&["classify", "--matrix", "-1,0,0,0,-1,0,0,0,1", "--steps", "0"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert_eq!(json(&out)["kind"], "elliptic");
}

#[test]
fn boundary_radius_of_case_three() {
    let out = cli(&["boundary", "--matrix", "1,1,0,0,1,1,0,0,1", "--samples", "100", "--seed", "3"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let v = json(&out);
    assert_eq!(v["fixed_set"]["variant"], "single_edge");
    let r = v["radius"]["value"].as_f64().unwrap();
    assert!((r - std::f64::consts::FRAC_PI_6).abs() < 1e-6, "{r}");
}

#[test]
fn flow_reports_fixed_boundary_limit() {
    let out = cli(&["flow", "--matrix", "1,0,0,0,1,1,0,0,1", "--steps", "3000"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let v = json(&out);
    assert!(v["final_value"].as_f64().unwrap() < v["initial_value"].as_f64().unwrap());
    assert_eq!(v["boundary_limit"]["is_fixed"], true);
}

#[test]
fn flow_csv_has_one_row_per_step() {
    let out = cli(&["flow", "--matrix", "2,0,0,0,1,0,0,0,0.5", "--steps", "10", "--tau", "0.5", "--csv"]);
    assert_eq!(out.code, EXIT_OK);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines[0], "t,value,grad_norm");
    assert_eq!(lines.len(), 12);
}

#[test]
fn center_of_triangle() {
    let out = cli(&["center", "--dim", "2"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let v = json(&out);
    let r = v["radius"]["value"].as_f64().unwrap();
    assert!((r - (1.0 / 3f64.sqrt()).acos()).abs() < 1e-4);
}

#[test]
fn center_of_small_suspension() {
    let out = cli(&["center", "--dim", "2", "--suspension", "--grid", "20", "--levels", "10"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let v = json(&out);
    assert_eq!(v["radius"]["value"].as_f64().unwrap(), std::f64::consts::FRAC_PI_2);
    assert_eq!(v["second_centers"].as_array().unwrap().len(), 1);
}

#[test]
fn verify_list_names_every_suite_once() {
    let v = json(&cli(&["verify", "--list"]));
    let names: Vec<&str> = v["suites"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    let mut dedup = names.clone();
    dedup.sort_unstable();
    dedup.dedup();
    assert_eq!(dedup.len(), names.len());
    assert!(names.contains(&"radfix"));
}

#[test]
fn verify_radfix_passes() {
    let out = cli(&["verify", "--suite", "radfix", "--seed", "7"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stdout);
    assert_eq!(json(&out)["suite"]["passed"], true);
}

#[test]
fn unknown_suite_is_rejected() {
    assert_eq!(cli(&["verify", "--suite", "nope"]).code, EXIT_VALIDATION);
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--suite", "tits-metric", "--seed", "11", "--samples", "100"];
    let a = cli(&args);
    let b = cli(&args);
    assert_eq!(a.code, EXIT_OK);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_path_receives_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = cli(&["classify", "--matrix", "1,0,0,0,1,0,0,0,1", "--steps", "0", "--out", path.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["case"], 7);
}

#[test]
fn csv_is_refused_for_classify() {
    assert_eq!(cli(&["classify", "--matrix", "1,0,0,0,1,0,0,0,1", "--csv"]).code, EXIT_VALIDATION);
}
