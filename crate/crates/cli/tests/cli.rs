use std::process::{Command, Output};

use serde_json::Value;
use weave_core::graph::{locally_equivalent, Graph};
use weave_core::protocols::ProtocolResult;

fn weave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weave"))
        .args(args)
        .env_remove("WEAVE_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn report(args: &[&str]) -> Value {
    let o = weave(args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("report is JSON")
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

/// Top-level layout every report must have.
fn check_schema(v: &Value, verb: &str) {
    let o = v.as_object().expect("object");
    assert_eq!(o["schema_version"], "1.0");
    assert_eq!(o["verb"], verb);
    assert!(o["inputs"].is_object());
    assert!(o.contains_key("results"));
    assert!(o["timing"].as_f64().unwrap() >= 0.0);
    if let Some(p) = o.get("pass") {
        assert!(p.is_boolean());
    }
    let allowed = ["schema_version", "verb", "inputs", "results", "pass", "timing"];
    assert!(o.keys().all(|k| allowed.contains(&k.as_str())));
    let again: Value = serde_json::from_str(&serde_json::to_string(v).unwrap()).unwrap();
    assert_eq!(&again, v);
}

#[test]
fn simulate_ghz_three() {
    let r = report(&["simulate", "--protocol", "ghz", "--users", "3"]);
    check_schema(&r, "simulate");
    assert_eq!(r["results"]["exponent"], 2);
    assert_eq!(r["results"]["probability"], 0.25);
    assert_eq!(r["inputs"]["users"], 3);
    let res: ProtocolResult = serde_json::from_value(r["results"]["result"].clone()).unwrap();
    assert!(locally_equivalent(&res.final_graph, &Graph::star(0, &[1, 2])).unwrap());
}

#[test]
fn simulate_chain() {
    let r = report(&["simulate", "--protocol", "chain", "--blocks", "path4,path4,path4", "--plan", "Y,Y"]);
    assert_eq!(r["results"]["exponent"], 2);
    assert_eq!(r["results"]["shape"], "path");
    assert_eq!(r["results"]["result"]["chain"]["failures"], 0);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&weave(&["classify", "--word", ""])), 2);
    assert_eq!(code(&weave(&["classify"])), 2);
    assert_eq!(code(&weave(&["classify", "--word", "XQ"])), 2);
    assert_eq!(code(&weave(&["simulate"])), 2);
    assert_eq!(code(&weave(&["simulate", "--protocol", "ghz", "--users", "3", "--word", "X"])), 2);
    assert_eq!(code(&weave(&["simulate", "--protocol", "chain", "--blocks", "path4,path4", "--plan", "YY"])), 2);
    assert_eq!(code(&weave(&["montecarlo", "--protocol", "ghz", "--users", "3", "--trials", "10"])), 2);
    assert_eq!(code(&weave(&["verify", "--suite", "nope"])), 2);
    assert_eq!(code(&weave(&["frobnicate"])), 2);
    assert_eq!(code(&weave(&["export", "--circuit", "ghz", "--format", "dot"])), 2);
}

#[test]
fn size_limits_are_runtime_failures() {
    let o = weave(&["simulate", "--protocol", "ghz", "--users", "9"]);
    assert_eq!(code(&o), 1);
    assert!(!o.stderr.is_empty());
    assert_eq!(code(&weave(&["classify", "--word", "XYZXYZX"])), 1);
}

#[test]
fn classify_word() {
    let r = report(&["classify", "--word", "YYYY"]);
    check_schema(&r, "classify");
    assert_eq!(r["pass"], true);
    assert_eq!(r["results"]["n"], 8);
    assert_eq!(r["results"]["equivalent"], true);
    let r = report(&["classify", "--word", "XZY", "--resource", "honeycomb", "--open"]);
    assert_eq!(r["results"]["closed"], false);
    assert_eq!(r["pass"], true);
}

#[test]
fn verify_appendix_b_at_eight() {
    let r = report(&["verify", "--suite", "appendix-b", "--n", "8"]);
    check_schema(&r, "verify");
    assert_eq!(r["pass"], true);
    let suite = &r["results"]["suites"][0];
    assert_eq!(suite["details"]["zigzag"][0]["words"], 81);
    assert_eq!(suite["details"]["zigzag"][0]["mismatches"], 0);
}

#[test]
fn montecarlo_reports_are_reproducible() {
    let args = ["montecarlo", "--protocol", "ghz", "--users", "3", "--trials", "2000", "--seed", "11"];
    let a = report(&args);
    let b = report(&args);
    check_schema(&a, "montecarlo");
    assert_eq!(without_timing(a.clone()), without_timing(b));
    let stats = &a["results"]["statistics"];
    assert_eq!(stats["trials"], 2000);
    assert_eq!(stats["exact_probability"], 0.25);
    let other = report(&["montecarlo", "--protocol", "ghz", "--users", "3", "--trials", "2000", "--seed", "12"]);
    assert_ne!(stats["successes"], other["results"]["statistics"]["successes"]);
}

#[test]
fn montecarlo_csv() {
    let o = weave(&["montecarlo", "--protocol", "path", "--users", "3", "--trials", "5", "--seed", "1", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,success,resources");
    assert_eq!(lines.len(), 6);
}

#[test]
fn export_graph_dot() {
    let o = weave(&["export", "--graph", "path:3", "--format", "dot"]);
    assert_eq!(code(&o), 0);
    let dot = String::from_utf8(o.stdout).unwrap();
    assert_eq!(dot.matches(" -- ").count(), 2);
    let nodes = dot.lines().filter(|l| l.trim().ends_with(';') && !l.contains("--")).count();
    assert_eq!(nodes, 3);
}

#[test]
fn export_result_json_round_trips() {
    let o = weave(&["export", "--protocol", "path", "--users", "3"]);
    assert_eq!(code(&o), 0);
    let res: ProtocolResult = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(res.final_graph, Graph::path(&[0, 1, 2]));
    assert_eq!(res.exponent, 2);
    let back = serde_json::to_value(&res).unwrap();
    assert_eq!(back, serde_json::from_slice::<Value>(&o.stdout).unwrap());
}

#[test]
fn export_ghz_state() {
    let o = weave(&["export", "--circuit", "ghz", "--n", "3"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let terms = v["state"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
    for t in terms {
        let re = t["amplitude"][0].as_f64().unwrap();
        assert!((re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-11);
        assert_eq!(t["amplitude"][0].to_string(), "0.707106781187");
    }
    let again = weave(&["export", "--circuit", "ghz", "--n", "3"]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn out_dir_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_weave"))
        .args(["simulate", "--protocol", "cycle", "--users", "4"])
        .env("WEAVE_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(dir.path().join("simulate.json")).unwrap();
    let v: Value = serde_json::from_str(&written).unwrap();
    check_schema(&v, "simulate");
    let file = dir.path().join("sub").join("g.csv");
    let o = weave(&["export", "--graph", "cycle:4", "--format", "csv", "--out", file.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_to_string(&file).unwrap().lines().count(), 5);
    let names: Vec<_> = std::fs::read_dir(dir.path().join("sub")).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 1);
}
