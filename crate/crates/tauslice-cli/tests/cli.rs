use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    p.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tauslice")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn check_stable_certificate() {
    let out = run(&["check-stable", &corpus("zigzag_a5.json")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["l"], 2);
    assert_eq!(v["tau"]["3"], "3");
    assert_eq!(v["duality"], "verified");
}

#[test]
fn check_stable_rejects_path_algebra() {
    let out = run(&["check-stable", &corpus("linear_a3.json")]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["stable"], false);
    assert_eq!(v["violation"]["condition"], "early_socle");
}

#[test]
fn absolute_verify() {
    let out = run(&["absolute", "--m", "2", "--r", "2", "--verify"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["vertices"], 3);
    assert_eq!(v["passed"], true);
}

#[test]
fn verify_all_is_deterministic() {
    let a = run(&["verify", "all", "--suite", "small", "--seed", "7"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stdout));
    let b = run(&["verify", "all", "--suite", "small", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["failed"], 0);
    assert!(v["jobs"].as_u64().unwrap() > 50);
}

#[test]
fn slice_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let zig = corpus("zigzag_a5.json");
    let init = run(&["slice", "init", &zig]);
    assert_eq!(code(&init), 0);
    let s0 = dir.path().join("s0.json");
    std::fs::write(&s0, &init.stdout).unwrap();
    let s0 = s0.to_str().unwrap();

    let check = run(&["slice", "check", &zig, "--slice", s0]);
    assert_eq!(code(&check), 0);
    assert_eq!(json(&check)["convex"], true);

    let mutated = run(&["slice", "mutate", &zig, "--slice", s0, "--at", "(2,1)", "--dir", "minus"]);
    assert_eq!(code(&mutated), 0);
    let s1 = dir.path().join("s1.json");
    std::fs::write(&s1, &mutated.stdout).unwrap();
    let s1 = s1.to_str().unwrap();

    let alg = json(&run(&["slice", "algebra", &zig, "--slice", s1]));
    assert_eq!(alg["relations"].as_array().unwrap().len(), 1);

    let reduce = json(&run(&["slice", "reduce", &zig, "--slice", s1]));
    assert_eq!(reduce["mutations"].as_array().unwrap().len(), 1);

    let illegal = run(&["slice", "mutate", &zig, "--slice", s0, "--at", "(1,0)", "--dir", "minus"]);
    assert_eq!(code(&illegal), 1);
    assert!(String::from_utf8_lossy(&illegal.stderr).contains("sink"));
}

#[test]
fn incomplete_slice_fails() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, r#"{"vertices": [["1", 0], ["2", 1]]}"#).unwrap();
    let out = run(&["slice", "check", &corpus("zigzag_a5.json"), "--slice", p.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["complete"], false);
}

#[test]
fn trexs_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("chain.json");
    std::fs::write(&p, r#"[{"vertex": "(2,1)", "direction": "minus"}, {"vertex": "(2,-1)", "direction": "plus"}]"#)
        .unwrap();
    let out = run(&["verify", "trexs", &corpus("zigzag_a5.json"), "--mutations", p.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["slices"], 3);
}

#[test]
fn bgp_and_koszul() {
    let zig = corpus("zigzag_a5.json");
    let out = run(&["bgp", &zig, "--at", "(2,1)", "--verify"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["matches"], true);
    let out = run(&["koszul", &corpus("linear_a3.json"), "--bound", "6"]);
    assert_eq!(code(&out), 0);
    let out = run(&["gldim", &corpus("linear_a3.json")]);
    assert_eq!(json(&out)["global_dimension"], 1);
    let out = run(&["gldim", &corpus("loop_l1.json")]);
    assert_eq!(json(&out)["finite"], false);
}

#[test]
fn quiver_outputs() {
    let out = run(&["mckay", "--m", "2", "--r", "1", "--format", "dot"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("digraph"));
    let out = run(&["truncate", &corpus("zigzag_a5.json"), "--at", "1"]);
    let v = json(&out);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 5);
    let out = run(&["separate", &corpus("loop_l2.json"), "--window", "-1:2"]);
    assert_eq!(json(&out)["vertices"].as_array().unwrap().len(), 4);
    let out = run(&["orbit", &corpus("loop_l2.json")]);
    assert_eq!(json(&out)["metadata"]["tau_trivial"], true);
    let out = run(&["repetitive", &corpus("zigzag_a5.json"), "--span", "2", "--verify"]);
    assert_eq!(json(&out)["summands"], 2);
    let out = run(&["components", &corpus("zigzag_a5.json")]);
    assert_eq!(json(&out)["d"], 2);
}

#[test]
fn out_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["beilinson", &corpus("loop_l2.json"), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("beilinson.json")).unwrap();
    assert!(text.contains("\"arrows\""));
}

#[test]
fn usage_errors() {
    let zig = corpus("zigzag_a5.json");
    assert_eq!(code(&run(&["separate", &zig, "--window", "3:1"])), 2);
    assert_eq!(code(&run(&["check-stable", "/nonexistent/q.json"])), 2);
    assert_eq!(code(&run(&["components", &zig, "--format", "dot"])), 2);
    assert_eq!(code(&run(&["mckay", "--m", "0", "--r", "1"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["truncate", &zig, "--at", "9"])), 2);
}
