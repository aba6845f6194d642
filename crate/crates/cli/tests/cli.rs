use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_handlebody"))
        .args(args)
        .output()
        .expect("binary runs");
    (String::from_utf8(out.stdout).unwrap(), out.status.code().unwrap())
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let (text, code) = run(&all);
    (serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}")), code)
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("handlebody-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn reduce_on_the_square() {
    let (v, code) = json(&["reduce", "@square", "sF1 sF2 sF1 sF2"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], "handlebody-report/1");
    assert_eq!(v["result"]["normal_form"], "");
    assert_eq!(v["result"]["identity"], true);
}

#[test]
fn oracle_on_the_pentagon() {
    let (text, code) = run(&["oracle", "@pentagon"]);
    assert_eq!(code, 0);
    assert!(text.contains("formula == oracle: PASS, H1 rank 10"), "{text}");
}

#[test]
fn classify_the_dodecahedron_from_a_file() {
    let (export, code) = run(&["instances", "export", "dodecahedron"]);
    assert_eq!(code, 0);
    let path = scratch("dodecahedron.json", &export);
    let (v, code) = json(&["classify", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["hyperbolic"], "yes");
    assert_eq!(v["instance"]["name"], "dodecahedron");

    // The instance hash depends only on the content.
    let (bundled, _) = json(&["classify", "@dodecahedron"]);
    assert_eq!(bundled["instance"]["sha256"], v["instance"]["sha256"]);
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["homology", "@cube", "--coeff", "z2"],
        vec!["homology", "@triangular_prism", "--space", "universal"],
        vec!["belts", "@genus1_crossing"],
        vec!["group", "@genus1_pogorelov"],
        vec!["ball", "@square", "--radius", "2"],
    ] {
        let first = run(&args);
        assert_eq!(first.1, 0, "{args:?}: {}", first.0);
        assert_eq!(run(&args), first, "{args:?}");
    }
}

#[test]
fn words_commands() {
    let (v, _) = json(&["equal", "@cube", "sF1 sF2", "sF2 sF1"]);
    assert_eq!(v["result"]["equal"], true);
    let (v, _) = json(&["commute", "@pentagon", "sF1 sF3", "sF2 sF4"]);
    assert_eq!(v["result"]["commute"], false);
    let (v, code) = json(&["reduce", "@square", "sF9"]);
    assert_eq!(code, 1);
    assert!(v["diagnostics"][0].as_str().unwrap().contains("sF9"));
}

#[test]
fn flag_and_belts() {
    let (v, _) = json(&["flag", "@triangular_prism"]);
    assert_eq!(v["result"]["flag"], false);
    assert_eq!(v["result"]["empty_simplices"][0], serde_json::json!(["S1", "S2", "S3"]));
    let (v, _) = json(&["belts", "@cube"]);
    assert_eq!(v["result"]["square_belts"].as_array().unwrap().len(), 3);
    let (v, _) = json(&["belts", "@tetrahedron"]);
    assert!(v["result"]["square_belts"].is_null());
}

#[test]
fn invalid_instances_exit_one() {
    let (export, _) = run(&["instances", "export", "cube"]);
    let mut file: Value = serde_json::from_str(&export).unwrap();
    file["belts"] = serde_json::json!([{"plus": "1", "minus": "2", "matching": {"3": "3"}}]);
    let path = scratch("bad_cube.json", &file.to_string());
    let (v, code) = json(&["validate", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["valid"], false);
    let (_, code) = json(&["classify", path.to_str().unwrap()]);
    assert_eq!(code, 1);

    let garbage = scratch("garbage.json", "{ not json");
    assert_eq!(run(&["nerve", garbage.to_str().unwrap()]).1, 1);
    assert_eq!(run(&["nerve", "@no_such_instance"]).1, 1);
}

#[test]
fn caps_exit_three() {
    let (v, code) = json(&["oracle", "@dodecahedron", "--cap-m", "8"]);
    assert_eq!(code, 3);
    assert!(v["result"].is_null());
    assert_eq!(run(&["ball", "@square", "--radius", "12"]).1, 3);
}

#[test]
fn instance_listing() {
    let (text, code) = run(&["instances", "list"]);
    assert_eq!(code, 0);
    assert!(text.lines().any(|l| l == "genus1_pogorelov"));
}
