use std::path::Path;
use std::process::{Command, Output};

fn nilwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilwalk")).args(args).output().expect("binary runs")
}

fn h3_config(alpha1: &str, experiments: &str) -> String {
    format!(
        r#"{{
  "group": "h3_matrix",
  "measure": {{ "components": [
    {{ "kind": "cyclic", "generator": [1, 0, 0], "alpha": {alpha1}, "weight": 0.5 }},
    {{ "kind": "cyclic", "generator": [0, 1, 0], "alpha": 1.0, "weight": 0.5 }} ] }},
  "dilation": "auto",
  "weights": {{ "generators": [[1, 0, 0], [0, 1, 0]], "weights": ["1", "1"] }},
  "experiments": {experiments},
  "seed": 7
}}"#
    )
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn alpha_out_of_range_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", &h3_config("2.5", r#"[{ "kind": "gamma0" }]"#));
    let out = nilwalk(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("measure.components[0].alpha"), "{err}");
}

#[test]
fn same_seed_gives_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let exps = r#"[{ "kind": "limit-law" }, { "kind": "walk", "steps": 200, "replicas": 64, "paths": 1 }]"#;
    let cfg = write(dir.path(), "cfg.json", &h3_config("1.0", exps));
    let mut reports = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.path().join(run);
        let out = nilwalk(&["run", &cfg, "--out", out_dir.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        reports.push(std::fs::read(out_dir.join("report.json")).unwrap());
        assert!(out_dir.join("02_walk_endpoints.csv").is_file());
    }
    assert_eq!(reports[0], reports[1]);
    let other = dir.path().join("c");
    nilwalk(&["run", &cfg, "--seed", "8", "--out", other.to_str().unwrap()]);
    assert_ne!(std::fs::read(other.join("report.json")).unwrap(), reports[0]);
}

#[test]
fn describe_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let first = nilwalk(&["describe", "u4_matrix", "--json"]);
    assert!(first.status.success());
    let file = write(dir.path(), "u4.json", &String::from_utf8(first.stdout.clone()).unwrap());
    let second = nilwalk(&["describe", &file, "--json"]);
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(nilwalk(&["describe", "h3_matrix"]).stdout).unwrap();
    assert!(text.contains("z3 = x3 + y3 + x1*y2"), "{text}");
}

#[test]
fn unknown_group_is_an_error() {
    let out = nilwalk(&["describe", "h5_matrix"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown group"));
}

#[test]
fn limit_law_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("law.json");
    let out = nilwalk(&["limit-law", "--group", "h3_matrix", "--exponents", "1,1,3", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["admissible"], true);
    assert!(v["limit_text"].as_str().unwrap().contains("z3 = x3 + y3\n"));
}

#[test]
fn gamma0_for_unit_weights() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", &h3_config("1.0", r#"[{ "kind": "gamma0" }]"#));
    let out = nilwalk(&["gamma0", "--config", &cfg]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["gamma0"], "4");
    assert_eq!(v["exponents"], serde_json::json!(["1", "1", "2"]));
}

#[test]
fn gate_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    // Counting at t = 3 is far from the volume.
    let exps = r#"[{ "kind": "volume", "ts": [3.0], "r": 0.77, "x": [0.3, 0.2, 0.1], "max_rel_err": 1e-6 }]"#;
    let cfg = write(dir.path(), "cfg.json", &h3_config("1.0", exps));
    let out_dir = dir.path().join("o");
    let o = out_dir.to_str().unwrap();
    assert_eq!(nilwalk(&["volume", &cfg, "--out", o, "--gate"]).status.code(), Some(2));
    assert_eq!(nilwalk(&["volume", &cfg, "--out", o]).status.code(), Some(0));
    assert_eq!(nilwalk(&["walk", &cfg, "--out", o]).status.code(), Some(1));
}
