use std::process::{Command, Output};

fn dri(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dri")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn synth_linear_at_one_half() {
    let o = dri(&["synth", "--mu", "0.5", "--rule", "linear"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["params"]["lambda1"].as_f64().unwrap(), 8.0 / 9.0);
    assert_eq!(v["params"]["lambda0"].as_f64().unwrap(), -1.0 / 9.0);
}

#[test]
fn synth_below_mu_prime_is_a_domain_error() {
    let o = dri(&["synth", "--mu", "0.2", "--rule", "linear"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("μ′") && err.contains("--rule three-point"), "{err}");
}

#[test]
fn json_errors_on_stderr() {
    let o = dri(&["--json-errors", "worst-case", "--mu", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(String::from_utf8(o.stderr).unwrap().trim()).unwrap();
    assert_eq!(v["error"], "domain");
    assert_eq!(v["exit_code"], 1);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(dri(&["--no-such-flag"]).status.code(), Some(64));
    assert_eq!(dri(&["synth", "--mu", "0.5", "--rule", "cubic"]).status.code(), Some(64));
    assert_eq!(dri(&["worst-case", "--mu", "0.5", "--agents", "4"]).status.code(), Some(64));
    assert_eq!(dri(&["--help"]).status.code(), Some(0));
}

#[test]
fn help_has_a_worked_example() {
    let o = dri(&["synth", "--help"]);
    assert!(stdout(&o).contains("dri synth --mu 0.5 --rule linear"));
}

#[test]
fn verify_accepts_every_synthesized_rule() {
    let dir = tempfile::tempdir().unwrap();
    for (mu, rule) in [
        ("0.5", "linear"),
        ("0.4", "clipped"),
        ("0.6", "blended"),
        ("0.7", "maximal"),
        ("0.15", "three-point"),
        ("0.2", "three-point-maximal"),
    ] {
        let path = dir.path().join(format!("{rule}.json"));
        let p = path.to_str().unwrap();
        assert!(dri(&["synth", "--mu", mu, "--rule", rule, "-o", p]).status.success());
        let o = dri(&["verify", p, "--grid", "501", "--strict"]);
        assert!(o.status.success(), "{rule}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn verify_rejects_a_tampered_mechanism() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let text = stdout(&dri(&["synth", "--mu", "0.5", "--rule", "linear"]));
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for seg in v["payment"].as_array_mut().unwrap() {
        seg["c0"] = serde_json::Value::String("0.5".into());
    }
    std::fs::write(&path, v.to_string()).unwrap();
    assert_eq!(dri(&["verify", path.to_str().unwrap(), "--grid", "201"]).status.code(), Some(1));
}

#[test]
fn verify_reports_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"kind\": ").unwrap();
    let o = dri(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(dri(&["verify", "/nonexistent/file.json"]).status.code() == Some(1));
}

#[test]
fn uniform_table_rows() {
    let o = dri(&["experiment", "uniform-table"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    for v in ["0.2500", "0.3333", "0.3716"] {
        assert!(csv.contains(v), "{csv}");
    }
}

#[test]
fn outputs_are_deterministic() {
    let args = ["experiment", "contamination", "--grid", "20", "--eps-steps", "11", "--format", "json"];
    assert_eq!(dri(&args).stdout, dri(&args).stdout);
    let args = ["multi-agent", "--agents", "2", "--grid", "5"];
    assert_eq!(dri(&args).stdout, dri(&args).stdout);
}

#[test]
fn multi_agent_table_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let p = path.to_str().unwrap();
    assert!(dri(&["multi-agent", "--agents", "2", "--grid", "6", "-o", p]).status.success());
    assert!(dri(&["verify", p]).status.success());
    let csv = stdout(&dri(&["multi-agent", "--agents", "2", "--grid", "6", "--format", "csv"]));
    assert!(csv.starts_with("nu_a,nu_b,x1,p1,pm1\n"));
    assert_eq!(dri(&["multi-agent", "--agents", "2", "--grid", "6", "--flags", "nope"]).status.code(), Some(1));
}

#[test]
fn frontier_and_sweeps() {
    let o = dri(&["frontier", "--moments", "0.5", "--grid", "51"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.3334).abs() < 1e-9);
    let o = dri(&["sweep", "--what", "zstar", "--from", "0.5", "--to", "0.8", "--steps", "2"]);
    assert_eq!(stdout(&o), "mu,z_star\n0.5,0.3333333333333333\n0.8,0.6666666666666667\n");
    assert_eq!(dri(&["sweep", "--what", "zstar", "--from", "0.8", "--to", "0.5"]).status.code(), Some(1));
    let o = dri(&["sweep", "--what", "two-agent-bound", "--from", "0.1", "--to", "0.9", "--steps", "5"]);
    assert!(stdout(&o).starts_with("mu,f,g,hull\n"));
}

#[test]
fn guarantees_csv() {
    let o = dri(&["experiment", "guarantees"]);
    assert!(stdout(&o).starts_with("mu,rho,c,b,z_approx\n"));
}
