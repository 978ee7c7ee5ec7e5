use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cocomp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cocomp"))
        .args(args)
        .env_remove("COCOMP_TOL_PROFILE")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const TILTED: &str = r#"{"ambient_dim": 3, "subspaces": {"M": [[1, 0, 0]], "N": [[1, 1, 0]]}}"#;

#[test]
fn classify_and_decide() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p.json", TILTED);
    let out = cocomp(&["classify", &f]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["equivalently_positioned"], Value::Bool(true));

    let out = cocomp(&["decide", &f]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["decision"], Value::Bool(true));
}

#[test]
fn unequal_dimensions_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "p.json",
        r#"{"ambient_dim": 3, "subspaces": {"M": [[1, 0, 0]], "N": [[0, 1, 0], [0, 0, 1]]}}"#,
    );
    let out = cocomp(&["decide", &f]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["decision"], Value::Bool(false));
    assert_eq!(cocomp(&["complement", &f]).status.code(), Some(3));
}

#[test]
fn bad_certificate_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    // K meets M.
    let f = write(
        dir.path(),
        "c.json",
        r#"{"ambient_dim": 3, "subspaces": {"M": [[1, 0, 0]], "N": [[1, 1, 0]], "K": [[1, 0, 0], [0, 0, 1]]}}"#,
    );
    assert_eq!(cocomp(&["certify", &f]).status.code(), Some(4));
}

#[test]
fn malformed_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "bad.json",
        r#"{"ambient_dim": 2, "subspaces": {"M": [[1]]}}"#,
    );
    assert_eq!(cocomp(&["decide", &f]).status.code(), Some(1));
    assert_eq!(cocomp(&["decide", "/nonexistent.json"]).status.code(), Some(1));
    assert_eq!(cocomp(&["no-such-command"]).status.code(), Some(1));
}

#[test]
fn emitted_certificate_revalidates() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p.json", TILTED);
    let cert = dir.path().join("k.json");
    let out = cocomp(&["complement", &f, "--emit-certificate", cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = cocomp(&["certify", cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["inverse_residual"].as_f64().unwrap() <= 1e-9);

    let s = dir.path().join("s.json");
    assert_eq!(
        cocomp(&["involution", &f, "--emit-certificate", s.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(cocomp(&["from-involution", s.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn nonclosed_sum_margin_at_level_100() {
    let out = cocomp(&["example", "--name", "nonclosed-sum", "--level", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let margin = v["diagnostics"]["pairs"][0]["sum_closedness_margin"].as_f64().unwrap();
    assert!((margin - 0.1).abs() <= 1e-12, "{margin}");
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p.json", TILTED);
    for args in [
        vec!["complement", f.as_str()],
        vec!["involution", f.as_str(), "--format", "text"],
        vec!["sample", "--n", "5", "--seed", "9"],
    ] {
        let a = cocomp(&args);
        let b = cocomp(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn text_format_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p.json", TILTED);
    let out = cocomp(&["decide", &f, "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().next().unwrap().starts_with("decision: true"));
    assert!(text.contains("dim_m: 1"));
}

#[test]
fn ortho_complement_check_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "p.json",
        r#"{"ambient_dim": 2, "subspaces": {"M": [[1, 0]], "N": [[0, 1]]}}"#,
    );
    let out = cocomp(&["ortho-complement-check", &f]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["holds"], Value::Bool(false));
}
