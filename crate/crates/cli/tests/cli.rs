use std::io::Write;
use std::process::{Command, Output, Stdio};

fn run(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_featlog"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn decide_closed_formulae() {
    let out = run(&["decide", "-"], "exists x. (A(x) & B(x))");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "INVALID\n");

    let out = run(&["decide", "-"], "exists x,y,z. (f(x,y) & A(y) & g(x,z) & B(z))");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "VALID\n");
}

#[test]
fn decide_open_formulae_prints_residue() {
    let out = run(&["decide", "-"], "# a comment\nexists y. (f(x,y) & A(y))");
    assert_eq!(stdout(&out), "SATISFIABLE\nexists v1. A(v1) & f(x, v1)\n");
    let out = run(&["decide", "-"], "A(x) & B(x)");
    assert_eq!(stdout(&out), "UNSATISFIABLE\n");
}

#[test]
fn simplify_applies_feature_determinism() {
    let out = run(&["simplify", "-"], "f(x,y) & f(x,z)");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "y = z & f(x, z)\n");
}

#[test]
fn entail_reads_two_formulae() {
    let out = run(&["entail", "-"], "f(x,y) & A(y); exists z. f(x,z)");
    assert_eq!(stdout(&out), "ENTAILED\n");
    let out = run(&["--format", "json", "entail", "-"], "A(x); B(x)");
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["entailed"], false);
}

#[test]
fn witness_is_valid_json() {
    let out = run(&["witness", "-"], "exists y. (f(x,y) & A(y) & g(y,x))");
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["model"], "tree");
    assert_eq!(v["roots"]["x"], 0);
    assert_eq!(v["nodes"].as_array().unwrap().len(), 2);
    assert_eq!(v["edges"].as_array().unwrap().len(), 2);
    for node in v["nodes"].as_array().unwrap() {
        assert!(node["sort"].is_string());
    }
}

#[test]
fn error_exit_codes() {
    let out = run(&["decide", "-"], "exists x. (A(x) &");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let out = run(&["decide", "/nonexistent/formula.txt"], "");
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["witness", "-"], "A(x) | B(x)");
    assert_eq!(out.status.code(), Some(2));

    let big = "exists x. (A(x) | B(x)) & (C(x) | D(x)) & (E(x) | F(x)) & (G(x) | H(x))";
    let out = run(&["--max-dnf-clauses", "3", "decide", "-"], big);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["decide", "-"], big);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    let text = "forall y. (f(x,y) -> exists z. (g(y,z) & ~A(z)))";
    let first = run(&["--format", "json", "decide", "-"], text);
    let second = run(&["--format", "json", "decide", "-"], text);
    assert_eq!(first.stdout, second.stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert_eq!(v["verdict"], "SATISFIABLE");
}

#[test]
fn oracle_evaluates_closed_formulae() {
    let out = run(&["--oracle-bound", "3", "oracle", "-"], "exists x, y. (f(x,y) & A(y))");
    assert_eq!(stdout(&out), "TRUE\n");
    let out = run(&["oracle", "-"], "A(x)");
    assert_eq!(out.status.code(), Some(2));
}
