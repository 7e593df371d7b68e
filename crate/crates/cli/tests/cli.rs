use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use coherent_spaces::io::{matrix_from_json, parse_points, ICOSAHEDRON};
use coherent_spaces::oscillator::OscElement;
use coherent_spaces::space::gram_matrix;
use coherent_spaces::suite::Report;
use serde_json::Value;

fn coherent(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_coherent"));
    cmd.args(args).env_remove("COHERENT_SEED");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn status(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn report(o: &Output) -> Report {
    serde_json::from_str(&stdout(o)).expect("stdout is a report")
}

#[test]
fn gram_of_icosahedron_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let p = file(dir.path(), "ico.json", ICOSAHEDRON);
    let o = coherent(&["gram", p.to_str().unwrap()], &[]);
    assert_eq!(status(&o), 0, "{}", stderr(&o));
    let g = matrix_from_json(&stdout(&o)).unwrap();
    assert_eq!(g, gram_matrix(&parse_points(ICOSAHEDRON).unwrap()).unwrap());
}

#[test]
fn gram_reports_bad_points_as_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = file(dir.path(), "bad.json", r#"{"space": "szego", "points": [[1.5, 0]]}"#);
    assert_eq!(status(&coherent(&["gram", p.to_str().unwrap()], &[])), 2);
    let p = file(dir.path(), "broken.json", "{\"space\": \"szego\",\n \"points\": [[0, 0]");
    let o = coherent(&["gram", p.to_str().unwrap()], &[]);
    assert_eq!(status(&o), 2);
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
    assert_eq!(status(&coherent(&["gram", "/nonexistent/points.json"], &[])), 2);
}

#[test]
fn shadow_both_directions() {
    let dir = tempfile::tempdir().unwrap();
    // kernel = Gram gives the identity on the span
    let points = r#""space": "szego", "points": [[0.1, 0.2], [-0.3, 0.4], [0.5, 0]]"#;
    let sample = parse_points(&format!("{{{points}}}")).unwrap();
    let g = coherent_spaces::io::matrix_to_json(&gram_matrix(&sample).unwrap());
    let p = file(dir.path(), "k.json", &format!("{{{points}, \"kernel\": {g}}}"));
    let o = coherent(&["shadow", p.to_str().unwrap()], &[]);
    assert_eq!(status(&o), 0, "{}", stderr(&o));
    let m = matrix_from_json(&stdout(&o)).unwrap();
    assert!((m - coherent_spaces::linalg::CMatrix::identity(3, 3)).norm() < 1e-8);

    let id = "[[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[1,0]]]";
    let p = file(dir.path(), "m.json", &format!("{{{points}, \"operator\": {id}}}"));
    let o = coherent(&["shadow", p.to_str().unwrap()], &[]);
    assert_eq!(status(&o), 0);
    let k = matrix_from_json(&stdout(&o)).unwrap();
    assert!((k - gram_matrix(&sample).unwrap()).norm() < 1e-12);
}

#[test]
fn non_shadow_fails_and_ambiguous_doc_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let dup = r#""space": "szego", "points": [[0.1, 0.2], [0.1, 0.2]]"#;
    let p = file(dir.path(), "k.json", &format!("{{{dup}, \"kernel\": [[[1,0],[1,0]],[[1,0],[2,0]]]}}"));
    assert_eq!(status(&coherent(&["shadow", p.to_str().unwrap()], &[])), 1);
    let p = file(dir.path(), "none.json", &format!("{{{dup}}}"));
    assert_eq!(status(&coherent(&["shadow", p.to_str().unwrap()], &[])), 2);
}

#[test]
fn quantize_rotation_needs_closed_base() {
    let dir = tempfile::tempdir().unwrap();
    let doc = |depth: usize| {
        format!(
            r#"{{"space": "moebius", "points": [[[1, 0], [0.3, 0.1]]],
                "map": {{"moebius": [[[0, 1], [0, 0]], [[0, 0], [1, 0]]]}}, "depth": {depth}}}"#
        )
    };
    let p = file(dir.path(), "q3.json", &doc(3));
    let o = coherent(&["quantize", p.to_str().unwrap()], &[]);
    assert_eq!(status(&o), 0, "{}", stderr(&o));
    let m = matrix_from_json(&stdout(&o)).unwrap();
    let n = m.nrows();
    assert_eq!(n, 4);
    assert!((m.adjoint() * &m - coherent_spaces::linalg::CMatrix::identity(n, n)).norm() < 1e-8);
    let p = file(dir.path(), "q0.json", &doc(0));
    assert_eq!(status(&coherent(&["quantize", p.to_str().unwrap()], &[])), 1);
}

const WRONG: &str = r#"{"space": {"space": "moebius"}, "sample": {"count": 10},
    "maps": {"A": {"moebius": [[[2, 0], [0.5, 0]], [[0.25, 0], [1, 0]]], "adjoint": "matrix"}}}"#;
const RIGHT: &str = r#"{"space": {"space": "moebius"}, "sample": {"count": 10},
    "maps": {"A": {"moebius": [[[2, 0], [0.5, 0]], [[0.25, 0], [1, 0]]]}}}"#;

#[test]
fn check_coherent_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let right = file(dir.path(), "right.json", RIGHT);
    let o = coherent(&["check-coherent", right.to_str().unwrap()], &[]);
    assert_eq!(status(&o), 0, "{}", stdout(&o));
    assert_eq!(report(&o).checks[0].name, "coherence A");
    let wrong = file(dir.path(), "wrong.json", WRONG);
    assert_eq!(status(&coherent(&["check-coherent", wrong.to_str().unwrap()], &[])), 1);
    let empty = file(dir.path(), "empty.json", r#"{"space": {"space": "moebius"}, "sample": {"count": 4}}"#);
    assert_eq!(status(&coherent(&["check-coherent", empty.to_str().unwrap()], &[])), 2);
}

#[test]
fn check_separable_on_projective_space() {
    let dir = tempfile::tempdir().unwrap();
    let p = file(dir.path(), "s.json", r#"{"space": {"space": "szego", "degree": 2}, "sample": {"count": 6}, "maps": {"S": {"scalar": [0.6, 0.8]}}}"#);
    let o = coherent(&["check-separable", p.to_str().unwrap()], &[]);
    assert_eq!(status(&o), 0, "{}{}", stdout(&o), stderr(&o));
    let p = file(dir.path(), "r.json", RIGHT);
    assert_eq!(status(&coherent(&["check-separable", p.to_str().unwrap()], &[])), 2);
}

#[test]
fn osc_operations() {
    let dir = tempfile::tempdir().unwrap();
    let x = r#"{"rho": [0.1, 0], "p": [[1, 0]], "q": [[0, 1]], "A": [[[2, 0]]]}"#;
    let y = r#"{"rho": [1, 0], "p": [[0, 0.5]], "q": [[1, 0]], "A": [[[1, 1]]]}"#;
    let el = |s: &str| coherent_spaces::io::parse_osc(s).unwrap();
    let run = |doc: String| {
        let p = file(dir.path(), "op.json", &doc);
        coherent(&["osc", p.to_str().unwrap()], &[])
    };
    let o = run(format!(r#"{{"op": "product", "x": {x}, "y": {y}}}"#));
    assert_eq!(status(&o), 0, "{}", stderr(&o));
    assert_eq!(coherent_spaces::io::parse_osc(&stdout(&o)).unwrap(), el(x).multiply(&el(y)).unwrap());
    let o = run(format!(r#"{{"op": "inverse", "x": {x}}}"#));
    let inv: OscElement = coherent_spaces::io::parse_osc(&stdout(&o)).unwrap();
    assert!(inv.multiply(&el(x)).unwrap().max_abs_diff(&OscElement::identity(1)) < 1e-14);
    let o = run(format!(r#"{{"op": "adjoint", "x": {x}}}"#));
    assert_eq!(coherent_spaces::io::parse_osc(&stdout(&o)).unwrap(), el(x).adjoint());
    let o = run(format!(r#"{{"op": "action", "x": {x}, "point": {{"z0": [0, 0], "zeta": [[0.5, 0]]}}}}"#));
    assert_eq!(status(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["zeta"][0], serde_json::json!([1.0, 1.0]));

    let singular = r#"{"rho": [0, 0], "p": [[0, 0]], "q": [[0, 0]], "A": [[[0, 0]]]}"#;
    assert_eq!(status(&run(format!(r#"{{"op": "inverse", "x": {singular}}}"#))), 1);
    assert_eq!(status(&run(r#"{"op": "rotate"}"#.to_string())), 2);
}

#[test]
fn fock_subcommands() {
    for args in [
        vec!["fock", "ccr", "--cutoff", "40"],
        vec!["fock", "ccr", "--dim", "2", "--cutoff", "10"],
        vec!["fock", "weyl", "--cutoff", "40", "--probe-degree", "10"],
        vec!["fock", "gamma"],
        vec!["fock", "overlap", "--cutoff", "30"],
    ] {
        let o = coherent(&args, &[]);
        assert_eq!(status(&o), 0, "{args:?}: {}", stdout(&o));
    }
    let o = coherent(&["fock", "weyl", "--cutoff", "20", "--probe-degree", "15"], &[]);
    assert_eq!(status(&o), 2);
    assert!(stderr(&o).contains("probe_degree"));
    // a tolerance of zero cannot absorb rounding in the overlap
    assert_eq!(status(&coherent(&["fock", "overlap", "--tol", "0"], &[])), 1);
}

#[test]
fn suite_exit_status_and_report() {
    assert_eq!(status(&coherent(&["suite", "moebius-gamma"], &[])), 0);
    let o = coherent(&["suite", "wrong-adjoint"], &[]);
    assert_eq!(status(&o), 1);
    assert_eq!(report(&o).summary.failed, 1);
    assert_eq!(status(&coherent(&["suite", "no-such-suite"], &[])), 2);
}

#[test]
fn seed_precedence() {
    let seed = |o: &Output| report(o).seed;
    assert_eq!(seed(&coherent(&["suite", "moebius-gamma"], &[])), 0);
    assert_eq!(seed(&coherent(&["suite", "moebius-gamma"], &[("COHERENT_SEED", "17")])), 17);
    assert_eq!(seed(&coherent(&["suite", "moebius-gamma", "--seed", "5"], &[("COHERENT_SEED", "17")])), 5);
    let o = coherent(&["suite", "moebius-gamma"], &[("COHERENT_SEED", "seventeen")]);
    assert_eq!(status(&o), 2);
    assert!(stderr(&o).contains("COHERENT_SEED"));
}

#[test]
fn config_file_writes_report_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let config = format!(
        r#"{{"name": "small", "seed": 3, "space": {{"space": "szego"}}, "sample": {{"count": 8}},
            "output": {{"report": {}}},
            "checks": [{{"check": "positive-type"}}, {{"check": "shadow-identity"}}, {{"check": "heisenberg", "triples": 10}}]}}"#,
        serde_json::to_string(out.to_str().unwrap()).unwrap()
    );
    let p = file(dir.path(), "suite.json", &config);
    let a = coherent(&["suite", p.to_str().unwrap()], &[]);
    assert_eq!(status(&a), 0, "{}", stdout(&a));
    let written: Report = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(written, report(&a));
    let b = coherent(&["suite", p.to_str().unwrap()], &[]);
    assert_eq!(report(&a).canonical(), report(&b).canonical());

    let o = coherent(&["suite", p.to_str().unwrap(), "--tol", "0"], &[]);
    assert!(report(&o).checks.iter().all(|c| c.tolerance == 0.0));

    let bad = file(dir.path(), "bad.json", r#"{"checks": [{"check": "coherence", "map": "B"}], "space": {"space": "szego"}, "sample": {"count": 3}}"#);
    let o = coherent(&["suite", bad.to_str().unwrap()], &[]);
    assert_eq!(status(&o), 2);
    assert!(stderr(&o).contains("checks[0].map"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty(), "no partial report");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(status(&coherent(&["frobnicate"], &[])), 2);
    assert_eq!(status(&coherent(&["fock", "ccr", "--cutoff", "many"], &[])), 2);
}
