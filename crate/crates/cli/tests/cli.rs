use std::process::{Command, Output};

use qshape_core::harness::{self, Report};

fn qshape(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qshape")).args(args).output().unwrap()
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = qshape(&["check", "cyclic2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let r: Report = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(r.passed);
    assert_eq!(r.suite("lemma-psi").unwrap().checks.len(), 12);
}

#[test]
fn problem_files_load_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    harness::save_problem(&harness::fixture("cyclic3").unwrap(), &path).unwrap();
    let out = qshape(&["check", path.to_str().unwrap(), "--window", "-10,10", "--field", "rationals", "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Report = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((r.window.lo, r.window.hi, r.seed), (-10, 10, 3));
    assert_eq!(r.field, "Q");
}

#[test]
fn malformed_problem_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"schema_version\": 1,\n  \"name\": \n}\n").unwrap();
    let out = qshape(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn narrow_window_is_rejected_for_dg_suites() {
    let out = qshape(&["check", "cyclic2", "--window", "-2,2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn list_names_every_fixture() {
    let out = qshape(&["list"]);
    let text = String::from_utf8_lossy(&out.stdout);
    for (name, _) in harness::FIXTURES {
        assert!(text.contains(name));
    }
}
