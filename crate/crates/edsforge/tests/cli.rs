use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name).canonicalize().unwrap()
}

fn run(args: &[&str], threads: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_edsforge"));
    c.args(args);
    match threads {
        Some(t) => c.env("EDSFORGE_THREADS", t),
        None => c.env_remove("EDSFORGE_THREADS"),
    };
    c.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

/// Report with the wall-clock field removed.
fn report(path: &Path) -> Value {
    let mut v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let strip = |o: &mut Value| {
        o.as_object_mut().unwrap().remove("ms");
    };
    match &mut v {
        Value::Array(xs) => xs.iter_mut().for_each(strip),
        o => strip(o),
    }
    v
}

#[test]
fn passing_task_exits_zero_with_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let js = dir.path().join("r.json");
    let f = corpus("coverings.eds");
    let o = run(&["run", f.to_str().unwrap(), "--task", "linear_commutes", "--seed", "3", "--json", js.to_str().unwrap()], None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let v: Value = serde_json::from_str(&fs::read_to_string(&js).unwrap()).unwrap();
    assert_eq!(v["task"], "linear_commutes");
    assert_eq!(v["status"], "pass");
    assert_eq!(v["seed"], 3);
    assert!(v["ms"].is_u64());
    assert!(v["side_conditions"].is_array());
    let res = v["residuals"].as_array().unwrap();
    assert!(!res.is_empty());
    for r in res {
        assert_eq!(r["zero"], true);
        assert_eq!(r["digest"], "0");
        assert!(r["name"].is_string());
    }
}

#[test]
fn failing_task_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("f.eds");
    let src = format!("version 1;\nimport \"{}\";\ntask bad: verify-covering flip1 depth 1;\n", corpus("coverings.eds").display());
    fs::write(&p, src).unwrap();
    let o = run(&["run", p.to_str().unwrap()], None);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
    // the same task marked as expected to fail passes
    let f = corpus("coverings.eds");
    assert_eq!(code(&run(&["run", f.to_str().unwrap(), "--task", "flip1_fails"], None)), 0);
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.eds");
    fs::write(&p, "version 1;\nrelation r: u[x z] = 0;\n").unwrap();
    let o = run(&["run", p.to_str().unwrap()], None);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("2:16"), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&run(&["run", dir.path().join("missing.eds").to_str().unwrap()], None)), 2);
    let f = corpus("coverings.eds");
    assert_eq!(code(&run(&["run", f.to_str().unwrap(), "--task", "no_such_task"], None)), 2);
    assert_eq!(code(&run(&["run", f.to_str().unwrap(), "--partial-mode", "sometimes"], None)), 2);
    assert_eq!(code(&run(&["frobnicate"], None)), 2);
}

#[test]
fn empty_file_runs_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("empty.eds");
    fs::write(&p, "").unwrap();
    let o = run(&["run", p.to_str().unwrap()], None);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("0 of 0 tasks passed"));
}

#[test]
fn reports_do_not_depend_on_runs_or_threads() {
    let dir = tempfile::tempdir().unwrap();
    let f = corpus("coverings.eds");
    let mut seen = Vec::new();
    for (i, t) in [Some("1"), Some("1"), Some("4"), None].into_iter().enumerate() {
        let js = dir.path().join(format!("r{}.json", i));
        let o = run(&["run", f.to_str().unwrap(), "--json", js.to_str().unwrap()], t);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
        seen.push((report(&js), o.stdout));
    }
    for s in &seen[1..] {
        assert_eq!(s.0, seen[0].0);
        assert_eq!(s.1, seen[0].1);
    }
    assert!(seen[0].0.as_array().unwrap().len() > 5);
}

#[test]
fn fmt_prints_the_canonical_form() {
    let f = corpus("coverings.eds");
    let o = run(&["fmt", f.to_str().unwrap()], None);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(edsforge::printer::print_document(&edsforge::parse(&text).unwrap()), text);
}
