//! One line per acceptance criterion, run against the corpus. Runs without
//! the test harness so the lines always reach the output.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use edsforge::{run_task, LoadOptions, Outcome, RunOptions, Workspace};
use edsforge_core::exterior::Coframe;
use edsforge_core::report::Status;
use edsforge_core::symkernel::{Rat, Symbol, SymbolKind};
use proptest::test_runner::{Config, TestRunner};

struct Line {
    ok: bool,
    detail: String,
}

fn suite(ws: &Workspace, name: &str) -> (Vec<Outcome>, Duration) {
    let start = Instant::now();
    let out = ws.suites[name].iter().map(|t| run_task(ws, t, &RunOptions::default())).collect();
    (out, start.elapsed())
}

fn all_pass(out: &[Outcome]) -> bool {
    !out.is_empty() && out.iter().all(|o| o.status == Status::Pass)
}

fn failing(out: &[Outcome]) -> String {
    let bad: Vec<&str> = out.iter().filter(|o| o.status != Status::Pass).map(|o| o.task.as_str()).collect();
    if bad.is_empty() {
        String::new()
    } else {
        format!(", not passing: {}", bad.join(" "))
    }
}

fn count_checks(o: &Outcome, f: impl Fn(&str) -> bool) -> usize {
    o.report.as_ref().map_or(0, |r| r.checks.iter().filter(|c| c.zero && f(&c.name)).count())
}

fn timed(ws: &Workspace, name: &str, limit: u64) -> Line {
    let (out, t) = suite(ws, name);
    Line { ok: all_pass(&out) && t < Duration::from_secs(limit), detail: format!("{} task(s) in {:.2} s (limit {} s){}", out.len(), t.as_secs_f64(), limit, failing(&out)) }
}

fn plain(ws: &Workspace, name: &str) -> Line {
    let (out, t) = suite(ws, name);
    Line { ok: all_pass(&out), detail: format!("{} task(s) in {:.2} s{}", out.len(), t.as_secs_f64(), failing(&out)) }
}

fn sign_mutations(ws: &Workspace) -> Line {
    let (out, _) = suite(ws, "sign_mutations");
    let caught = out.iter().filter(|o| o.expect_fail && o.status == Status::Pass).count();
    Line { ok: caught >= 6, detail: format!("{} of {} mutations rejected", caught, out.len()) }
}

fn coframe(ws: &Workspace) -> Line {
    let (out, _) = suite(ws, "maurer_cartan");
    let exact = count_checks(&out[0], |n| n.starts_with("exact ") || n.starts_with("identity "));
    let modi = count_checks(&out[0], |n| n.contains(" mod <"));
    Line { ok: all_pass(&out) && exact >= 9 && modi >= 10, detail: format!("{} exact, {} modulo the horizontal ideal{}", exact, modi, failing(&out)) }
}

fn cartan(ws: &Workspace) -> Line {
    let (out, _) = suite(ws, "involutivity");
    let note = out[0].report.as_ref().and_then(|r| r.notes.first().cloned()).unwrap_or_default();
    Line { ok: all_pass(&out), detail: format!("{}{}", note, failing(&out)) }
}

fn closure(ws: &Workspace) -> Line {
    let (out, _) = suite(ws, "closure");
    let full = count_checks(&out[0], |n| n.ends_with("(full)"));
    let partial = count_checks(&out[0], |n| n.ends_with("(partial)"));
    Line { ok: all_pass(&out) && full >= 22 && partial == 16, detail: format!("{} full, {} partial{}", full, partial, failing(&out)) }
}

/// `d² = 0` on random forms over two coordinates and so(3).
fn proptest_inline() -> Line {
    let cases = 128;
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    let strat = proptest::collection::vec((-5i64..6, 0i32..3, 0usize..5, 0usize..5), 1..5);
    let res = runner.run(&strat, |terms| {
        let mut cf = Coframe::new();
        let x = Symbol::intern_any("acc_x", SymbolKind::BaseVariable);
        let y = Symbol::intern_any("acc_y", SymbolKind::BaseVariable);
        let mut g = vec![cf.add_coordinate(x).unwrap(), cf.add_coordinate(y).unwrap()];
        let e: Vec<_> = ["f1", "f2", "f3"].iter().map(|n| cf.add_abstract(n).unwrap()).collect();
        for k in 0..3 {
            let r = cf.g(e[(k + 1) % 3]).wedge(&cf.g(e[(k + 2) % 3])).unwrap();
            cf.set_rule(e[k], r).unwrap();
        }
        g.extend(e);
        let mut a = cf.zero();
        for (c, p, i, j) in terms {
            let coef = Rat::from_int(c).mul(&Rat::var(x).pow(p).unwrap()).add(&Rat::var(y));
            a = a.add(&cf.g(g[i]).wedge(&cf.g(g[j])).unwrap().scale(&coef)).unwrap();
        }
        let dd = cf.d(&cf.d(&a).unwrap()).unwrap();
        proptest::prop_assert!(dd.is_zero());
        Ok(())
    });
    Line { ok: res.is_ok() && cases >= 100, detail: format!("{} cases of d^2 = 0{}", cases, res.err().map(|e| format!(": {}", e)).unwrap_or_default()) }
}

fn main() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/suite_acceptance.eds");
    let ws = Workspace::load(&path, &LoadOptions::default()).expect("corpus loads");
    let lines: Vec<(&str, Line)> = vec![
        ("covering zero curvature", timed(&ws, "zero_curvature", 10)),
        ("nonlinear covering", plain(&ws, "nonlinear_covering")),
        ("sign mutations rejected", sign_mutations(&ws)),
        ("Wahlquist-Estabrook round trip", plain(&ws, "we_round_trip")),
        ("coframe structure equations", coframe(&ws)),
        ("Cartan characters and involutivity", cartan(&ws)),
        ("d^2 closure", closure(&ws)),
        ("extension candidates", plain(&ws, "extensions")),
        ("constant-coefficient extensions excluded", plain(&ws, "constant_coefficients")),
        ("parameter flow and lift obstruction", timed(&ws, "symmetry_lift", 60)),
        ("property tests", proptest_inline()),
    ];
    let mut failed = 0;
    for (i, (name, l)) in lines.iter().enumerate() {
        println!("criterion {:>2} {:<42} {}  {}", i + 1, name, if l.ok { "PASS" } else { "FAIL" }, l.detail);
        failed += usize::from(!l.ok);
    }
    println!("{} of {} criteria passed", lines.len() - failed, lines.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
