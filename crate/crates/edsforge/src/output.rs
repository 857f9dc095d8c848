//! Report rendering.

use serde::Serialize;

use crate::tasks::Outcome;

#[derive(Serialize)]
struct Residual<'a> {
    name: &'a str,
    zero: bool,
    digest: &'a str,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    task: &'a str,
    status: &'a str,
    residuals: Vec<Residual<'a>>,
    side_conditions: &'a [String],
    seed: u64,
    ms: u128,
}

fn json_one(o: &Outcome) -> JsonReport<'_> {
    let (residuals, side) = match &o.report {
        Some(r) => (r.checks.iter().map(|c| Residual { name: &c.name, zero: c.zero, digest: &c.digest }).collect(), &r.side_conditions[..]),
        None => (Vec::new(), &[][..]),
    };
    JsonReport { task: &o.task, status: o.status.as_str(), residuals, side_conditions: side, seed: o.seed, ms: o.ms }
}

/// One object for a single task, an array otherwise.
pub fn to_json(outcomes: &[Outcome], single: bool) -> String {
    let v: Vec<JsonReport> = outcomes.iter().map(json_one).collect();
    let s = if single && v.len() == 1 { serde_json::to_string_pretty(&v[0]) } else { serde_json::to_string_pretty(&v) };
    s.expect("reports serialize") + "\n"
}

/// Human-readable summary; free of timings so repeated runs compare equal.
pub fn to_text(outcomes: &[Outcome], verbose: bool) -> String {
    let mut out = String::new();
    for o in outcomes {
        let tag = o.status.as_str().to_uppercase();
        let exp = if o.expect_fail { " (expected to fail)" } else { "" };
        out.push_str(&format!("{:<5} {} [{}]{}\n", tag, o.task, o.kind, exp));
        if let Some(e) = &o.error {
            out.push_str(&format!("      error: {}\n", e));
        }
        if let Some(r) = &o.report {
            let nz = r.checks.iter().filter(|c| !c.zero).count();
            out.push_str(&format!("      {} residuals, {} nonzero\n", r.checks.len(), nz));
            for c in &r.checks {
                if !c.zero || verbose {
                    let text = if c.text.len() > 400 { format!("{}...", &c.text[..c.text.char_indices().nth(400).map(|x| x.0).unwrap_or(c.text.len())]) } else { c.text.clone() };
                    out.push_str(&format!("      {} {} [{}] {}\n", if c.zero { "ok  " } else { "FAIL" }, c.name, c.digest, if c.zero { "" } else { &text }));
                }
            }
            for s in &r.side_conditions {
                out.push_str(&format!("      side: {}\n", s));
            }
            for n in &r.notes {
                out.push_str(&format!("      note: {}\n", n));
            }
        }
    }
    let pass = outcomes.iter().filter(|o| o.status == edsforge_core::report::Status::Pass).count();
    out.push_str(&format!("{} of {} tasks passed\n", pass, outcomes.len()));
    out
}
