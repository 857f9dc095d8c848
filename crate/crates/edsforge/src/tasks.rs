//! Task dispatch, expectations and suite execution.

use std::sync::Arc;
use std::time::Instant;

use edsforge_core::coverings::{
    apply_point_transform, covering_to_we, extend_chart, lift_obstruction, symmetry_residual, we_to_covering, zero_curvature_check, LiftOutcome, PointTransform, WeForm,
};
use edsforge_core::eds_engine::{build_cie_ansatz, cartan_characters, compatibility_system, realize_candidate, search_report, verify_candidate, AnsatzTemplate};
use edsforge_core::report::{Check, Report, Status};
use edsforge_core::symkernel::{print, Rat, Symbol};
use rayon::prelude::*;

use crate::ast::{TaskKind, WeEnd};
use crate::build::Workspace;

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub seed: u64,
    pub fibre_order: usize,
    pub allow_partial: bool,
    pub max_nodes: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: 0, fibre_order: 3, allow_partial: true, max_nodes: 200_000 }
    }
}

/// A finished task. `status` already accounts for `expect fail`.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub task: String,
    pub kind: &'static str,
    pub status: Status,
    pub expect_fail: bool,
    pub report: Option<Report>,
    pub error: Option<String>,
    pub seed: u64,
    pub ms: u128,
}

type R<T> = Result<T, String>;

fn s<E: ToString>(e: E) -> String {
    e.to_string()
}

pub fn run_task(ws: &Workspace, name: &str, opts: &RunOptions) -> Outcome {
    let start = Instant::now();
    let Some(t) = ws.tasks.get(name) else {
        return Outcome { task: name.into(), kind: "", status: Status::Error, expect_fail: false, report: None, error: Some(format!("unknown task '{}'", name)), seed: opts.seed, ms: 0 };
    };
    let res = dispatch(ws, &t.kind, opts);
    let ms = start.elapsed().as_millis();
    let (status, report, error) = match res {
        Ok(r) => {
            let st = match (r.status, t.expect_fail) {
                (Status::Pass, false) | (Status::Fail, true) => Status::Pass,
                (Status::Fail, false) | (Status::Pass, true) => Status::Fail,
                (Status::Error, _) => Status::Error,
            };
            (st, Some(r), None)
        }
        Err(e) => (Status::Error, None, Some(e)),
    };
    Outcome { task: name.into(), kind: t.kind.keyword(), status, expect_fail: t.expect_fail, report, error, seed: opts.seed, ms }
}

/// Runs tasks in parallel; results keep the given order.
pub fn run_many(ws: &Workspace, names: &[String], opts: &RunOptions, threads: Option<usize>) -> Vec<Outcome> {
    let go = || names.par_iter().map(|n| run_task(ws, n, opts)).collect::<Vec<_>>();
    match threads {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build() {
            Ok(pool) => pool.install(go),
            Err(_) => names.iter().map(|n| run_task(ws, n, opts)).collect(),
        },
        None => go(),
    }
}

fn dispatch(ws: &Workspace, kind: &TaskKind, opts: &RunOptions) -> R<Report> {
    match kind {
        TaskKind::VerifyCovering { covering, depth } => {
            let c = &ws.coverings[covering];
            let depth = depth.map(|d| d as usize).unwrap_or(opts.fibre_order.saturating_sub(2));
            let fo = opts.fibre_order.max(depth + 2);
            let ch = ws.relation_chart(&c.relation, 0)?;
            let ext = extend_chart(&ch, &c.covering, fo).map_err(s)?;
            zero_curvature_check(&ext, &c.covering, depth).map_err(s)
        }
        TaskKind::VerifyStructure { coframe, structure } => {
            let cfe = &ws.coframes[coframe];
            let set = &ws.structures[structure];
            let mut rep = cfe.ex.verify_table(&set.cf).map_err(s)?;
            for (n, f) in &cfe.identities {
                rep.checks.push(Check::form(format!("identity {}", n), &cfe.ex.cf, f));
            }
            let names: Vec<String> = cfe.form_names.iter().filter(|n| set.cf.gen(n).is_some()).cloned().collect();
            let rank = cfe.ex.independence_rank(&names, opts.seed).map_err(s)?;
            rep.checks.push(Check::flag("forms independent", rank == names.len(), format!("rank {} of {}", rank, names.len())));
            let mut out = Report::from_checks(rep.checks).with_side_conditions(rep.side_conditions);
            out.notes = rep.notes;
            Ok(out)
        }
        TaskKind::VerifyD2 { structure } => ws.structures[structure].d_squared_report(opts.allow_partial).map_err(s),
        TaskKind::Cartan { structure, base, expect } => {
            let set = &ws.structures[structure];
            let gens: Vec<_> = base.iter().map(|b| set.cf.gen(b).expect("checked")).collect();
            let a = cartan_characters(&set.cf, &gens, &set.free, opts.seed).map_err(s)?;
            let b = cartan_characters(&set.cf, &gens, &set.free, opts.seed.wrapping_add(1)).map_err(s)?;
            let fmt = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
            let mut checks = vec![
                Check::flag("seeds agree", a.s == b.s && a.r2 == b.r2, format!("({}) r2 {} vs ({}) r2 {}", fmt(&a.s), a.r2, fmt(&b.s), b.r2)),
                Check::flag("involutive", a.involutive, format!("r2 {} vs weighted sum {}", a.r2, a.s.iter().enumerate().map(|(k, v)| (k + 1) * v).sum::<usize>())),
            ];
            if let Some((es, er)) = expect {
                let es: Vec<usize> = es.iter().map(|&x| x as usize).collect();
                checks.push(Check::flag("characters", a.s == es, format!("got ({}), expected ({})", fmt(&a.s), fmt(&es))));
                checks.push(Check::flag("r2", a.r2 == *er as usize, format!("got {}, expected {}", a.r2, er)));
            }
            Ok(Report::from_checks(checks).note(format!("s' = ({}), r2 = {}, {} tableau rows, {} draws", fmt(&a.s), a.r2, a.rows, a.draws)))
        }
        TaskKind::WeConvert { from, to } => we_convert(ws, from, to),
        TaskKind::CieVerify { candidate, assume } => {
            let c = &ws.candidates[candidate];
            let mut bind: Vec<(Symbol, Rat)> = Vec::new();
            for (n, e) in assume {
                let s = c.params.iter().chain(&c.invariants).find(|s| &*s.name() == n).copied().expect("checked");
                bind.push((s, ws.scalar_constant(e)?));
            }
            verify_candidate(c, &bind).map_err(s)
        }
        TaskKind::CieSearch { structure, zero, nodes } => {
            let set = &ws.structures[structure];
            let a = build_cie_ansatz(set, &AnsatzTemplate { invariants: 0, zero: zero.clone() }).map_err(s)?;
            let sys = compatibility_system(&a).map_err(s)?;
            let max = nodes.map(|n| n as usize).unwrap_or(opts.max_nodes);
            let (rep, _) = search_report(&a, &sys, max).map_err(s)?;
            Ok(rep.note(format!("{} unknowns", a.unknowns.len())))
        }
        TaskKind::LiftCheck { covering, generator, order, flow } => {
            let c = &ws.coverings[covering];
            let g = &ws.generators[generator];
            if g.relation != c.relation {
                return Err(format!("{} and {} live on different relations", covering, generator));
            }
            let order = *order as usize;
            let ch = ws.relation_chart(&c.relation, 0)?;
            let ext = extend_chart(&ch, &c.covering, opts.fibre_order.max(order + 2)).map_err(s)?;
            let mut checks = Vec::new();
            let mut notes = Vec::new();
            if let Some((c0, time)) = flow {
                let t = ws.covering_scalar(covering, time)?;
                let n = linear_part(&ch, &g.generator.xi, &g.generator.phi)?;
                let p = PointTransform::linear_flow(&n, &t).map_err(s)?;
                let moved = apply_point_transform(&ext, &ws.coverings[c0].covering, &p).map_err(s)?;
                for (a, rule) in &c.covering.rules {
                    let got = moved.rule(*a).cloned().unwrap_or_else(Rat::zero);
                    let r = ext.reduce(&got.sub(rule)).map_err(s)?;
                    checks.push(Check::rat(format!("flow of {} gives D_{} rule", c0, ch.base_names()[*a]), &r));
                }
            }
            let sym = symmetry_residual(&ch, &g.generator).map_err(s)?;
            if !sym.is_zero() {
                checks.push(Check::rat(format!("{} is a symmetry", generator), &sym));
                return Ok(Report::from_checks(checks));
            }
            let (outcome, rep) = lift_obstruction(&ext, &c.covering, &g.generator, order).map_err(s)?;
            let obstructed = matches!(outcome, LiftOutcome::Inconsistent { .. });
            let detail = match &outcome {
                LiftOutcome::Liftable(phi) => format!("lifts with fibre component {}", print::rat_to_string(phi)),
                LiftOutcome::Inconsistent { .. } => String::new(),
            };
            checks.push(Check::flag(format!("obstruction at order {}", order), obstructed, detail));
            notes.extend(rep.notes);
            let mut out = Report::from_checks(checks).with_side_conditions(rep.side_conditions);
            out.notes = notes;
            Ok(out)
        }
        TaskKind::Realize { candidate, omega, independent } => {
            let c = &ws.candidates[candidate];
            let cfe = &ws.coframes[&omega.coframe];
            let w = cfe.ex.get(&omega.form).expect("checked");
            let fibre: Vec<Symbol> = match cfe.chart.fibre() {
                Some(f) => cfe.chart.fibre_jets(f.order),
                None => Vec::new(),
            };
            let ind: Vec<Symbol> = independent.iter().map(|n| c.invariants.iter().find(|s| &*s.name() == n).copied().expect("checked")).collect();
            let r = realize_candidate(c, &cfe.ex, w, &fibre, &ind).map_err(s)?;
            Ok(r.report)
        }
    }
}

/// `N` with `xi = N · base`; the generator must be linear in the base
/// variables with no u component.
fn linear_part(ch: &edsforge_core::jetspace::JetChart, xi: &[Rat], phi: &Rat) -> R<Vec<Vec<Rat>>> {
    if !phi.is_zero() {
        return Err("flow needs a generator without a u component".into());
    }
    let mut n = Vec::new();
    for x in xi {
        let mut row = Vec::new();
        let mut rest = x.clone();
        for &b in ch.base() {
            let c = x.diff(b);
            if !c.is_constant() {
                return Err("flow needs a generator linear in the base variables".into());
            }
            rest = rest.sub(&c.mul(&Rat::var(b)));
            row.push(c);
        }
        if !rest.is_zero() {
            return Err("flow needs a homogeneous linear generator".into());
        }
        n.push(row);
    }
    Ok(n)
}

fn we_convert(ws: &Workspace, from: &WeEnd, to: &WeEnd) -> R<Report> {
    let (cov, fref, forward) = match (from, to) {
        (WeEnd::Covering(c), WeEnd::Form(f)) => (c, f, true),
        (WeEnd::Form(f), WeEnd::Covering(c)) => (c, f, false),
        _ => return Err("we-convert goes between a covering and a coframe form".into()),
    };
    let c = &ws.coverings[cov];
    let cfe = &ws.coframes[&fref.coframe];
    let declared = cfe.ex.get(&fref.form).expect("checked").clone();
    let cf = Arc::new(cfe.ex.cf.clone());
    if forward {
        let ext = ws.covering_chart(cov)?;
        let we = covering_to_we(&ext, &c.covering, cf.clone()).map_err(s)?;
        let v = ext.fibre_jet(0, 0).map_err(s)?;
        let gv = cf.gen(&format!("d({})", v.name())).ok_or("the coframe has no dv")?;
        let a = declared.coeff(&[gv]);
        if a.is_zero() {
            return Ok(Report::from_checks(vec![Check::flag("dv coefficient", false, "the form has no dv term")]));
        }
        let r = declared.sub(&we.form.scale(&a)).map_err(s)?;
        let mut side = Vec::new();
        if !a.is_constant() {
            side.push(format!("{} != 0", print::rat_to_string(&a)));
        }
        Ok(Report::from_checks(vec![Check::form(format!("{} - a*WE({})", fref.form, cov), &cf, &r)]).with_side_conditions(side))
    } else {
        let w = WeForm { coframe: cf.clone(), form: declared };
        let (read, side) = match we_to_covering(&cfe.chart, &w, "read", &c.covering.params) {
            Ok(x) => x,
            Err(e) => return Ok(Report::from_checks(vec![Check::flag("covering form", false, e.to_string())])),
        };
        let mut checks = Vec::new();
        for (a, rule) in &c.covering.rules {
            let got = read.rule(*a).cloned().unwrap_or_else(Rat::zero);
            checks.push(Check::rat(format!("D_{} rule", cfe.chart.base_names()[*a]), &got.sub(rule)));
        }
        Ok(Report::from_checks(checks).with_side_conditions(side))
    }
}
