//! Explicit realization of a candidate over a coordinate coframe: the
//! invariants are solved for from `dω₀`, the extra forms are obtained by
//! division, and the invariant differentials are checked up to the
//! freedom left by the division.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{Candidate, EngineError};
use crate::exterior::{ideal_residual_lenient, Coframe, Form, Gen, ScalarRule};
use crate::heavenly_coframe::ExplicitCoframe;
use crate::report::{Check, Report};
use crate::symkernel::rat::subst_poly;
use crate::symkernel::{gcd, print, solve_linear, Poly, Rat, Symbol, SymbolKind};

#[derive(Clone, Debug)]
pub struct Realization {
    /// Solved invariants.
    pub values: Vec<(Symbol, Rat)>,
    /// Explicit extra forms, by abstract name.
    pub forms: Vec<(String, Form)>,
    pub report: Report,
}

/// `rule = base + Σ ω_m ∧ σ_m` over the unknown forms.
fn split_unknown(c: &Candidate) -> Result<(Form, Vec<Form>), EngineError> {
    let rule = c.omega_rule()?;
    let mut base = c.cf.zero();
    let mut sig: Vec<Form> = c.unknown_forms.iter().map(|_| c.cf.zero()).collect();
    for (m, k) in rule.terms() {
        let hits: Vec<usize> = c.unknown_forms.iter().enumerate().filter(|(_, g)| m.contains(g)).map(|(i, _)| i).collect();
        match hits.as_slice() {
            [] => base.add_term(m.clone(), k.clone()),
            [i] => {
                let mut one = BTreeMap::new();
                one.insert(c.unknown_forms[*i], Rat::one());
                let t = Form::from_terms(c.cf.id(), [(m.clone(), k.clone())]);
                sig[*i] = sig[*i].add(&c.cf.interior(&one, &t)?)?;
            }
            _ => return Err(EngineError::Realize("a term pairs two extra forms".into())),
        }
    }
    Ok((base, sig))
}

fn inverse(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).filter(|&r| !a[r][c].is_zero()).min_by_key(|&r| a[r][c].numer().len() + a[r][c].denom().len())?;
        a.swap(c, p);
        let inv = a[c][c].inv().ok()?;
        for k in 0..2 * n {
            a[c][k] = a[c][k].mul(&inv);
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for k in 0..2 * n {
                    let t = a[r][k].sub(&f.mul(&a[c][k]));
                    a[r][k] = t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return alloc::vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..n {
        for mut rest in subsets(n - i - 1, k - 1) {
            for r in rest.iter_mut() {
                *r += i + 1;
            }
            rest.insert(0, i);
            out.push(rest);
        }
    }
    out
}

/// Vectors `v_b` with `σ_a(v_b) = δ_ab`, supported on as few generators
/// as possible with the simplest coefficients available.
fn dual_vectors(sig: &[Form]) -> Result<Vec<BTreeMap<Gen, Rat>>, EngineError> {
    let k = sig.len();
    let mut gens: Vec<Gen> = Vec::new();
    for s in sig {
        gens.extend(s.support());
    }
    gens.sort_unstable();
    gens.dedup();
    let cost = |g: Gen| -> usize { sig.iter().map(|s| { let c = s.coeff(&[g]); c.numer().len() + c.denom().len() - 1 }).sum() };
    gens.sort_by_key(|&g| (cost(g), g));
    for sub in subsets(gens.len(), k) {
        let m: Vec<Vec<Rat>> = sig.iter().map(|s| sub.iter().map(|&i| s.coeff(&[gens[i]])).collect()).collect();
        if let Some(inv) = inverse(&m) {
            return Ok((0..k)
                .map(|b| sub.iter().enumerate().filter(|(i, _)| !inv[*i][b].is_zero()).map(|(i, &gi)| (gens[gi], inv[i][b].clone())).collect())
                .collect());
        }
    }
    Err(EngineError::Realize("partner forms are dependent".into()))
}

/// Solves polynomial equations for the listed unknowns one at a time: the
/// common factor of the equations involving a single remaining unknown
/// must be linear in it.
fn solve_sequential(eqs: Vec<Poly>, unknowns: &[Symbol]) -> Result<Vec<(Symbol, Rat)>, EngineError> {
    let mut eqs: Vec<Poly> = eqs.into_iter().filter(|p| !p.is_zero()).collect();
    let mut todo: Vec<Symbol> = unknowns.to_vec();
    let mut bind: Vec<(Symbol, Rat)> = Vec::new();
    while !todo.is_empty() {
        let mut progress = false;
        for ti in 0..todo.len() {
            let u = todo[ti];
            let mut pure: Vec<&Poly> = eqs.iter().filter(|p| p.contains_var(u) && todo.iter().all(|&o| o == u || !p.contains_var(o))).collect();
            if pure.is_empty() {
                continue;
            }
            pure.sort_by_key(|p| p.len());
            let mut g = Poly::zero();
            for p in pure.iter().take(8) {
                g = gcd(&g, p);
            }
            let cs = g.coeffs_in(u.index());
            let mut content = Poly::zero();
            for c in &cs {
                content = gcd(&content, c);
            }
            let g = if content.is_constant() { g } else { g.div_exact(&content).expect("content divides") };
            if g.degree_in(u.index()) != 1 {
                return Err(EngineError::Realize(format!("{} is not determined linearly", u.name())));
            }
            let cs = g.coeffs_in(u.index());
            let val = Rat::from_poly(cs[0].neg()).div(&Rat::from_poly(cs[1].clone()))?;
            let look = |s: Symbol| if s == u { Some(val.clone()) } else { None };
            eqs = eqs.iter().map(|p| subst_poly(p, &look).numer().clone()).filter(|p| !p.is_zero()).collect();
            for (_, b) in bind.iter_mut() {
                *b = b.substitute(&look)?;
            }
            bind.push((u, val));
            todo.remove(ti);
            progress = true;
            break;
        }
        if !progress {
            let names: Vec<String> = todo.iter().map(|s| s.name().to_string()).collect();
            return Err(EngineError::Realize(format!("cannot separate {}", names.join(", "))));
        }
    }
    Ok(bind)
}

fn subst_form(f: &Form, bind: &[(Symbol, Rat)]) -> Result<Form, EngineError> {
    let look = |s: Symbol| bind.iter().find(|(t, _)| *t == s).map(|(_, r)| r.clone());
    Ok(f.map_coeffs(|c| c.substitute(&look))?)
}

/// Realizes `c` with `omega0` as the explicit `ω₀`. `independent` lists
/// invariants required to be free of the `fibre` symbols.
pub fn realize_candidate(
    c: &Candidate,
    ex: &ExplicitCoframe,
    omega0: &Form,
    fibre: &[Symbol],
    independent: &[Symbol],
) -> Result<Realization, EngineError> {
    let mut ex = ex.clone();
    for &w in c.invariants.iter().chain(&c.params) {
        ex.cf.set_scalar(w, ScalarRule::Constant);
    }
    ex.insert(c.cf.gen_name(c.omega0), omega0.clone())?;
    let ecf: &Coframe = &ex.cf;
    let (base, sig) = split_unknown(c)?;
    let d0 = ecf.d(omega0)?;
    let m = d0.sub(&ex.realize(&c.cf, &base)?)?;
    let sig_e: Vec<Form> = sig.iter().map(|s| ex.realize(&c.cf, s)).collect::<Result<_, _>>()?;

    // invariants from M ∧ σ₁ ∧ … = 0
    let mut top = m.clone();
    for s in &sig_e {
        top = top.wedge(s)?;
    }
    let eqs: Vec<Poly> = top.terms().map(|(_, k)| k.numer().clone()).collect();
    let values = match solve_sequential(eqs, &c.invariants) {
        Ok(v) => v,
        Err(EngineError::Realize(msg)) => {
            let report = Report::from_checks(alloc::vec![Check::flag("invariants determined by the covering form", false, msg)]);
            return Ok(Realization { values: Vec::new(), forms: Vec::new(), report });
        }
        Err(e) => return Err(e),
    };
    let m = subst_form(&m, &values)?;
    let sig_e: Vec<Form> = sig_e.iter().map(|s| subst_form(s, &values)).collect::<Result<_, _>>()?;

    // division M = Σ o_m ∧ σ_m
    let duals = dual_vectors(&sig_e)?;
    let mut o: Vec<Form> = duals.iter().map(|v| Ok::<_, EngineError>(ecf.interior(v, &m)?.neg())).collect::<Result<_, _>>()?;
    let mut res = m.clone();
    for (oi, si) in o.iter().zip(&sig_e) {
        res = res.sub(&oi.wedge(si)?)?;
    }
    for a in 0..sig_e.len() {
        for b in a + 1..sig_e.len() {
            let r = ecf.interior(&duals[b], &ecf.interior(&duals[a], &res)?)?;
            let r = r.coeff(&[]);
            if !r.is_zero() {
                o[a] = o[a].sub(&sig_e[b].scale(&r))?;
            }
        }
    }
    let mut res = m.clone();
    for (oi, si) in o.iter().zip(&sig_e) {
        res = res.sub(&oi.wedge(si)?)?;
    }
    let mut checks = alloc::vec![Check::form(format!("d{} division", c.cf.gen_name(c.omega0)), ecf, &res)];
    let mut forms = Vec::new();
    for (g, f) in c.unknown_forms.iter().zip(&o) {
        ex.insert(c.cf.gen_name(*g), f.clone())?;
        forms.push((c.cf.gen_name(*g).to_string(), f.clone()));
    }
    let ecf: &Coframe = &ex.cf;

    // invariant differentials, up to the parameters and the division freedom
    let mut notes = Vec::new();
    for &w in &c.invariants {
        let rule = subst_form(c.d_invariant(w)?, &values)?;
        let zfree = subst_form(&rule, &c.params.iter().map(|&p| (p, Rat::zero())).collect::<Vec<_>>())?;
        let mut gens: Vec<Form> = sig_e.clone();
        let mut taus = Vec::new();
        for &p in &c.params {
            let t = rule.map_coeffs(|k| Ok::<_, EngineError>(k.diff(p)))?;
            if !t.is_zero() {
                let te = ex.realize(&c.cf, &t)?;
                gens.push(te.clone());
                taus.push((p, te));
            }
        }
        let val = values.iter().find(|(s, _)| *s == w).map(|(_, r)| r.clone()).ok_or_else(|| EngineError::Realize(format!("{} unsolved", w.name())))?;
        let r = ecf.d(&ecf.scalar(val))?.sub(&ex.realize(&c.cf, &zfree)?)?;
        let red = ideal_residual_lenient(ecf, &r, &gens)?;
        checks.push(Check::form(format!("d{} up to parameters", w.name()), ecf, &red.residual));
        if red.member && !taus.is_empty() {
            if let Some(n) = parameter_values(&r, &taus, &sig_e)? {
                notes.push(n);
            }
        }
    }
    for (s, v) in &values {
        notes.insert(0, format!("{} = {}", s.name(), print::rat_to_string(v)));
    }
    for &w in independent {
        let v = values.iter().find(|(s, _)| *s == w).map(|(_, r)| r);
        let dep: Vec<String> = match v {
            Some(r) => fibre.iter().filter(|f| r.contains(**f)).map(|f| f.name().to_string()).collect(),
            None => alloc::vec!["unsolved".to_string()],
        };
        checks.push(Check::flag(format!("{} independent of the fibre", w.name()), dep.is_empty(), format!("depends on {}", dep.join(", "))));
    }
    let mut report = Report::from_checks(checks);
    for n in notes {
        report = report.note(n);
    }
    Ok(Realization { values, forms, report })
}

/// One consistent choice of the parameters when the partner forms may be
/// added freely; `None` when it depends on that freedom.
fn parameter_values(r: &Form, taus: &[(Symbol, Form)], sig: &[Form]) -> Result<Option<String>, EngineError> {
    let mut total = r.clone();
    let mut unknowns: Vec<Symbol> = Vec::new();
    for (p, t) in taus {
        total = total.sub(&t.scale(&Rat::var(*p)))?;
        unknowns.push(*p);
    }
    let mut gauge = Vec::new();
    for (a, s) in sig.iter().enumerate() {
        let g = Symbol::new(&format!("%gauge{}", a), SymbolKind::Unknown)?;
        gauge.push(g);
        total = total.sub(&s.scale(&Rat::var(g)))?;
    }
    unknowns.extend(&gauge);
    let eqs: Vec<Rat> = total.terms().map(|(_, k)| k.clone()).collect();
    let sol = solve_linear(&eqs, &unknowns)?;
    if !sol.is_consistent() {
        return Ok(None);
    }
    let mut parts = Vec::new();
    for (p, _) in taus {
        if let Some(v) = sol.value(*p) {
            if gauge.iter().all(|g| !v.contains(*g)) {
                parts.push(format!("{} = {}", p.name(), print::rat_to_string(v)));
            }
        }
    }
    Ok(if parts.is_empty() { None } else { Some(parts.join(", ")) })
}
