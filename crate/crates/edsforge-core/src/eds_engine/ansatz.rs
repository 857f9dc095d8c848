//! The constant-coefficient ansatz for `dω₀` over a structure table with
//! two extra forms, and its compatibility conditions.
//!
//! Generator names follow the corpus convention: `th0`…`th4`, `th11`…`th44`,
//! `xi1`…`xi4`, `eta1`…`eta22`, `w0`, `w1`, `w2`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::polysolve::{solve_cases, CaseTree, PolySystem};
use super::{EngineError, StructureSet};
use crate::exterior::{Form, Gen, Mode, ScalarRule, Slot};
use crate::report::{Check, Report};
use crate::symkernel::rat::subst_poly;
use crate::symkernel::{solve_linear, Poly, Rat, Symbol, SymbolKind};

/// Index pairs of the second-order contact forms, `(2,4)` excluded.
pub const PAIRS: [(u8, u8); 9] = [(1, 1), (1, 2), (1, 3), (1, 4), (2, 2), (2, 3), (3, 3), (3, 4), (4, 4)];

/// Which coefficients take part. `zero` names unknowns (`C7`) or whole
/// tables (`G`) fixed to zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnsatzTemplate {
    pub invariants: usize,
    pub zero: Vec<String>,
}

impl AnsatzTemplate {
    fn keeps(&self, name: &str) -> bool {
        let table = &name[..1];
        !self.zero.iter().any(|z| z == name || z == table)
    }
}

#[derive(Clone, Debug)]
pub struct CieAnsatz {
    pub template: AnsatzTemplate,
    pub set: StructureSet,
    pub omega0: Gen,
    pub extra: [Gen; 2],
    /// Coefficients of the `dω₀` ansatz in table order.
    pub unknowns: Vec<Symbol>,
    /// Unknown names of the invariant-differential tables (counted only).
    pub invariant_unknowns: Vec<String>,
    /// Groups of which one member must be nonzero for a nontrivial extension.
    pub nontrivial: Vec<(String, Vec<Symbol>)>,
}

fn unknown(name: &str) -> Result<Symbol, EngineError> {
    Ok(Symbol::new(name, SymbolKind::Unknown)?)
}

fn theta2(i: u8, j: u8) -> String {
    format!("th{}{}", i, j)
}

/// Builds the ansatz over `set`, adding `w0`, `w1`, `w2` when absent.
pub fn build_cie_ansatz(set: &StructureSet, template: &AnsatzTemplate) -> Result<CieAnsatz, EngineError> {
    let mut set = set.clone();
    let gen = |name: &str, set: &mut StructureSet| -> Result<Gen, EngineError> {
        Ok(match set.cf.gen(name) {
            Some(g) => g,
            None => set.cf.add_abstract(name)?,
        })
    };
    let w0 = gen("w0", &mut set)?;
    let w1 = gen("w1", &mut set)?;
    let w2 = gen("w2", &mut set)?;
    let cf = &set.cf;
    let f = |n: &str| cf.named(n).map_err(EngineError::from);
    let mut unknowns = Vec::new();
    let mut fg = Vec::new();
    let mut hs = Vec::new();
    let mut factor = cf.zero();
    let add = |name: String, form: Form, acc: &mut Form, unknowns: &mut Vec<Symbol>| -> Result<Option<Symbol>, EngineError> {
        let s = unknown(&name)?;
        if !template.keeps(&name) {
            return Ok(None);
        }
        unknowns.push(s);
        *acc = acc.add(&form.scale(&Rat::var(s)))?;
        Ok(Some(s))
    };
    for i in 0..=4 {
        add(format!("A{}", i), f(&format!("th{}", i))?, &mut factor, &mut unknowns)?;
    }
    for (i, j) in PAIRS {
        add(format!("B{}{}", i, j), f(&theta2(i, j))?, &mut factor, &mut unknowns)?;
    }
    for s in 1..=22 {
        add(format!("C{}", s), f(&format!("eta{}", s))?, &mut factor, &mut unknowns)?;
    }
    for j in 1..=4 {
        add(format!("D{}", j), f(&format!("xi{}", j))?, &mut factor, &mut unknowns)?;
    }
    for k in 1..=2 {
        add(format!("E{}", k), cf.g([w1, w2][k - 1]), &mut factor, &mut unknowns)?;
    }
    let mut rule = factor.wedge(&cf.g(w0))?;
    for k in 1..=4u8 {
        let mut part = cf.zero();
        for i in 0..=4 {
            if let Some(s) = add(format!("F{}{}", i, k), f(&format!("th{}", i))?, &mut part, &mut unknowns)? {
                fg.push(s);
            }
        }
        for (i, j) in PAIRS {
            if let Some(s) = add(format!("G{}{}{}", i, j, k), f(&theta2(i, j))?, &mut part, &mut unknowns)? {
                fg.push(s);
            }
        }
        for m in 1..=2 {
            if let Some(s) = add(format!("H{}{}", m, k), cf.g([w1, w2][m - 1]), &mut part, &mut unknowns)? {
                hs.push(s);
            }
        }
        rule = rule.add(&part.wedge(&f(&format!("xi{}", k))?)?)?;
    }
    let mut invariant_unknowns = Vec::new();
    for rho in 1..=template.invariants {
        for i in 0..=4 {
            invariant_unknowns.push(format!("I{}_{}", rho, i));
        }
        for (i, j) in PAIRS {
            invariant_unknowns.push(format!("J{}_{}{}", rho, i, j));
        }
        for s in 7..=22 {
            invariant_unknowns.push(format!("K{}_{}", rho, s));
        }
        for j in 1..=4 {
            invariant_unknowns.push(format!("L{}_{}", rho, j));
        }
        for q in 0..=2 {
            invariant_unknowns.push(format!("M{}_{}", rho, q));
        }
    }
    for &s in &unknowns {
        set.cf.set_scalar(s, ScalarRule::Constant);
    }
    set.cf.set_rule(w0, rule)?;
    let nontrivial = alloc::vec![("F or G nonzero".to_string(), fg), ("H nonzero".to_string(), hs)];
    Ok(CieAnsatz { template: template.clone(), set, omega0: w0, extra: [w1, w2], unknowns, invariant_unknowns, nontrivial })
}

/// The compatibility condition `d(dω₀) ∈ ⟨σ₁, σ₂⟩`, where `σ_m` are the
/// cofactors of the unknown `dω_m`, split into cases.
///
/// A constant change of basis of `w1`, `w2` keeps the ansatz, so the
/// partner matrix (rows `m`, columns `E_m`, `H_m1`..`H_m4`) is brought to
/// reduced row echelon form: one case per choice of pivots, and the
/// contact part of each pivot column is shifted into its partner form. When the
/// template breaks that symmetry only the two unnormalized cases are used.
#[derive(Clone, Debug)]
pub struct CompatibilitySystem {
    pub cases: Vec<Case>,
}

#[derive(Clone, Debug)]
pub struct Case {
    pub name: String,
    pub system: PolySystem,
    /// Unknowns fixed by the normalization.
    pub fixed: Vec<(Symbol, Rat)>,
}

fn coefficient_equations(f: &Form, label: &str, out: &mut Vec<(Poly, String)>, cf: &crate::exterior::Coframe) {
    for (m, c) in f.terms() {
        let names: Vec<&str> = m.iter().map(|&g| cf.gen_name(g)).collect();
        out.push((c.numer().clone(), format!("{} [{}]", label, names.join("^"))));
    }
}

fn partner_matrix(a: &CieAnsatz) -> Option<[[Symbol; 5]; 2]> {
    let find = |n: String| a.unknowns.iter().copied().find(|s| *s.name() == *n);
    let mut out = [[find("E1".into())?; 5]; 2];
    for m in 0..2 {
        out[m][0] = find(format!("E{}", m + 1))?;
        for k in 1..5 {
            out[m][k] = find(format!("H{}{}", m + 1, k))?;
        }
    }
    Some(out)
}

fn restrict(sys: &PolySystem, fix: &[(Symbol, Rat)]) -> PolySystem {
    let look = |s: Symbol| fix.iter().find(|(t, _)| *t == s).map(|(_, r)| r.clone());
    let sub = |p: &Poly| subst_poly(p, &look).numer().clone();
    PolySystem {
        equations: sys.equations.iter().map(|(p, l)| (sub(p), l.clone())).filter(|(p, _)| !p.is_zero()).collect(),
        unknowns: sys.unknowns.iter().copied().filter(|u| look(*u).is_none()).collect(),
        nonzero_any: sys.nonzero_any.iter().map(|(n, g)| (n.clone(), g.iter().map(sub).collect())).collect(),
    }
}

fn echelon_row(row: &[Symbol; 5], pivot: usize, also_zero: Option<usize>, fix: &mut Vec<(Symbol, Rat)>) {
    for (k, &s) in row.iter().enumerate() {
        if k < pivot || Some(k) == also_zero {
            fix.push((s, Rat::zero()));
        } else if k == pivot {
            fix.push((s, Rat::one()));
        }
    }
}

/// Shifting the partner form of a pivot by constant multiples of the
/// contact forms removes the contact part of its column: `A`, `B` for an
/// `E` pivot, `F·k`, `G··k` for an `H·k` pivot.
fn absorb_pivot(a: &CieAnsatz, pivot: usize, fix: &mut Vec<(Symbol, Rat)>) {
    let mut names = Vec::new();
    if pivot == 0 {
        names.extend((0..=4).map(|i| format!("A{}", i)));
        names.extend(PAIRS.iter().map(|(i, j)| format!("B{}{}", i, j)));
    } else {
        names.extend((0..=4).map(|i| format!("F{}{}", i, pivot)));
        names.extend(PAIRS.iter().map(|(i, j)| format!("G{}{}{}", i, j, pivot)));
    }
    for n in names {
        if let Some(s) = a.unknowns.iter().copied().find(|s| *s.name() == *n) {
            fix.push((s, Rat::zero()));
        }
    }
}

const COLUMNS: [&str; 5] = ["E", "H.1", "H.2", "H.3", "H.4"];

pub fn compatibility_system(a: &CieAnsatz) -> Result<CompatibilitySystem, EngineError> {
    if a.template.invariants > 0 {
        return Err(EngineError::Candidate("only the constant-coefficient ansatz is supported".into()));
    }
    let cf = &a.set.cf;
    let rule = match &cf.gen_info(a.omega0).rule {
        crate::exterior::GenRule::Formal(r) => r.clone(),
        _ => return Err(EngineError::NoRule("w0".into())),
    };
    let d = cf.ext_d(&rule, Mode::Partial)?;
    let sig: Vec<Form> = a.extra.iter().map(|g| d.slots.get(&Slot::Gen(*g)).cloned().unwrap_or_else(|| cf.zero())).collect();
    if d.slots.keys().any(|s| !matches!(s, Slot::Gen(g) if a.extra.contains(g))) {
        return Err(EngineError::Candidate("unexpected unknown differential".into()));
    }
    let k = &d.known;
    let s12 = sig[0].wedge(&sig[1])?;
    let groups: Vec<(String, Vec<Poly>)> = a.nontrivial.iter().map(|(n, v)| (n.clone(), v.iter().map(|s| Poly::var(*s)).collect())).collect();

    let mut eq_a = Vec::new();
    coefficient_equations(&k.wedge(&s12)?, "K^s1^s2", &mut eq_a, cf);
    let mut ga = groups.clone();
    ga.push(("s1^s2 nonzero".into(), s12.terms().map(|(_, c)| c.numer().clone()).collect()));
    let independent = PolySystem { equations: eq_a, unknowns: a.unknowns.clone(), nonzero_any: ga };

    let Some(mat) = partner_matrix(a) else {
        let mut eq_b = Vec::new();
        coefficient_equations(&s12, "s1^s2", &mut eq_b, cf);
        coefficient_equations(&k.wedge(&sig[0])?, "K^s1", &mut eq_b, cf);
        coefficient_equations(&k.wedge(&sig[1])?, "K^s2", &mut eq_b, cf);
        let dependent = PolySystem { equations: eq_b, unknowns: a.unknowns.clone(), nonzero_any: groups };
        let case = |name: &str, system| Case { name: name.into(), system, fixed: Vec::new() };
        return Ok(CompatibilitySystem { cases: alloc::vec![case("independent partners", independent), case("dependent partners", dependent)] });
    };

    let mut cases = Vec::new();
    for p in 0..5 {
        for q in p + 1..5 {
            let mut fix = Vec::new();
            echelon_row(&mat[0], p, Some(q), &mut fix);
            echelon_row(&mat[1], q, Some(p), &mut fix);
            absorb_pivot(a, p, &mut fix);
            absorb_pivot(a, q, &mut fix);
            cases.push(Case { name: format!("independent, pivots {} and {}", COLUMNS[p], COLUMNS[q]), system: restrict(&independent, &fix), fixed: fix });
        }
    }
    // σ₂ = 0 after the change of basis
    let mut eq_b = Vec::new();
    coefficient_equations(&k.wedge(&sig[0])?, "K^s1", &mut eq_b, cf);
    let dependent = PolySystem { equations: eq_b, unknowns: a.unknowns.clone(), nonzero_any: groups };
    for p in 0..5 {
        let mut fix: Vec<(Symbol, Rat)> = mat[1].iter().map(|&s| (s, Rat::zero())).collect();
        echelon_row(&mat[0], p, None, &mut fix);
        absorb_pivot(a, p, &mut fix);
        cases.push(Case { name: format!("dependent, pivot {}", COLUMNS[p]), system: restrict(&dependent, &fix), fixed: fix });
    }
    Ok(CompatibilitySystem { cases })
}

/// Whether the family at a consistent leaf is a copy of the equation of
/// `th0`: `w0 = c*th0` with `c` nonzero, with `w1`, `w2` in the span of the
/// structure's own forms. Such an extension adds no new variable.
pub fn is_theta0_copy(a: &CieAnsatz, bind: &[(Symbol, Rat)]) -> Result<bool, EngineError> {
    let cf = &a.set.cf;
    let Some(th0) = cf.gen("th0") else { return Ok(false) };
    let crate::exterior::GenRule::Formal(d0) = &cf.gen_info(th0).rule else { return Ok(false) };
    let crate::exterior::GenRule::Formal(rule) = &cf.gen_info(a.omega0).rule else { return Ok(false) };
    let look = |s: Symbol| bind.iter().find(|(t, _)| *t == s).map(|(_, r)| r.clone());
    let rule = rule.map_coeffs(|c| c.substitute(&look))?;
    let cs = unknown("%copy")?;
    let c = Rat::var(cs);
    let own: Vec<Gen> = cf.gens().map(|(g, _)| g).filter(|g| *g != a.omega0 && !a.extra.contains(g)).collect();
    let mut unknowns = alloc::vec![cs];
    let mut image: Vec<(Gen, Form)> = alloc::vec![(a.omega0, cf.g(th0).scale(&c))];
    for (m, &w) in a.extra.iter().enumerate() {
        let mut f = cf.zero();
        for &g in &own {
            let p = unknown(&format!("%copy{}_{}", m, g))?;
            unknowns.push(p);
            f = f.add(&cf.g(g).scale(&Rat::var(p)))?;
        }
        image.push((w, f));
    }
    let mut total = d0.scale(&c).neg();
    for (mono, k) in rule.terms() {
        let mut t = cf.scalar(k.clone());
        for g in mono.iter() {
            let img = image.iter().find(|(h, _)| h == g).map(|(_, f)| f.clone()).unwrap_or_else(|| cf.g(*g));
            t = t.wedge(&img)?;
        }
        total = total.add(&t)?;
    }
    let eqs: Vec<Rat> = total.terms().map(|(_, k)| k.clone()).collect();
    let sol = match solve_linear(&eqs, &unknowns) {
        Ok(sol) => sol,
        Err(crate::symkernel::SymError::Nonlinear(_)) => return Ok(false),
        Err(e) => return Err(e.into()),
    };
    Ok(sol.is_consistent() && sol.value(cs).map_or(true, |v| !v.is_zero()))
}

/// Solves every case; the status is pass when every branch of every case
/// is contradictory or a copy of the `th0` equation, which certifies that
/// no nontrivial extension with these coefficients exists.
pub fn search_report(a: &CieAnsatz, sys: &CompatibilitySystem, max_nodes: usize) -> Result<(Report, Vec<CaseTree>), EngineError> {
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    let mut trees = Vec::new();
    for Case { name, system: s, fixed } in &sys.cases {
        let t = solve_cases(s, max_nodes);
        let (mut dead, mut trivial) = (0, 0);
        let mut lines = Vec::new();
        for (b, line) in t.branches.iter().zip(t.render()) {
            match &b.outcome {
                super::CaseOutcome::Contradiction(_) => dead += 1,
                super::CaseOutcome::Consistent(_) if is_theta0_copy(a, &[fixed.as_slice(), &b.bind].concat())? => {
                    trivial += 1;
                    lines.push(format!("{} (trivial: w0 = c*th0)", line));
                    continue;
                }
                _ => {}
            }
            lines.push(line);
        }
        let n = t.branches.len();
        let ok = n > 0 && dead + trivial == n;
        checks.push(Check::flag(format!("{}: no nontrivial solution", name), ok, format!("{} of {} branches contradictory, {} trivial", dead, n, trivial)));
        notes.push(format!("{}: {} equations, {} nodes, {} contradictory, {} trivial", name, s.equations.len(), t.nodes, dead, trivial));
        for line in lines.iter().take(20) {
            notes.push(format!("{}: {}", name, line));
        }
        if lines.len() > 20 {
            notes.push(format!("{}: {} more branches", name, lines.len() - 20));
        }
        trees.push(t);
    }
    let mut r = Report::from_checks(checks);
    for n in notes {
        r = r.note(n);
    }
    Ok((r, trees))
}
