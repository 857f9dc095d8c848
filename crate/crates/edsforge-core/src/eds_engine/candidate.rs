//! Compatibility of an integrable-extension candidate: `d(dω₀) = 0` and
//! `d(dW) = 0` with the differentials of the extra forms and of the
//! parameters left unknown.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{reduce_mod, EngineError};
use crate::exterior::{Coframe, DResult, Form, Gen, GenRule, Mode, ScalarRule, Slot};
use crate::report::{Check, Report};
use crate::symkernel::{print, solve_linear, Rat, Solution, SymError, Symbol, SymbolKind};

/// `dω₀` and `dW_ρ` over a coframe that also holds the structure table.
/// Extra forms have unknown rules; parameters have unknown differentials.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub name: String,
    pub cf: Coframe,
    pub omega0: Gen,
    pub unknown_forms: Vec<Gen>,
    pub invariants: Vec<Symbol>,
    pub params: Vec<Symbol>,
}

impl Candidate {
    pub fn omega_rule(&self) -> Result<&Form, EngineError> {
        match &self.cf.gen_info(self.omega0).rule {
            GenRule::Formal(f) => Ok(f),
            _ => Err(EngineError::NoRule(self.cf.gen_name(self.omega0).to_string())),
        }
    }

    pub fn d_invariant(&self, w: Symbol) -> Result<&Form, EngineError> {
        match self.cf.scalar_rule(w) {
            Some(ScalarRule::Formal(f)) => Ok(f),
            _ => Err(EngineError::NoRule(w.name().to_string())),
        }
    }

    /// Substitutes parameter values into every rule.
    pub fn substitute(&self, bind: &[(Symbol, Rat)]) -> Result<Candidate, EngineError> {
        let look = |s: Symbol| bind.iter().find(|(t, _)| *t == s).map(|(_, r)| r.clone());
        let sub = |f: &Form| f.map_coeffs(|c| c.substitute(&look));
        let mut out = self.clone();
        let w0 = sub(self.omega_rule()?)?;
        out.cf.set_rule(self.omega0, w0)?;
        for &w in &self.invariants {
            let dw = sub(self.d_invariant(w)?)?;
            out.cf.set_scalar(w, ScalarRule::Formal(dw));
        }
        out.params.retain(|p| !bind.iter().any(|(t, _)| t == p));
        for (s, _) in bind {
            out.cf.set_scalar(*s, ScalarRule::Constant);
        }
        Ok(out)
    }
}

/// `known + Σ slot ∧ cofactor`.
#[derive(Clone, Debug)]
struct Lin {
    known: Form,
    slots: BTreeMap<Slot, Form>,
}

impl Lin {
    fn from(d: DResult) -> Lin {
        Lin { known: d.known, slots: d.slots }
    }

    fn scale(&self, r: &Rat) -> Lin {
        Lin { known: self.known.scale(r), slots: self.slots.iter().map(|(s, f)| (*s, f.scale(r))).collect() }
    }

    fn wedge_right(&self, c: &Form) -> Result<Lin, EngineError> {
        let mut slots = BTreeMap::new();
        for (s, f) in &self.slots {
            slots.insert(*s, f.wedge(c)?);
        }
        Ok(Lin { known: self.known.wedge(c)?, slots })
    }

    fn add(&mut self, o: &Lin) -> Result<(), EngineError> {
        self.known = self.known.add(&o.known)?;
        for (s, f) in &o.slots {
            let e = self.slots.entry(*s).or_insert_with(|| Form::zero(f.ctx()));
            *e = e.add(f)?;
        }
        self.slots.retain(|_, f| !f.is_zero());
        Ok(())
    }
}

fn scalar_part(f: &Form) -> Option<Rat> {
    if f.terms().all(|(m, _)| m.is_empty()) {
        f.terms().next().map(|(_, c)| c.clone())
    } else {
        None
    }
}

struct Stage {
    residuals: Vec<(String, Form)>,
    notes: Vec<String>,
    side: Vec<String>,
}

fn stage(c: &Candidate) -> Result<Stage, EngineError> {
    let cf = &c.cf;
    let mut eqs: Vec<(String, Lin)> = Vec::new();
    eqs.push((format!("d(d {})", cf.gen_name(c.omega0)), Lin::from(cf.ext_d(c.omega_rule()?, Mode::Partial)?)));
    for &w in &c.invariants {
        eqs.push((format!("d(d {})", w.name()), Lin::from(cf.ext_d(c.d_invariant(w)?, Mode::Partial)?)));
    }
    let mut notes = Vec::new();
    let mut side = Vec::new();
    // eliminate slots with scalar cofactors
    loop {
        let mut pick: Option<(usize, Slot, Rat)> = None;
        for (i, (_, e)) in eqs.iter().enumerate() {
            for (s, f) in &e.slots {
                if let Some(r) = scalar_part(f) {
                    let better = match &pick {
                        None => true,
                        Some((_, _, q)) => r.is_constant() && !q.is_constant(),
                    };
                    if better {
                        pick = Some((i, *s, r));
                    }
                }
            }
        }
        let Some((i, s, r)) = pick else { break };
        if !r.is_constant() {
            side.push(format!("{} != 0", print::rat_to_string(&r)));
        }
        let (en, mut e) = eqs.remove(i);
        e.slots.remove(&s);
        let expr = e.scale(&r.inv()?.neg());
        notes.push(format!("{} solved from {}", cf.slot_name(&s), en));
        for (_, other) in eqs.iter_mut() {
            if let Some(cof) = other.slots.remove(&s) {
                let t = expr.wedge_right(&cof)?;
                other.add(&t)?;
            }
        }
    }
    // remaining equations must be decoupled
    let mut owner: BTreeMap<Slot, usize> = BTreeMap::new();
    for (i, (_, e)) in eqs.iter().enumerate() {
        for s in e.slots.keys() {
            if let Some(j) = owner.insert(*s, i) {
                if j != i {
                    return Err(EngineError::Candidate(format!("{} couples two equations", cf.slot_name(s))));
                }
            }
        }
    }
    let mut residuals = Vec::new();
    for (name, e) in eqs {
        let lin: Vec<Form> = e.slots.values().filter(|f| f.degree() == 1 && f.is_homogeneous()).cloned().collect();
        let high: Vec<Form> = e.slots.values().filter(|f| f.degree() >= 2).cloned().collect();
        let mut r = reduce_mod(cf, &e.known, &lin)?;
        if !r.is_zero() && !high.is_empty() {
            r = absorb(cf, &r, &lin, &high)?;
        }
        residuals.push((name, r));
    }
    Ok(Stage { residuals, notes, side })
}

/// Tries `r = Σ α_j ∧ q_j` modulo the 1-form generators, with 1-forms α_j
/// supported on the generators already present. Returns `r` when no such
/// combination exists.
fn absorb(cf: &Coframe, r: &Form, lin: &[Form], high: &[Form]) -> Result<Form, EngineError> {
    let qs: Vec<Form> = high.iter().map(|q| reduce_mod(cf, q, lin)).collect::<Result<_, _>>()?;
    let mut support: Vec<Gen> = r.support();
    for q in &qs {
        support.extend(q.support());
    }
    support.sort_unstable();
    support.dedup();
    let mut unknowns = Vec::new();
    let mut total = r.neg();
    for (j, q) in qs.iter().enumerate() {
        if q.degree() + 1 != r.degree() {
            continue;
        }
        for &g in &support {
            let u = Symbol::new(&format!("%absorb{}_{}", j, g), SymbolKind::Unknown).map_err(EngineError::Sym)?;
            unknowns.push(u);
            total = total.add(&cf.g(g).scale(&Rat::var(u)).wedge(q)?)?;
        }
    }
    let eqs: Vec<Rat> = total.terms().map(|(_, c)| c.clone()).collect();
    let sol = solve_linear(&eqs, &unknowns)?;
    Ok(if sol.is_consistent() { cf.zero() } else { r.clone() })
}

/// Verifies a candidate; if the first pass leaves residuals, the
/// parameter relations that remove them are solved for, substituted, and
/// the candidate is checked again under them.
pub fn verify_candidate(c: &Candidate, assume: &[(Symbol, Rat)]) -> Result<Report, EngineError> {
    let mut cand = if assume.is_empty() { c.clone() } else { c.substitute(assume)? };
    let mut side: Vec<String> = assume.iter().map(|(s, r)| format!("{} = {}", s.name(), print::rat_to_string(r))).collect();
    let mut st = stage(&cand)?;
    if st.residuals.iter().any(|(_, r)| !r.is_zero()) {
        if let Some(bind) = parameter_relations(&cand, &st)? {
            for (s, r) in &bind {
                side.push(format!("{} = {}", s.name(), print::rat_to_string(r)));
            }
            cand = cand.substitute(&bind)?;
            st = stage(&cand)?;
        }
    }
    let checks: Vec<Check> = st.residuals.iter().map(|(n, r)| Check::form(n.clone(), &cand.cf, r)).collect();
    side.extend(st.side);
    let mut rep = Report::from_checks(checks).with_side_conditions(side);
    for n in st.notes {
        rep = rep.note(n);
    }
    Ok(rep)
}

/// Linear relations among the parameters annihilating every residual
/// coefficient, later parameters expressed through earlier ones.
fn parameter_relations(c: &Candidate, st: &Stage) -> Result<Option<Vec<(Symbol, Rat)>>, EngineError> {
    let mut eqs = Vec::new();
    for (_, r) in &st.residuals {
        for (_, k) in r.terms() {
            eqs.push(Rat::from_poly(k.numer().clone()));
        }
    }
    let mut unknowns: Vec<Symbol> = c.params.iter().copied().filter(|p| eqs.iter().any(|e| e.contains(*p))).collect();
    if unknowns.is_empty() {
        return Ok(None);
    }
    unknowns.reverse();
    let sol = match solve_linear(&eqs, &unknowns) {
        Ok(s) => s,
        Err(SymError::Nonlinear(_)) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    Ok(match sol.solution {
        Solution::Unique(b) | Solution::Parametric { bound: b, .. } => Some(b),
        Solution::Inconsistent { .. } => None,
    })
}
