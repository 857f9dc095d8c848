//! Case-splitting solver for polynomial systems in constant unknowns.
//! Every leaf of the case tree is a contradiction, a consistent family,
//! or undecided (budget or a nonlinear remainder).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::symkernel::rat::subst_poly;
use crate::symkernel::{print, Poly, Rat, Symbol};

#[derive(Clone, Debug)]
pub struct PolySystem {
    /// Equations `p = 0`, each with a label naming its origin.
    pub equations: Vec<(Poly, String)>,
    pub unknowns: Vec<Symbol>,
    /// Named groups of which at least one member must be nonzero.
    pub nonzero_any: Vec<(String, Vec<Poly>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CaseOutcome {
    /// `1 = 0` follows from the labelled equation, or a required group vanished.
    Contradiction(String),
    /// No equations left; bindings of the eliminated unknowns.
    Consistent(Vec<String>),
    Undecided(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub assumptions: Vec<String>,
    pub outcome: CaseOutcome,
    /// Eliminated unknowns at the leaf.
    pub bind: Vec<(Symbol, Rat)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CaseTree {
    pub branches: Vec<Branch>,
    pub nodes: usize,
}

impl CaseTree {
    /// Every branch ends in a contradiction.
    pub fn inconsistent(&self) -> bool {
        !self.branches.is_empty() && self.branches.iter().all(|b| matches!(b.outcome, CaseOutcome::Contradiction(_)))
    }

    pub fn render(&self) -> Vec<String> {
        self.branches
            .iter()
            .map(|b| {
                let head = if b.assumptions.is_empty() { "(root)".to_string() } else { b.assumptions.join("; ") };
                let tail = match &b.outcome {
                    CaseOutcome::Contradiction(r) => format!("1 = 0 from {}", r),
                    CaseOutcome::Consistent(v) => format!("consistent: {}", v.join(", ")),
                    CaseOutcome::Undecided(r) => format!("undecided: {}", r),
                };
                format!("{} => {}", head, tail)
            })
            .collect()
    }
}

#[derive(Clone)]
struct State {
    eqs: Vec<(Poly, String)>,
    bind: Vec<(Symbol, Rat)>,
    nonzero: Vec<Poly>,
    groups: Vec<(String, Vec<Poly>)>,
    trail: Vec<String>,
}

enum Simp {
    Open,
    Dead(String),
}

fn normalize(p: &Poly, nonzero: &[Poly]) -> Poly {
    let mut p = p.clone();
    if p.is_zero() {
        return p;
    }
    for f in nonzero {
        if f.is_constant() {
            continue;
        }
        while let Some(q) = p.div_exact(f) {
            p = q;
        }
    }
    p.primitive_numeric()
}

impl State {
    fn substitute(&mut self, u: Symbol, val: &Rat) {
        let look = |s: Symbol| if s == u { Some(val.clone()) } else { None };
        for (p, _) in self.eqs.iter_mut() {
            if p.contains_var(u) {
                *p = subst_poly(p, &look).numer().clone();
            }
        }
        for (_, b) in self.bind.iter_mut() {
            if b.contains(u) {
                *b = b.substitute(&look).unwrap_or_else(|_| b.clone());
            }
        }
        for f in self.nonzero.iter_mut() {
            if f.contains_var(u) {
                *f = subst_poly(f, &look).numer().clone();
            }
        }
        for (_, g) in self.groups.iter_mut() {
            for f in g.iter_mut() {
                if f.contains_var(u) {
                    *f = subst_poly(f, &look).numer().clone();
                }
            }
        }
        self.bind.push((u, val.clone()));
    }

    fn assume_nonzero(&mut self, f: Poly) {
        let f = f.primitive_numeric();
        if !f.is_constant() && !self.nonzero.contains(&f) {
            self.nonzero.push(f);
        }
    }

    fn simplify(&mut self) -> Simp {
        loop {
            if let Some(f) = self.nonzero.iter().find(|f| f.is_zero()) {
                let _ = f;
                return Simp::Dead("an assumed nonzero quantity vanishes".into());
            }
            let nz = self.nonzero.clone();
            let mut seen: Vec<Poly> = Vec::new();
            let mut eqs = Vec::new();
            for (p, l) in self.eqs.drain(..) {
                let p = normalize(&p, &nz);
                if p.is_zero() || seen.contains(&p) {
                    continue;
                }
                if p.is_constant() {
                    return Simp::Dead(l);
                }
                seen.push(p.clone());
                eqs.push((p, l));
            }
            eqs.sort_by(|a, b| (a.0.len(), a.0.total_degree(), &a.1).cmp(&(b.0.len(), b.0.total_degree(), &b.1)));
            self.eqs = eqs;
            let mut fresh = Vec::new();
            let mut groups = Vec::new();
            for (name, g) in self.groups.drain(..) {
                let live: Vec<Poly> = g.into_iter().filter(|f| !f.is_zero()).collect();
                if live.is_empty() {
                    return Simp::Dead(format!("{} violated", name));
                }
                if live.iter().any(|f| f.is_constant()) {
                    continue;
                }
                if live.len() == 1 {
                    fresh.push(live[0].clone());
                    continue;
                }
                groups.push((name, live));
            }
            self.groups = groups;
            let grew = !fresh.is_empty();
            for f in fresh {
                self.assume_nonzero(f);
            }
            // eliminate an unknown with a constant coefficient
            let mut pick: Option<(Symbol, Rat)> = None;
            'outer: for (p, _) in &self.eqs {
                for u in p.vars() {
                    if p.degree_in(u.index()) != 1 {
                        continue;
                    }
                    let cs = p.coeffs_in(u.index());
                    if cs[1].is_constant() {
                        let v = Rat::from_poly(cs[0].neg()).div(&Rat::from_poly(cs[1].clone())).expect("nonzero constant");
                        pick = Some((u, v));
                        break 'outer;
                    }
                }
            }
            match pick {
                Some((u, v)) => self.substitute(u, &v),
                None if grew => continue,
                None => return Simp::Open,
            }
        }
    }

    fn bindings(&self) -> Vec<String> {
        self.bind.iter().map(|(s, r)| format!("{} = {}", s.name(), print::rat_to_string(r))).collect()
    }
}

struct Solver {
    tree: CaseTree,
    max_nodes: usize,
}

impl Solver {
    fn leaf(&mut self, st: &State, outcome: CaseOutcome) {
        self.tree.branches.push(Branch { assumptions: st.trail.clone(), outcome, bind: st.bind.clone() });
    }

    fn run(&mut self, mut st: State) {
        self.tree.nodes += 1;
        if let Simp::Dead(r) = st.simplify() {
            self.leaf(&st, CaseOutcome::Contradiction(r));
            return;
        }
        if st.eqs.is_empty() {
            let b = st.bindings();
            self.leaf(&st, CaseOutcome::Consistent(b));
            return;
        }
        if self.tree.nodes >= self.max_nodes {
            let r = format!("node budget reached with {} equations", st.eqs.len());
            self.leaf(&st, CaseOutcome::Undecided(r));
            return;
        }
        // a monomial factor: split on its variables
        if let Some((p, l)) = st.eqs.iter().find(|(p, _)| !p.monomial_content().is_one()).cloned() {
            let m = p.monomial_content();
            let vars: Vec<Symbol> = m.vars().collect();
            for (k, &x) in vars.iter().enumerate() {
                let mut s = st.clone();
                for &y in &vars[..k] {
                    s.assume_nonzero(Poly::var(y));
                }
                s.trail.push(format!("{} = 0 [{}]", x.name(), l));
                s.substitute(x, &Rat::zero());
                self.run(s);
            }
            let mut s = st.clone();
            for &y in &vars {
                s.assume_nonzero(Poly::var(y));
            }
            s.trail.push(format!("{} != 0 [{}]", print::poly_to_string(&Poly::term(m, num_traits::One::one())), l));
            self.run(s);
            return;
        }
        // linear in some unknown with a polynomial coefficient
        let mut best: Option<(Symbol, Poly, Poly, String)> = None;
        for (p, l) in &st.eqs {
            for u in p.vars() {
                if p.degree_in(u.index()) != 1 {
                    continue;
                }
                let cs = p.coeffs_in(u.index());
                let better = match &best {
                    None => true,
                    Some((_, a, _, _)) => (cs[1].len(), cs[1].total_degree()) < (a.len(), a.total_degree()),
                };
                if better {
                    best = Some((u, cs[1].clone(), cs[0].clone(), l.clone()));
                }
            }
            if best.is_some() {
                break;
            }
        }
        let Some((u, a, b, l)) = best else {
            let r = format!("{} equations nonlinear in every unknown", st.eqs.len());
            self.leaf(&st, CaseOutcome::Undecided(r));
            return;
        };
        let mut s = st.clone();
        s.assume_nonzero(a.clone());
        s.trail.push(format!("{} != 0 [{}]", print::poly_to_string(&a), l));
        let v = Rat::from_poly(b.neg()).div(&Rat::from_poly(a.clone())).expect("nonzero coefficient");
        s.substitute(u, &v);
        self.run(s);
        let mut s = st;
        s.trail.push(format!("{} = 0 [{}]", print::poly_to_string(&a), l));
        s.eqs.push((a, format!("{} (coefficient)", l)));
        s.eqs.push((b, format!("{} (remainder)", l)));
        self.run(s);
    }
}

/// Explores the case tree depth first, stopping at `max_nodes`.
pub fn solve_cases(sys: &PolySystem, max_nodes: usize) -> CaseTree {
    let st = State {
        eqs: sys.equations.clone(),
        bind: Vec::new(),
        nonzero: Vec::new(),
        groups: sys.nonzero_any.clone(),
        trail: Vec::new(),
    };
    let mut s = Solver { tree: CaseTree::default(), max_nodes };
    s.run(st);
    s.tree
}
