//! Jet coordinates of one dependent variable, optional fibre jets of a
//! covering, total derivatives and reduction modulo a solved relation.
//!
//! Multi-indices are stored as derivative counts per base variable, so
//! `u[z,y]` and `u[y,z]` are the same symbol. A jet is internal unless its
//! counts dominate the principal multi-index of the registered relation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use hashbrown::{HashMap, HashSet};
use smallvec::SmallVec;

use crate::symkernel::{Poly, Rat, SymError, Symbol, SymbolKind};

pub type Counts = SmallVec<[u8; 4]>;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum JetError {
    #[error("jet {0} exceeds the chart order bound")]
    OrderOverflow(String),
    #[error("fibre jet {0} exceeds the fibre order bound")]
    FibreOverflow(String),
    #[error("unknown base variable {0}")]
    UnknownDirection(String),
    #[error("relation right side contains the principal jet or one of its prolongations")]
    RelationNotSolved,
    #[error("cyclic prolongation at {0}")]
    Cycle(String),
    #[error("no fibre rule for {0}")]
    MissingFibreRule(String),
    #[error(transparent)]
    Sym(#[from] SymError),
}

/// `lhs = rhs` with `lhs` a principal jet; `rhs` in internal coordinates.
#[derive(Clone, Debug)]
pub struct SolvedRelation {
    pub name: String,
    pub principal: Counts,
    pub rhs: Rat,
}

#[derive(Clone, Debug)]
pub struct FibreSpec {
    pub name: String,
    /// Base-variable positions of the two distinguished directions (y, z).
    pub dirs: (usize, usize),
    pub order: usize,
}

#[derive(Clone, Debug)]
enum Role {
    Base(usize),
    Jet(Counts),
    Fibre(u8, u8),
    Param,
}

/// Rules for the fibre derivatives along the non-distinguished directions:
/// for base direction `a` and fibre jet `(i, j)`, the image of `D_a v[i,j]`.
#[derive(Clone, Debug, Default)]
pub struct FibreRules {
    pub images: BTreeMap<(usize, u8, u8), Rat>,
}

#[derive(Clone, Debug)]
pub struct JetChart {
    base_names: Vec<String>,
    base: Vec<Symbol>,
    dep: String,
    order: usize,
    fibre: Option<FibreSpec>,
    params: Vec<Symbol>,
    roles: HashMap<Symbol, Role>,
    jets: HashMap<Counts, Symbol>,
    fibre_jets: HashMap<(u8, u8), Symbol>,
    relation: Option<SolvedRelation>,
    prolongations: HashMap<Counts, Rat>,
    fibre_rules: Option<Arc<FibreRules>>,
}

fn count_order(c: &Counts) -> usize {
    c.iter().map(|&k| k as usize).sum()
}

impl JetChart {
    /// Builds a chart with every jet of order `<= order` interned.
    pub fn new(base_names: &[&str], dep: &str, order: usize, fibre: Option<FibreSpec>, params: &[&str]) -> Result<JetChart, JetError> {
        let n = base_names.len();
        let mut roles = HashMap::new();
        let mut base = Vec::new();
        for (i, b) in base_names.iter().enumerate() {
            let s = Symbol::new(b, SymbolKind::BaseVariable)?;
            roles.insert(s, Role::Base(i));
            base.push(s);
        }
        let mut chart = JetChart {
            base_names: base_names.iter().map(|s| s.to_string()).collect(),
            base,
            dep: dep.to_string(),
            order,
            fibre: None,
            params: Vec::new(),
            roles,
            jets: HashMap::new(),
            fibre_jets: HashMap::new(),
            relation: None,
            prolongations: HashMap::new(),
            fibre_rules: None,
        };
        for c in all_counts(n, order) {
            let s = Symbol::new(&chart.jet_name(&c), SymbolKind::Jet)?;
            chart.roles.insert(s, Role::Jet(c.clone()));
            chart.jets.insert(c, s);
        }
        if let Some(f) = fibre {
            chart.add_fibre(f)?;
        }
        for p in params {
            chart.add_param(p)?;
        }
        Ok(chart)
    }

    /// Adds fibre jets `v[i,j]`, `i + j <= spec.order`, along the two
    /// distinguished directions.
    pub fn add_fibre(&mut self, f: FibreSpec) -> Result<(), JetError> {
        for tot in 0..=f.order {
            for i in 0..=tot {
                let j = tot - i;
                let s = Symbol::new(&fibre_name(&f.name, i as u8, j as u8), SymbolKind::FibreJet)?;
                self.roles.insert(s, Role::Fibre(i as u8, j as u8));
                self.fibre_jets.insert((i as u8, j as u8), s);
            }
        }
        self.fibre = Some(f);
        self.fibre_rules = None;
        Ok(())
    }

    pub fn add_param(&mut self, p: &str) -> Result<Symbol, JetError> {
        let s = Symbol::new(p, SymbolKind::Parameter)?;
        if !self.params.contains(&s) {
            self.roles.insert(s, Role::Param);
            self.params.push(s);
        }
        Ok(s)
    }

    pub fn base_names(&self) -> &[String] {
        &self.base_names
    }

    pub fn base(&self) -> &[Symbol] {
        &self.base
    }

    pub fn dependent(&self) -> &str {
        &self.dep
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn fibre(&self) -> Option<&FibreSpec> {
        self.fibre.as_ref()
    }

    pub fn params(&self) -> &[Symbol] {
        &self.params
    }

    pub fn relation(&self) -> Option<&SolvedRelation> {
        self.relation.as_ref()
    }

    pub fn direction(&self, name: &str) -> Result<usize, JetError> {
        self.base_names.iter().position(|b| b == name).ok_or_else(|| JetError::UnknownDirection(name.to_string()))
    }

    pub fn jet_name(&self, c: &Counts) -> String {
        if count_order(c) == 0 {
            return self.dep.clone();
        }
        let mut letters: Vec<&str> = Vec::new();
        for (i, &k) in c.iter().enumerate() {
            for _ in 0..k {
                letters.push(&self.base_names[i]);
            }
        }
        format!("{}[{}]", self.dep, letters.join(","))
    }

    /// Counts for a list of base-variable names (order irrelevant).
    pub fn counts_of(&self, letters: &[&str]) -> Result<Counts, JetError> {
        let mut c: Counts = core::iter::repeat(0u8).take(self.base.len()).collect();
        for l in letters {
            let i = self.direction(l)?;
            c[i] += 1;
        }
        Ok(c)
    }

    pub fn jet(&self, c: &Counts) -> Result<Symbol, JetError> {
        self.jets.get(c).copied().ok_or_else(|| JetError::OrderOverflow(self.jet_name(c)))
    }

    pub fn jet_by_letters(&self, letters: &[&str]) -> Result<Symbol, JetError> {
        let c = self.counts_of(letters)?;
        self.jet(&c)
    }

    pub fn fibre_jet(&self, i: u8, j: u8) -> Result<Symbol, JetError> {
        let f = self.fibre.as_ref().ok_or_else(|| JetError::FibreOverflow(format!("[{},{}]", i, j)))?;
        self.fibre_jets.get(&(i, j)).copied().ok_or_else(|| JetError::FibreOverflow(fibre_name(&f.name, i, j)))
    }

    pub fn jet_counts(&self, s: Symbol) -> Option<&Counts> {
        match self.roles.get(&s) {
            Some(Role::Jet(c)) => Some(c),
            _ => None,
        }
    }

    pub fn fibre_index(&self, s: Symbol) -> Option<(u8, u8)> {
        match self.roles.get(&s) {
            Some(Role::Fibre(i, j)) => Some((*i, *j)),
            _ => None,
        }
    }

    pub fn is_base(&self, s: Symbol) -> bool {
        matches!(self.roles.get(&s), Some(Role::Base(_)))
    }

    pub fn knows(&self, s: Symbol) -> bool {
        self.roles.contains_key(&s)
    }

    pub fn is_internal(&self, c: &Counts) -> bool {
        match &self.relation {
            None => true,
            Some(r) => !c.iter().zip(r.principal.iter()).all(|(a, b)| a >= b),
        }
    }

    /// Internal jets of order `<= max`, in a fixed order (by order, then base order).
    pub fn internal_jets(&self, max: usize) -> Vec<Symbol> {
        let mut v: Vec<(usize, Counts)> = self.jets.keys().filter(|c| count_order(c) <= max && self.is_internal(c)).map(|c| (count_order(c), c.clone())).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)));
        v.into_iter().map(|(_, c)| self.jets[&c]).collect()
    }

    pub fn fibre_jets(&self, max: usize) -> Vec<Symbol> {
        let mut v: Vec<(u8, u8)> = self.fibre_jets.keys().copied().filter(|&(i, j)| (i + j) as usize <= max).collect();
        v.sort_by_key(|&(i, j)| (i + j, core::cmp::Reverse(i)));
        v.into_iter().map(|k| self.fibre_jets[&k]).collect()
    }

    /// Registers `lhs = rhs` and precomputes every prolongation within the order bound.
    pub fn with_relation(mut self, name: &str, principal: Counts, rhs: Rat) -> Result<JetChart, JetError> {
        let rel = SolvedRelation { name: name.to_string(), principal: principal.clone(), rhs };
        self.relation = Some(rel.clone());
        for s in rel.rhs.vars() {
            if let Some(c) = self.jet_counts(s) {
                if !self.is_internal(c) {
                    return Err(JetError::RelationNotSolved);
                }
            }
        }
        let mut targets: Vec<Counts> = self.jets.keys().filter(|c| !self.is_internal(c)).cloned().collect();
        targets.sort_by_key(|c| (count_order(c), c.clone()));
        let mut busy = HashSet::new();
        for c in targets {
            self.build_prolongation(&c, &mut busy)?;
        }
        Ok(self)
    }

    fn build_prolongation(&mut self, c: &Counts, busy: &mut HashSet<Counts>) -> Result<Rat, JetError> {
        if let Some(r) = self.prolongations.get(c) {
            return Ok(r.clone());
        }
        if !busy.insert(c.clone()) {
            return Err(JetError::Cycle(self.jet_name(c)));
        }
        let rel = self.relation.clone().expect("relation registered");
        let rest: Counts = c.iter().zip(rel.principal.iter()).map(|(a, b)| a - b).collect();
        let r = match rest.iter().position(|&k| k > 0) {
            None => rel.rhs.clone(),
            Some(a) => {
                let mut prev = c.clone();
                prev[a] -= 1;
                let base = self.build_prolongation(&prev, busy)?;
                let mut images: Vec<(Symbol, Rat)> = Vec::new();
                for s in base.vars() {
                    if let Some(jc) = self.jet_counts(s).cloned() {
                        let mut up = jc.clone();
                        up[a] += 1;
                        if count_order(&up) > self.order {
                            return Err(JetError::OrderOverflow(self.jet_name(&up)));
                        }
                        let img = if self.is_internal(&up) { Rat::var(self.jets[&up]) } else { self.build_prolongation(&up, busy)? };
                        images.push((s, img));
                    }
                }
                let ba = self.base[a];
                chain_rule(&base, ba, &images)
            }
        };
        busy.remove(c);
        self.prolongations.insert(c.clone(), r.clone());
        Ok(r)
    }

    pub fn set_fibre_rules(&mut self, rules: FibreRules) {
        self.fibre_rules = Some(Arc::new(rules));
    }

    pub fn fibre_rules(&self) -> Option<&FibreRules> {
        self.fibre_rules.as_deref()
    }

    /// Image of `D_a s` for a single chart symbol.
    pub fn derivative_image(&self, a: usize, s: Symbol) -> Result<Rat, JetError> {
        match self.roles.get(&s) {
            Some(Role::Base(i)) => Ok(if *i == a { Rat::one() } else { Rat::zero() }),
            Some(Role::Jet(c)) => {
                let mut up = c.clone();
                up[a] += 1;
                if count_order(&up) > self.order {
                    return Err(JetError::OrderOverflow(self.jet_name(&up)));
                }
                if self.is_internal(&up) {
                    Ok(Rat::var(self.jets[&up]))
                } else {
                    self.prolongations.get(&up).cloned().ok_or_else(|| JetError::OrderOverflow(self.jet_name(&up)))
                }
            }
            Some(Role::Fibre(i, j)) => {
                let f = self.fibre.as_ref().expect("fibre chart");
                if a == f.dirs.0 || a == f.dirs.1 {
                    let (ni, nj) = if a == f.dirs.0 { (*i + 1, *j) } else { (*i, *j + 1) };
                    self.fibre_jet(ni, nj).map(Rat::var)
                } else {
                    let rules = self.fibre_rules.as_ref().ok_or_else(|| JetError::MissingFibreRule(s.name().to_string()))?;
                    rules.images.get(&(a, *i, *j)).cloned().ok_or_else(|| JetError::MissingFibreRule(format!("D_{} {}", self.base_names[a], s.name())))
                }
            }
            Some(Role::Param) | None => Ok(Rat::zero()),
        }
    }

    /// Total derivative along base direction `a`.
    pub fn total_derivative(&self, a: usize, e: &Rat) -> Result<Rat, JetError> {
        let mut images = Vec::new();
        for s in e.vars() {
            let img = self.derivative_image(a, s)?;
            if !img.is_zero() {
                images.push((s, img));
            }
        }
        Ok(chain_rule(e, Symbol::from_index(u32::MAX), &images))
    }

    pub fn total_derivative_named(&self, dir: &str, e: &Rat) -> Result<Rat, JetError> {
        let a = self.direction(dir)?;
        self.total_derivative(a, e)
    }

    /// Eliminates every non-internal jet using the prolonged relation.
    pub fn reduce(&self, e: &Rat) -> Result<Rat, JetError> {
        if self.relation.is_none() {
            return Ok(e.clone());
        }
        let mut any = false;
        for s in e.vars() {
            if let Some(c) = self.jet_counts(s) {
                if !self.is_internal(c) {
                    any = true;
                    if !self.prolongations.contains_key(c) {
                        return Err(JetError::OrderOverflow(s.name().to_string()));
                    }
                }
            }
        }
        if !any {
            return Ok(e.clone());
        }
        let bind = |s: Symbol| -> Option<Rat> {
            let c = self.jet_counts(s)?;
            if self.is_internal(c) {
                None
            } else {
                self.prolongations.get(c).cloned()
            }
        };
        Ok(e.substitute(&bind)?)
    }

    /// Internal-coordinate expression of the principal jet differentiated by `extra`.
    pub fn prolong(&self, extra: &Counts) -> Result<Rat, JetError> {
        let rel = self.relation.as_ref().ok_or(JetError::RelationNotSolved)?;
        let c: Counts = rel.principal.iter().zip(extra.iter()).map(|(a, b)| a + b).collect();
        if count_order(&c) > self.order {
            return Err(JetError::OrderOverflow(self.jet_name(&c)));
        }
        Ok(self.prolongations[&c].clone())
    }
}

/// `∂e/∂base + Σ ∂e/∂s · image(s)`; `base` may be a sentinel never present.
fn chain_rule(e: &Rat, base: Symbol, images: &[(Symbol, Rat)]) -> Rat {
    let poly_fast = e.is_polynomial() && images.iter().all(|(_, r)| r.is_polynomial());
    if poly_fast {
        let p = e.numer();
        let mut acc = if base.index() == u32::MAX { Poly::zero() } else { p.diff(base) };
        for (s, img) in images {
            let d = p.diff(*s);
            if !d.is_zero() {
                acc = acc.add(&d.mul(img.numer()));
            }
        }
        return Rat::from_poly(acc);
    }
    // derivation on numerator and denominator separately
    let der = |p: &Poly| -> Rat {
        let mut acc = if base.index() == u32::MAX { Rat::zero() } else { Rat::from_poly(p.diff(base)) };
        for (s, img) in images {
            let d = p.diff(*s);
            if !d.is_zero() {
                acc = acc.add(&Rat::from_poly(d).mul(img));
            }
        }
        acc
    };
    let n = e.numer();
    let d = e.denom();
    let dn = der(n);
    if d.is_one() {
        return dn;
    }
    let dd = der(d);
    let den = Rat::from_poly(d.clone());
    let top = dn.mul(&den).sub(&dd.mul(&Rat::from_poly(n.clone())));
    top.div(&den.mul(&den)).expect("nonzero denominator")
}

fn fibre_name(v: &str, i: u8, j: u8) -> String {
    if i == 0 && j == 0 {
        v.to_string()
    } else {
        format!("{}[{},{}]", v, i, j)
    }
}

fn all_counts(n: usize, order: usize) -> Vec<Counts> {
    let mut out = Vec::new();
    let mut cur: Counts = core::iter::repeat(0u8).take(n).collect();
    fn rec(i: usize, left: usize, cur: &mut Counts, out: &mut Vec<Counts>) {
        if i + 1 == cur.len() {
            for k in 0..=left {
                cur[i] = k as u8;
                out.push(cur.clone());
            }
            cur[i] = 0;
            return;
        }
        for k in 0..=left {
            cur[i] = k as u8;
            rec(i + 1, left - k, cur, out);
        }
        cur[i] = 0;
    }
    if n == 0 {
        out.push(cur);
        return out;
    }
    rec(0, order, &mut cur, &mut out);
    out
}
