//! Graded exterior algebra over rational functions.
//!
//! A [`Coframe`] fixes an ordered list of generating 1-forms together with
//! their differentials, and the differentials of the scalar symbols that may
//! appear in coefficients. [`Form`]s carry only the id of their coframe, so
//! rules stored inside a coframe can themselves be forms over it.

mod ideal;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::sync::atomic::{AtomicU64, Ordering};
use hashbrown::HashMap;
use smallvec::SmallVec;

use crate::symkernel::{print, Rat, SymError, Symbol};

pub use ideal::{ideal_member_wedge, ideal_residual, ideal_residual_lenient, IdealResult};

/// Index of a generator inside its coframe.
pub type Gen = u16;
/// Strictly increasing generator indices.
pub type Monomial = SmallVec<[Gen; 4]>;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExtError {
    #[error("forms belong to different coframes")]
    MixedContexts,
    #[error("differential rules unknown for: {0}")]
    Blocked(String),
    #[error("symbol {0} has no registered differential")]
    Unregistered(String),
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("duplicate generator {0}")]
    Duplicate(String),
    #[error("degenerate ideal generators: {0}")]
    Degenerate(String),
    #[error("inconsistent differential binding for {0}")]
    InconsistentBinding(String),
    #[error("division by a form that does not divide: {0}")]
    NotDivisible(String),
    #[error(transparent)]
    Sym(#[from] SymError),
}

#[derive(Clone, Debug)]
pub enum GenRule {
    /// `d` of a coordinate symbol; closed.
    Coordinate(Symbol),
    /// Registered 2-form.
    Formal(Form),
    Unknown,
}

#[derive(Clone, Debug)]
pub enum ScalarRule {
    Coordinate(Gen),
    Formal(Form),
    /// Differential is an unconstrained 1-form.
    Unknown,
    Constant,
}

#[derive(Clone, Debug)]
pub struct GenInfo {
    pub name: String,
    pub rule: GenRule,
}

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Clone, Debug)]
pub struct Coframe {
    id: u64,
    gens: Vec<GenInfo>,
    by_name: HashMap<String, Gen>,
    scalars: HashMap<Symbol, ScalarRule>,
}

impl Default for Coframe {
    fn default() -> Self {
        Coframe::new()
    }
}

impl Coframe {
    pub fn new() -> Coframe {
        Coframe { id: NEXT_ID.fetch_add(1, Ordering::Relaxed), gens: Vec::new(), by_name: HashMap::new(), scalars: HashMap::new() }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn gen_info(&self, g: Gen) -> &GenInfo {
        &self.gens[g as usize]
    }

    pub fn gen_name(&self, g: Gen) -> &str {
        &self.gens[g as usize].name
    }

    pub fn gen(&self, name: &str) -> Option<Gen> {
        self.by_name.get(name).copied()
    }

    pub fn gens(&self) -> impl Iterator<Item = (Gen, &GenInfo)> {
        self.gens.iter().enumerate().map(|(i, g)| (i as Gen, g))
    }

    /// Adds `d(s)` as a closed generator named `d(s)` and registers `s` as a coordinate.
    pub fn add_coordinate(&mut self, s: Symbol) -> Result<Gen, ExtError> {
        let name = format!("d({})", s.name());
        let g = self.push(name, GenRule::Coordinate(s))?;
        self.scalars.insert(s, ScalarRule::Coordinate(g));
        Ok(g)
    }

    /// Adds an abstract generator whose rule is set later (unknown until then).
    pub fn add_abstract(&mut self, name: &str) -> Result<Gen, ExtError> {
        self.push(name.to_string(), GenRule::Unknown)
    }

    fn push(&mut self, name: String, rule: GenRule) -> Result<Gen, ExtError> {
        if self.by_name.contains_key(&name) {
            return Err(ExtError::Duplicate(name));
        }
        let g = self.gens.len() as Gen;
        self.by_name.insert(name.clone(), g);
        self.gens.push(GenInfo { name, rule });
        Ok(g)
    }

    pub fn set_rule(&mut self, g: Gen, rule: Form) -> Result<(), ExtError> {
        if rule.ctx != self.id {
            return Err(ExtError::MixedContexts);
        }
        self.gens[g as usize].rule = GenRule::Formal(rule);
        Ok(())
    }

    pub fn set_scalar(&mut self, s: Symbol, rule: ScalarRule) {
        self.scalars.insert(s, rule);
    }

    pub fn scalar_rule(&self, s: Symbol) -> Option<&ScalarRule> {
        self.scalars.get(&s)
    }

    pub fn zero(&self) -> Form {
        Form::zero(self.id)
    }

    pub fn scalar(&self, r: Rat) -> Form {
        Form::from_terms(self.id, [(Monomial::new(), r)])
    }

    /// The generator as a 1-form.
    pub fn g(&self, g: Gen) -> Form {
        let mut m = Monomial::new();
        m.push(g);
        Form::from_terms(self.id, [(m, Rat::one())])
    }

    pub fn named(&self, name: &str) -> Result<Form, ExtError> {
        self.gen(name).map(|g| self.g(g)).ok_or_else(|| ExtError::UnknownGenerator(name.to_string()))
    }

    /// `d(s)` for a scalar symbol, as a 1-form (slots are reported separately).
    pub fn d_symbol(&self, s: Symbol) -> Result<Form, ExtError> {
        let mut slots = BTreeMap::new();
        let f = self.d_scalar(&Rat::var(s), &mut slots)?;
        if !slots.is_empty() {
            return Err(ExtError::Blocked(s.name().to_string()));
        }
        Ok(f)
    }

    fn d_scalar(&self, c: &Rat, slots: &mut BTreeMap<Slot, Form>) -> Result<Form, ExtError> {
        let mut out = self.zero();
        for s in c.vars() {
            let rule = self.scalars.get(&s).ok_or_else(|| ExtError::Unregistered(s.name().to_string()))?;
            match rule {
                ScalarRule::Constant => {}
                ScalarRule::Coordinate(g) => {
                    let p = c.diff(s);
                    out.add_term(Monomial::from_slice(&[*g]), p);
                }
                ScalarRule::Formal(f) => {
                    let p = c.diff(s);
                    out = out.add(&f.scale(&p))?;
                }
                ScalarRule::Unknown => {
                    let p = c.diff(s);
                    let e = slots.entry(Slot::Scalar(s)).or_insert_with(|| self.zero());
                    *e = e.add(&self.scalar(p))?;
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative. Unknown differentials are returned as slots;
    /// in full mode any slot is an error listing the blocking names.
    pub fn ext_d(&self, f: &Form, mode: Mode) -> Result<DResult, ExtError> {
        if f.ctx != self.id {
            return Err(ExtError::MixedContexts);
        }
        let mut known = self.zero();
        let mut slots: BTreeMap<Slot, Form> = BTreeMap::new();
        for (m, c) in f.terms.iter() {
            // d(c) ∧ m
            let mut cs = BTreeMap::new();
            let dc = self.d_scalar(c, &mut cs)?;
            if !dc.is_zero() {
                known = known.add(&dc.wedge(&self.mono(m))?)?;
            }
            for (s, cof) in cs {
                let e = slots.entry(s).or_insert_with(|| self.zero());
                *e = e.add(&cof.wedge(&self.mono(m))?)?;
            }
            // c · d(m)
            for (j, &g) in m.iter().enumerate() {
                let sign = if j % 2 == 0 { 1 } else { -1 };
                let mut rest = m.clone();
                rest.remove(j);
                match &self.gens[g as usize].rule {
                    GenRule::Coordinate(_) => {}
                    GenRule::Formal(r) => {
                        let t = r.wedge(&self.mono(&rest))?.scale(&c.scale(&crate::symkernel::q(sign, 1)));
                        known = known.add(&t)?;
                    }
                    GenRule::Unknown => {
                        let e = slots.entry(Slot::Gen(g)).or_insert_with(|| self.zero());
                        let mut cof = self.zero();
                        cof.add_term(rest, c.scale(&crate::symkernel::q(sign, 1)));
                        *e = e.add(&cof)?;
                    }
                }
            }
        }
        slots.retain(|_, v| !v.is_zero());
        if mode == Mode::Full && !slots.is_empty() {
            let names: Vec<String> = slots.keys().map(|s| self.slot_name(s)).collect();
            return Err(ExtError::Blocked(names.join(", ")));
        }
        Ok(DResult { known, slots })
    }

    /// Full-mode derivative.
    pub fn d(&self, f: &Form) -> Result<Form, ExtError> {
        Ok(self.ext_d(f, Mode::Full)?.known)
    }

    pub fn slot_name(&self, s: &Slot) -> String {
        match s {
            Slot::Gen(g) => format!("d({})", self.gen_name(*g)),
            Slot::Scalar(x) => format!("d({})", x.name()),
        }
    }

    fn mono(&self, m: &Monomial) -> Form {
        Form::from_terms(self.id, [(m.clone(), Rat::one())])
    }

    /// Interior product with the vector whose value on generator `g` is `v[g]`.
    pub fn interior(&self, v: &BTreeMap<Gen, Rat>, f: &Form) -> Result<Form, ExtError> {
        if f.ctx != self.id {
            return Err(ExtError::MixedContexts);
        }
        let mut out = self.zero();
        for (m, c) in f.terms.iter() {
            for (j, g) in m.iter().enumerate() {
                if let Some(val) = v.get(g) {
                    let mut rest = m.clone();
                    rest.remove(j);
                    let t = c.mul(val);
                    out.add_term(rest, if j % 2 == 0 { t } else { t.neg() });
                }
            }
        }
        Ok(out)
    }

    /// Text with generator names, e.g. `u[y,z]*d(t)/\d(x)`.
    pub fn render(&self, f: &Form) -> String {
        if f.is_zero() {
            return "0".into();
        }
        let mut parts: Vec<String> = Vec::new();
        for (m, c) in f.terms.iter() {
            let mono: Vec<&str> = m.iter().map(|&g| self.gen_name(g)).collect();
            let ct = print::rat_to_string(c);
            let ms = mono.join("/\\");
            let term = if m.is_empty() {
                format!("({})", ct)
            } else if c.is_one() {
                ms
            } else {
                format!("({})*{}", ct, ms)
            };
            parts.push(term);
        }
        parts.join(" + ")
    }

    pub fn digest(&self, f: &Form) -> String {
        if f.is_zero() {
            return "0".into();
        }
        print::digest_text(&self.render(f))
    }

    /// Coefficients keyed by generator names.
    pub fn expand_in_basis(&self, f: &Form) -> BTreeMap<Vec<String>, Rat> {
        f.terms.iter().map(|(m, c)| (m.iter().map(|&g| self.gen_name(g).to_string()).collect(), c.clone())).collect()
    }

    pub fn rebuild(&self, map: &BTreeMap<Vec<String>, Rat>) -> Result<Form, ExtError> {
        let mut out = self.zero();
        for (names, c) in map {
            let mut f = self.scalar(c.clone());
            for n in names {
                f = f.wedge(&self.named(n)?)?;
            }
            out = out.add(&f)?;
        }
        Ok(out)
    }

    /// Rewrites `f` from another coframe by generator names.
    pub fn transport(&self, from: &Coframe, f: &Form) -> Result<Form, ExtError> {
        let mut map: Vec<Option<Gen>> = Vec::with_capacity(from.len());
        for (_, info) in from.gens() {
            map.push(self.gen(&info.name));
        }
        let mut out = self.zero();
        for (m, c) in f.terms.iter() {
            let mut f2 = self.scalar(c.clone());
            for &g in m.iter() {
                let t = map[g as usize].ok_or_else(|| ExtError::UnknownGenerator(from.gen_name(g).to_string()))?;
                f2 = f2.wedge(&self.g(t))?;
            }
            out = out.add(&f2)?;
        }
        Ok(out)
    }

    /// Pulls back along a substitution of coordinate symbols. Each bound
    /// symbol's differential becomes `d` of its image; `differentials`
    /// optionally supplies those images explicitly and is checked.
    pub fn pullback(&self, f: &Form, bind: &BTreeMap<Symbol, Rat>, differentials: &BTreeMap<Symbol, Form>) -> Result<Form, ExtError> {
        let lookup = |s: Symbol| bind.get(&s).cloned();
        let mut gen_images: BTreeMap<Gen, Form> = BTreeMap::new();
        for (s, img) in bind {
            if let Some(ScalarRule::Coordinate(g)) = self.scalars.get(s) {
                let d_img = self.d(&self.scalar(img.clone()))?;
                if let Some(given) = differentials.get(s) {
                    if !given.sub(&d_img)?.is_zero() {
                        return Err(ExtError::InconsistentBinding(s.name().to_string()));
                    }
                }
                gen_images.insert(*g, d_img);
            }
        }
        let mut out = self.zero();
        for (m, c) in f.terms.iter() {
            let mut t = self.scalar(c.substitute(&lookup)?);
            for &g in m.iter() {
                let img = gen_images.get(&g).cloned().unwrap_or_else(|| self.g(g));
                t = t.wedge(&img)?;
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }

    /// Substitutes generators by forms (used for basis changes).
    pub fn substitute_gens(&self, f: &Form, images: &BTreeMap<Gen, Form>) -> Result<Form, ExtError> {
        let mut out = self.zero();
        for (m, c) in f.terms.iter() {
            if !m.iter().any(|g| images.contains_key(g)) {
                out.add_term(m.clone(), c.clone());
                continue;
            }
            let mut t = self.scalar(c.clone());
            for &g in m.iter() {
                let img = images.get(&g).cloned().unwrap_or_else(|| self.g(g));
                t = t.wedge(&img)?;
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Full,
    Partial,
}

/// Opaque unknown differential: of a generator (2-form) or of a scalar (1-form).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Slot {
    Gen(Gen),
    Scalar(Symbol),
}

/// `d(f) = known + Σ slot ∧ cofactor`.
#[derive(Clone, Debug)]
pub struct DResult {
    pub known: Form,
    pub slots: BTreeMap<Slot, Form>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    ctx: u64,
    terms: BTreeMap<Monomial, Rat>,
}

/// Sign and canonical order of the concatenation, or `None` on a repeat.
pub fn wedge_monomials(a: &[Gen], b: &[Gen]) -> Option<(i32, Monomial)> {
    let mut out = Monomial::with_capacity(a.len() + b.len());
    let mut inv = 0usize;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            return None;
        }
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            // b[j] jumps over the remaining a's
            inv += a.len() - i;
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((if inv % 2 == 0 { 1 } else { -1 }, out))
}

impl Form {
    pub fn zero(ctx: u64) -> Form {
        Form { ctx, terms: BTreeMap::new() }
    }

    pub fn from_terms(ctx: u64, it: impl IntoIterator<Item = (Monomial, Rat)>) -> Form {
        let mut f = Form::zero(ctx);
        for (m, c) in it {
            f.add_term(m, c);
        }
        f
    }

    pub fn ctx(&self) -> u64 {
        self.ctx
    }

    /// Adds `c · m` where `m` must already be strictly increasing.
    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        debug_assert!(m.windows(2).all(|w| w[0] < w[1]));
        match self.terms.get_mut(&m) {
            Some(e) => {
                let s = e.add(&c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *e = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &[Gen]) -> Rat {
        self.terms.get(&Monomial::from_slice(m)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree of the leading monomial; 0 for the zero form.
    pub fn degree(&self) -> usize {
        self.terms.keys().next().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let d = self.degree();
        self.terms.keys().all(|m| m.len() == d)
    }

    pub fn contains_gen(&self, g: Gen) -> bool {
        self.terms.keys().any(|m| m.contains(&g))
    }

    pub fn support(&self) -> Vec<Gen> {
        let mut v: Vec<Gen> = self.terms.keys().flat_map(|m| m.iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    fn check(&self, o: &Form) -> Result<(), ExtError> {
        if self.ctx != o.ctx {
            Err(ExtError::MixedContexts)
        } else {
            Ok(())
        }
    }

    pub fn add(&self, o: &Form) -> Result<Form, ExtError> {
        self.check(o)?;
        let mut r = self.clone();
        for (m, c) in o.terms.iter() {
            r.add_term(m.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn sub(&self, o: &Form) -> Result<Form, ExtError> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Form {
        Form { ctx: self.ctx, terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }

    pub fn scale(&self, c: &Rat) -> Form {
        if c.is_zero() {
            return Form::zero(self.ctx);
        }
        if c.is_one() {
            return self.clone();
        }
        let mut r = Form::zero(self.ctx);
        for (m, d) in self.terms.iter() {
            r.add_term(m.clone(), d.mul(c));
        }
        r
    }

    pub fn wedge(&self, o: &Form) -> Result<Form, ExtError> {
        self.check(o)?;
        let mut r = Form::zero(self.ctx);
        for (ma, ca) in self.terms.iter() {
            for (mb, cb) in o.terms.iter() {
                if let Some((s, m)) = wedge_monomials(ma, mb) {
                    let c = ca.mul(cb);
                    r.add_term(m, if s > 0 { c } else { c.neg() });
                }
            }
        }
        Ok(r)
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs<E>(&self, mut f: impl FnMut(&Rat) -> Result<Rat, E>) -> Result<Form, E> {
        let mut r = Form::zero(self.ctx);
        for (m, c) in self.terms.iter() {
            r.add_term(m.clone(), f(c)?);
        }
        Ok(r)
    }

    /// Keeps the monomials for which `keep` holds.
    pub fn filter(&self, mut keep: impl FnMut(&Monomial) -> bool) -> Form {
        Form { ctx: self.ctx, terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    /// Every coefficient's variables.
    pub fn coeff_vars(&self) -> Vec<Symbol> {
        let mut v: Vec<Symbol> = self.terms.values().flat_map(|c| c.vars()).collect();
        v.sort();
        v.dedup();
        v
    }
}

/// Wedge of a list of forms.
pub fn wedge_all(cf: &Coframe, fs: &[Form]) -> Result<Form, ExtError> {
    let mut acc = cf.scalar(Rat::one());
    for f in fs {
        acc = acc.wedge(f)?;
    }
    Ok(acc)
}
