//! Turns parsed documents into core objects. Names resolve in declaration
//! order; a reference to something declared later is an error.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use edsforge_core::coverings::{chart_coframe, BaseGenerator, Covering};
use edsforge_core::eds_engine::{Candidate, StructureSet};
use edsforge_core::exterior::{Coframe, Form, ScalarRule};
use edsforge_core::heavenly_coframe::{contact_form, render_side, ExplicitCoframe};
use edsforge_core::jetspace::{Counts, FibreSpec, JetChart};
use edsforge_core::symkernel::{Poly, Rat, Symbol, SymbolKind, Q};

use crate::ast::*;
use crate::syntax::{parse, ParseError};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}:{span}: {message}")]
    Resolve { path: String, span: Span, message: String },
}

type R<T> = Result<T, String>;

fn err<T>(m: impl Into<String>) -> R<T> {
    Err(m.into())
}

#[derive(Clone, Debug)]
pub enum Val {
    S(Rat),
    F(Form),
}

/// What an expression may refer to.
struct Env<'a> {
    chart: Option<&'a JetChart>,
    cf: Option<&'a Coframe>,
    locals: &'a HashMap<String, Val>,
}

fn int_value(s: &str) -> R<Rat> {
    s.parse::<Q>().map(Rat::from_q).map_err(|_| format!("bad integer {}", s))
}

fn counts_from(chart: &JetChart, idx: &[String]) -> R<Counts> {
    let refs: Vec<&str> = idx.iter().map(|s| s.as_str()).collect();
    chart.counts_of(&refs).map_err(|e| e.to_string())
}

fn fibre_index(chart: &JetChart, idx: &[String]) -> R<(u8, u8)> {
    let f = chart.fibre().ok_or("no fibre on this chart")?;
    if idx.len() == 2 && idx.iter().all(|s| s.chars().all(|c| c.is_ascii_digit())) {
        let i: u8 = idx[0].parse().map_err(|_| "fibre index too large")?;
        let j: u8 = idx[1].parse().map_err(|_| "fibre index too large")?;
        return Ok((i, j));
    }
    let (mut i, mut j) = (0u8, 0u8);
    for s in idx {
        let d = chart.direction(s).map_err(|e| e.to_string())?;
        if d == f.dirs.0 {
            i += 1;
        } else if d == f.dirs.1 {
            j += 1;
        } else {
            return err(format!("fibre jets are taken along {} and {} only", chart.base_names()[f.dirs.0], chart.base_names()[f.dirs.1]));
        }
    }
    Ok((i, j))
}

impl Env<'_> {
    fn name(&self, n: &str) -> R<Val> {
        if let Some(v) = self.locals.get(n) {
            return Ok(v.clone());
        }
        if let Some(ch) = self.chart {
            if let Some(i) = ch.base_names().iter().position(|b| b == n) {
                return Ok(Val::S(Rat::var(ch.base()[i])));
            }
            if let Some(p) = ch.params().iter().find(|p| &*p.name() == n) {
                return Ok(Val::S(Rat::var(*p)));
            }
            if ch.dependent() == n {
                return self.jet(n, &[]);
            }
            if ch.fibre().is_some_and(|f| f.name == n) {
                return self.jet(n, &["0".into(), "0".into()]);
            }
        }
        if let Some(cf) = self.cf {
            if let Some(g) = cf.gen(n) {
                return Ok(Val::F(cf.g(g)));
            }
        }
        err(format!("unknown identifier '{}'", n))
    }

    fn jet(&self, n: &str, idx: &[String]) -> R<Val> {
        let ch = self.chart.ok_or_else(|| format!("jet {}[...] outside a chart", n))?;
        let s = if ch.dependent() == n {
            ch.jet(&counts_from(ch, idx)?).map_err(|e| e.to_string())?
        } else if ch.fibre().is_some_and(|f| f.name == n) {
            let (i, j) = fibre_index(ch, idx)?;
            ch.fibre_jet(i, j).map_err(|e| e.to_string())?
        } else {
            return err(format!("'{}' is neither the dependent variable nor a fibre", n));
        };
        Ok(Val::S(ch.reduce(&Rat::var(s)).map_err(|e| e.to_string())?))
    }

    fn cf(&self) -> R<&Coframe> {
        self.cf.ok_or_else(|| "forms are not available here".to_string())
    }

    fn eval(&self, e: &Expr) -> R<Val> {
        match e {
            Expr::Int(s) => Ok(Val::S(int_value(s)?)),
            Expr::Name(n) => self.name(n),
            Expr::Jet(n, idx) => self.jet(n, idx),
            Expr::Neg(a) => Ok(match self.eval(a)? {
                Val::S(r) => Val::S(r.neg()),
                Val::F(f) => Val::F(f.neg()),
            }),
            Expr::Pow(a, k) => match self.eval(a)? {
                Val::S(r) => {
                    let k = i32::try_from(*k).map_err(|_| "exponent out of range")?;
                    Ok(Val::S(r.pow(k).map_err(|e| e.to_string())?))
                }
                Val::F(_) => err("a form cannot be raised to a power"),
            },
            Expr::Bin(op, a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                let ext = |e: edsforge_core::exterior::ExtError| e.to_string();
                Ok(match (op, a, b) {
                    (BinOp::Add, Val::S(x), Val::S(y)) => Val::S(x.add(&y)),
                    (BinOp::Sub, Val::S(x), Val::S(y)) => Val::S(x.sub(&y)),
                    (BinOp::Mul | BinOp::Wedge, Val::S(x), Val::S(y)) => Val::S(x.mul(&y)),
                    (BinOp::Div, Val::S(x), Val::S(y)) => Val::S(x.div(&y).map_err(|e| e.to_string())?),
                    (BinOp::Add | BinOp::Sub, Val::F(x), Val::S(y)) if y.is_zero() => Val::F(x),
                    (BinOp::Add, Val::S(x), Val::F(y)) if x.is_zero() => Val::F(y),
                    (BinOp::Sub, Val::S(x), Val::F(y)) if x.is_zero() => Val::F(y.neg()),
                    (BinOp::Add, Val::F(x), Val::F(y)) => Val::F(x.add(&y).map_err(ext)?),
                    (BinOp::Sub, Val::F(x), Val::F(y)) => Val::F(x.sub(&y).map_err(ext)?),
                    (BinOp::Mul | BinOp::Wedge, Val::S(x), Val::F(y)) | (BinOp::Mul | BinOp::Wedge, Val::F(y), Val::S(x)) => Val::F(y.scale(&x)),
                    (BinOp::Div, Val::F(x), Val::S(y)) => Val::F(x.scale(&y.inv().map_err(|e| e.to_string())?)),
                    (BinOp::Wedge, Val::F(x), Val::F(y)) => Val::F(x.wedge(&y).map_err(ext)?),
                    (BinOp::Mul, Val::F(_), Val::F(_)) => return err("product of two forms; use /\\"),
                    (BinOp::Div, _, Val::F(_)) => return err("division by a form"),
                    (BinOp::Add | BinOp::Sub, _, _) => return err("cannot add a scalar and a form"),
                })
            }
            Expr::Call(f, args) => {
                if args.len() != 1 {
                    return err(format!("{} takes one argument", f));
                }
                match f.as_str() {
                    "d" => {
                        let cf = self.cf()?;
                        let v = self.eval(&args[0])?;
                        let f = match v {
                            Val::S(r) => cf.scalar(r),
                            Val::F(f) => f,
                        };
                        Ok(Val::F(cf.d(&f).map_err(|e| e.to_string())?))
                    }
                    "contact" => {
                        let cf = self.cf()?;
                        let ch = self.chart.ok_or("contact forms need a chart")?;
                        let (n, idx) = match &args[0] {
                            Expr::Jet(n, idx) => (n, &idx[..]),
                            Expr::Name(n) => (n, &[][..]),
                            _ => return err("contact takes a jet such as u[y,z]"),
                        };
                        if n != ch.dependent() {
                            return err(format!("contact forms exist for {} only", ch.dependent()));
                        }
                        let c = counts_from(ch, idx)?;
                        Ok(Val::F(contact_form(ch, cf, &c).map_err(|e| e.to_string())?))
                    }
                    other => err(format!("unknown function '{}'", other)),
                }
            }
        }
    }

    fn scalar(&self, e: &Expr) -> R<Rat> {
        match self.eval(e)? {
            Val::S(r) => Ok(r),
            Val::F(_) => err("expected a scalar, found a form"),
        }
    }

    fn form(&self, e: &Expr) -> R<Form> {
        match self.eval(e)? {
            Val::F(f) => Ok(f),
            Val::S(r) if r.is_zero() => Ok(self.cf()?.zero()),
            Val::S(_) => err("expected a form, found a scalar"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ChartDecl {
    pub base: Vec<String>,
    pub dependent: String,
    pub order: u32,
    pub params: Vec<String>,
}

impl ChartDecl {
    fn build(&self, order: usize) -> R<JetChart> {
        let b: Vec<&str> = self.base.iter().map(|s| s.as_str()).collect();
        let p: Vec<&str> = self.params.iter().map(|s| s.as_str()).collect();
        JetChart::new(&b, &self.dependent, order, None, &p).map_err(|e| e.to_string())
    }
}

#[derive(Clone, Debug)]
pub struct RelationEntry {
    pub chart: ChartDecl,
    pub principal: Counts,
    pub rhs: Rat,
}

impl RelationEntry {
    pub fn chart(&self, name: &str, order: usize) -> R<JetChart> {
        let order = order.max(self.chart.order as usize);
        let ch = self.chart.build(order)?;
        ch.with_relation(name, self.principal.clone(), self.rhs.clone()).map_err(|e| e.to_string())
    }
}

#[derive(Clone, Debug)]
pub struct CoveringEntry {
    pub relation: String,
    pub covering: Covering,
}

#[derive(Clone, Debug)]
pub struct GeneratorEntry {
    pub relation: String,
    pub generator: BaseGenerator,
}

#[derive(Clone, Debug)]
pub struct CoframeEntry {
    pub relation: String,
    pub chart: JetChart,
    pub ex: ExplicitCoframe,
    /// Declared identities as `lhs − rhs`.
    pub identities: Vec<(String, Form)>,
    pub form_names: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct TaskEntry {
    pub kind: TaskKind,
    pub expect_fail: bool,
}

/// Everything declared by a file and its imports.
#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub root: PathBuf,
    pub charts: HashMap<String, ChartDecl>,
    pub relations: HashMap<String, RelationEntry>,
    pub coverings: HashMap<String, CoveringEntry>,
    pub generators: HashMap<String, GeneratorEntry>,
    pub coframes: HashMap<String, Arc<CoframeEntry>>,
    pub structures: HashMap<String, StructureSet>,
    pub candidates: HashMap<String, Candidate>,
    pub tasks: HashMap<String, TaskEntry>,
    pub suites: HashMap<String, Vec<String>>,
    /// Tasks and suites of the root file, in declaration order.
    pub root_tasks: Vec<String>,
    pub root_suites: Vec<String>,
    last_chart: Option<String>,
    seen: HashSet<PathBuf>,
    names: HashSet<String>,
}

#[derive(Clone, Debug, Default)]
pub struct LoadOptions {
    /// Overrides the jet order of every coframe.
    pub jet_order: Option<usize>,
}

fn sym(name: &str, kind: SymbolKind) -> R<Symbol> {
    Symbol::new(name, kind).map_err(|e| e.to_string())
}

impl Workspace {
    pub fn load(path: &Path, opts: &LoadOptions) -> Result<Workspace, LoadError> {
        let mut ws = Workspace { root: path.to_path_buf(), ..Default::default() };
        ws.load_file(path, opts, true)?;
        Ok(ws)
    }

    /// Loads source text as if it were the file `path`.
    pub fn load_str(path: &Path, src: &str, opts: &LoadOptions) -> Result<Workspace, LoadError> {
        let mut ws = Workspace { root: path.to_path_buf(), ..Default::default() };
        ws.load_doc(path, src, opts, true)?;
        Ok(ws)
    }

    fn load_file(&mut self, path: &Path, opts: &LoadOptions, is_root: bool) -> Result<(), LoadError> {
        let canon = path.canonicalize().unwrap_or_else(|_| path.to_path_buf());
        if !self.seen.insert(canon) {
            return Ok(());
        }
        let src = std::fs::read_to_string(path).map_err(|e| LoadError::Io { path: path.display().to_string(), source: e })?;
        self.load_doc(path, &src, opts, is_root)
    }

    fn load_doc(&mut self, path: &Path, src: &str, opts: &LoadOptions, is_root: bool) -> Result<(), LoadError> {
        let shown = path.display().to_string();
        let doc = parse(src).map_err(|e| LoadError::Parse { path: shown.clone(), source: e })?;
        for item in &doc.items {
            if let Decl::Import(p) = &item.decl {
                let target = path.parent().unwrap_or(Path::new(".")).join(p);
                self.load_file(&target, opts, false)?;
                continue;
            }
            let resolve = |message: String| LoadError::Resolve { path: shown.clone(), span: item.span, message };
            if let Some(n) = item.decl.name() {
                if !self.names.insert(n.to_string()) {
                    return Err(resolve(format!("duplicate name '{}'", n)));
                }
            }
            self.declare(&item.decl, opts, is_root).map_err(resolve)?;
        }
        Ok(())
    }

    pub fn relation_chart(&self, name: &str, order: usize) -> R<JetChart> {
        let r = self.relations.get(name).ok_or_else(|| format!("unknown relation '{}'", name))?;
        r.chart(name, order)
    }

    fn declare(&mut self, d: &Decl, opts: &LoadOptions, is_root: bool) -> R<()> {
        let empty = HashMap::new();
        match d {
            Decl::Import(_) => {}
            Decl::Chart { name, base, dependent, order, params } => {
                let c = ChartDecl { base: base.clone(), dependent: dependent.clone(), order: *order, params: params.clone() };
                c.build(*order as usize)?;
                self.charts.insert(name.clone(), c);
                self.last_chart = Some(name.clone());
            }
            Decl::Relation { name, lhs, rhs } => {
                let cname = self.last_chart.clone().ok_or("a relation must follow a chart")?;
                let decl = self.charts[&cname].clone();
                let ch = decl.build(decl.order as usize)?;
                let Expr::Jet(n, idx) = lhs else { return err("the left side must be a jet such as u[x,z]") };
                if n != ch.dependent() {
                    return err(format!("the left side must be a jet of {}", ch.dependent()));
                }
                let principal = counts_from(&ch, idx)?;
                let env = Env { chart: Some(&ch), cf: None, locals: &empty };
                let rhs = env.scalar(rhs)?;
                let entry = RelationEntry { chart: decl, principal, rhs };
                entry.chart(name, 0)?;
                self.relations.insert(name.clone(), entry);
            }
            Decl::Covering { name, relation, fibre, along, params, rules } => {
                let mut ch = self.relation_chart(relation, 0)?;
                let dirs = (ch.direction(&along.0).map_err(|e| e.to_string())?, ch.direction(&along.1).map_err(|e| e.to_string())?);
                if dirs.0 >= dirs.1 {
                    return err("list the fibre directions in chart order");
                }
                ch.add_fibre(FibreSpec { name: fibre.clone(), dirs, order: 6 }).map_err(|e| e.to_string())?;
                let mut ps = Vec::new();
                for p in params {
                    ps.push(ch.add_param(p).map_err(|e| e.to_string())?);
                }
                let env = Env { chart: Some(&ch), cf: None, locals: &empty };
                let mut rs = Vec::new();
                for (dir, e) in rules {
                    let a = ch.direction(dir).map_err(|e| e.to_string())?;
                    if rs.iter().any(|(b, _)| *b == a) {
                        return err(format!("two rules for {}", dir));
                    }
                    rs.push((a, env.scalar(e)?));
                }
                let cov = Covering { name: name.clone(), fibre: fibre.clone(), params: ps, rules: rs };
                if cov.distinguished(&ch).map_err(|e| e.to_string())? != dirs {
                    return err("rules must cover every base direction except the fibre directions");
                }
                self.coverings.insert(name.clone(), CoveringEntry { relation: relation.clone(), covering: cov });
            }
            Decl::Generator { name, relation, components } => {
                let ch = self.relation_chart(relation, 0)?;
                let env = Env { chart: Some(&ch), cf: None, locals: &empty };
                let mut xi = vec![Rat::zero(); ch.base().len()];
                let mut phi = Rat::zero();
                for (dir, e) in components {
                    let v = env.scalar(e)?;
                    if dir == ch.dependent() {
                        phi = v;
                    } else {
                        xi[ch.direction(dir).map_err(|e| e.to_string())?] = v;
                    }
                }
                self.generators.insert(name.clone(), GeneratorEntry { relation: relation.clone(), generator: BaseGenerator { xi, phi } });
            }
            Decl::Coframe { name, relation, jet_order, fibre, coordinates, items } => {
                let k = opts.jet_order.unwrap_or(*jet_order as usize);
                let e = self.coframe(relation, k, fibre.as_ref(), coordinates, items)?;
                self.coframes.insert(name.clone(), Arc::new(e));
            }
            Decl::Structure { name, forms, free, rules } => {
                let mut cf = Coframe::new();
                for f in forms.iter().chain(free.iter().filter(|f| !forms.contains(f))) {
                    cf.add_abstract(f).map_err(|e| e.to_string())?;
                }
                let free_g: Vec<_> = free.iter().map(|f| cf.gen(f).expect("added")).collect();
                let mut ruled = HashSet::new();
                let mut staged = Vec::new();
                {
                    let env = Env { chart: None, cf: Some(&cf), locals: &empty };
                    for (n, e) in rules {
                        let g = cf.gen(n).ok_or_else(|| format!("'{}' is not a form of {}", n, name))?;
                        if free_g.contains(&g) {
                            return err(format!("'{}' is free and cannot have a rule", n));
                        }
                        if !ruled.insert(g) {
                            return err(format!("two rules for d {}", n));
                        }
                        let f = env.form(e)?;
                        check_degree(&f, 2, n)?;
                        staged.push((g, f));
                    }
                }
                for (g, f) in staged {
                    cf.set_rule(g, f).map_err(|e| e.to_string())?;
                }
                for f in forms {
                    let g = cf.gen(f).expect("added");
                    if !ruled.contains(&g) && !free_g.contains(&g) {
                        return err(format!("'{}' has neither a rule nor a free declaration", f));
                    }
                }
                self.structures.insert(name.clone(), StructureSet { cf, free: free_g });
            }
            Decl::Candidate { name, base, forms, invariants, params, rules } => {
                let set = self.structures.get(base).ok_or_else(|| format!("unknown structure '{}'", base))?;
                let mut cf = set.cf.clone();
                let mut gens = Vec::new();
                for f in forms {
                    gens.push(cf.add_abstract(f).map_err(|e| e.to_string())?);
                }
                if gens.is_empty() {
                    return err("a candidate needs at least one form");
                }
                let mut locals = HashMap::new();
                let mut inv = Vec::new();
                for w in invariants {
                    let s = sym(w, SymbolKind::Invariant)?;
                    locals.insert(w.clone(), Val::S(Rat::var(s)));
                    inv.push(s);
                }
                let mut ps = Vec::new();
                for p in params {
                    let s = sym(p, SymbolKind::Parameter)?;
                    locals.insert(p.clone(), Val::S(Rat::var(s)));
                    cf.set_scalar(s, ScalarRule::Unknown);
                    ps.push(s);
                }
                let mut gen_rules = Vec::new();
                let mut inv_rules = Vec::new();
                {
                    let env = Env { chart: None, cf: Some(&cf), locals: &locals };
                    for (n, e) in rules {
                        let f = env.form(e)?;
                        if let Some(i) = invariants.iter().position(|w| w == n) {
                            check_degree(&f, 1, n)?;
                            if inv_rules.iter().any(|(j, _)| *j == i) {
                                return err(format!("two rules for d {}", n));
                            }
                            inv_rules.push((i, f));
                        } else if let Some(i) = forms.iter().position(|w| w == n) {
                            check_degree(&f, 2, n)?;
                            if i != 0 {
                                return err(format!("only the first form ({}) takes a rule", forms[0]));
                            }
                            if !gen_rules.is_empty() {
                                return err(format!("two rules for d {}", n));
                            }
                            gen_rules.push(f);
                        } else {
                            return err(format!("'{}' is not a form or invariant of {}", n, name));
                        }
                    }
                }
                let Some(w0) = gen_rules.pop() else { return err(format!("missing rule for d {}", forms[0])) };
                cf.set_rule(gens[0], w0).map_err(|e| e.to_string())?;
                for (i, s) in inv.iter().enumerate() {
                    let Some((_, f)) = inv_rules.iter().find(|(j, _)| *j == i) else {
                        return err(format!("missing rule for d {}", invariants[i]));
                    };
                    cf.set_scalar(*s, ScalarRule::Formal(f.clone()));
                }
                let c = Candidate { name: name.clone(), cf, omega0: gens[0], unknown_forms: gens[1..].to_vec(), invariants: inv, params: ps };
                self.candidates.insert(name.clone(), c);
            }
            Decl::Task { name, kind, expect_fail } => {
                self.check_task(kind)?;
                self.tasks.insert(name.clone(), TaskEntry { kind: kind.clone(), expect_fail: *expect_fail });
                if is_root {
                    self.root_tasks.push(name.clone());
                }
            }
            Decl::Suite { name, tasks } => {
                for t in tasks {
                    if !self.tasks.contains_key(t) {
                        return err(format!("unknown task '{}'", t));
                    }
                }
                self.suites.insert(name.clone(), tasks.clone());
                if is_root {
                    self.root_suites.push(name.clone());
                }
            }
        }
        Ok(())
    }

    fn coframe(&self, relation: &str, k: usize, fibre: Option<&FibreDecl>, coordinates: &[String], items: &[CoframeItem]) -> R<CoframeEntry> {
        let mut ch = self.relation_chart(relation, k + 2)?;
        if let Some(f) = fibre {
            let dirs = (ch.direction(&f.along.0).map_err(|e| e.to_string())?, ch.direction(&f.along.1).map_err(|e| e.to_string())?);
            ch.add_fibre(FibreSpec { name: f.name.clone(), dirs, order: f.order as usize }).map_err(|e| e.to_string())?;
        }
        let mut coords = Vec::new();
        for c in coordinates {
            coords.push(ch.add_param(c).map_err(|e| e.to_string())?);
        }
        let cf = chart_coframe(&ch, k, &coords).map_err(|e| e.to_string())?;
        let mut ex = ExplicitCoframe::new(cf);
        let mut locals: HashMap<String, Val> = HashMap::new();
        let mut identities = Vec::new();
        let mut form_names = Vec::new();
        let mut dens: Vec<Poly> = Vec::new();
        for it in items {
            let env = Env { chart: Some(&ch), cf: Some(&ex.cf), locals: &locals };
            let label = match it {
                CoframeItem::Let(n, _) | CoframeItem::Form(n, _) | CoframeItem::Identity(n, _, _) => n.clone(),
            };
            let at = |e: String| format!("in {}: {}", label, e);
            match it {
                CoframeItem::Let(n, e) => {
                    let v = env.eval(e).map_err(at)?;
                    if locals.insert(n.clone(), v).is_some() {
                        return err(format!("'{}' is already bound", n));
                    }
                }
                CoframeItem::Form(n, e) => {
                    let f = env.form(e).map_err(at)?;
                    check_degree(&f, 1, n)?;
                    for (_, c) in f.terms() {
                        let d = c.denom().primitive_numeric();
                        if !d.is_constant() && !dens.contains(&d) {
                            dens.push(d);
                        }
                    }
                    if locals.insert(n.clone(), Val::F(f.clone())).is_some() {
                        return err(format!("'{}' is already bound", n));
                    }
                    ex.insert(n, f).map_err(|e| e.to_string())?;
                    form_names.push(n.clone());
                }
                CoframeItem::Identity(n, l, r) => {
                    let d = env.form(&Expr::Bin(BinOp::Sub, Box::new(l.clone()), Box::new(r.clone()))).map_err(at)?;
                    identities.push((n.clone(), d));
                }
            }
        }
        ex.side_conditions = dens.into_iter().map(|d| render_side(&Rat::from_poly(d))).collect();
        Ok(CoframeEntry { relation: relation.to_string(), chart: ch, ex, identities, form_names })
    }

    fn check_task(&self, k: &TaskKind) -> R<()> {
        let need = |map_has: bool, what: &str, n: &str| if map_has { Ok(()) } else { err(format!("unknown {} '{}'", what, n)) };
        let form_ref = |r: &FormRef| -> R<()> {
            let c = self.coframes.get(&r.coframe).ok_or_else(|| format!("unknown coframe '{}'", r.coframe))?;
            need(c.ex.get(&r.form).is_some(), "form", &format!("{}.{}", r.coframe, r.form))
        };
        match k {
            TaskKind::VerifyCovering { covering, .. } => need(self.coverings.contains_key(covering), "covering", covering),
            TaskKind::VerifyStructure { coframe, structure } => {
                need(self.coframes.contains_key(coframe), "coframe", coframe)?;
                need(self.structures.contains_key(structure), "structure", structure)
            }
            TaskKind::VerifyD2 { structure } => need(self.structures.contains_key(structure), "structure", structure),
            TaskKind::Cartan { structure, base, .. } => {
                let s = self.structures.get(structure).ok_or_else(|| format!("unknown structure '{}'", structure))?;
                for b in base {
                    need(s.cf.gen(b).is_some(), "form", b)?;
                }
                Ok(())
            }
            TaskKind::WeConvert { from, to } => match (from, to) {
                (WeEnd::Covering(c), WeEnd::Form(f)) | (WeEnd::Form(f), WeEnd::Covering(c)) => {
                    need(self.coverings.contains_key(c), "covering", c)?;
                    form_ref(f)
                }
                _ => err("we-convert goes between a covering and a coframe form"),
            },
            TaskKind::CieVerify { candidate, assume } => {
                let c = self.candidates.get(candidate).ok_or_else(|| format!("unknown candidate '{}'", candidate))?;
                for (n, _) in assume {
                    need(c.params.iter().chain(&c.invariants).any(|s| &*s.name() == n), "parameter", n)?;
                }
                Ok(())
            }
            TaskKind::CieSearch { structure, .. } => need(self.structures.contains_key(structure), "structure", structure),
            TaskKind::LiftCheck { covering, generator, flow, .. } => {
                need(self.coverings.contains_key(covering), "covering", covering)?;
                need(self.generators.contains_key(generator), "generator", generator)?;
                if let Some((c0, _)) = flow {
                    need(self.coverings.contains_key(c0), "covering", c0)?;
                }
                Ok(())
            }
            TaskKind::Realize { candidate, omega, independent } => {
                let c = self.candidates.get(candidate).ok_or_else(|| format!("unknown candidate '{}'", candidate))?;
                form_ref(omega)?;
                for w in independent {
                    need(c.invariants.iter().any(|s| &*s.name() == w), "invariant", w)?;
                }
                Ok(())
            }
        }
    }

    /// The relation chart with the covering's fibre and parameters, without
    /// extended derivative rules.
    pub fn covering_chart(&self, covering: &str) -> R<JetChart> {
        let c = &self.coverings[covering];
        let mut ch = self.relation_chart(&c.relation, 0)?;
        let dirs = c.covering.distinguished(&ch).map_err(|e| e.to_string())?;
        ch.add_fibre(FibreSpec { name: c.covering.fibre.clone(), dirs, order: 6 }).map_err(|e| e.to_string())?;
        for p in &c.covering.params {
            ch.add_param(&p.name()).map_err(|e| e.to_string())?;
        }
        Ok(ch)
    }

    /// Evaluates a scalar over a covering's chart (parameters, base variables, jets).
    pub fn covering_scalar(&self, covering: &str, e: &Expr) -> R<Rat> {
        let c = &self.coverings[covering];
        let mut ch = self.relation_chart(&c.relation, 0)?;
        for p in &c.covering.params {
            ch.add_param(&p.name()).map_err(|e| e.to_string())?;
        }
        let empty = HashMap::new();
        Env { chart: Some(&ch), cf: None, locals: &empty }.scalar(e)
    }

    pub fn scalar_constant(&self, e: &Expr) -> R<Rat> {
        let empty = HashMap::new();
        Env { chart: None, cf: None, locals: &empty }.scalar(e)
    }
}

fn check_degree(f: &Form, k: usize, name: &str) -> R<()> {
    if f.is_zero() || (f.is_homogeneous() && f.degree() == k) {
        Ok(())
    } else {
        err(format!("'{}' must be a {}-form", name, k))
    }
}
