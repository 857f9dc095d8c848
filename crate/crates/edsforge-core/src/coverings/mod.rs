//! Differential coverings over a jet chart: extended total derivatives,
//! zero-curvature checks, Wahlquist-Estabrook forms, affine point
//! transformations and bounded symmetry-lift searches.

mod transform;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::exterior::{Coframe, ExtError, Form, ScalarRule};
use crate::jetspace::{FibreRules, FibreSpec, JetChart, JetError};
use crate::report::{Check, Report};
use crate::symkernel::{print, solve_linear, Rat, Solution, SymError, Symbol, SymbolKind};

pub use transform::{apply_point_transform, PointTransform};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CovError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Ext(#[from] ExtError),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("chart has no solved relation")]
    NoRelation,
    #[error("covering must give rules for all but two base directions")]
    Shape,
    #[error("{0} is not allowed in a covering right side")]
    BadSymbol(String),
    #[error("not a covering form: {0}")]
    NotCoveringForm(String),
    #[error("transformation order too low for {0}")]
    InsufficientOrder(String),
    #[error("singular transformation")]
    Singular,
    #[error("generator is not a symmetry of the relation: {0}")]
    NotASymmetry(String),
    #[error("depth {0} exceeds fibre order minus two")]
    Depth(usize),
}

/// `D_a v = rhs_a` for every non-distinguished base direction `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct Covering {
    pub name: String,
    pub fibre: String,
    pub params: Vec<Symbol>,
    pub rules: Vec<(usize, Rat)>,
}

impl Covering {
    pub fn rule(&self, dir: usize) -> Option<&Rat> {
        self.rules.iter().find(|(a, _)| *a == dir).map(|(_, r)| r)
    }

    /// The two base directions without rules, in chart order.
    pub fn distinguished(&self, chart: &JetChart) -> Result<(usize, usize), CovError> {
        let free: Vec<usize> = (0..chart.base().len()).filter(|a| self.rule(*a).is_none()).collect();
        if free.len() != 2 || self.rules.len() + 2 != chart.base().len() {
            return Err(CovError::Shape);
        }
        Ok((free[0], free[1]))
    }
}

/// Adds fibre jets up to `fibre_order` and the extended total derivatives
/// `D_a v[i,j] = D_y^i D_z^j rhs_a`.
pub fn extend_chart(chart: &JetChart, c: &Covering, fibre_order: usize) -> Result<JetChart, CovError> {
    if chart.relation().is_none() {
        return Err(CovError::NoRelation);
    }
    let dirs = c.distinguished(chart)?;
    let mut ext = chart.clone();
    for p in &c.params {
        ext.add_param(&p.name())?;
    }
    ext.add_fibre(FibreSpec { name: c.fibre.clone(), dirs, order: fibre_order })?;
    let mut rules = FibreRules::default();
    for (a, rhs) in &c.rules {
        check_rhs(&ext, rhs, fibre_order)?;
        let base = ext.reduce(rhs)?;
        // rows of D_y^i D_z^j rhs for i + j < fibre_order
        for tot in 0..fibre_order {
            for i in 0..=tot {
                let j = tot - i;
                let img = if tot == 0 {
                    base.clone()
                } else if i > 0 {
                    ext.total_derivative(dirs.0, &rules.images[&(*a, (i - 1) as u8, j as u8)])?
                } else {
                    ext.total_derivative(dirs.1, &rules.images[&(*a, 0, (j - 1) as u8)])?
                };
                rules.images.insert((*a, i as u8, j as u8), img);
            }
        }
    }
    ext.set_fibre_rules(rules);
    Ok(ext)
}

fn check_rhs(ext: &JetChart, rhs: &Rat, fibre_order: usize) -> Result<(), CovError> {
    for s in rhs.vars() {
        if let Some((i, j)) = ext.fibre_index(s) {
            if (i + j) as usize >= fibre_order {
                return Err(CovError::BadSymbol(s.name().to_string()));
            }
        } else if let Some(cn) = ext.jet_counts(s) {
            if !ext.is_internal(cn) {
                continue; // reduced below
            }
        } else if !ext.knows(s) {
            return Err(CovError::BadSymbol(s.name().to_string()));
        }
    }
    Ok(())
}

/// Commutators of the extended total derivatives on `v[i,j]`, `i + j <= depth`.
pub fn zero_curvature_check(ext: &JetChart, c: &Covering, depth: usize) -> Result<Report, CovError> {
    let f = ext.fibre().ok_or(CovError::Shape)?.clone();
    if depth + 2 > f.order {
        return Err(CovError::Depth(depth));
    }
    let rules = ext.fibre_rules().ok_or(CovError::Shape)?;
    let name = |a: usize| ext.base_names()[a].clone();
    let mut checks = Vec::new();
    for tot in 0..=depth {
        for i in 0..=tot {
            let j = tot - i;
            let vij = format!("{}", ext.fibre_jet(i as u8, j as u8)?.name());
            for (ka, (a, _)) in c.rules.iter().enumerate() {
                for (b, _) in c.rules.iter().skip(ka + 1) {
                    let r = ext
                        .total_derivative(*a, &rules.images[&(*b, i as u8, j as u8)])?
                        .sub(&ext.total_derivative(*b, &rules.images[&(*a, i as u8, j as u8)])?);
                    checks.push(Check::rat(format!("[D_{},D_{}] {}", name(*a), name(*b), vij), &ext.reduce(&r)?));
                }
                for (d, (di, dj)) in [(f.dirs.0, (1u8, 0u8)), (f.dirs.1, (0, 1))] {
                    let shifted = ext.fibre_jet(i as u8 + di, j as u8 + dj)?;
                    let r = ext
                        .total_derivative(d, &rules.images[&(*a, i as u8, j as u8)])?
                        .sub(&ext.total_derivative(*a, &Rat::var(shifted))?);
                    checks.push(Check::rat(format!("[D_{},D_{}] {}", name(d), name(*a), vij), &ext.reduce(&r)?));
                }
            }
            let yz = ext
                .total_derivative(f.dirs.0, &Rat::var(ext.fibre_jet(i as u8, j as u8 + 1)?))?
                .sub(&ext.total_derivative(f.dirs.1, &Rat::var(ext.fibre_jet(i as u8 + 1, j as u8)?))?);
            checks.push(Check::rat(format!("[D_{},D_{}] {}", name(f.dirs.0), name(f.dirs.1), vij), &yz));
        }
    }
    Ok(Report::from_checks(checks))
}

/// Coordinate coframe of a chart: base, jets up to `jet_order` (internal
/// ones only when a relation is present), fibre jets, and the listed
/// parameters as coordinates. Remaining parameters are constants.
pub fn chart_coframe(chart: &JetChart, jet_order: usize, coordinate_params: &[Symbol]) -> Result<Coframe, CovError> {
    let mut cf = Coframe::new();
    for &b in chart.base() {
        cf.add_coordinate(b)?;
    }
    for s in chart.internal_jets(jet_order) {
        cf.add_coordinate(s)?;
    }
    if let Some(f) = chart.fibre() {
        for s in chart.fibre_jets(f.order) {
            cf.add_coordinate(s)?;
        }
    }
    for &p in chart.params() {
        if coordinate_params.contains(&p) {
            cf.add_coordinate(p)?;
        } else {
            cf.set_scalar(p, ScalarRule::Constant);
        }
    }
    for &p in coordinate_params {
        if cf.scalar_rule(p).is_none() {
            cf.add_coordinate(p)?;
        }
    }
    Ok(cf)
}

/// A 1-form `a·dv + ...` whose zero set defines a covering.
#[derive(Clone, Debug)]
pub struct WeForm {
    pub coframe: Arc<Coframe>,
    pub form: Form,
}

fn dgen(cf: &Coframe, s: Symbol) -> Result<Form, CovError> {
    Ok(cf.named(&format!("d({})", s.name()))?)
}

/// `dv − Σ rhs_a dx^a − v_y dy − v_z dz`.
pub fn covering_to_we(ext: &JetChart, c: &Covering, cf: Arc<Coframe>) -> Result<WeForm, CovError> {
    let f = ext.fibre().ok_or(CovError::Shape)?;
    let v = ext.fibre_jet(0, 0)?;
    let mut w = dgen(&cf, v)?;
    for (a, rhs) in &c.rules {
        w = w.sub(&dgen(&cf, ext.base()[*a])?.scale(rhs))?;
    }
    let vy = Rat::var(ext.fibre_jet(1, 0)?);
    let vz = Rat::var(ext.fibre_jet(0, 1)?);
    w = w.sub(&dgen(&cf, ext.base()[f.dirs.0])?.scale(&vy))?;
    w = w.sub(&dgen(&cf, ext.base()[f.dirs.1])?.scale(&vz))?;
    Ok(WeForm { coframe: cf, form: w })
}

/// Reads off a covering from `ω = 0` solved for `dv`; the normalized
/// dy, dz coefficients must be `−v_y`, `−v_z`.
pub fn we_to_covering(ext: &JetChart, w: &WeForm, name: &str, params: &[Symbol]) -> Result<(Covering, Vec<String>), CovError> {
    let cf = &w.coframe;
    let f = ext.fibre().ok_or(CovError::Shape)?;
    let v = ext.fibre_jet(0, 0)?;
    let gv = cf.gen(&format!("d({})", v.name())).ok_or_else(|| CovError::NotCoveringForm("no dv".into()))?;
    if !w.form.is_homogeneous() || w.form.degree() != 1 {
        return Err(CovError::NotCoveringForm("not a 1-form".into()));
    }
    let a = w.form.coeff(&[gv]);
    if a.is_zero() {
        return Err(CovError::NotCoveringForm("dv coefficient vanishes".into()));
    }
    let mut side = Vec::new();
    if !a.is_constant() {
        side.push(format!("{} != 0", print::rat_to_string(&a)));
    }
    let norm = w.form.scale(&a.inv()?);
    let mut seen = alloc::vec![gv];
    let mut coef = |s: Symbol| -> Result<Rat, CovError> {
        let g = cf.gen(&format!("d({})", s.name())).ok_or_else(|| CovError::NotCoveringForm(format!("no d({})", s.name())))?;
        seen.push(g);
        Ok(norm.coeff(&[g]))
    };
    let mut rules = Vec::new();
    for a in 0..ext.base().len() {
        if a == f.dirs.0 || a == f.dirs.1 {
            continue;
        }
        rules.push((a, ext.reduce(&coef(ext.base()[a])?.neg())?));
    }
    let cy = coef(ext.base()[f.dirs.0])?;
    let cz = coef(ext.base()[f.dirs.1])?;
    let vy = Rat::var(ext.fibre_jet(1, 0)?);
    let vz = Rat::var(ext.fibre_jet(0, 1)?);
    if !cy.add(&vy).is_zero() || !cz.add(&vz).is_zero() {
        return Err(CovError::NotCoveringForm(format!("dy, dz coefficients are {}, {}", print::rat_to_string(&cy), print::rat_to_string(&cz))));
    }
    for (m, c) in norm.terms() {
        if !seen.contains(&m[0]) {
            return Err(CovError::NotCoveringForm(format!("unexpected term {}·{}", print::rat_to_string(c), cf.gen_name(m[0]))));
        }
    }
    Ok((Covering { name: name.to_string(), fibre: f.name.clone(), params: params.to_vec(), rules }, side))
}

/// A point symmetry candidate in evolutionary form: characteristic
/// `phi − Σ xi^a u_a`.
#[derive(Clone, Debug)]
pub struct BaseGenerator {
    pub xi: Vec<Rat>,
    pub phi: Rat,
}

#[derive(Clone, Debug)]
pub enum LiftOutcome {
    /// Fibre component of the lifted generator.
    Liftable(Rat),
    /// `residue = 0` derived from the determining equations listed by index.
    Inconsistent { order: usize, residue: Rat, equations: usize },
}

fn d_multi(ch: &JetChart, e: &Rat, counts: &[u8]) -> Result<Rat, JetError> {
    let mut r = e.clone();
    for (a, &k) in counts.iter().enumerate() {
        for _ in 0..k {
            r = ch.total_derivative(a, &r)?;
        }
    }
    Ok(r)
}

/// Linearization of `e` (in u-jets and v-jets) applied to `(q, psi)`.
fn linearize(ext: &JetChart, e: &Rat, q: &Rat, psi: Option<&Rat>) -> Result<Rat, JetError> {
    let mut acc = Rat::zero();
    for s in e.vars() {
        let de = e.diff(s);
        if let Some(cn) = ext.jet_counts(s) {
            acc = acc.add(&de.mul(&d_multi(ext, q, cn)?));
        } else if let (Some((i, j)), Some(psi)) = (ext.fibre_index(s), psi) {
            let f = ext.fibre().expect("fibre");
            let mut c = alloc::vec![0u8; ext.base().len()];
            c[f.dirs.0] = i;
            c[f.dirs.1] = j;
            acc = acc.add(&de.mul(&d_multi(ext, psi, &c)?));
        }
    }
    Ok(acc)
}

/// Characteristic of the generator on u.
fn characteristic(ch: &JetChart, g: &BaseGenerator) -> Result<Rat, CovError> {
    let n = ch.base().len();
    let mut q = g.phi.clone();
    for a in 0..n {
        if g.xi[a].is_zero() {
            continue;
        }
        let mut c = alloc::vec![0u8; n];
        c[a] = 1;
        let ua = Rat::var(ch.jet(&c.into_iter().collect())?);
        q = q.sub(&g.xi[a].mul(&ua));
    }
    Ok(q)
}

/// Residual of the linearized relation on the generator's characteristic.
pub fn symmetry_residual(ch: &JetChart, g: &BaseGenerator) -> Result<Rat, CovError> {
    let rel = ch.relation().ok_or(CovError::NoRelation)?.clone();
    let q = characteristic(ch, g)?;
    let lhs = d_multi(ch, &q, &rel.principal)?;
    let rhs = linearize(ch, &rel.rhs, &q, None)?;
    Ok(ch.reduce(&lhs.sub(&rhs))?)
}

/// Searches a fibre component `φ` in the span of `b·w`, with `b` in
/// {1, base variables} and `w` in {1, u-jets and v-jets of order ≤ order},
/// making the prolonged generator a symmetry of the covering.
pub fn lift_obstruction(ext: &JetChart, c: &Covering, g: &BaseGenerator, order: usize) -> Result<(LiftOutcome, Report), CovError> {
    let res = symmetry_residual(ext, g)?;
    if !res.is_zero() {
        return Err(CovError::NotASymmetry(print::rat_to_string(&res)));
    }
    let f = ext.fibre().ok_or(CovError::Shape)?.clone();
    if order + 2 > f.order {
        return Err(CovError::Depth(order));
    }
    let q = characteristic(ext, g)?;
    let mut ws: Vec<Rat> = alloc::vec![Rat::one()];
    for s in ext.internal_jets(order) {
        ws.push(Rat::var(s));
    }
    for s in ext.fibre_jets(order) {
        ws.push(Rat::var(s));
    }
    let mut bs: Vec<Rat> = alloc::vec![Rat::one()];
    bs.extend(ext.base().iter().map(|&b| Rat::var(b)));
    let mut unknowns = Vec::new();
    let mut basis = Vec::new();
    let mut phi = Rat::zero();
    for b in &bs {
        for w in &ws {
            let u = Symbol::new(&format!("%lift{}", unknowns.len()), SymbolKind::Unknown)?;
            let m = b.mul(w);
            phi = phi.add(&m.mul(&Rat::var(u)));
            unknowns.push(u);
            basis.push(m);
        }
    }
    let mut psi = phi.clone();
    for (a, xi) in g.xi.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        let va = match c.rule(a) {
            Some(r) => ext.reduce(r)?,
            None => {
                let (i, j) = if a == f.dirs.0 { (1, 0) } else { (0, 1) };
                Rat::var(ext.fibre_jet(i, j)?)
            }
        };
        psi = psi.sub(&xi.mul(&va));
    }
    let keep: Vec<u32> = unknowns.iter().chain(ext.params().iter()).map(|s| s.index()).collect();
    let mut eqs: Vec<Rat> = Vec::new();
    for (a, rhs) in &c.rules {
        let lhs = ext.total_derivative(*a, &psi)?;
        let lin = linearize(ext, &ext.reduce(rhs)?, &q, Some(&psi))?;
        let e = ext.reduce(&lhs.sub(&lin))?;
        for p in e.numer().coeffs_outside(&keep) {
            if !p.is_zero() {
                eqs.push(Rat::from_poly(p));
            }
        }
    }
    let sol = solve_linear(&eqs, &unknowns)?;
    let side = sol.side_condition_texts();
    let (outcome, check) = match &sol.solution {
        Solution::Inconsistent { residue, rows } => (
            LiftOutcome::Inconsistent { order, residue: residue.clone(), equations: rows.len() },
            Check::flag(format!("lift at order {}", order), false, format!("inconsistent: {} = 0 from {} equations", print::rat_to_string(residue), rows.len())),
        ),
        _ => {
            let bind = |s: Symbol| -> Option<Rat> { Some(sol.value(s).cloned().unwrap_or_else(Rat::zero)) };
            let mut val = Rat::zero();
            for (u, m) in unknowns.iter().zip(basis.iter()) {
                if let Some(x) = bind(*u) {
                    val = val.add(&x.substitute(&|s| if unknowns.contains(&s) { Some(Rat::zero()) } else { None })?.mul(m));
                }
            }
            let chk = Check::flag(format!("lift at order {}", order), true, String::new());
            (LiftOutcome::Liftable(val), chk)
        }
    };
    let mut rep = Report::from_checks(alloc::vec![check]).with_side_conditions(side);
    rep = match &outcome {
        LiftOutcome::Liftable(p) => rep.note(format!("phi = {}", print::rat_to_string(p))),
        LiftOutcome::Inconsistent { order, .. } => rep.note(format!("inconsistent at order {}", order)),
    };
    Ok((outcome, rep))
}
