//! Affine changes of the base variables acting on coverings.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use super::{CovError, Covering};
use crate::jetspace::{Counts, JetChart};
use crate::symkernel::{solve_linear, Rat, Solution, Symbol, SymbolKind};

/// `p ↦ A p + b`. Functions are pulled back: `ũ = u∘φ`, `ṽ = v∘φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointTransform {
    pub a: Vec<Vec<Rat>>,
    pub b: Vec<Rat>,
}

fn mat_mul(x: &[Vec<Rat>], y: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let n = x.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).fold(Rat::zero(), |acc, k| acc.add(&x[i][k].mul(&y[k][j])))).collect()).collect()
}

fn identity(n: usize) -> Vec<Vec<Rat>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect()
}

fn mat_inv(m: &[Vec<Rat>]) -> Result<Vec<Vec<Rat>>, CovError> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m.to_vec();
    let mut inv = identity(n);
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).ok_or(CovError::Singular)?;
        a.swap(c, p);
        inv.swap(c, p);
        let d = a[c][c].inv()?;
        for k in 0..n {
            a[c][k] = a[c][k].mul(&d);
            inv[c][k] = inv[c][k].mul(&d);
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for k in 0..n {
                    a[r][k] = a[r][k].sub(&f.mul(&a[c][k]));
                    inv[r][k] = inv[r][k].sub(&f.mul(&inv[c][k]));
                }
            }
        }
    }
    Ok(inv)
}

impl PointTransform {
    pub fn identity(n: usize) -> PointTransform {
        PointTransform { a: identity(n), b: alloc::vec![Rat::zero(); n] }
    }

    /// Time-`s` flow of the linear field `X = Σ (N p)^a ∂_a`, `N` nilpotent.
    pub fn linear_flow(n_mat: &[Vec<Rat>], s: &Rat) -> Result<PointTransform, CovError> {
        let n = n_mat.len();
        let mut out = identity(n);
        let mut term = identity(n);
        let mut fact = Rat::one();
        for k in 1..=n {
            term = mat_mul(&term, n_mat);
            fact = fact.mul(&Rat::from_int(k as i64));
            let c = s.pow(k as i32)?.div(&fact)?;
            for i in 0..n {
                for j in 0..n {
                    out[i][j] = out[i][j].add(&term[i][j].mul(&c));
                }
            }
        }
        if mat_mul(&term, n_mat).iter().flatten().any(|x| !x.is_zero()) {
            return Err(CovError::InsufficientOrder("non-nilpotent generator".into()));
        }
        Ok(PointTransform { a: out, b: alloc::vec![Rat::zero(); n] })
    }

    /// `self` applied after `first`.
    pub fn compose(&self, first: &PointTransform) -> PointTransform {
        let n = self.a.len();
        let a = mat_mul(&self.a, &first.a);
        let b = (0..n).map(|i| (0..n).fold(self.b[i].clone(), |acc, k| acc.add(&self.a[i][k].mul(&first.b[k])))).collect();
        PointTransform { a, b }
    }
}

/// Old jet `u_{b1..bk}` in terms of the pulled-back jets.
fn old_jet(ch: &JetChart, inv: &[Vec<Rat>], c: &Counts) -> Result<Rat, CovError> {
    let n = ch.base().len();
    let mut dirs: Vec<usize> = Vec::new();
    for (a, &k) in c.iter().enumerate() {
        for _ in 0..k {
            dirs.push(a);
        }
    }
    // expand Π_i Σ_a inv[a][b_i] ∂_a over new directions
    let mut acc: Vec<(Counts, Rat)> = alloc::vec![(core::iter::repeat(0u8).take(n).collect(), Rat::one())];
    for b in dirs {
        let mut next: Vec<(Counts, Rat)> = Vec::new();
        for (cn, w) in &acc {
            for a in 0..n {
                if inv[a][b].is_zero() {
                    continue;
                }
                let mut c2 = cn.clone();
                c2[a] += 1;
                let w2 = w.mul(&inv[a][b]);
                match next.iter_mut().find(|(k, _)| *k == c2) {
                    Some(e) => e.1 = e.1.add(&w2),
                    None => next.push((c2, w2)),
                }
            }
        }
        acc = next;
    }
    let mut r = Rat::zero();
    for (cn, w) in acc {
        r = r.add(&w.mul(&Rat::var(ch.jet(&cn)?)));
    }
    Ok(r)
}

/// The covering satisfied by the pulled-back functions, in the same chart.
pub fn apply_point_transform(ext: &JetChart, c: &Covering, p: &PointTransform) -> Result<Covering, CovError> {
    let n = ext.base().len();
    let f = ext.fibre().ok_or(CovError::Shape)?.clone();
    let inv = mat_inv(&p.a)?;
    // new first-order fibre derivatives: unknowns along rule directions
    let mut new_v: Vec<Rat> = Vec::with_capacity(n);
    let mut unknowns: Vec<(usize, Symbol)> = Vec::new();
    for a in 0..n {
        if a == f.dirs.0 {
            new_v.push(Rat::var(ext.fibre_jet(1, 0)?));
        } else if a == f.dirs.1 {
            new_v.push(Rat::var(ext.fibre_jet(0, 1)?));
        } else {
            let s = Symbol::new(&format!("%pt{}", a), SymbolKind::Unknown)?;
            unknowns.push((a, s));
            new_v.push(Rat::var(s));
        }
    }
    let old_v = |b: usize| -> Rat { (0..n).fold(Rat::zero(), |acc, a| acc.add(&inv[a][b].mul(&new_v[a]))) };
    let bind = |s: Symbol| -> Result<Option<Rat>, CovError> {
        if let Some(cn) = ext.jet_counts(s) {
            let ord: u8 = cn.iter().sum();
            if ord == 0 {
                return Ok(None);
            }
            if ord > 2 {
                return Err(CovError::InsufficientOrder(s.name().to_string()));
            }
            return Ok(Some(old_jet(ext, &inv, cn)?));
        }
        if let Some((i, j)) = ext.fibre_index(s) {
            return match (i, j) {
                (0, 0) => Ok(None),
                (1, 0) => Ok(Some(old_v(f.dirs.0))),
                (0, 1) => Ok(Some(old_v(f.dirs.1))),
                _ => Err(CovError::InsufficientOrder(s.name().to_string())),
            };
        }
        if ext.is_base(s) && p.a.iter().flatten().chain(p.b.iter()).any(|x| !x.is_zero()) {
            // explicit base dependence would need the inverse map; supported for affine maps
            let k = ext.base().iter().position(|&b| b == s).expect("base");
            let mut img = p.b[k].clone();
            for (j, &bj) in ext.base().iter().enumerate() {
                img = img.add(&p.a[k][j].mul(&Rat::var(bj)));
            }
            return Ok(Some(img));
        }
        Ok(None)
    };
    let mut eqs = Vec::new();
    for (a, rhs) in &c.rules {
        let mut table: Vec<(Symbol, Rat)> = Vec::new();
        for s in rhs.vars() {
            if let Some(r) = bind(s)? {
                table.push((s, r));
            }
        }
        let lookup = |s: Symbol| table.iter().find(|(t, _)| *t == s).map(|(_, r)| r.clone());
        let moved = rhs.substitute(&lookup)?;
        eqs.push(old_v(*a).sub(&moved));
    }
    let syms: Vec<Symbol> = unknowns.iter().map(|(_, s)| *s).collect();
    let sol = solve_linear(&eqs, &syms)?;
    let Solution::Unique(vals) = sol.solution else { return Err(CovError::Singular) };
    let mut rules = Vec::new();
    for (a, s) in &unknowns {
        let v = vals.iter().find(|(t, _)| t == s).map(|(_, r)| r.clone()).ok_or(CovError::Singular)?;
        rules.push((*a, ext.reduce(&v)?));
    }
    let mut params = c.params.clone();
    for x in p.a.iter().flatten().chain(p.b.iter()) {
        for s in x.vars() {
            if !params.contains(&s) {
                params.push(s);
            }
        }
    }
    Ok(Covering { name: c.name.clone(), fibre: c.fibre.clone(), params, rules })
}
