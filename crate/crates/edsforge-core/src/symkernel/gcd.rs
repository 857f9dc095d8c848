//! Multivariate polynomial gcd.
//!
//! Strategy: strip monomial content, reduce to the variables shared by both
//! arguments, try a cheap coprimality certificate from univariate images,
//! then fall back to a recursive primitive PRS.

use alloc::vec::Vec;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::{Mono, Poly};
use super::Q;

/// Monic gcd (leading coefficient 1); `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    gcd_inner(a, b).monic()
}

fn gcd_inner(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let m = ma.gcd(&mb);
    let a1 = if ma.is_one() { a.clone() } else { a.div_mono(&ma) };
    let b1 = if mb.is_one() { b.clone() } else { b.div_mono(&mb) };
    let g = gcd_nomono(&a1, &b1);
    if m.is_one() {
        g
    } else {
        g.mul_term(&m, &Q::one())
    }
}

fn gcd_nomono(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let va = a.var_indices();
    let vb = b.var_indices();
    let only_a: Vec<u32> = va.iter().copied().filter(|v| vb.binary_search(v).is_err()).collect();
    if !only_a.is_empty() {
        return gcd_with_coeffs(b, a, &only_a);
    }
    let only_b: Vec<u32> = vb.iter().copied().filter(|v| va.binary_search(v).is_err()).collect();
    if !only_b.is_empty() {
        return gcd_with_coeffs(a, b, &only_b);
    }
    if a.len() <= b.len() {
        if let Some(_) = b.div_exact(a) {
            return a.clone();
        }
    } else if let Some(_) = a.div_exact(b) {
        return b.clone();
    }
    if coprime_certificate(a, b, &va) {
        return Poly::one();
    }
    prs_gcd(a, b, &va)
}

/// gcd(g, p) where `p` contains variables `extra` absent from `g`: the gcd
/// divides every coefficient of `p` with respect to those variables.
fn gcd_with_coeffs(g: &Poly, p: &Poly, extra: &[u32]) -> Poly {
    let mut cs = p.coeffs_in_set(extra);
    cs.sort_by_key(|c| c.len());
    let mut acc = g.clone();
    for c in cs {
        acc = gcd_inner(&acc, &c);
        if acc.is_constant() {
            return Poly::one();
        }
    }
    acc
}

fn small_value(rng: &mut ChaCha8Rng) -> Q {
    let v = (rng.next_u32() % 2000) as i64 - 1000;
    Q::from_integer(BigInt::from(if v == 0 { 1001 } else { v }))
}

/// Proves gcd(a, b) = 1 by showing that, for every shared variable `x`,
/// univariate images with `lc_x` preserved are coprime. A failure only means
/// "not proven".
fn coprime_certificate(a: &Poly, b: &Poly, vars: &[u32]) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_9c0d);
    for &x in vars {
        let da = a.degree_in(x) as usize;
        let db = b.degree_in(x) as usize;
        if da == 0 || db == 0 {
            continue;
        }
        let mut proven = false;
        for _attempt in 0..3 {
            let vals: Vec<(u32, Q)> = vars.iter().filter(|&&v| v != x).map(|&v| (v, small_value(&mut rng))).collect();
            let f = |v: u32| -> Q {
                vals.iter().find(|(w, _)| *w == v).map(|(_, q)| q.clone()).unwrap_or_else(Q::zero)
            };
            let ua = a.specialize_univariate(x, &f);
            let ub = b.specialize_univariate(x, &f);
            if ua[da].is_zero() || ub[db].is_zero() {
                continue;
            }
            if uni_gcd_degree(ua, ub) == 0 {
                proven = true;
            }
            break;
        }
        if !proven {
            return false;
        }
    }
    true
}

fn trim(p: &mut Vec<Q>) {
    while p.len() > 1 && p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

fn uni_gcd_degree(mut a: Vec<Q>, mut b: Vec<Q>) -> usize {
    trim(&mut a);
    trim(&mut b);
    if a.len() < b.len() {
        core::mem::swap(&mut a, &mut b);
    }
    loop {
        if b.len() == 1 && b[0].is_zero() {
            return a.len() - 1;
        }
        if b.len() == 1 {
            return 0;
        }
        // a mod b
        let lb = b.last().unwrap().clone();
        while a.len() >= b.len() && !(a.len() == 1 && a[0].is_zero()) {
            let la = a.last().unwrap().clone();
            let k = &la / &lb;
            let s = a.len() - b.len();
            for (i, c) in b.iter().enumerate() {
                let t = &a[i + s] - &k * c;
                a[i + s] = t;
            }
            a.pop();
            trim(&mut a);
            if a.is_empty() {
                a.push(Q::zero());
            }
        }
        // normalize to keep numbers small
        if let Some(l) = a.last().cloned() {
            if !l.is_zero() {
                for c in a.iter_mut() {
                    *c = &*c / &l;
                }
            }
        }
        core::mem::swap(&mut a, &mut b);
    }
}

fn content_of(cs: &[Poly]) -> Poly {
    let mut sorted: Vec<&Poly> = cs.iter().filter(|c| !c.is_zero()).collect();
    sorted.sort_by_key(|c| c.len());
    let mut g = Poly::zero();
    for c in sorted {
        g = gcd_inner(&g, c);
        if g.is_constant() {
            return Poly::one();
        }
    }
    g.primitive_numeric()
}

fn primitive_part(cs: &[Poly]) -> (Poly, Vec<Poly>) {
    let c = content_of(cs);
    if c.is_one() {
        return (c, normalize_numeric(cs.to_vec()));
    }
    let v: Vec<Poly> = cs.iter().map(|p| p.div_exact(&c).expect("content divides")).collect();
    (c, normalize_numeric(v))
}

/// Divides the whole coefficient vector by its common rational content.
fn normalize_numeric(v: Vec<Poly>) -> Vec<Poly> {
    let mut all: Vec<(Mono, Q)> = Vec::new();
    for p in &v {
        all.extend(p.terms().iter().cloned());
    }
    let tmp = Poly::from_terms(all);
    if tmp.is_zero() {
        return v;
    }
    let c = tmp.numeric_content();
    if c.is_one() {
        return v;
    }
    let inv = Q::one() / c;
    v.into_iter().map(|p| p.scale(&inv)).collect()
}

fn prem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let db = b.len() - 1;
    let lcb = &b[db];
    let mut r: Vec<Poly> = a.to_vec();
    let mut e = (a.len() - b.len() + 1) as u32;
    while r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        if lr.is_zero() {
            r.pop();
            continue;
        }
        let s = dr - db;
        for p in r.iter_mut() {
            *p = p.mul(lcb);
        }
        for (i, bc) in b.iter().enumerate() {
            let t = r[i + s].sub(&bc.mul(&lr));
            r[i + s] = t;
        }
        r.pop();
        e -= 1;
        while r.len() > 1 && r.last().map(|p| p.is_zero()).unwrap_or(false) {
            r.pop();
        }
    }
    if e > 0 {
        let f = lcb.pow(e);
        for p in r.iter_mut() {
            *p = p.mul(&f);
        }
    }
    while r.len() > 1 && r.last().map(|p| p.is_zero()).unwrap_or(false) {
        r.pop();
    }
    r
}

fn prs_gcd(a: &Poly, b: &Poly, vars: &[u32]) -> Poly {
    // main variable: smallest max degree
    let x = *vars
        .iter()
        .min_by_key(|&&v| (a.degree_in(v).max(b.degree_in(v)), v))
        .expect("shared variable");
    let ca = a.coeffs_in(x);
    let cb = b.coeffs_in(x);
    let (conta, mut pa) = primitive_part(&ca);
    let (contb, mut pb) = primitive_part(&cb);
    let c = gcd_inner(&conta, &contb);
    if pa.len() < pb.len() {
        core::mem::swap(&mut pa, &mut pb);
    }
    let g = loop {
        let r = prem(&pa, &pb);
        if r.iter().all(|p| p.is_zero()) {
            break pb;
        }
        if r.len() == 1 {
            break alloc::vec![Poly::one()];
        }
        pa = pb;
        pb = primitive_part(&r).1;
    };
    let (_, g) = primitive_part(&g);
    let gp = Poly::from_coeffs_in(x, &g);
    c.mul(&gp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::{Symbol, SymbolKind};

    fn v(n: &str) -> Poly {
        Poly::var(Symbol::intern_any(n, SymbolKind::Parameter))
    }

    #[test]
    fn gcd_of_products() {
        let (a, b, c) = (v("ga"), v("gb"), v("gc"));
        let f = a.mul(&b).sub(&c);
        let p = f.mul(&a.add(&Poly::one()));
        let q = f.mul(&b.sub(&c));
        let g = gcd(&p, &q);
        assert_eq!(g, f.monic());
    }

    #[test]
    fn coprime() {
        let (a, b) = (v("ga"), v("gb"));
        let p = a.mul(&a).add(&b);
        let q = a.sub(&b);
        assert!(gcd(&p, &q).is_one());
    }

    #[test]
    fn gcd_with_extra_variables() {
        let (a, b, c) = (v("ga"), v("gb"), v("gc"));
        let f = a.add(&b);
        let p = f.mul(&c.mul(&c).add(&Poly::from_int(3)));
        let q = f.mul(&a.sub(&Poly::from_int(2)));
        assert_eq!(gcd(&p, &q), f.monic());
    }
}
