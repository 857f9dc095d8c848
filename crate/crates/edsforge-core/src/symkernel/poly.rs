//! Sparse multivariate polynomials over the rationals, graded-lex order.

use alloc::vec::Vec;
use core::cmp::Ordering;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::{Q, Symbol};

/// Monomial as a sorted list of `(variable index, exponent)` with positive exponents.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Mono(pub(crate) SmallVec<[(u32, u32); 4]>);

impl Mono {
    pub fn one() -> Mono {
        Mono(SmallVec::new())
    }

    pub fn var(s: Symbol, e: u32) -> Mono {
        let mut m = Mono::one();
        if e > 0 {
            m.0.push((s.index(), e));
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exp(&self, v: u32) -> u32 {
        match self.0.binary_search_by_key(&v, |&(x, _)| x) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.0.iter().map(|&(v, _)| Symbol::from_index(v))
    }

    pub fn factors(&self) -> impl Iterator<Item = (Symbol, u32)> + '_ {
        self.0.iter().map(|&(v, e)| (Symbol::from_index(v), e))
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        let (a, b) = (&self.0, &o.0);
        let mut r = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    r.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    r.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    r.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        r.extend_from_slice(&a[i..]);
        r.extend_from_slice(&b[j..]);
        Mono(r)
    }

    pub fn divides(&self, o: &Mono) -> bool {
        self.0.iter().all(|&(v, e)| o.exp(v) >= e)
    }

    /// `o / self`, assuming `self` divides `o`.
    pub fn div_into(&self, o: &Mono) -> Mono {
        let mut r = SmallVec::with_capacity(o.0.len());
        for &(v, e) in o.0.iter() {
            let d = e - self.exp(v);
            if d > 0 {
                r.push((v, d));
            }
        }
        Mono(r)
    }

    pub fn gcd(&self, o: &Mono) -> Mono {
        let mut r = SmallVec::new();
        for &(v, e) in self.0.iter() {
            let f = o.exp(v).min(e);
            if f > 0 {
                r.push((v, f));
            }
        }
        Mono(r)
    }

    pub fn without(&self, v: u32) -> Mono {
        Mono(self.0.iter().copied().filter(|&(x, _)| x != v).collect())
    }

    /// Graded lexicographic comparison; lower variable index is the more
    /// significant variable.
    pub fn cmp_grlex(&self, o: &Mono) -> Ordering {
        let d = self.degree().cmp(&o.degree());
        if d != Ordering::Equal {
            return d;
        }
        let (a, b) = (&self.0, &o.0);
        let n = a.len().min(b.len());
        for k in 0..n {
            if a[k].0 != b[k].0 {
                return if a[k].0 < b[k].0 { Ordering::Greater } else { Ordering::Less };
            }
            if a[k].1 != b[k].1 {
                return a[k].1.cmp(&b[k].1);
            }
        }
        a.len().cmp(&b.len())
    }
}

/// Polynomial: terms sorted strictly descending in grlex, no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    pub(crate) terms: Vec<(Mono, Q)>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: alloc::vec![(Mono::one(), c)] }
        }
    }

    pub fn from_int(i: i64) -> Poly {
        Poly::constant(Q::from_integer(BigInt::from(i)))
    }

    pub fn var(s: Symbol) -> Poly {
        Poly { terms: alloc::vec![(Mono::var(s, 1), Q::one())] }
    }

    pub fn term(m: Mono, c: Q) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: alloc::vec![(m, c)] }
        }
    }

    /// Builds from arbitrary terms, combining duplicates.
    pub fn from_terms(mut t: Vec<(Mono, Q)>) -> Poly {
        t.sort_unstable_by(|a, b| b.0.cmp_grlex(&a.0));
        let mut out: Vec<(Mono, Q)> = Vec::with_capacity(t.len());
        for (m, c) in t {
            if let Some(last) = out.last_mut() {
                if last.0 == m {
                    last.1 += c;
                    continue;
                }
            }
            out.push((m, c));
        }
        out.retain(|(_, c)| !c.is_zero());
        Poly { terms: out }
    }

    pub fn terms(&self) -> &[(Mono, Q)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.terms.is_empty() {
            Some(Q::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> Option<&(Mono, Q)> {
        self.terms.first()
    }

    pub fn lead_coeff(&self) -> Q {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_else(Q::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map(|t| t.0.degree()).unwrap_or(0)
    }

    /// Sorted, deduplicated variable indices.
    pub fn var_indices(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.terms.iter().flat_map(|(m, _)| m.0.iter().map(|&(x, _)| x)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn vars(&self) -> Vec<Symbol> {
        self.var_indices().into_iter().map(Symbol::from_index).collect()
    }

    pub fn contains_var(&self, s: Symbol) -> bool {
        let i = s.index();
        self.terms.iter().any(|(m, _)| m.exp(i) > 0)
    }

    pub fn degree_in(&self, v: u32) -> u32 {
        self.terms.iter().map(|(m, _)| m.exp(v)).max().unwrap_or(0)
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect() }
    }

    pub fn mul_term(&self, m: &Mono, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        // multiplying by a monomial preserves the order
        Poly { terms: self.terms.iter().map(|(n, d)| (n.mul(m), d * c)).collect() }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        self.add_scaled(o, None)
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add_scaled(o, Some(&-Q::one()))
    }

    fn add_scaled(&self, o: &Poly, k: Option<&Q>) -> Poly {
        let (a, b) = (&self.terms, &o.terms);
        let mut r = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        let sc = |c: &Q| match k {
            Some(k) => c * k,
            None => c.clone(),
        };
        while i < a.len() && j < b.len() {
            match a[i].0.cmp_grlex(&b[j].0) {
                Ordering::Greater => {
                    r.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    r.push((b[j].0.clone(), sc(&b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &a[i].1 + sc(&b[j].1);
                    if !c.is_zero() {
                        r.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        r.extend(a[i..].iter().cloned());
        r.extend(b[j..].iter().map(|(m, c)| (m.clone(), sc(c))));
        Poly { terms: r }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        if self.terms.len() == 1 {
            return o.mul_term(&self.terms[0].0, &self.terms[0].1);
        }
        if o.terms.len() == 1 {
            return self.mul_term(&o.terms[0].0, &o.terms[0].1);
        }
        let mut t = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (m, c) in &self.terms {
            for (n, d) in &o.terms {
                t.push((m.mul(n), c * d));
            }
        }
        Poly::from_terms(t)
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn diff(&self, s: Symbol) -> Poly {
        let v = s.index();
        let mut t = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e == 0 {
                continue;
            }
            let mut n = m.clone();
            for p in n.0.iter_mut() {
                if p.0 == v {
                    p.1 -= 1;
                }
            }
            n.0.retain(|p| p.1 > 0);
            t.push((n, c * Q::from_integer(BigInt::from(e))));
        }
        Poly::from_terms(t)
    }

    /// Content over Q: positive rational `c` such that `self / c` has coprime integer coefficients.
    pub fn numeric_content(&self) -> Q {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for (_, c) in &self.terms {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Q::one();
        }
        Q::new(num, den)
    }

    /// Scales to coprime integer coefficients with positive leading coefficient.
    pub fn primitive_numeric(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = self.numeric_content();
        if self.lead_coeff().is_negative() {
            c = -c;
        }
        self.scale(&(Q::one() / c))
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let lc = self.lead_coeff();
        if lc.is_one() {
            return self.clone();
        }
        self.scale(&(Q::one() / lc))
    }

    /// Greatest monomial dividing every term.
    pub fn monomial_content(&self) -> Mono {
        let mut it = self.terms.iter();
        let mut g = match it.next() {
            Some((m, _)) => m.clone(),
            None => return Mono::one(),
        };
        for (m, _) in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    pub fn div_mono(&self, m: &Mono) -> Poly {
        Poly { terms: self.terms.iter().map(|(n, c)| (m.div_into(n), c.clone())).collect() }
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&(Q::one() / c)));
        }
        if d.terms.len() == 1 {
            let (dm, dc) = &d.terms[0];
            let inv = Q::one() / dc;
            let mut out = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                if !dm.divides(m) {
                    return None;
                }
                out.push((dm.div_into(m), c * &inv));
            }
            return Some(Poly { terms: out });
        }
        // cheap necessary conditions
        if d.total_degree() > self.total_degree() {
            return None;
        }
        for v in d.var_indices() {
            if d.degree_in(v) > self.degree_in(v) {
                return None;
            }
        }
        let (lm, lc) = d.terms[0].clone();
        let inv = Q::one() / &lc;
        let tail = Poly { terms: d.terms[1..].to_vec() };
        let mut q: Vec<(Mono, Q)> = Vec::new();
        let mut r = self.clone();
        while let Some((rm, rc)) = r.terms.first().cloned() {
            if !lm.divides(&rm) {
                return None;
            }
            let qm = lm.div_into(&rm);
            let qc = &rc * &inv;
            r.terms.remove(0);
            r = r.sub(&tail.mul_term(&qm, &qc));
            q.push((qm, qc));
        }
        Some(Poly::from_terms(q))
    }

    /// Coefficients with respect to variable `v`: index k holds the coefficient of `v^k`.
    pub fn coeffs_in(&self, v: u32) -> Vec<Poly> {
        let deg = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Mono, Q)>> = (0..=deg).map(|_| Vec::new()).collect();
        for (m, c) in &self.terms {
            let e = m.exp(v) as usize;
            buckets[e].push((m.without(v), c.clone()));
        }
        buckets.into_iter().map(Poly::from_terms).collect()
    }

    /// Groups terms by their exponents in the variables `vs`, returning the
    /// coefficient polynomials (in the remaining variables).
    pub fn coeffs_in_set(&self, vs: &[u32]) -> Vec<Poly> {
        let mut groups: alloc::collections::BTreeMap<SmallVec<[(u32, u32); 4]>, Vec<(Mono, Q)>> = alloc::collections::BTreeMap::new();
        for (m, c) in &self.terms {
            let key: SmallVec<[(u32, u32); 4]> = m.0.iter().copied().filter(|(x, _)| vs.contains(x)).collect();
            let rest = Mono(m.0.iter().copied().filter(|(x, _)| !vs.contains(x)).collect());
            groups.entry(key).or_default().push((rest, c.clone()));
        }
        groups.into_values().map(Poly::from_terms).collect()
    }

    /// Coefficients with respect to every variable outside `keep`.
    pub fn coeffs_outside(&self, keep: &[u32]) -> Vec<Poly> {
        let vs: Vec<u32> = self.var_indices().into_iter().filter(|v| !keep.contains(v)).collect();
        self.coeffs_in_set(&vs)
    }

    /// Builds from exponent/coefficient pairs in `v`.
    pub fn from_coeffs_in(v: u32, cs: &[Poly]) -> Poly {
        let mut t = Vec::new();
        for (k, c) in cs.iter().enumerate() {
            let m = if k == 0 { Mono::one() } else { Mono(smallvec::smallvec![(v, k as u32)]) };
            for (n, d) in &c.terms {
                t.push((n.mul(&m), d.clone()));
            }
        }
        Poly::from_terms(t)
    }

    /// Evaluates all variables except `keep` at the given values (by index);
    /// returns dense univariate coefficients in `keep`. Variables missing from
    /// `vals` must not occur.
    pub fn specialize_univariate(&self, keep: u32, vals: &dyn Fn(u32) -> Q) -> Vec<Q> {
        let deg = self.degree_in(keep) as usize;
        let mut out = alloc::vec![Q::zero(); deg + 1];
        for (m, c) in &self.terms {
            let mut acc = c.clone();
            let mut e_keep = 0;
            for &(v, e) in m.0.iter() {
                if v == keep {
                    e_keep = e;
                } else {
                    acc *= num_traits::pow(vals(v), e as usize);
                }
            }
            out[e_keep as usize] += acc;
        }
        out
    }

    pub fn eval(&self, vals: &dyn Fn(u32) -> Q) -> Q {
        let mut s = Q::zero();
        for (m, c) in &self.terms {
            let mut acc = c.clone();
            for &(v, e) in m.0.iter() {
                acc *= num_traits::pow(vals(v), e as usize);
            }
            s += acc;
        }
        s
    }

    /// Replaces variable `v` by polynomial `p`.
    pub fn substitute_poly(&self, v: u32, p: &Poly) -> Poly {
        let cs = self.coeffs_in(v);
        // Horner
        let mut acc = Poly::zero();
        for c in cs.iter().rev() {
            acc = acc.mul(p).add(c);
        }
        acc
    }
}
