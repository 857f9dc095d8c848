//! Rational functions in canonical form.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::gcd::gcd;
use super::poly::Poly;
use super::{print, Q, SymError, Symbol};

/// Exact rational function `num / den`.
///
/// Invariants: `den` is nonzero and monic in grlex, `gcd(num, den) = 1`,
/// and zero is represented as `0 / 1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Rat {
    num: Poly,
    den: Poly,
}

impl Default for Rat {
    fn default() -> Self {
        Rat::zero()
    }
}

impl Rat {
    pub fn zero() -> Rat {
        Rat { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Rat {
        Rat { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_int(i: i64) -> Rat {
        Rat::from_poly(Poly::from_int(i))
    }

    pub fn from_q(q: Q) -> Rat {
        Rat::from_poly(Poly::constant(q))
    }

    pub fn from_ratio(n: i64, d: i64) -> Rat {
        Rat::from_q(Q::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn var(s: Symbol) -> Rat {
        Rat::from_poly(Poly::var(s))
    }

    pub fn from_poly(p: Poly) -> Rat {
        Rat { num: p, den: Poly::one() }
    }

    /// Builds and normalizes `num / den`.
    pub fn new(num: Poly, den: Poly) -> Result<Rat, SymError> {
        if den.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        Ok(Rat::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Rat {
        if num.is_zero() {
            return Rat::zero();
        }
        if let Some(c) = den.constant_value() {
            return Rat { num: num.scale(&(Q::one() / c)), den: Poly::one() };
        }
        let g = gcd(&num, &den);
        let (n, d) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        Rat::from_coprime(n, d)
    }

    /// Caller guarantees coprimality; only the monic scaling is applied.
    fn from_coprime(num: Poly, den: Poly) -> Rat {
        let lc = den.lead_coeff();
        if lc.is_one() {
            Rat { num, den }
        } else {
            let inv = Q::one() / lc;
            Rat { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.is_constant()
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    /// Re-normalizes; a no-op on values built through this API.
    pub fn normalize(&self) -> Rat {
        Rat::normalized(self.num.clone(), self.den.clone())
    }

    pub fn vars(&self) -> Vec<Symbol> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v.sort();
        v.dedup();
        v
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.num.contains_var(s) || self.den.contains_var(s)
    }

    pub fn neg(&self) -> Rat {
        Rat { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn add(&self, o: &Rat) -> Rat {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            let n = self.num.add(&o.num);
            if self.den.is_one() {
                return Rat { num: n, den: Poly::one() };
            }
            return Rat::normalized(n, self.den.clone());
        }
        if self.den.is_one() {
            return Rat::from_coprime(self.num.mul(&o.den).add(&o.num), o.den.clone());
        }
        if o.den.is_one() {
            return Rat::from_coprime(o.num.mul(&self.den).add(&self.num), self.den.clone());
        }
        let g = gcd(&self.den, &o.den);
        if g.is_one() {
            let n = self.num.mul(&o.den).add(&o.num.mul(&self.den));
            // any common factor of n and den1*den2 would divide one of the coprime dens
            return Rat::from_coprime(n, self.den.mul(&o.den));
        }
        let d1 = self.den.div_exact(&g).expect("gcd divides");
        let d2 = o.den.div_exact(&g).expect("gcd divides");
        let n = self.num.mul(&d2).add(&o.num.mul(&d1));
        let g2 = gcd(&n, &g);
        if g2.is_one() {
            Rat::from_coprime(n, d1.mul(&d2).mul(&g))
        } else {
            let n = n.div_exact(&g2).expect("gcd divides");
            let gg = g.div_exact(&g2).expect("gcd divides");
            Rat::from_coprime(n, d1.mul(&d2).mul(&gg))
        }
    }

    pub fn sub(&self, o: &Rat) -> Rat {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Rat) -> Rat {
        if self.is_zero() || o.is_zero() {
            return Rat::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return Rat { num: self.num.mul(&o.num), den: Poly::one() };
        }
        if let Some(c) = self.constant_value() {
            return o.scale(&c);
        }
        if let Some(c) = o.constant_value() {
            return self.scale(&c);
        }
        let g1 = if o.den.is_one() { Poly::one() } else { gcd(&self.num, &o.den) };
        let g2 = if self.den.is_one() { Poly::one() } else { gcd(&o.num, &self.den) };
        let n1 = if g1.is_one() { self.num.clone() } else { self.num.div_exact(&g1).unwrap() };
        let d2 = if g1.is_one() { o.den.clone() } else { o.den.div_exact(&g1).unwrap() };
        let n2 = if g2.is_one() { o.num.clone() } else { o.num.div_exact(&g2).unwrap() };
        let d1 = if g2.is_one() { self.den.clone() } else { self.den.div_exact(&g2).unwrap() };
        Rat::from_coprime(n1.mul(&n2), d1.mul(&d2))
    }

    pub fn scale(&self, c: &Q) -> Rat {
        if c.is_zero() {
            return Rat::zero();
        }
        Rat { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul_poly(&self, p: &Poly) -> Rat {
        self.mul(&Rat::from_poly(p.clone()))
    }

    pub fn inv(&self) -> Result<Rat, SymError> {
        if self.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        Ok(Rat::from_coprime(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, o: &Rat) -> Result<Rat, SymError> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i32) -> Result<Rat, SymError> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let e = e as u32;
        Ok(Rat { num: self.num.pow(e), den: self.den.pow(e) })
    }

    /// Partial derivative with respect to `s`.
    pub fn diff(&self, s: Symbol) -> Rat {
        let dn = self.num.diff(s);
        if self.den.is_one() {
            return Rat { num: dn, den: Poly::one() };
        }
        let dd = self.den.diff(s);
        if dd.is_zero() {
            if dn.is_zero() {
                return Rat::zero();
            }
            return Rat::normalized(dn, self.den.clone());
        }
        let n = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Rat::normalized(n, self.den.mul(&self.den))
    }

    /// Simultaneous substitution of symbols by rational functions.
    pub fn substitute(&self, bind: &dyn Fn(Symbol) -> Option<Rat>) -> Result<Rat, SymError> {
        let n = subst_poly(&self.num, bind);
        let d = subst_poly(&self.den, bind);
        if d.is_zero() {
            return Err(SymError::ZeroDenominator(print::rat_to_string(self)));
        }
        n.div(&d)
    }

    /// Evaluates at rational values; `None` if the denominator vanishes.
    pub fn eval(&self, vals: &dyn Fn(Symbol) -> Q) -> Option<Q> {
        let f = |i: u32| vals(Symbol::from_index(i));
        let d = self.den.eval(&f);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(&f) / d)
    }

    pub fn to_text(&self) -> String {
        print::rat_to_string(self)
    }
}

/// Substitutes into a polynomial. Powers of each image are cached; terms
/// whose variables are all unbound stay polynomial.
pub fn subst_poly(p: &Poly, bind: &dyn Fn(Symbol) -> Option<Rat>) -> Rat {
    let vars = p.vars();
    let images: Vec<(u32, Option<Rat>)> = vars.iter().map(|&s| (s.index(), bind(s))).collect();
    if images.iter().all(|(_, r)| r.is_none()) {
        return Rat::from_poly(p.clone());
    }
    let all_poly = images.iter().all(|(_, r)| r.as_ref().map(|r| r.is_polynomial()).unwrap_or(true));
    if all_poly {
        let mut out = p.clone();
        for (v, r) in &images {
            if let Some(r) = r {
                out = out.substitute_poly(*v, r.numer());
            }
        }
        return Rat::from_poly(out);
    }
    // general case: group by bound part of each monomial over a common denominator
    let mut acc = Rat::zero();
    let mut powcache: Vec<(u32, u32, Rat)> = Vec::new();
    for (m, c) in p.terms() {
        let mut t = Rat::from_q(c.clone());
        let mut free = super::poly::Mono::one();
        for (s, e) in m.factors() {
            match images.iter().find(|(v, _)| *v == s.index()).and_then(|(_, r)| r.clone()) {
                Some(r) => {
                    let pw = match powcache.iter().find(|(v, k, _)| *v == s.index() && *k == e) {
                        Some((_, _, p)) => p.clone(),
                        None => {
                            let p = r.pow(e as i32).expect("positive power");
                            powcache.push((s.index(), e, p.clone()));
                            p
                        }
                    };
                    t = t.mul(&pw);
                }
                None => free = free.mul(&super::poly::Mono::var(s, e)),
            }
        }
        acc = acc.add(&t.mul_poly(&Poly::term(free, Q::one())));
    }
    acc
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::rat_to_string(self))
    }
}

impl From<i64> for Rat {
    fn from(i: i64) -> Rat {
        Rat::from_int(i)
    }
}

impl Zero for Rat {
    fn zero() -> Rat {
        Rat::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl core::ops::Add for Rat {
    type Output = Rat;
    fn add(self, o: Rat) -> Rat {
        Rat::add(&self, &o)
    }
}

impl One for Rat {
    fn one() -> Rat {
        Rat::one()
    }
}

impl core::ops::Mul for Rat {
    type Output = Rat;
    fn mul(self, o: Rat) -> Rat {
        Rat::mul(&self, &o)
    }
}
