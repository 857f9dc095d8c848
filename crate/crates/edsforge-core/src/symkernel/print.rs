//! Name-ordered rendering and digests, independent of interning order.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use num_traits::{One, Signed};
use sha2::{Digest, Sha256};

use super::poly::Poly;
use super::rat::Rat;
use super::Q;

type NamedMono = Vec<(Arc<str>, u32)>;

fn named_terms(p: &Poly) -> Vec<(NamedMono, Q)> {
    let mut out: Vec<(NamedMono, Q)> = p
        .terms()
        .iter()
        .map(|(m, c)| {
            let mut f: NamedMono = m.factors().map(|(s, e)| (s.name(), e)).collect();
            f.sort_by(|a, b| a.0.cmp(&b.0));
            (f, c.clone())
        })
        .collect();
    out.sort_by(|a, b| cmp_named(&b.0, &a.0));
    out
}

fn cmp_named(a: &NamedMono, b: &NamedMono) -> Ordering {
    let da: u32 = a.iter().map(|x| x.1).sum();
    let db: u32 = b.iter().map(|x| x.1).sum();
    if da != db {
        return da.cmp(&db);
    }
    for (x, y) in a.iter().zip(b.iter()) {
        if x.0 != y.0 {
            return if x.0 < y.0 { Ordering::Greater } else { Ordering::Less };
        }
        if x.1 != y.1 {
            return x.1.cmp(&y.1);
        }
    }
    a.len().cmp(&b.len())
}

fn q_abs_text(q: &Q) -> String {
    let a = q.abs();
    if a.is_integer() {
        a.numer().to_string()
    } else {
        format!("{}/{}", a.numer(), a.denom())
    }
}

fn terms_to_string(t: &[(NamedMono, Q)]) -> String {
    if t.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (m, c)) in t.iter().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        let mut parts: Vec<String> = Vec::new();
        if !a.is_one() || m.is_empty() {
            parts.push(q_abs_text(&a));
        }
        for (n, e) in m {
            if *e == 1 {
                parts.push(n.to_string());
            } else {
                parts.push(format!("{}^{}", n, e));
            }
        }
        s.push_str(&parts.join("*"));
    }
    s
}

pub fn poly_to_string(p: &Poly) -> String {
    terms_to_string(&named_terms(p))
}

/// Canonical text: denominator monic under the name order.
pub fn rat_to_string(r: &Rat) -> String {
    let mut dt = named_terms(r.denom());
    let mut nt = named_terms(r.numer());
    if let Some((_, lc)) = dt.first().cloned() {
        if !lc.is_one() {
            for t in dt.iter_mut() {
                t.1 = &t.1 / &lc;
            }
            for t in nt.iter_mut() {
                t.1 = &t.1 / &lc;
            }
        }
    }
    let dconst = dt.len() == 1 && dt[0].0.is_empty();
    let ns = terms_to_string(&nt);
    if r.denom().is_one() || (dconst && dt[0].1.is_one()) {
        return ns;
    }
    let nwrap = if nt.len() > 1 { format!("({})", ns) } else { ns };
    let ds = terms_to_string(&dt);
    let dwrap = if dt.len() > 1 || (dt.len() == 1 && dt[0].0.len() + usize::from(!dt[0].1.is_one()) > 1) {
        format!("({})", ds)
    } else {
        ds
    };
    if nwrap.starts_with('-') && nt.len() == 1 {
        format!("-{}/{}", &nwrap[1..], dwrap)
    } else {
        format!("{}/{}", nwrap, dwrap)
    }
}

/// Short hex digest of the canonical text.
pub fn digest_text(s: &str) -> String {
    let h = Sha256::digest(s.as_bytes());
    let mut out = String::with_capacity(16);
    for b in h.iter().take(8) {
        out.push_str(&format!("{:02x}", b));
    }
    out
}

pub fn rat_digest(r: &Rat) -> String {
    if r.is_zero() {
        return "0".into();
    }
    digest_text(&rat_to_string(r))
}

