//! Membership in ideals generated by 1-forms.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{Coframe, ExtError, Form, Gen};
use crate::symkernel::Rat;

#[derive(Clone, Debug)]
pub struct IdealResult {
    /// `a` with every pivot generator eliminated.
    pub residual: Form,
    pub member: bool,
    /// Non-constant pivot coefficients assumed nonzero.
    pub side_conditions: Vec<Rat>,
}

fn pivot_cost(c: &Rat) -> (usize, usize) {
    if c.is_constant() {
        (0, 0)
    } else {
        (1, c.numer().len() + c.denom().len())
    }
}

/// Brings the generators to reduced echelon form: each entry is a pivot
/// generator and `ℓ = g + Σ c·h` with no other pivot among the `h`.
fn echelon(cf: &Coframe, gens: &[Form], lenient: bool) -> Result<(Vec<(Gen, Form)>, Vec<Rat>), ExtError> {
    let mut rows: Vec<(Gen, Form)> = Vec::new();
    let mut side = Vec::new();
    for l in gens {
        if l.ctx() != cf.id() {
            return Err(ExtError::MixedContexts);
        }
        if !l.is_homogeneous() || l.degree() != 1 {
            return Err(ExtError::Degenerate(cf.render(l)));
        }
        let mut r = l.clone();
        for (p, row) in rows.iter() {
            let c = r.coeff(&[*p]);
            if !c.is_zero() {
                r = r.sub(&row.scale(&c))?;
            }
        }
        if r.is_zero() {
            if lenient {
                continue;
            }
            return Err(ExtError::Degenerate(cf.render(l)));
        }
        let (p, c) = r
            .terms()
            .map(|(m, c)| (m[0], c))
            .min_by_key(|(g, c)| (pivot_cost(c), *g))
            .map(|(g, c)| (g, c.clone()))
            .expect("nonzero");
        if !c.is_constant() {
            side.push(c.clone());
        }
        let r = r.scale(&c.inv()?);
        for (_, row) in rows.iter_mut() {
            let k = row.coeff(&[p]);
            if !k.is_zero() {
                *row = row.sub(&r.scale(&k))?;
            }
        }
        rows.push((p, r));
    }
    Ok((rows, side))
}

/// Canonical representative of `a` modulo the ideal, with the pivot
/// generators eliminated in an adapted basis.
pub fn ideal_residual(cf: &Coframe, a: &Form, gens: &[Form]) -> Result<IdealResult, ExtError> {
    residual_with(cf, a, gens, false)
}

/// Like [`ideal_residual`] but silently drops dependent generators.
pub fn ideal_residual_lenient(cf: &Coframe, a: &Form, gens: &[Form]) -> Result<IdealResult, ExtError> {
    residual_with(cf, a, gens, true)
}

fn residual_with(cf: &Coframe, a: &Form, gens: &[Form], lenient: bool) -> Result<IdealResult, ExtError> {
    let (rows, side_conditions) = echelon(cf, gens, lenient)?;
    let mut images: BTreeMap<Gen, Form> = BTreeMap::new();
    for (p, row) in rows {
        images.insert(p, cf.g(p).sub(&row)?);
    }
    let residual = cf.substitute_gens(a, &images)?;
    Ok(IdealResult { member: residual.is_zero(), residual, side_conditions })
}

/// `a ∧ g₁ ∧ … ∧ g_k == 0`.
pub fn ideal_member_wedge(cf: &Coframe, a: &Form, gens: &[Form]) -> Result<bool, ExtError> {
    if a.ctx() != cf.id() {
        return Err(ExtError::MixedContexts);
    }
    let mut acc = a.clone();
    for g in gens {
        acc = acc.wedge(g)?;
        if acc.is_zero() {
            return Ok(true);
        }
    }
    Ok(acc.is_zero())
}
