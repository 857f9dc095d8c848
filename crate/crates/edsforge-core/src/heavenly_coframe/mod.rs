//! Explicit invariant coframes on a jet chart and their comparison with an
//! abstract structure table: exactly when the rule only mentions realized
//! forms, modulo the ideal of the realized partners otherwise.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::exterior::{ideal_residual, Coframe, ExtError, Form, Gen, ScalarRule};
use crate::jetspace::{Counts, JetChart, JetError};
use crate::report::{Check, Report};
use crate::symkernel::{print, rank_q, Rat, Q};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CoframeError {
    #[error(transparent)]
    Ext(#[from] ExtError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("rule for {0} references non-realized forms; verify modulo an ideal instead")]
    NotExplicit(String),
    #[error("no explicit form named {0}")]
    Missing(String),
    #[error("term {0} pairs two non-realized forms")]
    Unpaired(String),
}

/// `du_I − Σ_a u_{I+a} dx^a`, every jet reduced modulo the relation.
pub fn contact_form(chart: &JetChart, cf: &Coframe, c: &Counts) -> Result<Form, CoframeError> {
    let u = Rat::var(chart.jet(c)?);
    let ur = chart.reduce(&u)?;
    let mut f = cf.d(&cf.scalar(ur))?;
    for (a, &b) in chart.base().iter().enumerate() {
        let mut up = c.clone();
        up[a] += 1;
        let ua = chart.reduce(&Rat::var(chart.jet(&up)?))?;
        let dx = cf.d_symbol(b)?;
        f = f.sub(&dx.scale(&ua))?;
    }
    Ok(f)
}

/// Named explicit forms over a coordinate coframe.
#[derive(Clone, Debug)]
pub struct ExplicitCoframe {
    pub cf: Coframe,
    pub forms: Vec<(String, Form)>,
    pub side_conditions: Vec<String>,
}

impl ExplicitCoframe {
    pub fn new(cf: Coframe) -> ExplicitCoframe {
        ExplicitCoframe { cf, forms: Vec::new(), side_conditions: Vec::new() }
    }

    pub fn insert(&mut self, name: &str, f: Form) -> Result<(), CoframeError> {
        if f.ctx() != self.cf.id() {
            return Err(ExtError::MixedContexts.into());
        }
        self.forms.retain(|(n, _)| n != name);
        self.forms.push((name.to_string(), f));
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Form> {
        self.forms.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    /// Replaces every abstract generator of `formal` (over `abs`) by its
    /// explicit form.
    pub fn realize(&self, abs: &Coframe, formal: &Form) -> Result<Form, CoframeError> {
        let mut out = self.cf.zero();
        for (m, c) in formal.terms() {
            let mut t = self.cf.scalar(c.clone());
            for &g in m.iter() {
                let name = abs.gen_name(g);
                let e = self.get(name).ok_or_else(|| CoframeError::NotExplicit(name.to_string()))?;
                t = t.wedge(e)?;
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }

    /// Splits a formal 2-form rule into its fully realized part and the
    /// realized partners of terms containing a non-realized form.
    pub fn split_rule(&self, abs: &Coframe, rule: &Form) -> Result<(Form, Vec<String>), CoframeError> {
        let mut known = abs.zero();
        let mut partners: Vec<String> = Vec::new();
        for (m, c) in rule.terms() {
            let missing: Vec<Gen> = m.iter().copied().filter(|&g| self.get(abs.gen_name(g)).is_none()).collect();
            if missing.is_empty() {
                known.add_term(m.clone(), c.clone());
                continue;
            }
            let present: Vec<Gen> = m.iter().copied().filter(|g| !missing.contains(g)).collect();
            if present.len() != 1 || m.len() != 2 {
                let names: Vec<&str> = m.iter().map(|&g| abs.gen_name(g)).collect();
                return Err(CoframeError::Unpaired(names.join("/\\")));
            }
            let p = abs.gen_name(present[0]).to_string();
            if !partners.contains(&p) {
                partners.push(p);
            }
        }
        Ok((known, partners))
    }

    /// `d(explicit) − rule`, which must vanish identically.
    pub fn verify_exact(&self, name: &str, abs: &Coframe, rule: &Form) -> Result<Form, CoframeError> {
        let e = self.get(name).ok_or_else(|| CoframeError::Missing(name.to_string()))?;
        let r = self.realize(abs, rule)?;
        Ok(self.cf.d(e)?.sub(&r)?)
    }

    /// Residual of `d(explicit) − known` modulo the ideal of `ideal` forms.
    pub fn verify_mod_ideal(&self, name: &str, abs: &Coframe, known: &Form, ideal: &[String]) -> Result<(Form, bool), CoframeError> {
        let e = self.get(name).ok_or_else(|| CoframeError::Missing(name.to_string()))?;
        let diff = self.cf.d(e)?.sub(&self.realize(abs, known)?)?;
        let gens: Vec<Form> = ideal.iter().map(|n| self.get(n).cloned().ok_or_else(|| CoframeError::Missing(n.clone()))).collect::<Result<_, _>>()?;
        let r = ideal_residual(&self.cf, &diff, &gens)?;
        Ok((r.residual, r.member))
    }

    /// Checks every rule of the abstract table whose left side is realized.
    pub fn verify_table(&self, abs: &Coframe) -> Result<Report, CoframeError> {
        let mut checks = Vec::new();
        for (_, info) in abs.gens() {
            let crate::exterior::GenRule::Formal(rule) = &info.rule else { continue };
            if self.get(&info.name).is_none() {
                continue;
            }
            let (known, partners) = self.split_rule(abs, rule)?;
            if partners.is_empty() {
                let r = self.verify_exact(&info.name, abs, rule)?;
                checks.push(Check::form(format!("exact d{}", info.name), &self.cf, &r));
            } else {
                let (r, _) = self.verify_mod_ideal(&info.name, abs, &known, &partners)?;
                checks.push(Check::form(format!("d{} mod <{}>", info.name, partners.join(",")), &self.cf, &r));
            }
        }
        Ok(Report::from_checks(checks).with_side_conditions(self.side_conditions.clone()))
    }

    /// Rank of the coefficient matrix of the listed forms at a random
    /// rational point; full rank certifies pointwise independence.
    pub fn independence_rank(&self, names: &[String], seed: u64) -> Result<usize, CoframeError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1d3e_77a1);
        let mut vals: BTreeMap<crate::symkernel::Symbol, Q> = BTreeMap::new();
        let mut rows = Vec::new();
        for n in names {
            let f = self.get(n).ok_or_else(|| CoframeError::Missing(n.clone()))?;
            let mut row = alloc::vec![Q::from_integer(0.into()); self.cf.len()];
            for (m, c) in f.terms() {
                if m.len() != 1 {
                    return Err(CoframeError::Unpaired(n.clone()));
                }
                for s in c.vars() {
                    vals.entry(s).or_insert_with(|| {
                        let k = (rng.next_u32() % 97) as i64 - 48;
                        Q::new(k.into(), ((rng.next_u32() % 7) as i64 + 1).into())
                    });
                }
                let v = c.eval(&|s| vals[&s].clone()).unwrap_or_else(|| Q::from_integer(0.into()));
                row[m[0] as usize] = v;
            }
            rows.push(row);
        }
        Ok(rank_q(rows))
    }
}

/// Marks chart parameters without coordinates as constants in `cf`.
pub fn constants(cf: &mut Coframe, syms: &[crate::symkernel::Symbol]) {
    for &s in syms {
        if cf.scalar_rule(s).is_none() {
            cf.set_scalar(s, ScalarRule::Constant);
        }
    }
}

pub fn render_side(r: &Rat) -> String {
    format!("{} != 0", print::rat_to_string(r))
}
