//! Abstract structure equations: formal d, d²-closure, Cartan characters,
//! and integrable-extension candidates (verification, explicit realization,
//! ansatz search).

mod ansatz;
mod candidate;
mod cartan;
mod polysolve;
mod realize;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::exterior::{ideal_residual, Coframe, DResult, ExtError, Form, Gen, GenRule, Mode};
use crate::heavenly_coframe::CoframeError;
use crate::report::{Check, Report};
use crate::symkernel::SymError;

pub use ansatz::{build_cie_ansatz, compatibility_system, search_report, AnsatzTemplate, Case, CieAnsatz, CompatibilitySystem};
pub use candidate::{verify_candidate, Candidate};
pub use cartan::{cartan_characters, CartanResult};
pub use polysolve::{solve_cases, Branch, CaseOutcome, CaseTree, PolySystem};
pub use realize::{realize_candidate, Realization};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Ext(#[from] ExtError),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error(transparent)]
    Coframe(#[from] CoframeError),
    #[error("{0} has no rule")]
    NoRule(String),
    #[error("partial mode required for {0} but forbidden")]
    PartialForbidden(String),
    #[error("tableau: {0}")]
    Tableau(String),
    #[error("generic covectors not found after retries; use another seed")]
    RetryExhausted,
    #[error("candidate: {0}")]
    Candidate(String),
    #[error("realization: {0}")]
    Realize(String),
}

/// An abstract coframe whose generators carry d-rules; free forms keep
/// unknown rules.
#[derive(Clone, Debug)]
pub struct StructureSet {
    pub cf: Coframe,
    pub free: Vec<Gen>,
}

impl StructureSet {
    pub fn formal_d(&self, a: &Form, mode: Mode) -> Result<DResult, EngineError> {
        Ok(self.cf.ext_d(a, mode)?)
    }

    fn rule(&self, name: &str) -> Result<(Gen, Form), EngineError> {
        let g = self.cf.gen(name).ok_or_else(|| EngineError::NoRule(name.to_string()))?;
        match &self.cf.gen_info(g).rule {
            GenRule::Formal(f) => Ok((g, f.clone())),
            _ => Err(EngineError::NoRule(name.to_string())),
        }
    }

    /// `d(d g)`. In partial mode the known part is reduced modulo the
    /// cofactors of unknown differentials, which can absorb anything there.
    pub fn d_squared_residual(&self, name: &str, mode: Mode) -> Result<Form, EngineError> {
        let (_, rule) = self.rule(name)?;
        let r = self.cf.ext_d(&rule, mode)?;
        if r.slots.is_empty() {
            return Ok(r.known);
        }
        let mut gens: Vec<Form> = Vec::new();
        for (s, cof) in &r.slots {
            if cof.degree() != 1 || !cof.is_homogeneous() {
                return Err(EngineError::Tableau(format!("cofactor of {} is not a 1-form", self.cf.slot_name(s))));
            }
            gens.push(cof.clone());
        }
        let res = crate::exterior::ideal_residual_lenient(&self.cf, &r.known, &gens)?;
        Ok(res.residual)
    }

    /// d² checks for every ruled generator, full mode where possible.
    pub fn d_squared_report(&self, allow_partial: bool) -> Result<Report, EngineError> {
        let mut checks = Vec::new();
        for (_, info) in self.cf.gens() {
            if !matches!(info.rule, GenRule::Formal(_)) {
                continue;
            }
            let (label, res) = match self.d_squared_residual(&info.name, Mode::Full) {
                Ok(f) => ("full", f),
                Err(EngineError::Ext(ExtError::Blocked(_))) => {
                    if !allow_partial {
                        return Err(EngineError::PartialForbidden(info.name.clone()));
                    }
                    ("partial", self.d_squared_residual(&info.name, Mode::Partial)?)
                }
                Err(e) => return Err(e),
            };
            checks.push(Check::form(format!("d2 {} ({})", info.name, label), &self.cf, &res));
        }
        Ok(Report::from_checks(checks))
    }
}

/// Residual of `a` modulo 1-form generators, as used throughout the engine.
pub(crate) fn reduce_mod(cf: &Coframe, a: &Form, gens: &[Form]) -> Result<Form, EngineError> {
    if gens.is_empty() {
        return Ok(a.clone());
    }
    Ok(ideal_residual(cf, a, gens)?.residual)
}
