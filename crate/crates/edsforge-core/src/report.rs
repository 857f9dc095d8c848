//! Verification outcomes shared by all checks.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::exterior::{Coframe, Form};
use crate::symkernel::{print, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

/// One named residual. `digest` is `"0"` exactly when the residual vanishes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub zero: bool,
    pub digest: String,
    pub text: String,
}

impl Check {
    pub fn rat(name: impl Into<String>, r: &Rat) -> Check {
        Check { name: name.into(), zero: r.is_zero(), digest: print::rat_digest(r), text: print::rat_to_string(r) }
    }

    pub fn form(name: impl Into<String>, cf: &Coframe, f: &Form) -> Check {
        Check { name: name.into(), zero: f.is_zero(), digest: cf.digest(f), text: cf.render(f) }
    }

    /// A yes/no outcome whose residual is the text of what went wrong.
    pub fn flag(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Check {
        let text: String = detail.into();
        let digest = if ok { "0".to_string() } else { print::digest_text(&text) };
        Check { name: name.into(), zero: ok, digest, text: if ok { "0".into() } else { text } }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub status: Status,
    pub checks: Vec<Check>,
    pub side_conditions: Vec<String>,
    /// Free-form results worth showing (solved quantities, case trees).
    pub notes: Vec<String>,
}

impl Report {
    pub fn from_checks(checks: Vec<Check>) -> Report {
        let ok = checks.iter().all(|c| c.zero);
        Report { status: if ok { Status::Pass } else { Status::Fail }, checks, side_conditions: Vec::new(), notes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn with_side_conditions(mut self, mut s: Vec<String>) -> Report {
        for c in s.drain(..) {
            if !self.side_conditions.contains(&c) {
                self.side_conditions.push(c);
            }
        }
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Report {
        self.notes.push(n.into());
        self
    }
}
