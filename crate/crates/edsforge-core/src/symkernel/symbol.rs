//! Global symbol interner.
//!
//! Symbols are small copyable handles. Equality of handles is equality of
//! names; the kind recorded at first interning never changes.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use hashbrown::HashMap;
use spin::{Once, RwLock};

use super::SymError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    BaseVariable,
    Jet,
    FibreJet,
    Parameter,
    Invariant,
    Unknown,
}

impl SymbolKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SymbolKind::BaseVariable => "base",
            SymbolKind::Jet => "jet",
            SymbolKind::FibreJet => "fibre-jet",
            SymbolKind::Parameter => "parameter",
            SymbolKind::Invariant => "invariant",
            SymbolKind::Unknown => "unknown",
        }
    }
}

/// Interned scalar symbol. The term order of polynomials uses the interning
/// index, so symbols created earlier sort as "larger" variables in lex ties.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(u32);

struct Table {
    names: Vec<Arc<str>>,
    kinds: Vec<SymbolKind>,
    index: HashMap<Arc<str>, u32>,
}

static TABLE: Once<RwLock<Table>> = Once::new();

fn table() -> &'static RwLock<Table> {
    TABLE.call_once(|| {
        RwLock::new(Table {
            names: Vec::new(),
            kinds: Vec::new(),
            index: HashMap::new(),
        })
    })
}

impl Symbol {
    /// Interns `name` with `kind`. Re-interning an existing name with the
    /// same kind returns the same handle.
    pub fn new(name: &str, kind: SymbolKind) -> Result<Symbol, SymError> {
        if let Some(&i) = table().read().index.get(name) {
            return Symbol::check_kind(i, name, kind);
        }
        let mut t = table().write();
        if let Some(&i) = t.index.get(name) {
            let existing = t.kinds[i as usize];
            drop(t);
            if existing == kind {
                return Ok(Symbol(i));
            }
            return Err(SymError::KindMismatch {
                name: String::from(name),
                existing: existing.as_str(),
                requested: kind.as_str(),
            });
        }
        let i = t.names.len() as u32;
        let arc: Arc<str> = Arc::from(name);
        t.names.push(arc.clone());
        t.kinds.push(kind);
        t.index.insert(arc, i);
        Ok(Symbol(i))
    }

    fn check_kind(i: u32, name: &str, kind: SymbolKind) -> Result<Symbol, SymError> {
        let existing = table().read().kinds[i as usize];
        if existing == kind {
            Ok(Symbol(i))
        } else {
            Err(SymError::KindMismatch {
                name: String::from(name),
                existing: existing.as_str(),
                requested: kind.as_str(),
            })
        }
    }

    /// Interns or returns the existing symbol regardless of kind.
    pub fn intern_any(name: &str, kind: SymbolKind) -> Symbol {
        match Symbol::new(name, kind) {
            Ok(s) => s,
            Err(_) => Symbol::lookup(name).expect("symbol exists after kind mismatch"),
        }
    }

    pub fn lookup(name: &str) -> Option<Symbol> {
        table().read().index.get(name).map(|&i| Symbol(i))
    }

    pub fn name(self) -> Arc<str> {
        table().read().names[self.0 as usize].clone()
    }

    pub fn kind(self) -> SymbolKind {
        table().read().kinds[self.0 as usize]
    }

    pub fn index(self) -> u32 {
        self.0
    }

    pub(crate) fn from_index(i: u32) -> Symbol {
        Symbol(i)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}
