//! Syntax tree of `.eds` documents.

use std::fmt;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Wedge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// Non-negative integer literal, kept as text.
    Int(String),
    Name(String),
    /// `u[y,z]` or `v[1,0]`.
    Jet(String, Vec<String>),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    /// `d(e)`, `contact(u[y])`.
    Call(String, Vec<Expr>),
}

/// A form declared in a coframe, referenced as `coframe.form`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormRef {
    pub coframe: String,
    pub form: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeEnd {
    Covering(String),
    Form(FormRef),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TaskKind {
    VerifyCovering { covering: String, depth: Option<u32> },
    VerifyStructure { coframe: String, structure: String },
    VerifyD2 { structure: String },
    Cartan { structure: String, base: Vec<String>, expect: Option<(Vec<u32>, u32)> },
    WeConvert { from: WeEnd, to: WeEnd },
    CieVerify { candidate: String, assume: Vec<(String, Expr)> },
    CieSearch { structure: String, zero: Vec<String>, nodes: Option<u64> },
    LiftCheck { covering: String, generator: String, order: u32, flow: Option<(String, Expr)> },
    Realize { candidate: String, omega: FormRef, independent: Vec<String> },
}

impl TaskKind {
    pub fn keyword(&self) -> &'static str {
        match self {
            TaskKind::VerifyCovering { .. } => "verify-covering",
            TaskKind::VerifyStructure { .. } => "verify-structure",
            TaskKind::VerifyD2 { .. } => "verify-d2",
            TaskKind::Cartan { .. } => "cartan",
            TaskKind::WeConvert { .. } => "we-convert",
            TaskKind::CieVerify { .. } => "cie-verify",
            TaskKind::CieSearch { .. } => "cie-search",
            TaskKind::LiftCheck { .. } => "lift-check",
            TaskKind::Realize { .. } => "realize",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoframeItem {
    Let(String, Expr),
    Form(String, Expr),
    Identity(String, Expr, Expr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibreDecl {
    pub name: String,
    pub along: (String, String),
    pub order: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Import(String),
    Chart { name: String, base: Vec<String>, dependent: String, order: u32, params: Vec<String> },
    Relation { name: String, lhs: Expr, rhs: Expr },
    Covering { name: String, relation: String, fibre: String, along: (String, String), params: Vec<String>, rules: Vec<(String, Expr)> },
    Generator { name: String, relation: String, components: Vec<(String, Expr)> },
    Coframe { name: String, relation: String, jet_order: u32, fibre: Option<FibreDecl>, coordinates: Vec<String>, items: Vec<CoframeItem> },
    Structure { name: String, forms: Vec<String>, free: Vec<String>, rules: Vec<(String, Expr)> },
    Candidate { name: String, base: String, forms: Vec<String>, invariants: Vec<String>, params: Vec<String>, rules: Vec<(String, Expr)> },
    Task { name: String, kind: TaskKind, expect_fail: bool },
    Suite { name: String, tasks: Vec<String> },
}

impl Decl {
    pub fn name(&self) -> Option<&str> {
        match self {
            Decl::Import(_) => None,
            Decl::Chart { name, .. }
            | Decl::Relation { name, .. }
            | Decl::Covering { name, .. }
            | Decl::Generator { name, .. }
            | Decl::Coframe { name, .. }
            | Decl::Structure { name, .. }
            | Decl::Candidate { name, .. }
            | Decl::Task { name, .. }
            | Decl::Suite { name, .. } => Some(name),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Item {
    pub span: Span,
    pub decl: Decl,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub version: u32,
    pub items: Vec<Item>,
}

impl Document {
    /// Structural equality ignoring spans.
    pub fn same_structure(&self, o: &Document) -> bool {
        self.version == o.version && self.items.len() == o.items.len() && self.items.iter().zip(&o.items).all(|(a, b)| a.decl == b.decl)
    }
}
