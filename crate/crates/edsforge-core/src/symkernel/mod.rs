//! Exact symbolic arithmetic: interned symbols, sparse polynomials and
//! canonical rational functions over arbitrary-precision rationals.
//!
//! Term order is graded lexicographic over interning indices (a symbol
//! interned earlier is the more significant variable). Text output and
//! digests re-sort by name so they do not depend on interning order.

pub mod gcd;
pub mod linear;
pub mod poly;
pub mod print;
pub mod rat;
pub mod symbol;

use alloc::string::String;

pub use gcd::gcd;
pub use linear::{rank_q, solve_linear, LinearResult, Solution};
pub use poly::{Mono, Poly};
pub use rat::Rat;
pub use symbol::{Symbol, SymbolKind};

/// Arbitrary-precision rational.
pub type Q = num_rational::BigRational;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SymError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("substitution produces a zero denominator in {0}")]
    ZeroDenominator(String),
    #[error("symbol {name} already interned as {existing}, requested {requested}")]
    KindMismatch { name: String, existing: &'static str, requested: &'static str },
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("equation {0} is not linear in the unknowns")]
    Nonlinear(usize),
}

/// Rational constant `n/d`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}
