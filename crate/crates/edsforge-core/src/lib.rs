//! Exact exterior calculus for differential coverings and structure equations.
//!
//! The crate is `no_std` with `alloc`. Parsing, files and the command line
//! live in the companion `edsforge` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod exterior;
pub mod coverings;
pub mod eds_engine;
pub mod heavenly_coframe;
pub mod jetspace;
pub mod report;
pub mod symkernel;
