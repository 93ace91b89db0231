//! Gauss-law oracle circuits for truncated U(1) and Z_{2^n} lattice gauge
//! theories.
//!
//! The crate is split into a classical reference for the constraint
//! ([`lattice`]), a gate-level circuit IR ([`circuit`]), reversible
//! arithmetic ([`arith`]), the oracle builders ([`oracle`]), two simulators
//! ([`sim`]) and the Schwinger-model Trotter study ([`schwinger`]).

pub mod arith;
pub mod circuit;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod pauli;
pub mod schwinger;
pub mod sim;

pub use error::{Error, Result};
