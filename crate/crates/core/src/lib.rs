//! Regenerating codes for distributed storage: exact tradeoff formulas,
//! linear codes over GF(2^m) with exact repair, the composition
//! constructions that move those codes along the storage/bandwidth curve,
//! and an exhaustive verifier.

pub mod cli;
pub mod constructions;
pub mod dss;
pub mod error;
pub mod gf;
pub mod rational;
pub mod tradeoff;
pub mod verifier;

pub use error::{Error, Result};
pub use rational::Rational;
