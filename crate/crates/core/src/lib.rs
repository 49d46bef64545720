//! Compatibility analysis for systems of partial differential equations
//! over exact rational arithmetic.

pub mod algebra;
pub mod brackets;
pub mod chargeo;
pub mod cli;
pub mod compat;
pub mod dist;
pub mod dsl;
pub mod error;
pub mod expr;
pub mod jet;
pub mod report;
pub mod verify;

pub use error::{Error, Result};

/// Exact rational numbers used throughout.
pub type Rational = num_rational::BigRational;
