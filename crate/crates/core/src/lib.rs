//! Deterministic hidden-variable models for two-qubit pure states.
//!
//! The crate contains Bell's singlet model, its generalization to every pure
//! two-qubit state and every factorized dichotomic observable, a variant
//! driven by a single real hidden parameter, and an exact quantum oracle
//! against which all three are checked.

pub mod bell;
pub mod cli;
pub mod contextuality;
pub mod dynamics;
pub mod error;
pub mod frame;
pub mod general;
pub mod hidden;
pub mod linalg;
pub mod minimal;
pub mod oracle;
pub mod quadrature;
pub mod report;
pub mod states;
pub mod tolerances;
pub mod verify;

pub use error::{Error, Result};
pub use tolerances::{Tolerances, TOL};
