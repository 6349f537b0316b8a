//! Entanglement diagnostics for pure-dephasing evolutions of an N-level
//! system coupled to an M-level environment.
//!
//! The joint state at time `t` is built from the conditional environment
//! propagators `w_k(t) = exp(−i(H_E + V_k)t)`; [`criteria::decide`] classifies
//! it as separable or entangled from two families of commutator conditions,
//! and [`witnesses`] provides independent partial-transpose and
//! principal-minor checks of that verdict.

pub mod criteria;
pub mod error;
pub mod evolution;
pub mod fixtures;
pub mod linalg;
pub mod model;
pub mod witnesses;

pub use error::{Error, Result, ValidationErrors, Violation};
pub use linalg::{Complex64, ComplexMatrix, Subsystem};
