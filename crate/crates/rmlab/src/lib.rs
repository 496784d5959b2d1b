//! rmlab: a laboratory for F_q-linear rank-metric codes of the form
//! C_{δ,s} = ⟨x, x^{q^s} + δ x^{q^{n/2+s}}⟩ over F_{q^n}.
//!
//! The crate provides deterministic finite-field tower arithmetic, the
//! q-polynomial algebra L_{n,q}, MRD/Almost-MRD classification by rank
//! scans, the associated plane curve and P^7 quadric varieties with point
//! enumeration, idealiser and equivalence decision procedures, and
//! Hasse-Weil / Cafure-Matera bound calculators.

pub mod cli;
pub mod codes;
pub mod equiv;
mod error;
pub mod fields;
pub mod geometry;
mod linalg;
pub mod linpoly;

pub use error::{Error, Result};
