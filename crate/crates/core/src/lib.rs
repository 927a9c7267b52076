//! Verification engine for the periodic full Kostant-Toda hierarchy on
//! simple Lie algebras.
//!
//! The crate builds root systems and loop-algebra phase spaces, realizes
//! the coordinate Poisson bracket, extracts the spectral invariant family
//! from Lax matrices, and certifies the rank, involution, Casimir, and
//! independence statements that make the hierarchy Liouville-integrable.
//! Exact rational arithmetic is used for every algebraic claim; floating
//! point appears only in the flow integrator.

pub mod bracket;
pub mod cli;
pub mod error;
pub mod laurent;
pub mod lax;
pub mod mat;
pub mod phasespace;
pub mod rankcheck;
pub mod rep;
pub mod report;
pub mod rootsys;
pub mod sample;
pub mod scalar;
pub mod tk;

pub use error::{Error, Result};
