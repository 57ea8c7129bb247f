//! Numerical laboratory for Besicovitch-set counterexamples to bounds of
//! trilinear Fourier multipliers whose symbols are indicators of domains
//! with curved boundary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod besicovitch;
pub mod certificates;
pub mod cli;
pub mod domains;
pub mod error;
pub mod figures;
pub mod forms;
pub mod geometry;
pub mod quadrature;

pub use error::{Error, Result};
