//! Massless scalar field on two-dimensional de Sitter space.

// `!(x > 0.0)` is used deliberately so that NaN inputs are rejected, and
// reference constants keep every digit the oracle printed.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod checks;
pub mod current;
pub mod error;
pub mod fock;
pub mod geometry;
pub mod jet;
pub mod kernels;
pub mod krein;
pub mod quadrature;
pub mod specfun;
pub mod testfn;

pub use error::{Error, Result};
