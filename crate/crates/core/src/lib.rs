//! Augmented Lagrangians on conic constraints: cone geometry, penalty families, axiom checks,
//! exact augmented Lagrangians and the solvers and diagnostics built on them.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod aug_lagrangians;
pub mod axioms;
pub mod catalog;
pub mod claims;
pub mod cones;
pub mod error;
pub mod exact_al;
pub mod ext;
pub mod numdiff;
pub mod problems;
pub mod solvers;
pub mod spectral;

pub use error::{Error, Result};
pub use ext::ExtendedReal;
