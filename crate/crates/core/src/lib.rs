//! Direct meshless local Petrov-Galerkin (DMLPG) solver for linear
//! elastostatics in two and three dimensions.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod assembly;
pub mod benchmarks;
pub mod elasticity;
pub mod error;
pub mod geometry;
pub mod mlpg;
pub mod quadrature;

pub use error::{Error, Result};

/// Version of this crate.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
