//! Moving least squares and generalized moving least squares (GMLS)
//! approximation on scattered nodes.

mod basis;
mod gmls;
mod mls;
mod weight;

pub use basis::{basis_eval, scaled, PolyBasis};
pub use gmls::{gmls_derivative_row, gmls_row, mls_shape, MlsContext, MomentSystem, MAX_CONDITION};
pub(crate) use mls::standard_derivatives;
pub use mls::{mls_shape_with_derivatives, ShapeFunctionEvaluation};
pub use weight::{weight_eval, GaussianWeight};
