//! Reference triangle `{(r, s) : r, s >= 0, r + s <= 1}`: nodal Lagrange
//! bases on equi-spaced nodes and quadrature rules.

mod basis;
mod quadrature;

pub use basis::{equispaced_nodes, NodalBasis};
pub use quadrature::{gauss_legendre, segment_quadrature, triangle_quadrature, QuadratureRule};

use thiserror::Error;

/// Highest polynomial order with a tested basis.
pub const MAX_ORDER: usize = 3;
/// Highest degree accepted by [`triangle_quadrature`] and [`segment_quadrature`].
pub const MAX_QUADRATURE_DEGREE: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReferenceError {
    #[error("unsupported order {0}")]
    UnsupportedOrder(usize),
}
