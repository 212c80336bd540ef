//! Combinatorial Yamabe flow and prescribed boundary lengths on hyperbolic
//! surfaces with geodesic boundary.
//!
//! A surface is an [`IdealTriangulation`] together with a base [`Metric`],
//! one length per edge. A conformal factor `w` (one real per boundary
//! component) rescales every edge by `cosh(l/2) = e^{w_a + w_b} cosh(l0/2)`.
//! Each face is then a right-angled hexagon and the boundary components
//! acquire lengths `B(w)`. The map `w -> B(w)` is the gradient of a strictly
//! concave energy, which gives
//!
//! * [`flow::integrate_flow`]: the gradient flow `dw/dt = B(w)` from `w = 0`,
//!   along which every boundary component shrinks to a cusp;
//! * [`prescribe::solve_prescribed`]: Newton's method for the unique `w`
//!   with `B(w)` equal to any positive target.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// frozen oracle values are kept digit-for-digit
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod conformal;
pub mod diagnostics;
pub mod energy;
pub mod error;
pub mod flow;
pub mod hexagon;
pub mod hyperbolic;
pub mod prescribe;
pub mod quadrature;
pub mod surface;

pub use conformal::{
    boundary_jacobian, boundary_lengths, edge_length, in_domain, BoundaryLengths, ConformalFactor,
};
pub use diagnostics::{certify_jacobians, JacobianCheck};
pub use energy::{face_energy, total_energy, QuadratureSpec};
pub use error::{Error, Result};
pub use flow::{cusp_report, integrate_flow, CuspReport, FlowOptions, FlowTrace, StopReason};
pub use hexagon::{arc_jacobian, coefficient_matrix, hexagon_arcs, hexagon_sides, HexagonGeometry};
pub use prescribe::{newton, solve_prescribed, solve_prescribed_from, SolveOptions, SolveResult};
pub use surface::{
    corner_incidence, euler_characteristic, parse_surface, validate, IdealTriangulation, Metric,
    ValidationReport,
};

/// Format with 17 significant digits, enough to round-trip any `f64`.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}
