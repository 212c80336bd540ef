//! Conformal change of a base metric and the boundary-length map.
//!
//! A factor `w` assigns one real to each boundary component and changes an
//! edge joining components `a` and `b` by
//!
//! ```text
//! cosh(l/2) = e^{w_a + w_b} cosh(l0/2)
//! ```
//!
//! A positive `l` exists iff `u = w_a + w_b + ln cosh(l0/2) > 0`, so the
//! admissible set is an intersection of open half-spaces. Lengths are
//! computed from `u` directly as `l = 2 acosh(e^u)`.

use std::ops::Deref;

use nalgebra::DMatrix;

use crate::error::{check_finite, Error, Result};
use crate::hexagon::{arc_jacobian_with_arcs, hexagon_arcs};
use crate::hyperbolic::{acosh_exp, ln_cosh};
use crate::surface::{IdealTriangulation, Metric};

/// One real per boundary component; entry `i - 1` belongs to component `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalFactor(Vec<f64>);

impl ConformalFactor {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for &v in &values {
            check_finite("conformal factor", v)?;
        }
        Ok(Self(values))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ConformalFactor {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Total length of each boundary component; entry `i - 1` is `B_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryLengths(Vec<f64>);

impl BoundaryLengths {
    /// Accepts any finite values; positivity is the caller's concern
    /// (targets are checked by the solver).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for &v in &values {
            check_finite("boundary length", v)?;
        }
        Ok(Self(values))
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// `Σ B_i²`.
    pub fn sum_of_squares(&self) -> f64 {
        self.0.iter().map(|b| b * b).sum()
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl Deref for BoundaryLengths {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// `w_a + w_b + ln cosh(l0/2)`; the edge admits a positive length iff this is positive.
pub fn log_margin(l0: f64, w_a: f64, w_b: f64) -> f64 {
    w_a + w_b + ln_cosh(0.5 * l0)
}

/// Length of an edge with base length `l0` after scaling its endpoints by
/// `w_a` and `w_b` (pass the same value twice for a self-edge).
pub fn edge_length(l0: f64, w_a: f64, w_b: f64) -> Result<f64> {
    crate::error::check_positive("base length", l0)?;
    let u = log_margin(l0, w_a, w_b);
    if u > 0.0 {
        Ok(2.0 * acosh_exp(u))
    } else {
        Err(Error::Domain {
            edge: None,
            margin: u,
        })
    }
}

/// Result of [`in_domain`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainCheck {
    pub inside: bool,
    /// Minimum over edges of `w_a + w_b + ln cosh(l0/2)`.
    pub margin: f64,
    /// Edge attaining the minimum.
    pub edge: Option<u32>,
}

pub fn in_domain(tri: &IdealTriangulation, l0: &Metric, w: &[f64]) -> DomainCheck {
    let mut margin = f64::INFINITY;
    let mut edge = None;
    for (e, &l) in tri.edges().iter().zip(l0.lengths()) {
        let u = log_margin(l, w[e.ends[0] - 1], w[e.ends[1] - 1]);
        // NaN compares false and is caught by `inside` below
        if u < margin || u.is_nan() {
            margin = u;
            edge = Some(e.id);
        }
    }
    DomainCheck {
        inside: margin > 0.0,
        margin,
        edge,
    }
}

fn check_dim(tri: &IdealTriangulation, w: &[f64]) -> Result<()> {
    if w.len() == tri.n_boundaries() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: tri.n_boundaries(),
            got: w.len(),
        })
    }
}

/// Conformally changed length of every edge, in edge order.
pub fn conformal_lengths(tri: &IdealTriangulation, l0: &Metric, w: &[f64]) -> Result<Vec<f64>> {
    check_dim(tri, w)?;
    tri.edges()
        .iter()
        .zip(l0.lengths())
        .map(|(e, &l)| {
            let u = log_margin(l, w[e.ends[0] - 1], w[e.ends[1] - 1]);
            if u > 0.0 {
                Ok(2.0 * acosh_exp(u))
            } else {
                Err(Error::Domain {
                    edge: Some(e.id),
                    margin: u,
                })
            }
        })
        .collect()
}

/// Full hexagon geometry of a surface at one conformal factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGeometry {
    /// Per edge, in edge order.
    pub edge_lengths: Vec<f64>,
    /// Per face (face order), side `t` opposite corner `t`.
    pub sides: Vec<[f64; 3]>,
    /// Per face, arc at corner `t`.
    pub arcs: Vec<[f64; 3]>,
    /// Per boundary component.
    pub boundary: BoundaryLengths,
}

impl SurfaceGeometry {
    pub fn min_edge_length(&self) -> f64 {
        self.edge_lengths
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_edge_length(&self) -> f64 {
        self.edge_lengths.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_arc(&self) -> f64 {
        self.arcs.iter().flatten().copied().fold(0.0, f64::max)
    }
}

pub fn evaluate(tri: &IdealTriangulation, l0: &Metric, w: &[f64]) -> Result<SurfaceGeometry> {
    let edge_lengths = conformal_lengths(tri, l0, w)?;
    let mut sides = Vec::with_capacity(tri.faces().len());
    let mut arcs = Vec::with_capacity(tri.faces().len());
    let mut boundary = vec![0.0; tri.n_boundaries()];
    for (k, face) in tri.faces().iter().enumerate() {
        let s = tri.face_edge_positions(k).map(|p| edge_lengths[p]);
        let a = hexagon_arcs(s)?;
        for t in 0..3 {
            boundary[face.corners[t] - 1] += a[t];
        }
        sides.push(s);
        arcs.push(a);
    }
    Ok(SurfaceGeometry {
        edge_lengths,
        sides,
        arcs,
        boundary: BoundaryLengths(boundary),
    })
}

/// `B(w)`: for each component, the sum of the arcs at all corners lying on it.
pub fn boundary_lengths(
    tri: &IdealTriangulation,
    l0: &Metric,
    w: &[f64],
) -> Result<BoundaryLengths> {
    evaluate(tri, l0, w).map(|g| g.boundary)
}

/// `H = ∂B/∂w`, assembled densely from the per-face arc Jacobians.
///
/// A face with two corners on the same component adds every matching entry,
/// which is the chain rule for the identified variables.
pub fn boundary_jacobian(tri: &IdealTriangulation, l0: &Metric, w: &[f64]) -> Result<DMatrix<f64>> {
    let g = evaluate(tri, l0, w)?;
    Ok(assemble_jacobian(tri, &g))
}

pub(crate) fn assemble_jacobian(tri: &IdealTriangulation, g: &SurfaceGeometry) -> DMatrix<f64> {
    let n = tri.n_boundaries();
    let mut h = DMatrix::zeros(n, n);
    for (k, face) in tri.faces().iter().enumerate() {
        let j = arc_jacobian_with_arcs(g.sides[k], g.arcs[k]);
        let c = face.corners.map(|c| c - 1);
        for r in 0..3 {
            for s in 0..3 {
                h[(c[r], c[s])] += j[(r, s)];
            }
        }
    }
    h
}
