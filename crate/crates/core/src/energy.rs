//! The concave energy whose gradient is the boundary-length map.
//!
//! On one face the 1-form `θ^i dw_i + θ^j dw_j + θ^k dw_k` is closed (the arc
//! Jacobian is symmetric), so its integral from the origin defines a function
//! `E(w_i, w_j, w_k)` with `∇E = θ`. Summing over faces gives `Ē` with
//! `∇Ē = B`. Neither has a closed form here; both are evaluated as line
//! integrals along straight segments, which stay inside the (convex)
//! admissible set whenever the endpoints do.

use crate::conformal::{boundary_lengths, edge_length, in_domain};
use crate::error::{Error, Result};
use crate::hexagon::hexagon_arcs;
use crate::quadrature::{integrate_adaptive, GaussLegendre};
use crate::surface::{IdealTriangulation, Metric};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Gauss–Legendre nodes per panel.
    pub order: usize,
    /// Absolute tolerance on the difference between successive refinements.
    pub tolerance: f64,
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            order: 32,
            tolerance: 1e-12,
            max_depth: 12,
        }
    }
}

impl QuadratureSpec {
    pub fn check(&self) -> Result<()> {
        if self.order < 2 {
            return Err(Error::Options(format!(
                "quadrature order {} < 2",
                self.order
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Options(format!(
                "quadrature tolerance {} <= 0",
                self.tolerance
            )));
        }
        if self.max_depth < 1 {
            return Err(Error::Options("quadrature depth must be at least 1".into()));
        }
        Ok(())
    }
}

/// A quadrature rule prepared once and reused across integrals.
#[derive(Debug, Clone)]
pub struct Integrator {
    spec: QuadratureSpec,
    rule: GaussLegendre,
}

impl Integrator {
    pub fn new(spec: QuadratureSpec) -> Result<Self> {
        spec.check()?;
        Ok(Self {
            spec,
            rule: GaussLegendre::new(spec.order),
        })
    }

    fn integrate(&self, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
        integrate_adaptive(
            &self.rule,
            &mut f,
            0.0,
            1.0,
            self.spec.tolerance,
            self.spec.max_depth,
        )
    }

    /// `∫ θ · dw` for one face along the segment `from -> to`.
    pub fn face_segment(&self, l0_sides: [f64; 3], from: [f64; 3], to: [f64; 3]) -> Result<f64> {
        check_face_point(l0_sides, to)?;
        check_face_point(l0_sides, from)?;
        let dir = [to[0] - from[0], to[1] - from[1], to[2] - from[2]];
        self.integrate(|t| {
            let w = [
                from[0] + t * dir[0],
                from[1] + t * dir[1],
                from[2] + t * dir[2],
            ];
            let arcs = hexagon_arcs(face_sides(l0_sides, w)?)?;
            Ok(arcs[0] * dir[0] + arcs[1] * dir[1] + arcs[2] * dir[2])
        })
    }

    /// `∫ B · dw` over the whole surface along the segment `from -> to`.
    ///
    /// By path independence this is `Ē(to) - Ē(from)`; it is far more
    /// accurate than differencing two totals when the points are close.
    pub fn segment(
        &self,
        tri: &IdealTriangulation,
        l0: &Metric,
        from: &[f64],
        to: &[f64],
    ) -> Result<f64> {
        self.shifted_segment(tri, l0, from, to, None)
    }

    /// `∫ (B - shift) · dw` along `from -> to`. Integrating the difference
    /// directly keeps full relative accuracy when `B` is close to `shift`.
    pub fn shifted_segment(
        &self,
        tri: &IdealTriangulation,
        l0: &Metric,
        from: &[f64],
        to: &[f64],
        shift: Option<&[f64]>,
    ) -> Result<f64> {
        for w in [from, to] {
            let d = in_domain(tri, l0, w);
            if !d.inside {
                return Err(Error::Domain {
                    edge: d.edge,
                    margin: d.margin,
                });
            }
        }
        let dir: Vec<f64> = to.iter().zip(from).map(|(a, b)| a - b).collect();
        let mut w = vec![0.0; from.len()];
        self.integrate(|t| {
            for ((wi, &f), &d) in w.iter_mut().zip(from).zip(&dir) {
                *wi = f + t * d;
            }
            let b = boundary_lengths(tri, l0, &w)?;
            Ok(match shift {
                Some(c) => b
                    .iter()
                    .zip(c)
                    .zip(&dir)
                    .map(|((b, c), d)| (b - c) * d)
                    .sum(),
                None => b.iter().zip(&dir).map(|(b, d)| b * d).sum(),
            })
        })
    }
}

fn face_sides(l0: [f64; 3], w: [f64; 3]) -> Result<[f64; 3]> {
    Ok([
        edge_length(l0[0], w[1], w[2])?,
        edge_length(l0[1], w[2], w[0])?,
        edge_length(l0[2], w[0], w[1])?,
    ])
}

fn check_face_point(l0: [f64; 3], w: [f64; 3]) -> Result<()> {
    face_sides(l0, w).map(|_| ())
}

/// `E(w)` for one face with base sides `l0_sides` (slot `t` opposite corner
/// `t`), integrated from the origin.
pub fn face_energy(l0_sides: [f64; 3], w: [f64; 3], q: QuadratureSpec) -> Result<f64> {
    Integrator::new(q)?.face_segment(l0_sides, [0.0; 3], w)
}

/// The same integral taken along the polyline `0 -> path[0] -> path[1] -> ...`.
pub fn face_energy_along(l0_sides: [f64; 3], path: &[[f64; 3]], q: QuadratureSpec) -> Result<f64> {
    let integrator = Integrator::new(q)?;
    let mut from = [0.0; 3];
    let mut total = 0.0;
    for &to in path {
        total += integrator.face_segment(l0_sides, from, to)?;
        from = to;
    }
    Ok(total)
}

/// `Ē(w) = Σ_faces E(w_{c0}, w_{c1}, w_{c2})`, with `Ē(0) = 0`.
pub fn total_energy(
    tri: &IdealTriangulation,
    l0: &Metric,
    w: &[f64],
    q: QuadratureSpec,
) -> Result<f64> {
    let integrator = Integrator::new(q)?;
    total_energy_with(&integrator, tri, l0, w)
}

pub fn total_energy_with(
    integrator: &Integrator,
    tri: &IdealTriangulation,
    l0: &Metric,
    w: &[f64],
) -> Result<f64> {
    if w.len() != tri.n_boundaries() {
        return Err(Error::DimensionMismatch {
            expected: tri.n_boundaries(),
            got: w.len(),
        });
    }
    let d = in_domain(tri, l0, w);
    if !d.inside {
        return Err(Error::Domain {
            edge: d.edge,
            margin: d.margin,
        });
    }
    let mut total = 0.0;
    for (k, face) in tri.faces().iter().enumerate() {
        let sides = tri.face_edge_positions(k).map(|p| l0.lengths()[p]);
        let wf = face.corners.map(|c| w[c - 1]);
        total += integrator.face_segment(sides, [0.0; 3], wf)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_surface;
    use approx::assert_relative_eq;

    const TETRA: &str = include_str!("../../../fixtures/tetra.surf");

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn zero_at_base_point() {
        assert_eq!(face_energy([1.0, 2.0, 0.5], [0.0; 3], q()).unwrap(), 0.0);
    }

    #[test]
    fn gradient_is_arcs() {
        let l0 = [1.1, 0.6, 2.3];
        let w = [0.1, 0.2, 0.3];
        let arcs = hexagon_arcs(face_sides(l0, w).unwrap()).unwrap();
        let h = 1e-4;
        for c in 0..3 {
            let f = |x: f64| {
                let mut v = w;
                v[c] = x;
                face_energy(l0, v, q()).unwrap()
            };
            let fd = (8.0 * (f(w[c] + h) - f(w[c] - h)) - (f(w[c] + 2.0 * h) - f(w[c] - 2.0 * h)))
                / (12.0 * h);
            assert_relative_eq!(fd, arcs[c], max_relative = 1e-6);
        }
    }

    #[test]
    fn path_independent() {
        let l0 = [1.1, 0.6, 2.3];
        let straight = face_energy(l0, [0.1, 0.2, 0.3], q()).unwrap();
        let bent = face_energy_along(l0, &[[0.05, 0.15, 0.1], [0.1, 0.2, 0.3]], q()).unwrap();
        assert!((straight - bent).abs() < 1e-8);
    }

    #[test]
    fn outside_domain_is_rejected() {
        let l0 = [0.5, 0.5, 0.5];
        assert!(matches!(
            face_energy(l0, [-1.0, -1.0, 0.0], q()),
            Err(Error::Domain { .. })
        ));
        let bad = QuadratureSpec { order: 1, ..q() };
        assert!(matches!(
            face_energy(l0, [0.1; 3], bad),
            Err(Error::Options(_))
        ));
        assert!(QuadratureSpec {
            tolerance: 0.0,
            ..q()
        }
        .check()
        .is_err());
        assert!(QuadratureSpec {
            max_depth: 0,
            ..q()
        }
        .check()
        .is_err());
    }

    #[test]
    fn total_is_concave_along_a_chord() {
        let (tri, l0) = parse_surface(TETRA).unwrap();
        let a = [0.3, -0.1, 0.2, 0.8];
        let b = [-0.1, 0.4, 0.9, 0.3];
        let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
        let ea = total_energy(&tri, &l0, &a, q()).unwrap();
        let eb = total_energy(&tri, &l0, &b, q()).unwrap();
        let em = total_energy(&tri, &l0, &mid, q()).unwrap();
        assert!(em > 0.5 * (ea + eb));
        assert_eq!(total_energy(&tri, &l0, &[0.0; 4], q()).unwrap(), 0.0);
    }

    #[test]
    fn segment_matches_difference_of_totals() {
        let (tri, l0) = parse_surface(TETRA).unwrap();
        let integrator = Integrator::new(q()).unwrap();
        let a = [0.3, -0.1, 0.2, 0.8];
        let b = [-0.1, 0.4, 0.9, 0.3];
        let seg = integrator.segment(&tri, &l0, &a, &b).unwrap();
        let diff =
            total_energy(&tri, &l0, &b, q()).unwrap() - total_energy(&tri, &l0, &a, q()).unwrap();
        assert!((seg - diff).abs() < 1e-9);
    }
}
