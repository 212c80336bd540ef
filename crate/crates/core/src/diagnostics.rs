//! Numerical certification of the Jacobians: symmetry, negative
//! definiteness and agreement with central finite differences.

use std::fmt;

use nalgebra::{DMatrix, Matrix3, SymmetricEigen};
use rand::Rng;

use crate::conformal::{assemble_jacobian, boundary_lengths, edge_length, evaluate, in_domain};
use crate::error::Result;
use crate::hexagon::{arc_jacobian_with_arcs, hexagon_arcs};
use crate::surface::{IdealTriangulation, Metric};

/// Default finite-difference step in `w`.
pub const FD_STEP: f64 = 1e-5;

/// Draw `w` uniformly from `[lo, hi]^n` until every edge has log margin at
/// least `min_margin`. Gives up after `max_tries` draws.
pub fn sample_in_domain<R: Rng + ?Sized>(
    rng: &mut R,
    tri: &IdealTriangulation,
    l0: &Metric,
    (lo, hi): (f64, f64),
    min_margin: f64,
    max_tries: usize,
) -> Option<Vec<f64>> {
    (0..max_tries).find_map(|_| {
        let w: Vec<f64> = (0..tri.n_boundaries())
            .map(|_| rng.gen_range(lo..=hi))
            .collect();
        (in_domain(tri, l0, &w).margin >= min_margin).then_some(w)
    })
}

/// Five-point central difference of `f: R^n -> R^m`, column by column.
pub fn central_difference(
    n: usize,
    x: &[f64],
    h: f64,
    mut f: impl FnMut(&[f64]) -> Result<Vec<f64>>,
) -> Result<DMatrix<f64>> {
    let mut cols = Vec::with_capacity(n);
    let mut y = x.to_vec();
    for s in 0..n {
        let mut at = |d: f64| {
            y[s] = x[s] + d;
            let v = f(&y);
            y[s] = x[s];
            v
        };
        let (p2, p1, m1, m2) = (at(2.0 * h)?, at(h)?, at(-h)?, at(-2.0 * h)?);
        cols.push(
            (0..p1.len())
                .map(|r| (8.0 * (p1[r] - m1[r]) - (p2[r] - m2[r])) / (12.0 * h))
                .collect::<Vec<f64>>(),
        );
    }
    let m = cols.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(m, n, |r, c| cols[c][r]))
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// `max|A - Aᵀ| / max|A|`.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    max_abs(&(m - m.transpose())) / max_abs(m)
}

/// `max|A - B| / max|B|`.
pub fn relative_deviation(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    max_abs(&(a - b)) / max_abs(b)
}

/// Largest eigenvalue of the symmetric part.
pub fn max_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Worst-case deviations seen over one or more sample points. Each figure
/// is the maximum over the per-face `J` and the assembled `H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianCheck {
    pub samples: usize,
    pub symmetry: f64,
    pub finite_difference: f64,
    /// Largest eigenvalue, scaled by the largest entry magnitude.
    pub max_eigenvalue: f64,
}

impl Default for JacobianCheck {
    fn default() -> Self {
        Self {
            samples: 0,
            symmetry: 0.0,
            finite_difference: 0.0,
            max_eigenvalue: f64::NEG_INFINITY,
        }
    }
}

pub const SYMMETRY_TOL: f64 = 1e-12;
pub const FD_TOL: f64 = 1e-6;

impl JacobianCheck {
    pub fn merge(&mut self, other: &JacobianCheck) {
        self.samples += other.samples;
        self.symmetry = self.symmetry.max(other.symmetry);
        self.finite_difference = self.finite_difference.max(other.finite_difference);
        self.max_eigenvalue = self.max_eigenvalue.max(other.max_eigenvalue);
    }

    fn record(&mut self, analytic: &DMatrix<f64>, fd: &DMatrix<f64>) {
        self.symmetry = self.symmetry.max(asymmetry(analytic));
        self.finite_difference = self.finite_difference.max(relative_deviation(analytic, fd));
        self.max_eigenvalue = self
            .max_eigenvalue
            .max(max_eigenvalue(analytic) / max_abs(analytic));
    }

    pub fn passes(&self) -> bool {
        self.symmetry <= SYMMETRY_TOL
            && self.finite_difference <= FD_TOL
            && self.max_eigenvalue < 0.0
    }
}

impl fmt::Display for JacobianCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "samples={} symmetry={:e} finite_difference={:e} max_eigenvalue={:e}",
            self.samples, self.symmetry, self.finite_difference, self.max_eigenvalue
        )
    }
}

fn to_dmatrix(m: &Matrix3<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(3, 3, |r, c| m[(r, c)])
}

/// Check every face `J` and the assembled `H` at `w`.
pub fn check_jacobians_at(
    tri: &IdealTriangulation,
    l0: &Metric,
    w: &[f64],
    h: f64,
) -> Result<JacobianCheck> {
    let mut check = JacobianCheck {
        samples: 1,
        ..Default::default()
    };
    let g = evaluate(tri, l0, w)?;
    for (k, face) in tri.faces().iter().enumerate() {
        let base = tri.face_edge_positions(k).map(|p| l0.lengths()[p]);
        let local = face.corners.map(|c| w[c - 1]);
        let j = to_dmatrix(&arc_jacobian_with_arcs(g.sides[k], g.arcs[k]));
        let fd = central_difference(3, &local, h, |x| {
            let sides = [
                edge_length(base[0], x[1], x[2])?,
                edge_length(base[1], x[2], x[0])?,
                edge_length(base[2], x[0], x[1])?,
            ];
            Ok(hexagon_arcs(sides)?.to_vec())
        })?;
        check.record(&j, &fd);
    }
    let hm = assemble_jacobian(tri, &g);
    let fd = central_difference(w.len(), w, h, |x| {
        Ok(boundary_lengths(tri, l0, x)?.into_inner())
    })?;
    check.record(&hm, &fd);
    Ok(check)
}

/// Check at `samples` random points of `[-0.2, 1]^n` with log margin at
/// least `0.01`, so the finite-difference stencil stays well inside.
pub fn certify_jacobians<R: Rng + ?Sized>(
    rng: &mut R,
    tri: &IdealTriangulation,
    l0: &Metric,
    samples: usize,
) -> Result<JacobianCheck> {
    let mut total = JacobianCheck::default();
    for _ in 0..samples {
        let w = sample_in_domain(rng, tri, l0, (-0.2, 1.0), 0.01, 10_000)
            .unwrap_or_else(|| vec![0.0; tri.n_boundaries()]);
        total.merge(&check_jacobians_at(tri, l0, &w, FD_STEP)?);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_surface;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn difference_of_a_cubic_is_exact() {
        let d = central_difference(2, &[1.0, 2.0], 0.1, |x| {
            Ok(vec![x[0].powi(3) * x[1], x[1] * x[1]])
        })
        .unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[6.0, 1.0, 0.0, 4.0]);
        assert!(relative_deviation(&d, &want) < 1e-13);
    }

    #[test]
    fn matrix_measures() {
        let m = DMatrix::from_row_slice(2, 2, &[-2.0, 1.0, 1.0, -2.0]);
        assert_eq!(asymmetry(&m), 0.0);
        assert!((max_eigenvalue(&m) + 1.0).abs() < 1e-14);
        let a = DMatrix::from_row_slice(2, 2, &[-2.0, 1.0, 0.5, -2.0]);
        assert_eq!(asymmetry(&a), 0.25);
    }

    #[test]
    fn sampler_respects_margin() {
        let (tri, l0) = parse_surface(include_str!("../../../fixtures/tetra.surf")).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let w = sample_in_domain(&mut rng, &tri, &l0, (-0.2, 1.0), 0.01, 1000).unwrap();
            assert!(w.iter().all(|&x| (-0.2..=1.0).contains(&x)));
            assert!(in_domain(&tri, &l0, &w).margin >= 0.01);
        }
        assert!(sample_in_domain(&mut rng, &tri, &l0, (-50.0, -40.0), 0.01, 10).is_none());
    }

    #[test]
    fn fixtures_certify() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for src in [
            include_str!("../../../fixtures/pants.surf"),
            include_str!("../../../fixtures/torus1.surf"),
        ] {
            let (tri, l0) = parse_surface(src).unwrap();
            let c = certify_jacobians(&mut rng, &tri, &l0, 20).unwrap();
            assert!(c.passes(), "{c}");
            assert_eq!(c.samples, 20);
        }
    }
}
