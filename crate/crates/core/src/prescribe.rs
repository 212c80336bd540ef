//! Find the conformal factor with prescribed boundary lengths.
//!
//! `ψ: w -> B(w)` is a homeomorphism from the domain onto the positive
//! orthant, so every positive target `B̂` has exactly one preimage. It is the
//! maximiser of the strictly concave `G(w) = Ē(w) - <B̂, w>`, whose gradient
//! is `B(w) - B̂` and whose Hessian is `H(w)`. We run damped Newton on `G`
//! from `w = 0`.

use std::fmt;

use nalgebra::DVector;

use crate::conformal::{assemble_jacobian, evaluate, in_domain};
use crate::energy::{Integrator, QuadratureSpec};
use crate::error::{Error, Result};
use crate::surface::{IdealTriangulation, Metric};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Stop once `‖B(w) - B̂‖_∞` is at most this.
    pub grad_tol: f64,
    pub max_iter: usize,
    pub backtrack: f64,
    /// Smallest step fraction tried before the line search gives up.
    pub min_step: f64,
    /// Iterates keep `e^{w_a + w_b} cosh(l0/2) - 1 > margin` on every edge.
    pub margin: f64,
    pub armijo: f64,
    pub quadrature: QuadratureSpec,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-11,
            max_iter: 100,
            backtrack: 0.5,
            min_step: 1e-12,
            margin: 1e-12,
            armijo: 1e-4,
            quadrature: QuadratureSpec::default(),
        }
    }
}

impl SolveOptions {
    pub fn check(&self) -> Result<()> {
        if !(self.grad_tol > 0.0 && self.grad_tol.is_finite()) {
            return Err(Error::Options(format!(
                "grad_tol must be positive, got {}",
                self.grad_tol
            )));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::Options(format!(
                "backtrack must lie in (0, 1), got {}",
                self.backtrack
            )));
        }
        if !(self.min_step > 0.0 && self.min_step < 1.0) {
            return Err(Error::Options(format!(
                "min_step must lie in (0, 1), got {}",
                self.min_step
            )));
        }
        if !(self.margin >= 0.0 && self.margin.is_finite()) {
            return Err(Error::Options(format!(
                "margin must be non-negative, got {}",
                self.margin
            )));
        }
        if !(self.armijo > 0.0 && self.armijo < 0.5) {
            return Err(Error::Options(format!(
                "armijo must lie in (0, 0.5), got {}",
                self.armijo
            )));
        }
        self.quadrature.check()
    }
}

impl fmt::Display for SolveOptions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "grad_tol={:e} max_iter={} backtrack={} min_step={:e} margin={:e} armijo={:e} quadrature_order={} quadrature_tol={:e}",
            self.grad_tol,
            self.max_iter,
            self.backtrack,
            self.min_step,
            self.margin,
            self.armijo,
            self.quadrature.order,
            self.quadrature.tolerance
        )
    }
}

/// How an iteration picked its direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Newton,
    /// `-H` failed to factor; a scaled gradient step was used instead.
    Gradient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Iteration {
    /// Residual `‖B(w) - B̂‖_∞` after the step.
    pub residual: f64,
    /// Increase of `G` over this step, always positive.
    pub gain: f64,
    /// `G(w) - G(w⁰)` after the step.
    pub objective: f64,
    pub step: f64,
    pub kind: StepKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub w: Vec<f64>,
    pub converged: bool,
    pub residual: f64,
    /// Residual at the start point.
    pub initial_residual: f64,
    pub history: Vec<Iteration>,
}

impl SolveResult {
    pub fn iterations(&self) -> usize {
        self.history.len()
    }
}

fn check_target(tri: &IdealTriangulation, target: &[f64]) -> Result<()> {
    if target.len() != tri.n_boundaries() {
        return Err(Error::DimensionMismatch {
            expected: tri.n_boundaries(),
            got: target.len(),
        });
    }
    for (k, &v) in target.iter().enumerate() {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::TargetNotPositive {
                index: k + 1,
                value: v,
            });
        }
    }
    Ok(())
}

fn residual(b: &[f64], target: &[f64]) -> f64 {
    b.iter()
        .zip(target)
        .map(|(b, t)| (b - t).abs())
        .fold(0.0, f64::max)
}

/// Solve `B(w) = target` starting from `w = 0`.
///
/// Fails with [`Error::MaxIterations`] when the cap is reached; use
/// [`newton`] to get the partial iterate instead.
pub fn solve_prescribed(
    tri: &IdealTriangulation,
    l0: &Metric,
    target: &[f64],
    opts: &SolveOptions,
) -> Result<SolveResult> {
    solve_prescribed_from(tri, l0, target, &vec![0.0; tri.n_boundaries()], opts)
}

/// As [`solve_prescribed`] from an arbitrary in-domain start.
pub fn solve_prescribed_from(
    tri: &IdealTriangulation,
    l0: &Metric,
    target: &[f64],
    start: &[f64],
    opts: &SolveOptions,
) -> Result<SolveResult> {
    let r = newton(tri, l0, target, start, opts)?;
    if r.converged {
        Ok(r)
    } else {
        Err(Error::MaxIterations {
            iterations: r.iterations(),
            residual: r.residual,
        })
    }
}

/// Damped Newton ascent on `G`. Returns the last iterate whether or not it
/// converged within `max_iter`.
pub fn newton(
    tri: &IdealTriangulation,
    l0: &Metric,
    target: &[f64],
    start: &[f64],
    opts: &SolveOptions,
) -> Result<SolveResult> {
    opts.check()?;
    check_target(tri, target)?;
    if start.len() != tri.n_boundaries() {
        return Err(Error::DimensionMismatch {
            expected: tri.n_boundaries(),
            got: start.len(),
        });
    }
    let inside = |w: &[f64]| {
        let d = in_domain(tri, l0, w);
        d.inside && d.margin.exp_m1() > opts.margin
    };
    if !inside(start) {
        let d = in_domain(tri, l0, start);
        return Err(Error::Domain {
            edge: d.edge,
            margin: d.margin,
        });
    }
    let integrator = Integrator::new(opts.quadrature)?;

    let mut w = start.to_vec();
    let mut geom = evaluate(tri, l0, &w)?;
    let mut res = residual(&geom.boundary, target);
    let initial_residual = res;
    let mut objective = 0.0;
    let mut history = Vec::new();

    while res > opts.grad_tol {
        if history.len() >= opts.max_iter {
            return Ok(SolveResult {
                w,
                converged: false,
                residual: res,
                initial_residual,
                history,
            });
        }
        let iteration = history.len() + 1;
        let h = assemble_jacobian(tri, &geom);
        let g = DVector::from_iterator(
            w.len(),
            geom.boundary.iter().zip(target).map(|(b, t)| b - t),
        );
        let (dir, kind) = match (-&h).cholesky() {
            Some(chol) => (chol.solve(&g), StepKind::Newton),
            None => {
                let norm = h
                    .row_iter()
                    .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
                    .fold(0.0, f64::max);
                (&g / norm, StepKind::Gradient)
            }
        };
        let slope = g.dot(&dir);
        if !(slope > 0.0) {
            return Err(Error::LineSearch {
                iteration,
                residual: res,
            });
        }

        let mut alpha = 1.0;
        let accepted = loop {
            if alpha < opts.min_step {
                break None;
            }
            let trial: Vec<f64> = w
                .iter()
                .zip(dir.iter())
                .map(|(w, d)| w + alpha * d)
                .collect();
            if inside(&trial) {
                let gain = integrator.shifted_segment(tri, l0, &w, &trial, Some(target))?;
                if gain > 0.0 && gain >= opts.armijo * alpha * slope {
                    break Some((trial, gain));
                }
            }
            alpha *= opts.backtrack;
        };
        let Some((next, gain)) = accepted else {
            return Err(Error::LineSearch {
                iteration,
                residual: res,
            });
        };
        geom = evaluate(tri, l0, &next)?;
        w = next;
        res = residual(&geom.boundary, target);
        objective += gain;
        history.push(Iteration {
            residual: res,
            gain,
            objective,
            step: alpha,
            kind,
        });
    }
    Ok(SolveResult {
        w,
        converged: true,
        residual: res,
        initial_residual,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::boundary_lengths;
    use crate::surface::parse_surface;

    const PANTS: &str = include_str!("../../../fixtures/pants.surf");
    const TETRA: &str = include_str!("../../../fixtures/tetra.surf");

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn target_at_origin_is_a_fixed_point() {
        let (tri, l0) = parse_surface(PANTS).unwrap();
        let target = boundary_lengths(&tri, &l0, &[0.0; 3]).unwrap();
        let r = solve_prescribed(&tri, &l0, &target, &SolveOptions::default()).unwrap();
        assert!(r.iterations() <= 1);
        assert!(max_diff(&r.w, &[0.0; 3]) < 1e-10);
    }

    #[test]
    fn recovers_known_factor() {
        let (tri, l0) = parse_surface(PANTS).unwrap();
        let w_star = [0.1, 0.2, 0.3];
        let target = boundary_lengths(&tri, &l0, &w_star).unwrap();
        let r = solve_prescribed(&tri, &l0, &target, &SolveOptions::default()).unwrap();
        assert!(max_diff(&r.w, &w_star) < 1e-8, "{:?}", r.w);
        assert!(r.residual <= 1e-11);
        assert!(r.history.iter().all(|it| it.gain > 0.0));
        assert!(r.history.iter().all(|it| it.kind == StepKind::Newton));
    }

    #[test]
    fn rejects_non_positive_targets() {
        let (tri, l0) = parse_surface(PANTS).unwrap();
        let err =
            solve_prescribed(&tri, &l0, &[1.0, 0.0, 1.0], &SolveOptions::default()).unwrap_err();
        assert_eq!(
            err,
            Error::TargetNotPositive {
                index: 2,
                value: 0.0
            }
        );
        assert!(err.to_string().contains("target must be strictly positive"));
        assert!(
            solve_prescribed(&tri, &l0, &[1.0, f64::NAN, 1.0], &SolveOptions::default()).is_err()
        );
        assert!(matches!(
            solve_prescribed(&tri, &l0, &[1.0, 1.0], &SolveOptions::default()),
            Err(Error::DimensionMismatch {
                expected: 3,
                got: 2
            })
        ));
    }

    #[test]
    fn iteration_cap_reports_partial_progress() {
        let (tri, l0) = parse_surface(PANTS).unwrap();
        let opts = SolveOptions {
            max_iter: 1,
            ..Default::default()
        };
        let target = [1e-3, 2e-3, 5e-3];
        let err = solve_prescribed(&tri, &l0, &target, &opts).unwrap_err();
        assert!(matches!(err, Error::MaxIterations { iterations: 1, .. }));
        let r = newton(&tri, &l0, &target, &[0.0; 3], &opts).unwrap();
        assert!(!r.converged);
        assert!(r.residual < r.initial_residual);
    }

    #[test]
    fn extreme_targets() {
        let (tri, l0) = parse_surface(TETRA).unwrap();
        let cases = [
            ([1e-3, 0.5, 2.0, 1e-2], 1e-11),
            ([8.0, 6.0, 10.0, 7.0], 1e-11),
            // B is so stiff in w here that 1e-11 is below rounding of w
            ([0.05, 20.0, 0.05, 20.0], 1e-8),
        ];
        for (target, grad_tol) in cases {
            let opts = SolveOptions {
                grad_tol,
                ..Default::default()
            };
            let r = solve_prescribed(&tri, &l0, &target, &opts).unwrap();
            let b = boundary_lengths(&tri, &l0, &r.w).unwrap();
            for (b, t) in b.iter().zip(&target) {
                assert!((b - t).abs() <= grad_tol);
            }
        }
    }

    #[test]
    fn targets_beyond_the_margin_fail_cleanly() {
        // needs edges so short that the domain margin is below 1e-12
        let (tri, l0) = parse_surface(TETRA).unwrap();
        let err = solve_prescribed(
            &tri,
            &l0,
            &[30.0, 25.0, 40.0, 35.0],
            &SolveOptions::default(),
        )
        .unwrap_err();
        assert!(err.is_numeric(), "{err}");
    }

    #[test]
    fn start_outside_domain_is_rejected() {
        let (tri, l0) = parse_surface(PANTS).unwrap();
        let r = solve_prescribed_from(&tri, &l0, &[1.0; 3], &[-2.0; 3], &SolveOptions::default());
        assert!(matches!(r, Err(Error::Domain { .. })));
    }

    #[test]
    fn bad_options() {
        let (tri, l0) = parse_surface(PANTS).unwrap();
        for opts in [
            SolveOptions {
                grad_tol: 0.0,
                ..Default::default()
            },
            SolveOptions {
                backtrack: 1.0,
                ..Default::default()
            },
            SolveOptions {
                margin: -1.0,
                ..Default::default()
            },
        ] {
            assert!(matches!(
                solve_prescribed(&tri, &l0, &[1.0; 3], &opts),
                Err(Error::Options(_))
            ));
        }
    }
}
