//! Gauss–Legendre rules and adaptive bisection on top of them.

use crate::error::{Error, Result};

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Returns the integral of `f` over `[a, b]` and of `|f|`.
    pub fn integrate<F>(&self, f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        let mut abs = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = w * f(mid + half * x)?;
            sum += v;
            abs += v.abs();
        }
        Ok((sum * half, abs * half.abs()))
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrate `f` over `[a, b]`: compare the rule on an interval with the sum
/// over its halves and bisect until they agree to `tolerance` (absolute,
/// split between halves) or to rounding level.
pub fn integrate_adaptive<F>(
    rule: &GaussLegendre,
    f: &mut F,
    a: f64,
    b: f64,
    tolerance: f64,
    max_depth: u32,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (whole, _) = rule.integrate(f, a, b)?;
    refine(rule, f, a, b, whole, tolerance, max_depth, 1)
}

#[allow(clippy::too_many_arguments)]
fn refine<F>(
    rule: &GaussLegendre,
    f: &mut F,
    a: f64,
    b: f64,
    whole: f64,
    tolerance: f64,
    max_depth: u32,
    depth: u32,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mid = 0.5 * (a + b);
    let (left, left_abs) = rule.integrate(f, a, mid)?;
    let (right, right_abs) = rule.integrate(f, mid, b)?;
    let halves = left + right;
    let error = (halves - whole).abs();
    let floor = 64.0 * f64::EPSILON * (left_abs + right_abs);
    if error <= tolerance.max(floor) {
        return Ok(halves);
    }
    if depth >= max_depth {
        return Err(Error::Quadrature {
            depth,
            estimate: halves,
            error,
        });
    }
    let l = refine(rule, f, a, mid, left, 0.5 * tolerance, max_depth, depth + 1)?;
    let r = refine(
        rule,
        f,
        mid,
        b,
        right,
        0.5 * tolerance,
        max_depth,
        depth + 1,
    )?;
    Ok(l + r)
}
