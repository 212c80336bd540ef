//! Right-angled hyperbolic hexagons.
//!
//! A right-angled hexagon is fixed up to isometry by three pairwise
//! non-adjacent sides. In a face of an ideal triangulation those are the
//! three edges, and the alternate sides are boundary arcs. Slot `t` of a
//! side triple is the side opposite corner `t`, so for corners `(i, j, k)`
//! the sides are `(l_jk, l_ki, l_ij)` and the arcs `(θ^i, θ^j, θ^k)`.
//!
//! The cosine law
//!
//! ```text
//! cosh θ^k = (cosh l_ij + cosh l_jk cosh l_ki) / (sinh l_jk sinh l_ki)
//! ```
//!
//! is evaluated through the equivalent half-angle form
//!
//! ```text
//! sinh²(θ^k/2) = (cosh l_ij + cosh(l_jk - l_ki)) / (2 sinh l_jk sinh l_ki)
//! ```
//!
//! in the log domain. It has no cancellation as `θ -> 0` and no overflow for
//! long sides. The dual law (arcs to sides) has the same shape.

use std::f64::consts::LN_2;

use nalgebra::Matrix3;

use crate::error::{check_positive, Error, Result};
use crate::hyperbolic::{asinh_exp, coth_minus_one, ln_add_exp, ln_cosh, ln_sinh};

/// Sides and arcs of one right-angled hexagon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexagonGeometry {
    /// `(l_jk, l_ki, l_ij)`.
    pub sides: [f64; 3],
    /// `(θ^i, θ^j, θ^k)`, arc `t` opposite side `t`.
    pub arcs: [f64; 3],
}

impl HexagonGeometry {
    pub fn from_sides(sides: [f64; 3]) -> Result<Self> {
        Ok(Self {
            sides,
            arcs: hexagon_arcs(sides)?,
        })
    }

    pub fn from_arcs(arcs: [f64; 3]) -> Result<Self> {
        Ok(Self {
            sides: hexagon_sides(arcs)?,
            arcs,
        })
    }
}

/// The length `v` with `cosh v = (cosh opp + cosh p cosh q) / (sinh p sinh q)`.
fn opposite(p: f64, q: f64, opp: f64) -> f64 {
    let ln_half_cosh_minus_one =
        ln_add_exp(ln_cosh(opp), ln_cosh(p - q)) - LN_2 - ln_sinh(p) - ln_sinh(q);
    2.0 * asinh_exp(0.5 * ln_half_cosh_minus_one)
}

fn check_triple(what: &'static str, v: [f64; 3]) -> Result<()> {
    for x in v {
        check_positive(what, x)?;
    }
    Ok(())
}

/// Boundary arcs `(θ^i, θ^j, θ^k)` of the hexagon with sides `(l_jk, l_ki, l_ij)`.
///
/// Any positive triple is realizable. Arcs underflow to zero only once sides
/// exceed roughly 1400.
pub fn hexagon_arcs(sides: [f64; 3]) -> Result<[f64; 3]> {
    check_triple("hexagon side", sides)?;
    let [x, y, z] = sides;
    Ok([opposite(y, z, x), opposite(z, x, y), opposite(x, y, z)])
}

/// Sides `(l_jk, l_ki, l_ij)` of the hexagon with arcs `(θ^i, θ^j, θ^k)`.
pub fn hexagon_sides(arcs: [f64; 3]) -> Result<[f64; 3]> {
    check_triple("hexagon arc", arcs)?;
    let [ti, tj, tk] = arcs;
    Ok([
        opposite(tj, tk, ti),
        opposite(tk, ti, tj),
        opposite(ti, tj, tk),
    ])
}

/// The symmetric matrix `M` of the derivative cosine law, written in terms of
/// `a = cosh l_jk`, `b = cosh l_ki`, `c = cosh l_ij`:
///
/// ```text
/// M11 = (c+ab)/(b-1) + (b+ac)/(c-1)    M12 = (a+b-c+1)/(c-1)
/// M22 = (c+ab)/(a-1) + (a+bc)/(c-1)    M13 = (a+c-b+1)/(b-1)
/// M33 = (b+ac)/(a-1) + (a+bc)/(b-1)    M23 = (b+c-a+1)/(a-1)
/// ```
///
/// `M` factors as `diag(sinh l) · C · diag(coth(l/2)) · P` where `C` has `-1`
/// on the diagonal and `cosh θ` of the remaining corner off it, and `P` is
/// the all-ones matrix minus the identity. From that factorization
///
/// ```text
/// det M = 2 · (sinh l_jk sinh l_ki sinh l_ij)² · (sinh θ^i sinh θ^j sinh l_ij)²
///           / ((cosh l_jk - 1)(cosh l_ki - 1)(cosh l_ij - 1))
/// ```
///
/// which is positive; the unit tests check this identity numerically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientMatrix {
    pub m: Matrix3<f64>,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Build `M` from `a, b, c > 1`.
pub fn coefficient_matrix(a: f64, b: f64, c: f64) -> Result<CoefficientMatrix> {
    for v in [a, b, c] {
        if !(v > 1.0 && v.is_finite()) {
            return Err(Error::CoshBelowOne { value: v });
        }
    }
    Ok(coefficient_matrix_parts(
        [a, b, c],
        [a - 1.0, b - 1.0, c - 1.0],
    ))
}

/// Same as [`coefficient_matrix`] with `cosh - 1` supplied separately, which
/// keeps precision for short sides.
fn coefficient_matrix_parts(cosh: [f64; 3], cosh_m1: [f64; 3]) -> CoefficientMatrix {
    let [a, b, c] = cosh;
    let [am1, bm1, cm1] = cosh_m1;
    let cab = c + a * b;
    let bac = b + a * c;
    let abc = a + b * c;
    let m12 = (a + b - c + 1.0) / cm1;
    let m13 = (a + c - b + 1.0) / bm1;
    let m23 = (b + c - a + 1.0) / am1;
    let m = Matrix3::new(
        cab / bm1 + bac / cm1,
        m12,
        m13,
        m12,
        cab / am1 + abc / cm1,
        m23,
        m13,
        m23,
        bac / am1 + abc / bm1,
    );
    CoefficientMatrix { m, a, b, c }
}

/// `J = ∂(θ^i, θ^j, θ^k) / ∂(w_i, w_j, w_k)` for a face whose current sides
/// are `(l_jk, l_ki, l_ij)`, where each side depends on the factors of the
/// two corners it joins through `cosh(l/2) = e^{w_a+w_b} cosh(l0/2)`.
///
/// `J` equals `-2 / (sinh θ^k sinh l_ki sinh l_jk) · M`. The prefactor looks
/// tied to corner `k`, but by the sine law
/// `sinh θ^i / sinh l_jk = sinh θ^j / sinh l_ki = sinh θ^k / sinh l_ij`
/// it is symmetric. Using the cosine and sine laws entry by entry gives
///
/// ```text
/// J_rr = -2 Σ_{u≠r} coth θ_v / (cosh l_u - 1)                (v the third corner)
/// J_rs = -2 (coth(l_r/2) coth(l_s/2) - cosh θ_t) / ((cosh l_t - 1) sinh θ_t)
/// ```
///
/// with `{r, s, t} = {0, 1, 2}`. Every factor is formed in the log domain, so
/// this is finite for arbitrarily long sides, and each off-diagonal entry is
/// computed once, so the result is exactly symmetric.
pub fn arc_jacobian(sides: [f64; 3]) -> Result<Matrix3<f64>> {
    let arcs = hexagon_arcs(sides)?;
    Ok(arc_jacobian_with_arcs(sides, arcs))
}

pub(crate) fn arc_jacobian_with_arcs(sides: [f64; 3], arcs: [f64; 3]) -> Matrix3<f64> {
    // ln(cosh l - 1) = ln 2 + 2 ln sinh(l/2)
    let ln_cosh_m1 = sides.map(|l| LN_2 + 2.0 * ln_sinh(0.5 * l));
    let ln_coth_arc = arcs.map(|t| -t.tanh().ln());
    let half_coth_m1 = sides.map(|l| coth_minus_one(0.5 * l));

    let mut j = Matrix3::zeros();
    for r in 0..3 {
        let mut diag = 0.0;
        for u in (0..3).filter(|&u| u != r) {
            let v = 3 - r - u;
            diag += (ln_coth_arc[v] - ln_cosh_m1[u]).exp();
        }
        j[(r, r)] = -2.0 * diag;
    }
    for t in 0..3 {
        let (r, s) = ((t + 1) % 3, (t + 2) % 3);
        let (cr, cs) = (half_coth_m1[r], half_coth_m1[s]);
        let sh = (0.5 * arcs[t]).sinh();
        // coth(l_r/2) coth(l_s/2) - cosh θ_t, without cancelling the leading 1
        let gap = cr + cs + cr * cs - 2.0 * sh * sh;
        let off = -2.0 * gap * (-ln_cosh_m1[t] - ln_sinh(arcs[t])).exp();
        j[(r, s)] = off;
        j[(s, r)] = off;
    }
    j
}

/// `J` evaluated literally as `-2 / (sinh θ^k sinh l_ki sinh l_jk) · M(a, b, c)`.
///
/// Overflows once sides pass a few hundred; it serves as an independent
/// algebraic route for checking [`arc_jacobian`].
pub fn arc_jacobian_from_coefficients(sides: [f64; 3]) -> Result<Matrix3<f64>> {
    let arcs = hexagon_arcs(sides)?;
    let cosh = sides.map(f64::cosh);
    let cosh_m1 = sides.map(|l| {
        let s = (0.5 * l).sinh();
        2.0 * s * s
    });
    let cm = coefficient_matrix_parts(cosh, cosh_m1);
    let scale = -2.0 / (arcs[2].sinh() * sides[1].sinh() * sides[0].sinh());
    Ok(cm.m * scale)
}
