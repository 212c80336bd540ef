//! Scalar hyperbolic functions evaluated in the log domain.
//!
//! Side lengths grow without bound along the flow, so anything of the form
//! `cosh(l)` is carried as `ln cosh(l)` and only exponentiated once the
//! large factors have cancelled.

use std::f64::consts::LN_2;

/// Above this argument `cosh` and `sinh` agree with `e^x / 2` to full precision.
const LARGE: f64 = 20.0;

/// `ln cosh(x)`, finite for every finite `x`.
pub fn ln_cosh(x: f64) -> f64 {
    let x = x.abs();
    if x < 1.0 {
        // cosh x - 1 = 2 sinh^2(x/2), no cancellation near zero
        let s = (0.5 * x).sinh();
        (2.0 * s * s).ln_1p()
    } else {
        x - LN_2 + (-2.0 * x).exp().ln_1p()
    }
}

/// `ln sinh(x)` for `x > 0`.
pub fn ln_sinh(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < LARGE {
        x.sinh().ln()
    } else {
        x - LN_2 + (-(-2.0 * x).exp()).ln_1p()
    }
}

/// `ln(e^a + e^b)`.
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `asinh(y)` for `y >= 0`, accurate for tiny and huge `y`.
pub fn asinh(y: f64) -> f64 {
    if y > 1e150 {
        y.ln() + LN_2
    } else {
        let y2 = y * y;
        (y + y2 / (1.0 + (1.0 + y2).sqrt())).ln_1p()
    }
}

/// `asinh(e^h)` without forming `e^h` when it would overflow.
pub fn asinh_exp(h: f64) -> f64 {
    if h > 300.0 {
        h + LN_2
    } else {
        asinh(h.exp())
    }
}

/// `acosh(e^u)` for `u > 0`; stays accurate as `u -> 0`.
pub fn acosh_exp(u: f64) -> f64 {
    debug_assert!(u > 0.0);
    u + (-(-2.0 * u).exp_m1()).sqrt().ln_1p()
}

/// `acosh(x)` for `x >= 1` via `ln(x + sqrt((x-1)(x+1)))`, with a `ln_1p`
/// branch when `x` sits just above 1.
pub fn acosh(x: f64) -> f64 {
    let d = x - 1.0;
    if d < 1e-4 {
        (d + (d * (x + 1.0)).sqrt()).ln_1p()
    } else if x > 1e150 {
        x.ln() + LN_2
    } else {
        (x + (d * (x + 1.0)).sqrt()).ln()
    }
}

/// `coth(x) - 1 = 2 / (e^{2x} - 1)` for `x > 0`.
pub fn coth_minus_one(x: f64) -> f64 {
    2.0 / (2.0 * x).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ln_cosh_matches_direct_evaluation() {
        for &x in &[1e-8, 1e-3, 0.5, 0.999, 1.0, 3.0, 19.0, 25.0] {
            let direct = f64::cosh(x).ln();
            if x > 1e-3 {
                assert_relative_eq!(ln_cosh(x), direct, max_relative = 1e-13);
            }
        }
        // x^2/2 - x^4/12 near zero
        let x: f64 = 1e-6;
        assert_relative_eq!(ln_cosh(x), x * x / 2.0, max_relative = 1e-10);
        assert_relative_eq!(ln_cosh(1000.0), 1000.0 - LN_2, max_relative = 1e-15);
        assert_eq!(ln_cosh(-2.0), ln_cosh(2.0));
    }

    #[test]
    fn ln_sinh_both_branches() {
        for &x in &[1e-9, 0.1, 2.0, 19.9, 20.0, 20.1, 40.0] {
            assert_relative_eq!(ln_sinh(x).exp(), x.sinh(), max_relative = 1e-13);
        }
        assert_relative_eq!(ln_sinh(800.0), 800.0 - LN_2, max_relative = 1e-15);
    }

    #[test]
    fn asinh_and_acosh_agree_with_std() {
        for &y in &[1e-12, 1e-5, 0.3, 2.0, 1e10] {
            assert_relative_eq!(asinh(y), y.asinh(), max_relative = 1e-14);
        }
        assert_relative_eq!(asinh(1e-200), 1e-200, max_relative = 1e-15);
        for &x in &[1.0 + 1e-12, 1.00005, 1.5, 2.0, 1e12] {
            assert_relative_eq!(acosh(x), x.acosh(), max_relative = 1e-9);
        }
        assert_relative_eq!(acosh(2.0), (2.0 + 3f64.sqrt()).ln(), max_relative = 1e-15);
        assert_eq!(acosh(1.0), 0.0);
    }

    #[test]
    fn acosh_exp_small_and_large() {
        assert_relative_eq!(acosh_exp(2f64.ln()), 2f64.acosh(), max_relative = 1e-15);
        // acosh(1 + u) ~ sqrt(2u) for small u
        let u = 1e-14;
        assert_relative_eq!(acosh_exp(u), (2.0 * u).sqrt(), max_relative = 1e-6);
        assert_relative_eq!(acosh_exp(900.0), 900.0 + LN_2, max_relative = 1e-15);
    }

    #[test]
    fn ln_add_exp_is_symmetric_and_stable() {
        assert_relative_eq!(ln_add_exp(0.0, 0.0), LN_2);
        assert_eq!(ln_add_exp(1000.0, 1.0), ln_add_exp(1.0, 1000.0));
        assert_relative_eq!(ln_add_exp(1000.0, 1000.0), 1000.0 + LN_2);
        assert_eq!(ln_add_exp(3.0, f64::NEG_INFINITY), 3.0);
    }

    #[test]
    fn coth_minus_one_matches() {
        for &x in &[0.01, 0.7, 5.0] {
            assert_relative_eq!(
                coth_minus_one(x),
                1.0 / x.tanh() - 1.0,
                max_relative = 1e-10
            );
        }
        assert_eq!(coth_minus_one(800.0), 0.0);
    }
}
