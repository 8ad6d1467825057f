//! Scalar root finding and real-root isolation for small polynomials.

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 200;

/// Root of `f` on a bracket `[lo, hi]` with `f(lo)` and `f(hi)` of opposite sign.
///
/// Secant steps alternate with bisection steps, so the bracket at least halves every
/// two iterations. Iteration runs until the bracket is a few ulps wide (or `f` hits
/// zero): the result is as accurate as `f` itself allows, well inside a relative
/// tolerance of 1e-12.
pub fn bracketed_root<F>(mut f: F, lo: f64, hi: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::InvalidInput(format!(
            "bracket [{a}, {b}] does not enclose a sign change"
        )));
    }
    for it in 0..MAX_ITERATIONS {
        let mid = 0.5 * (a + b);
        let secant = b - fb * (b - a) / (fb - fa);
        let x = if it % 2 == 0 && secant > a && secant < b {
            secant
        } else {
            mid
        };
        if x <= a || x >= b {
            return Ok(if fa.abs() < fb.abs() { a } else { b });
        }
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        let scale = a.abs().max(b.abs());
        if b - a <= 4.0 * f64::EPSILON * scale || b - a < f64::MIN_POSITIVE {
            return Ok(if fa.abs() < fb.abs() { a } else { b });
        }
    }
    Err(Error::Convergence {
        iterations: MAX_ITERATIONS,
    })
}

/// Evaluate a polynomial given by ascending coefficients.
pub fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

pub fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect()
}

fn trim(coeffs: &[f64]) -> &[f64] {
    let mut n = coeffs.len();
    while n > 0 && coeffs[n - 1] == 0.0 {
        n -= 1;
    }
    &coeffs[..n]
}

/// Number of sign changes in the coefficient sequence, zeros skipped.
pub fn sign_changes(coeffs: &[f64]) -> usize {
    let mut last = 0.0_f64;
    let mut count = 0;
    for &c in coeffs.iter().filter(|c| **c != 0.0) {
        if last != 0.0 && c.signum() != last.signum() {
            count += 1;
        }
        last = c;
    }
    count
}

/// Cauchy's upper bound on the moduli of all roots.
pub fn cauchy_bound(coeffs: &[f64]) -> f64 {
    let c = trim(coeffs);
    match c.len() {
        0 | 1 => 0.0,
        n => {
            let lead = c[n - 1].abs();
            1.0 + c[..n - 1].iter().map(|x| x.abs() / lead).fold(0.0, f64::max)
        }
    }
}

/// All real roots in the open interval `(lo, hi)` at which the polynomial changes sign.
///
/// The interval is split at the real roots of the derivative (found recursively),
/// on each piece the polynomial is monotone, so a sign change brackets exactly one root.
pub fn real_roots_in(coeffs: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let c = trim(coeffs);
    if c.len() < 2 || lo >= hi {
        return Vec::new();
    }
    if c.len() == 2 {
        let x = -c[0] / c[1];
        return if x > lo && x < hi { vec![x] } else { Vec::new() };
    }
    let mut knots = vec![lo];
    knots.extend(real_roots_in(&poly_derivative(c), lo, hi));
    knots.push(hi);
    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (poly_eval(c, a), poly_eval(c, b));
        if fb == 0.0 && b < hi {
            if roots.last() != Some(&b) {
                roots.push(b);
            }
            continue;
        }
        if fa != 0.0 && fa.signum() != fb.signum() {
            if let Ok(x) = bracketed_root(|x| poly_eval(c, x), a, b) {
                roots.push(x);
            }
        }
    }
    roots
}

/// Positive real roots, isolated on `(0, R]` with `R` the Cauchy bound.
pub fn positive_roots(coeffs: &[f64]) -> Vec<f64> {
    let bound = cauchy_bound(coeffs);
    real_roots_in(coeffs, 0.0, bound * (1.0 + 1e-12) + f64::MIN_POSITIVE)
}

/// All real roots (sign-changing), ascending.
pub fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let bound = cauchy_bound(coeffs) * (1.0 + 1e-12) + 1e-300;
    let mut roots = real_roots_in(coeffs, -bound, bound);
    let c = trim(coeffs);
    if !c.is_empty() && c[0] == 0.0 && !roots.contains(&0.0) {
        roots.push(0.0);
        roots.sort_by(f64::total_cmp);
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let x = bracketed_root(|x| x * x - 2.0, 0.0, 2.0).unwrap();
        assert!((x - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_bracket() {
        assert!(bracketed_root(|x| x * x + 1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn sign_changes_skip_zeros() {
        assert_eq!(sign_changes(&[1.0, 0.0, -1.0, 0.0, 2.0]), 2);
        assert_eq!(sign_changes(&[1.0, 2.0, 3.0]), 0);
    }

    #[test]
    fn isolates_close_roots() {
        let mut expanded = vec![1.0];
        for r in [1.0, 1.001, 3.0, -2.0] {
            let mut next = vec![0.0; expanded.len() + 1];
            for (k, c) in expanded.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= r * c;
            }
            expanded = next;
        }
        let roots = positive_roots(&expanded);
        assert_eq!(roots.len(), 3);
        assert!((roots[0] - 1.0).abs() < 1e-9);
        assert!((roots[1] - 1.001).abs() < 1e-9);
        assert!((roots[2] - 3.0).abs() < 1e-9);
        assert_eq!(real_roots(&expanded).len(), 4);
    }
}
