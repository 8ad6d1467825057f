//! Eigenvalues of `-φ'' + q φ = E w φ` by Prüfer-angle shooting from both ends.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::ode::integrate;
use crate::roots::bracketed_root;

const PRUFER_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LeftBoundary {
    Dirichlet,
    /// `φ'/φ = σ` at the left end.
    LogDerivative(f64),
}

/// A regular Sturm–Liouville problem on `[left, right]` with `φ(right) = 0`.
pub struct SturmProblem<Q, W> {
    pub q: Q,
    pub w: W,
    pub left: f64,
    pub right: f64,
    pub left_bc: LeftBoundary,
    pub matching: f64,
}

impl<Q, W> SturmProblem<Q, W>
where
    Q: Fn(f64) -> f64,
    W: Fn(f64) -> f64,
{
    fn angle_rhs(&self, e: f64) -> impl Fn(f64, &[f64; 1]) -> [f64; 1] + '_ {
        move |x, th| {
            let (s, c) = th[0].sin_cos();
            [c * c + (e * (self.w)(x) - (self.q)(x)) * s * s]
        }
    }

    /// Left angle minus right angle at the matching point; increasing in `E`.
    pub fn mismatch(&self, e: f64) -> Result<f64> {
        let theta0 = match self.left_bc {
            LeftBoundary::Dirichlet => 0.0,
            LeftBoundary::LogDerivative(sigma) => f64::atan2(1.0, sigma),
        };
        let left = integrate(self.angle_rhs(e), self.left, [theta0], self.matching, PRUFER_TOL)?;
        let right = integrate(self.angle_rhs(e), self.right, [0.0], self.matching, PRUFER_TOL)?;
        Ok(left.end().1[0] - right.end().1[0])
    }

    /// Eigenvalue with `n` interior nodes.
    pub fn eigenvalue(&self, n: usize, guess_lo: f64, guess_hi: f64) -> Result<f64> {
        let target = (n as f64 + 1.0) * PI;
        let g = |e: f64| self.mismatch(e).map(|m| m - target);
        let mut lo = guess_lo;
        let mut step = (guess_hi - guess_lo).abs().max(1.0);
        let mut tries = 0;
        while g(lo)? > 0.0 {
            lo -= step;
            step *= 2.0;
            tries += 1;
            if tries > 60 {
                return Err(Error::Convergence { iterations: tries });
            }
        }
        let mut hi = guess_hi.max(lo + 1e-3);
        let mut step = (hi - lo).max(1.0);
        while g(hi)? < 0.0 {
            lo = hi;
            hi += step;
            step *= 2.0;
            tries += 1;
            if tries > 120 {
                return Err(Error::Convergence { iterations: tries });
            }
        }
        let mut err = None;
        let root = bracketed_root(
            |e| match g(e) {
                Ok(v) => v,
                Err(x) => {
                    err.get_or_insert(x);
                    0.0
                }
            },
            lo,
            hi,
        )?;
        match err {
            Some(e) => Err(e),
            None => Ok(root),
        }
    }
}

/// `-v'' + P v = E v` on the line, `P(ρ) = 9/4 ρ⁴ - a2 ρ² - a1 ρ - a0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootingProblem {
    pub a: [f64; 3],
    /// Fixed `L` for the interval `[-L, L]`; chosen per level when `None`.
    pub cutoff: Option<f64>,
}

/// Decay exponent `∫ sqrt(P - E)` over the forbidden zone up to the cutoff.
fn attenuation(p: &impl Fn(f64) -> f64, e: f64, from: f64, to: f64) -> f64 {
    let m = 400;
    let h = (to - from) / m as f64;
    (0..m)
        .map(|i| {
            let x = from + (i as f64 + 0.5) * h;
            (p(x) - e).max(0.0).sqrt()
        })
        .sum::<f64>()
        * h.abs()
}

impl ShootingProblem {
    pub fn new(a: [f64; 3]) -> Self {
        Self { a, cutoff: None }
    }

    pub fn with_cutoff(mut self, l: f64) -> Self {
        self.cutoff = Some(l);
        self
    }

    pub fn potential(&self, x: f64) -> f64 {
        let [a0, a1, a2] = self.a;
        2.25 * x.powi(4) - a2 * x * x - a1 * x - a0
    }

    fn minimum(&self, l: f64) -> f64 {
        let m = 2000;
        (0..=m)
            .map(|i| -l + 2.0 * l * i as f64 / m as f64)
            .min_by(|x, y| self.potential(*x).total_cmp(&self.potential(*y)))
            .unwrap_or(0.0)
    }

    /// `(turning points, attenuation at both ends)` for energy `e` on `[-l, l]`.
    fn tails(&self, e: f64, l: f64) -> f64 {
        let p = |x: f64| self.potential(x);
        let xm = self.minimum(l);
        let tp_right = bracketed_root(|x| p(x) - e, xm, l).unwrap_or(xm);
        let tp_left = bracketed_root(|x| p(x) - e, -l, xm).unwrap_or(xm);
        attenuation(&p, e, tp_right, l).min(attenuation(&p, e, -l, tp_left))
    }

    fn solve_on(&self, n: usize, l: f64, guess: f64) -> Result<f64> {
        let prob = SturmProblem {
            q: |x: f64| self.potential(x),
            w: |_: f64| 1.0,
            left: -l,
            right: l,
            left_bc: LeftBoundary::Dirichlet,
            matching: self.minimum(l),
        };
        let floor = self.potential(prob.matching);
        prob.eigenvalue(n, floor, floor.max(0.0) + guess.max(1.0))
    }

    /// Eigenvalue with `n` nodes.
    pub fn eigenvalue(&self, n: usize) -> Result<f64> {
        let guess = asymptotic_level(n as f64 + 1.0);
        if let Some(l) = self.cutoff {
            let e = self.solve_on(n, l, guess)?;
            let att = self.tails(e, l);
            if att < 10.0 {
                return Err(Error::CutoffTooSmall(format!(
                    "L = {l}: tail attenuation {att:.2} at E = {e}"
                )));
            }
            return Ok(e);
        }
        let mut l = 1.0;
        let mut e = guess;
        for _ in 0..40 {
            while self.potential(l).min(self.potential(-l)) < 3.0 * e.abs() + 1.0 || self.tails(e, l) < 20.0 {
                l *= 1.2;
            }
            let e_new = self.solve_on(n, l, e)?;
            let settled =
                self.potential(l).min(self.potential(-l)) >= 3.0 * e_new.abs() + 1.0 && self.tails(e_new, l) >= 20.0;
            e = e_new;
            if settled {
                return Ok(e);
            }
        }
        Err(Error::CutoffTooSmall(format!("no stable cutoff for level {n}")))
    }
}

/// `[3 Γ²(3/4) n / sqrt(2π)]^{4/3}`.
pub fn asymptotic_level(n: f64) -> f64 {
    let g = crate::special::gamma(0.75);
    (3.0 * g * g * n / (2.0 * PI).sqrt()).powf(4.0 / 3.0)
}

/// First `n_levels` eigenvalues, ascending.
pub fn shoot_spectrum(p: &ShootingProblem, n_levels: usize) -> Result<Vec<f64>> {
    let levels: Vec<f64> = (0..n_levels).map(|n| p.eigenvalue(n)).collect::<Result<_>>()?;
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Convergence { iterations: n_levels });
    }
    Ok(levels)
}

/// Radial eigenvalue of `ψ'' + (E - V) ψ = 0` on `(r_min, r_max)`.
///
/// Works in `x = ln r`, `ψ = sqrt(r) φ`, where `φ'' = [r² (V - E) + 1/4] φ`. The left
/// condition selects the branch `ψ ~ r^s` through `φ'/φ = s - 1/2`. This is a proper
/// boundary condition only for the principal (larger) exponent at a limit-circle end.
pub fn radial_eigenvalue(
    potential: impl Fn(f64) -> f64,
    r_min: f64,
    r_max: f64,
    branch_exponent: f64,
    n: usize,
    guess: (f64, f64),
) -> Result<f64> {
    if !(r_min > 0.0 && r_max > r_min) {
        return Err(Error::InvalidInput(format!("radial interval ({r_min}, {r_max})")));
    }
    let (xl, xr) = (r_min.ln(), r_max.ln());
    let m = 2000;
    // match where r²(V - E) is most negative: an attractive r⁻² core puts the minimum of V
    // itself at the left end, where the left condition would be swamped
    let e_mid = 0.5 * (guess.0 + guess.1);
    let allowed = |x: f64| {
        let r = x.exp();
        r * r * (potential(r) - e_mid)
    };
    let xm = (1..m)
        .map(|i| xl + (xr - xl) * i as f64 / m as f64)
        .min_by(|a, b| allowed(*a).total_cmp(&allowed(*b)))
        .unwrap_or(0.5 * (xl + xr));
    let prob = SturmProblem {
        q: |x: f64| {
            let r = x.exp();
            r * r * potential(r) + 0.25
        },
        w: |x: f64| (2.0 * x).exp(),
        left: xl,
        right: xr,
        left_bc: LeftBoundary::LogDerivative(branch_exponent - 0.5),
        matching: xm,
    };
    prob.eigenvalue(n, guess.0, guess.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_box() {
        // -φ'' = E φ on [0, π] has E = (n+1)²
        let prob = SturmProblem {
            q: |_: f64| 0.0,
            w: |_: f64| 1.0,
            left: 0.0,
            right: PI,
            left_bc: LeftBoundary::Dirichlet,
            matching: 1.0,
        };
        for n in 0..4 {
            let e = prob.eigenvalue(n, 0.0, 2.0).unwrap();
            assert!((e - ((n + 1) * (n + 1)) as f64).abs() < 1e-8, "{n}: {e}");
        }
    }

    #[test]
    fn harmonic_oscillator() {
        let prob = SturmProblem {
            q: |x: f64| x * x,
            w: |_: f64| 1.0,
            left: -9.0,
            right: 9.0,
            left_bc: LeftBoundary::Dirichlet,
            matching: 0.0,
        };
        for n in 0..5 {
            let e = prob.eigenvalue(n, 0.0, 3.0).unwrap();
            assert!((e - (2 * n + 1) as f64).abs() < 1e-8, "{n}: {e}");
        }
    }

    #[test]
    fn quartic_levels_increase() {
        let p = ShootingProblem::new([0.0; 3]);
        let levels = shoot_spectrum(&p, 4).unwrap();
        assert!(levels[0] > 0.0);
        assert!(levels.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn fixed_cutoff_too_small() {
        let p = ShootingProblem::new([0.0; 3]).with_cutoff(1.0);
        assert!(matches!(p.eigenvalue(3), Err(Error::CutoffTooSmall(_))));
    }

    #[test]
    fn cutoff_independence() {
        let p = ShootingProblem::new([0.5, -0.3, 1.0]);
        let e = p.eigenvalue(2).unwrap();
        let wide = ShootingProblem::new([0.5, -0.3, 1.0]).with_cutoff(8.0);
        let e2 = wide.eigenvalue(2).unwrap();
        assert!((e - e2).abs() < 1e-6 * e.abs(), "{e} {e2}");
    }

    #[test]
    fn radial_hydrogen_like() {
        // ψ'' + (E + 2/r - 2/r²)ψ = 0 (l = 1): E = -1/(n+2)²
        let e = radial_eigenvalue(|r| -2.0 / r + 2.0 / (r * r), 1e-6, 80.0, 2.0, 0, (-1.0, -0.01)).unwrap();
        assert!((e + 0.25).abs() < 1e-6, "{e}");
    }
}
