//! Polynomial solutions of the canonical equation: termination at `β = 3(N+1)`,
//! the determinant condition on `(α, γ)`, and the coefficient recurrence.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::HeunSixParams;
use crate::roots::real_roots;
use crate::series::{CanonicalParams, Jet, SeriesKind, SeriesSolution};

/// Largest polynomial order handled.
pub const MAX_ORDER: usize = 50;

/// `E_N = (3(N+1) - a1) / b1`.
pub fn energy_eigenvalue(a1: f64, b1: f64, n: usize) -> Result<f64> {
    if b1 == 0.0 {
        return Err(Error::DivisionByZero("b1 = 0: no quasi-exact energies"));
    }
    Ok((3.0 * (n as f64 + 1.0) - a1) / b1)
}

pub fn required_beta(n: usize) -> f64 {
    3.0 * (n as f64 + 1.0)
}

/// Dense polynomial in `(α, γ)`; `coeffs[i][j]` multiplies `α^i γ^j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BivariatePoly {
    coeffs: Vec<Vec<f64>>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: f64, alpha_pow: usize, gamma_pow: usize) -> Self {
        let mut p = Self::zero();
        p.add_term(c, alpha_pow, gamma_pow);
        p
    }

    pub fn from_terms(terms: &[(f64, usize, usize)]) -> Self {
        let mut p = Self::zero();
        for &(c, i, j) in terms {
            p.add_term(c, i, j);
        }
        p
    }

    fn add_term(&mut self, c: f64, i: usize, j: usize) {
        if self.coeffs.len() <= i {
            self.coeffs.resize(i + 1, Vec::new());
        }
        let row = &mut self.coeffs[i];
        if row.len() <= j {
            row.resize(j + 1, 0.0);
        }
        row[j] += c;
    }

    /// Nonzero terms `(coefficient, α power, γ power)`, α-major.
    pub fn terms(&self) -> impl Iterator<Item = (f64, usize, usize)> + '_ {
        self.coeffs.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(move |(j, &c)| (c, i, j))
        })
    }

    pub fn eval(&self, alpha: f64, gamma: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, row| {
            acc * alpha + row.iter().rev().fold(0.0, |a, &c| a * gamma + c)
        })
    }

    /// Coefficients in γ (ascending) at fixed α.
    pub fn in_gamma(&self, alpha: f64) -> Vec<f64> {
        let width = self.coeffs.iter().map(Vec::len).max().unwrap_or(0);
        let mut out = vec![0.0; width];
        let mut pa = 1.0;
        for row in &self.coeffs {
            for (j, c) in row.iter().enumerate() {
                out[j] += c * pa;
            }
            pa *= alpha;
        }
        out
    }

    fn scaled_shift(&self, c: f64, di: usize, dj: usize) -> Self {
        let mut p = Self::zero();
        for (v, i, j) in self.terms() {
            p.add_term(c * v, i + di, j + dj);
        }
        p
    }

    fn plus(mut self, other: &Self) -> Self {
        for (v, i, j) in other.terms() {
            self.add_term(v, i, j);
        }
        self
    }
}

impl fmt::Display for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<_> = self.terms().collect();
        terms.sort_by_key(|t| std::cmp::Reverse((t.1 + t.2, t.1)));
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (c, i, j)) in terms.into_iter().enumerate() {
            let sign = if c < 0.0 {
                "-"
            } else if k > 0 {
                "+"
            } else {
                ""
            };
            if k > 0 {
                f.write_str(" ")?;
            }
            f.write_str(sign)?;
            if k > 0 {
                f.write_str(" ")?;
            }
            let a = c.abs();
            let mono = match (i, j) {
                (0, 0) => String::new(),
                _ => {
                    let pa = match i {
                        0 => String::new(),
                        1 => "α".into(),
                        _ => format!("α^{i}"),
                    };
                    let pg = match j {
                        0 => String::new(),
                        1 => "γ".into(),
                        _ => format!("γ^{j}"),
                    };
                    pa + &pg
                }
            };
            if a != 1.0 || mono.is_empty() {
                write!(f, "{a}")?;
            }
            f.write_str(&mono)?;
        }
        Ok(())
    }
}

/// Entries of the banded matrix: `(sub, diag-independent super1 factor, super2)` at row `k`.
fn sub(n: usize, k: usize) -> f64 {
    3.0 * (n + 1 - k) as f64
}

fn super2(k: usize) -> f64 {
    (k * (k - 1)) as f64
}

/// Leading principal minors by the banded recurrence, generic over the ring.
fn minors<T: Clone>(
    n: usize,
    one: T,
    diag_times: impl Fn(&T) -> T,
    super1_times: impl Fn(&T, f64) -> T,
    scale: impl Fn(&T, f64) -> T,
    add: impl Fn(T, &T) -> T,
) -> T {
    // f[0] = 1, f[k+1] = det of leading (k+1) x (k+1) block
    let mut f: Vec<T> = vec![one];
    for k in 0..=n {
        let mut next = diag_times(&f[k]);
        if k >= 1 {
            // - m_{k-1,k} m_{k,k-1} f_{k-1}, with m_{k-1,k} = -γ k
            let t = super1_times(&f[k - 1], (k as f64) * sub(n, k));
            next = add(next, &t);
        }
        if k >= 2 {
            let t = scale(&f[k - 2], super2(k) * sub(n, k) * sub(n, k - 1));
            next = add(next, &t);
        }
        f.push(next);
    }
    f.pop().expect("at least one minor")
}

/// `det D_{N+1}` as a polynomial in `(α, γ)`.
pub fn determinant_polynomial(n: usize) -> BivariatePoly {
    minors(
        n,
        BivariatePoly::constant(1.0),
        |p| p.scaled_shift(1.0, 1, 0),
        |p, c| p.scaled_shift(c, 0, 1),
        |p, c| p.scaled_shift(c, 0, 0),
        |a, b| a.plus(b),
    )
}

fn determinant_value(alpha: f64, gamma: f64, n: usize) -> f64 {
    minors(n, 1.0, |x| alpha * x, |x, c| gamma * c * x, |x, c| c * x, |a, b| a + b)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QESCondition {
    pub n: usize,
    pub beta_required: f64,
    pub constraint: BivariatePoly,
}

/// Condition on `(α, γ)` for a polynomial solution of order `N`; tabulated for
/// `N ≤ 4`, from the determinant beyond.
pub fn qes_constraint(n: usize) -> QESCondition {
    let constraint = match n {
        0 => BivariatePoly::from_terms(&[(1.0, 1, 0)]),
        1 => BivariatePoly::from_terms(&[(1.0, 2, 0), (3.0, 0, 1)]),
        2 => BivariatePoly::from_terms(&[(1.0, 3, 0), (12.0, 1, 1), (36.0, 0, 0)]),
        3 => BivariatePoly::from_terms(&[(1.0, 4, 0), (30.0, 2, 1), (216.0, 1, 0), (81.0, 0, 2)]),
        4 => BivariatePoly::from_terms(&[(1.0, 5, 0), (60.0, 3, 1), (756.0, 2, 0), (576.0, 1, 2), (5184.0, 0, 1)]),
        _ => determinant_polynomial(n),
    };
    QESCondition {
        n,
        beta_required: required_beta(n),
        constraint,
    }
}

fn check_beta(params: &CanonicalParams, n: usize) -> Result<()> {
    let required = required_beta(n);
    if (params.beta() - required).abs() > 1e-12 * required {
        return Err(Error::BetaMismatch {
            beta: params.beta(),
            n,
            required,
        });
    }
    Ok(())
}

pub fn determinant_condition(params: &CanonicalParams, n: usize) -> Result<f64> {
    check_beta(params, n)?;
    Ok(determinant_value(params.alpha(), params.gamma(), n))
}

/// Real `γ` on the constraint curve at a given `α`, ascending.
pub fn constraint_gamma(n: usize, alpha: f64) -> Vec<f64> {
    let quadratic = |a: f64, b: f64, c: f64| -> Vec<f64> {
        if a == 0.0 {
            return if b == 0.0 { vec![] } else { vec![-c / b] };
        }
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return vec![];
        }
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        let mut v = if q == 0.0 { vec![0.0, 0.0] } else { vec![q / a, c / q] };
        v.sort_by(f64::total_cmp);
        v
    };
    let a2 = alpha * alpha;
    match n {
        0 => vec![],
        1 => vec![-a2 / 3.0],
        2 if alpha == 0.0 => vec![],
        2 => vec![-(a2 * alpha + 36.0) / (12.0 * alpha)],
        3 => quadratic(81.0, 30.0 * a2, a2 * a2 + 216.0 * alpha),
        4 => quadratic(576.0 * alpha, 60.0 * a2 * alpha + 5184.0, a2 * a2 * alpha + 756.0 * a2),
        _ => real_roots(&determinant_polynomial(n).in_gamma(alpha)),
    }
}

/// Six parameters with the given `b` whose level `energy` is the order-`n` quasi-exact
/// level at `(α, γ)`: `a1 = 3(n+1) - E b1` and `a0, a2` from `A0 = α - γ²/4`, `A2 = -3γ/2`.
pub fn params_on_curve(b: [f64; 3], n: usize, energy: f64, alpha: f64, gamma: f64) -> Result<HeunSixParams> {
    if b[1] == 0.0 {
        return Err(Error::DivisionByZero("b1 = 0: no quasi-exact energies"));
    }
    let a = [
        alpha - 0.25 * gamma * gamma - energy * b[0],
        required_beta(n) - energy * b[1],
        -1.5 * gamma - energy * b[2],
    ];
    HeunSixParams::new(a, b)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeunPolynomial {
    pub n: usize,
    /// `w_0 .. w_N`, with `w_N = 1`.
    pub coeffs: Vec<f64>,
    pub params: CanonicalParams,
}

pub fn build_polynomial(params: &CanonicalParams, n: usize) -> Result<HeunPolynomial> {
    if n > MAX_ORDER {
        return Err(Error::InvalidInput(format!("polynomial order {n} above {MAX_ORDER}")));
    }
    check_beta(params, n)?;
    let (alpha, gamma) = (params.alpha(), params.gamma());
    let mut w = vec![0.0; n + 3];
    w[n] = 1.0;
    for k in (1..=n).rev() {
        let kf = k as f64;
        let rest = alpha * w[k] - gamma * (kf + 1.0) * w[k + 1] + (kf + 1.0) * (kf + 2.0) * w[k + 2];
        w[k - 1] = -rest / sub(n, k);
    }
    let terms = [alpha * w[0], -gamma * w[1], 2.0 * w[2]];
    let residual = terms.iter().sum::<f64>();
    let scale = terms.iter().map(|t| t.abs()).sum::<f64>().max(1.0);
    if residual.abs() > 1e-8 * scale {
        return Err(Error::NoNontrivialSolution { residual });
    }
    w.truncate(n + 1);
    Ok(HeunPolynomial {
        n,
        coeffs: w,
        params: *params,
    })
}

impl HeunPolynomial {
    pub fn as_series(&self) -> SeriesSolution {
        SeriesSolution {
            kind: SeriesKind::PolyW,
            coeffs: self.coeffs.clone(),
            params: self.params,
        }
    }

    pub fn eval_jet(&self, rho: f64) -> Jet {
        self.as_series().eval_jet(rho).expect("polynomials are summed in full")
    }

    pub fn eval(&self, rho: f64) -> f64 {
        self.eval_jet(rho).value
    }

    /// Coefficients (ascending, degree `N + 1`) of the canonical operator applied to `p`.
    pub fn residual_coeffs(&self) -> Vec<f64> {
        let n = self.n;
        let (a, b, g) = (self.params.alpha(), self.params.beta(), self.params.gamma());
        let w = |k: isize| -> f64 {
            if k < 0 || k as usize > n {
                0.0
            } else {
                self.coeffs[k as usize]
            }
        };
        (0..=n as isize + 1)
            .map(|k| {
                let kf = k as f64;
                (b - 3.0 * kf) * w(k - 1) + a * w(k) - g * (kf + 1.0) * w(k + 1) + (kf + 1.0) * (kf + 2.0) * w(k + 2)
            })
            .collect()
    }
}

/// Coefficients of the next term of the third-order recurrence at index `n`:
/// `[π1, π2, π3]`.
pub(crate) fn recurrence_pis(params: &CanonicalParams, n: usize) -> [f64; 3] {
    let nf = n as f64;
    let d = (nf + 2.0) * (nf + 3.0);
    [
        -params.gamma() / (nf + 3.0),
        params.alpha() / d,
        (params.beta() - 3.0 * (nf + 1.0)) / d,
    ]
}

/// `-π1 w_{n+2} - π2 w_{n+1} - π3 w_n`, the single evaluation order used everywhere.
pub(crate) fn recurrence_step(pis: [f64; 3], w: [f64; 3]) -> f64 {
    -pis[2] * w[0] - pis[1] * w[1] - pis[0] * w[2]
}

pub(crate) fn initial_w(params: &CanonicalParams) -> [f64; 3] {
    let g = params.gamma();
    [1.0, g, 0.5 * (g * g - params.alpha())]
}

/// `w_0 .. w_{n_max}` from `w0 = 1, w1 = γ, w2 = (γ² - α)/2`.
pub fn w_sequence(params: &CanonicalParams, n_max: usize) -> Vec<f64> {
    w_sequence_from(params, initial_w(params), n_max)
}

/// Same recurrence from arbitrary `(w0, w1, w2)`.
pub fn w_sequence_from(params: &CanonicalParams, initial: [f64; 3], n_max: usize) -> Vec<f64> {
    let mut w = initial.to_vec();
    for n in 0..n_max.saturating_sub(2) {
        let next = recurrence_step(recurrence_pis(params, n), [w[n], w[n + 1], w[n + 2]]);
        w.push(next);
    }
    w.truncate(n_max + 1);
    w
}
