//! The third-order difference equation for `w_n`: companion-matrix propagation,
//! Casoratian, decay of the solution and its Birkhoff asymptotic series.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qes::{initial_w, recurrence_pis, recurrence_step};
use crate::series::CanonicalParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompanionState {
    pub n: usize,
    /// `(w_n, w_{n+1}, w_{n+2})`
    pub z: [f64; 3],
}

/// `A(n)`, with `Z_{n+1} = A(n) Z_n`.
pub fn companion_matrix(params: &CanonicalParams, n: usize) -> [[f64; 3]; 3] {
    let [p1, p2, p3] = recurrence_pis(params, n);
    [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [-p3, -p2, -p1]]
}

fn apply(a: &[[f64; 3]; 3], z: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| a[i][0] * z[0] + a[i][1] * z[1] + a[i][2] * z[2])
}

/// `Z_0 .. Z_{n_max}` from the default initial data.
pub fn propagate(params: &CanonicalParams, n_max: usize) -> Vec<CompanionState> {
    propagate_from(params, initial_w(params), n_max)
}

pub fn propagate_from(params: &CanonicalParams, z0: [f64; 3], n_max: usize) -> Vec<CompanionState> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut z = z0;
    for n in 0..=n_max {
        out.push(CompanionState { n, z });
        z = apply(&companion_matrix(params, n), z);
    }
    out
}

/// `w_n = mantissa · exp(log_scale)`, kept in range by renormalising.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledValue {
    pub mantissa: f64,
    pub log_scale: f64,
}

impl ScaledValue {
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.abs().ln() + self.log_scale
    }

    pub fn value(&self) -> f64 {
        self.mantissa * self.log_scale.exp()
    }
}

/// `w_0 .. w_{n_max}` as scaled pairs, safe far past the double-precision underflow.
pub fn propagate_scaled(params: &CanonicalParams, n_max: usize) -> Vec<ScaledValue> {
    let mut z = initial_w(params);
    let mut log_scale = 0.0;
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        out.push(ScaledValue {
            mantissa: z[0],
            log_scale,
        });
        z = [z[1], z[2], recurrence_step(recurrence_pis(params, n), z)];
        let m = z.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if m > 0.0 && !(1e-100..=1e100).contains(&m) {
            z = z.map(|x| x / m);
            log_scale += m.ln();
        }
    }
    out
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CasoratianReport {
    pub n: usize,
    pub direct: f64,
    pub abel: f64,
    pub closed_form: f64,
}

/// Casoratian at `n` of the three solutions with the given initial vectors, next
/// to the Abel prediction `W_n = (-1)^n Π_{k<n} π3(k) W_0` and its factorial form.
pub fn casoratian(params: &CanonicalParams, initial: [[f64; 3]; 3], n: usize) -> CasoratianReport {
    let cols: Vec<[f64; 3]> = initial.iter().map(|z0| propagate_from(params, *z0, n)[n].z).collect();
    let matrix = |c: &[[f64; 3]]| std::array::from_fn(|i| std::array::from_fn(|j| c[j][i]));
    let w0 = det3(matrix(&initial));
    let direct = det3(matrix(&cols));
    let abel = (0..n).fold(w0, |acc, k| -recurrence_pis(params, k)[2] * acc);
    CasoratianReport {
        n,
        direct,
        abel,
        closed_form: casoratian_closed_form(params.beta(), n, w0),
    }
}

/// `2 (-1)^n (n+2) / ((n+2)!)² · (β-3)(β-6)…(β-3n) · W_0`.
pub fn casoratian_closed_form(beta: f64, n: usize, w0: f64) -> f64 {
    let fact: f64 = (1..=n + 2).map(|k| k as f64).product();
    let prod: f64 = (1..=n).map(|j| beta - 3.0 * j as f64).product();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    2.0 * sign * (n as f64 + 2.0) / (fact * fact) * prod * w0
}

/// `max |w_n|` over the last tenth of `0..=n_max`.
pub fn limit_check(params: &CanonicalParams, n_max: usize) -> f64 {
    let seq = propagate_scaled(params, n_max);
    let start = n_max - n_max / 10;
    seq[start..]
        .iter()
        .map(|s| if s.mantissa == 0.0 { 0.0 } else { s.ln_abs().exp() })
        .fold(0.0, f64::max)
}

/// Coefficients of the formal solutions
/// `(3e/n)^{n/3} n^θ exp(γ (n/3)^{1/3}) [1 + c1 n^{-1/3} + c2 n^{-2/3} + c3 n^{-1} + …]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BirkhoffExpansion {
    pub mu0: f64,
    pub lambda: f64,
    pub rho_tilde: f64,
    pub beta_tilde: f64,
    pub alpha1: f64,
    pub theta: f64,
    pub c: [f64; 3],
    pub branch: u8,
    gamma: f64,
}

impl BirkhoffExpansion {
    pub fn new(params: &CanonicalParams, branch: u8) -> Self {
        assert!(branch < 3, "branch must be 0, 1 or 2");
        let (a, b, g) = (params.alpha(), params.beta(), params.gamma());
        let cbrt9 = 9f64.cbrt();
        let s = a - g * g / 6.0;
        let c1 = s / cbrt9;
        let c2 = (g * (1.0 - b / 3.0) + s * s) / (2.0 * cbrt9 * cbrt9);
        let c3 = (108.0 * c1 * c2 + 4.0 * cbrt9 * g * c1 * (3.0 - b) + 6.0 * b * b + 18.0 * b - 81.0) / 324.0;
        Self {
            mu0: -1.0 / 3.0,
            lambda: 3f64.cbrt(),
            rho_tilde: 3.0,
            beta_tilde: 1.0 / 3.0,
            alpha1: g / 3f64.cbrt(),
            theta: -5.0 / 6.0 - b / 9.0,
            c: [c1, c2, c3],
            branch,
            gamma: g,
        }
    }

    /// Natural log of the modulus-carrying real part and the phase, for `terms` corrections.
    pub fn log_eval(&self, n: usize, terms: usize) -> (f64, Complex64) {
        let nf = n as f64;
        let omega = Complex64::from_polar(1.0, 2.0 * PI * self.branch as f64 / 3.0);
        let k = (self.branch as usize * n) % 3;
        let phase = Complex64::from_polar(1.0, -2.0 * PI * k as f64 / 3.0);
        let ln_lead = nf / 3.0 * (3.0 * std::f64::consts::E / nf).ln() + self.theta * nf.ln();
        let gamma_term = omega * self.gamma * (nf / 3.0).cbrt();
        let mut corr = Complex64::from(1.0);
        let mut om = Complex64::from(1.0);
        for j in 0..terms.min(3) {
            om /= omega;
            corr += self.c[j] * om * nf.powf(-((j + 1) as f64) / 3.0);
        }
        (
            ln_lead + gamma_term.re,
            phase * Complex64::from_polar(1.0, gamma_term.im) * corr,
        )
    }
}

pub fn birkhoff_eval(params: &CanonicalParams, branch: u8, n: usize, terms: usize) -> Complex64 {
    let (ln_mod, rest) = BirkhoffExpansion::new(params, branch).log_eval(n, terms);
    rest * ln_mod.exp()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlateauReport {
    pub window: (usize, usize),
    pub terms: usize,
    /// Dominant branches: `[0]` for `γ > 0`, `[1, 2]` for `γ < 0`, all three at `γ = 0`.
    pub dominant: Vec<u8>,
    /// Median `C_0` (real) and `C_1` over the window.
    pub connection: (f64, Complex64),
    /// Largest relative excursion of the dominant constants from their medians.
    pub drift: f64,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

fn solve3(mut a: [[f64; 3]; 3], mut y: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let p = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        a.swap(col, p);
        y.swap(col, p);
        for r in col + 1..3 {
            let f = a[r][col] / a[col][col];
            let pivot = a[col];
            for (x, p) in a[r].iter_mut().zip(pivot).skip(col) {
                *x -= f * p;
            }
            y[r] -= f * y[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|c| a[r][c] * x[c]).sum();
        x[r] = (y[r] - s) / a[r][r];
    }
    x
}

/// Connection constants of `w_n` against the Birkhoff solutions over `n ∈ [lo, hi]`.
///
/// At each `n` the rows `n, n+1, n+2` of `w_m = C_0 B_0(m) + 2 Re(C_1 B_1(m))` are
/// solved for `(C_0, C_1)`, so the subdominant branches cannot leak into the dominant
/// constant. The drift then measures only the truncation of the correction series.
pub fn ratio_plateau(params: &CanonicalParams, window: (usize, usize), terms: usize) -> Result<PlateauReport> {
    let (lo, hi) = window;
    if lo == 0 || hi <= lo {
        return Err(Error::InvalidInput(format!("plateau window ({lo}, {hi})")));
    }
    let seq = propagate_scaled(params, hi + 2);
    let b0 = BirkhoffExpansion::new(params, 0);
    let b1 = BirkhoffExpansion::new(params, 1);
    // every row is divided by e^{L_0(m)}
    let row = |m: usize| {
        let (l0, r0) = b0.log_eval(m, terms);
        let (l1, r1) = b1.log_eval(m, terms);
        let e = (l1 - l0).exp();
        let w = seq[m];
        let rhs = if w.mantissa == 0.0 {
            0.0
        } else {
            w.mantissa.signum() * (w.ln_abs() - l0).exp()
        };
        ([r0.re, 2.0 * r1.re * e, -2.0 * r1.im * e], rhs)
    };
    let fits: Vec<[f64; 3]> = (lo..=hi)
        .map(|n| {
            let rows = [row(n), row(n + 1), row(n + 2)];
            solve3(rows.map(|r| r.0), rows.map(|r| r.1))
        })
        .collect();
    let med: [f64; 3] = std::array::from_fn(|k| median(fits.iter().map(|f| f[k]).collect()));
    let g = params.gamma();
    let dominant = if g > 0.0 {
        vec![0]
    } else if g < 0.0 {
        vec![1, 2]
    } else {
        vec![0, 1, 2]
    };
    let excursion = |f: &[f64; 3]| {
        let d0 = (f[0] - med[0]).abs() / med[0].abs();
        let c1 = Complex64::new(med[1], med[2]);
        let d1 = (Complex64::new(f[1], f[2]) - c1).norm() / c1.norm();
        match g.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => d0,
            Some(std::cmp::Ordering::Less) => d1,
            _ => d0.max(d1),
        }
    };
    let drift = fits.iter().map(excursion).fold(0.0, f64::max);
    Ok(PlateauReport {
        window,
        terms,
        dominant,
        connection: (med[0], Complex64::new(med[1], med[2])),
        drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qes::w_sequence;
    use approx::assert_relative_eq;

    #[test]
    fn propagation_is_the_recurrence() {
        let c = CanonicalParams::new(0.3, -2.2, 1.7);
        let w = w_sequence(&c, 22);
        let z = propagate(&c, 20);
        for s in &z {
            assert_eq!(s.z[0].to_bits(), w[s.n].to_bits());
            assert_eq!(s.z[2].to_bits(), w[s.n + 2].to_bits());
        }
        let (a, b, g) = (0.3, -2.2, 1.7);
        assert_relative_eq!(
            z[1].z[2],
            (g * g * g - 2.0 * a * g - (b - 3.0)) / 6.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn trivial_sequence() {
        let c = CanonicalParams::new(0.0, 3.0, 0.0);
        let z = propagate(&c, 10);
        assert_eq!(z[0].z, [1.0, 0.0, 0.0]);
        assert!(z[1..].iter().all(|s| s.z == [0.0; 3]));
        assert_eq!(limit_check(&c, 200), 0.0);
    }

    #[test]
    fn scaled_matches_plain() {
        let c = CanonicalParams::new(1.0, 2.0, 3.0);
        let w = w_sequence(&c, 120);
        let s = propagate_scaled(&c, 120);
        for n in [5, 50, 120] {
            assert_relative_eq!(s[n].value(), w[n], max_relative = 1e-12);
        }
    }

    #[test]
    fn casoratian_examples() {
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let c = CanonicalParams::new(0.4, 1.3, -0.8);
        let r = casoratian(&c, id, 0);
        assert_eq!(r.direct, 1.0);
        let c3 = CanonicalParams::new(0.4, 3.0, -0.8);
        let r = casoratian(&c3, id, 1);
        assert_eq!(r.abel, 0.0);
        assert_eq!(r.direct, 0.0);
        for n in 1..=15 {
            let r = casoratian(&c, id, n);
            assert_relative_eq!(r.direct, r.abel, max_relative = 1e-10);
            assert_relative_eq!(r.closed_form, r.abel, max_relative = 1e-12);
        }
    }

    #[test]
    fn decay_examples() {
        assert!(limit_check(&CanonicalParams::new(1.0, 2.0, 3.0), 200) <= 1e-30);
        assert!(limit_check(&CanonicalParams::new(0.0, -1.0, -2.0), 200) <= 1e-30);
    }

    #[test]
    fn birkhoff_leading() {
        let c = CanonicalParams::new(0.0, 0.0, 0.0);
        for n in [10, 40] {
            let nf = n as f64;
            let v = birkhoff_eval(&c, 0, n, 0);
            let exact = (3.0 * std::f64::consts::E / nf).powf(nf / 3.0) * nf.powf(-5.0 / 6.0);
            assert_relative_eq!(v.re, exact, max_relative = 1e-12);
            assert!(v.im.abs() < 1e-12 * exact);
        }
        let e = BirkhoffExpansion::new(&CanonicalParams::new(1.0, 0.0, 0.0), 0);
        assert_relative_eq!(e.c[0], 9f64.powf(-1.0 / 3.0));
    }

    #[test]
    fn corrected_coefficients() {
        let e = BirkhoffExpansion::new(&CanonicalParams::new(1.0, 2.0, 3.0), 0);
        assert_relative_eq!(e.c[1], 0.144_45, max_relative = 1e-4);
        assert_relative_eq!(e.c[2], -0.094_909, max_relative = 1e-4);
    }

    #[test]
    fn plateau_flattens_with_corrections() {
        let c = CanonicalParams::new(1.0, 2.0, 3.0);
        let r0 = ratio_plateau(&c, (100, 300), 0).unwrap();
        let r3 = ratio_plateau(&c, (100, 300), 3).unwrap();
        assert!(r3.drift < 0.02, "{r3:?}");
        assert!(r3.drift < r0.drift, "{r0:?} {r3:?}");
    }

    #[test]
    fn plateau_across_gamma_signs() {
        for (a, b, g) in [
            (1.0, 2.0, 3.0),
            (0.0, -1.0, -2.0),
            (0.5, 1.0, 1.0),
            (-1.0, 4.0, -1.0),
            (2.0, -3.0, 1.5),
            (0.3, 0.7, -3.0),
            (1.0, 2.0, 0.5),
            (1.0, 2.0, -0.5),
            (0.4, 1.0, 0.0),
            (1.0, 2.0, 0.1),
        ] {
            let c = CanonicalParams::new(a, b, g);
            let r0 = ratio_plateau(&c, (100, 300), 0).unwrap();
            let r3 = ratio_plateau(&c, (100, 300), 3).unwrap();
            assert!(r3.drift < 1e-3 && r3.drift < r0.drift, "{a} {b} {g}: {r0:?} {r3:?}");
        }
    }
}
