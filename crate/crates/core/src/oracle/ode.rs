//! Dormand–Prince 5(4) with the classic continuous extension.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const MAX_STEPS: usize = 1_000_000;

/// One accepted step with its interpolation coefficients.
#[derive(Debug, Clone)]
struct DenseStep<const N: usize> {
    t0: f64,
    h: f64,
    rcont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    fn eval(&self, t: f64) -> [f64; N] {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let r = &self.rcont;
        std::array::from_fn(|i| r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i]))))
    }
}

/// Accepted steps of an integration, with continuous output over the span.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    steps: Vec<DenseStep<N>>,
    t_end: f64,
    y_end: [f64; N],
}

impl<const N: usize> Trajectory<N> {
    pub fn end(&self) -> (f64, [f64; N]) {
        (self.t_end, self.y_end)
    }

    pub fn steps(&self) -> usize {
        self.steps.len()
    }

    /// Dense output at any `t` inside the integrated span.
    pub fn at(&self, t: f64) -> Result<[f64; N]> {
        let (first, last) = match (self.steps.first(), self.steps.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Ok(self.y_end),
        };
        let dir = first.h.signum();
        let (lo, hi) = if dir > 0.0 {
            (first.t0, self.t_end)
        } else {
            (self.t_end, first.t0)
        };
        if !(t >= lo && t <= hi) {
            return Err(Error::Domain { value: t, lo, hi });
        }
        let idx = self
            .steps
            .partition_point(|s| dir * (s.t0 + s.h - t) < 0.0)
            .min(self.steps.len() - 1);
        let _ = last;
        Ok(self.steps[idx].eval(t))
    }
}

fn norm<const N: usize>(v: &[f64; N], sc: &[f64; N]) -> f64 {
    (v.iter().zip(sc).map(|(x, s)| (x / s).powi(2)).sum::<f64>() / N as f64).sqrt()
}

/// Integrate `y' = f(t, y)` from `t0` to `t1` (either direction) with relative and
/// absolute tolerance `tol`.
pub fn integrate<const N: usize, F>(mut f: F, t0: f64, y0: [f64; N], t1: f64, tol: f64) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    if !(1e-13..=1e-6).contains(&tol) {
        return Err(Error::InvalidInput(format!("tolerance {tol:e} outside [1e-13, 1e-6]")));
    }
    let span = t1 - t0;
    let mut steps = Vec::new();
    if span == 0.0 {
        return Ok(Trajectory {
            steps,
            t_end: t0,
            y_end: y0,
        });
    }
    let dir = span.signum();
    let scale =
        |y: &[f64; N], z: &[f64; N]| -> [f64; N] { std::array::from_fn(|i| tol + tol * y[i].abs().max(z[i].abs())) };

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);

    // starting step from the size of y and y'
    let sc0 = scale(&y, &y);
    let d0 = norm(&y, &sc0);
    let d1 = norm(&k1, &sc0);
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(span.abs()) * dir;

    let mut rejected_last = false;
    for _ in 0..MAX_STEPS {
        if dir * (t + h - t1) > 0.0 {
            h = t1 - t;
        }
        let mut k = [[0.0; N]; 7];
        k[0] = k1;
        for s in 1..7 {
            let ys: [f64; N] = std::array::from_fn(|i| y[i] + h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>());
            k[s] = f(t + C[s] * h, &ys);
        }
        let y_new: [f64; N] = std::array::from_fn(|i| y[i] + h * (0..6).map(|j| A[6][j] * k[j][i]).sum::<f64>());
        let err_vec: [f64; N] = std::array::from_fn(|i| h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>());
        let err = norm(&err_vec, &scale(&y, &y_new));

        if err <= 1.0 {
            let ydiff: [f64; N] = std::array::from_fn(|i| y_new[i] - y[i]);
            let bspl: [f64; N] = std::array::from_fn(|i| h * k[0][i] - ydiff[i]);
            let rcont = [
                y,
                ydiff,
                bspl,
                std::array::from_fn(|i| ydiff[i] - h * k[6][i] - bspl[i]),
                std::array::from_fn(|i| h * (0..7).map(|j| D[j] * k[j][i]).sum::<f64>()),
            ];
            steps.push(DenseStep { t0: t, h, rcont });
            t += h;
            y = y_new;
            k1 = k[6];
            if dir * (t - t1) >= 0.0 {
                return Ok(Trajectory {
                    steps,
                    t_end: t1,
                    y_end: y,
                });
            }
            let mut fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if rejected_last {
                fac = fac.min(1.0);
            }
            rejected_last = false;
            h *= fac;
        } else {
            rejected_last = true;
            h *= (0.9 * err.powf(-0.2)).max(0.2);
        }
        if h.abs() <= 1e-14 * t.abs().max(1e-300) || !h.is_finite() {
            return Err(Error::StepUnderflow { t });
        }
    }
    Err(Error::Convergence { iterations: MAX_STEPS })
}

/// Integrate a second-order equation `y'' = g(t, y, y')`.
pub fn integrate_second_order<F>(mut g: F, t0: f64, y0: f64, dy0: f64, t1: f64, tol: f64) -> Result<Trajectory<2>>
where
    F: FnMut(f64, f64, f64) -> f64,
{
    integrate(|t, y: &[f64; 2]| [y[1], g(t, y[0], y[1])], t0, [y0, dy0], t1, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn sine() {
        let tr = integrate_second_order(|_, y, _| -y, 0.0, 0.0, 1.0, FRAC_PI_2, 1e-12).unwrap();
        assert!((tr.end().1[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn error_shrinks_with_tolerance() {
        let err = |tol| {
            let tr = integrate_second_order(|_, y, _| -y, 0.0, 0.0, 1.0, 3.0 * PI, tol).unwrap();
            tr.end().1[0].abs()
        };
        let e6 = err(1e-6);
        let e9 = err(1e-9);
        let e12 = err(1e-12);
        assert!(e9 < e6 && e12 < e9, "{e6} {e9} {e12}");
    }

    #[test]
    fn dense_output_and_backward() {
        let tr = integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 2.0, 1e-12).unwrap();
        for t in [0.0, 0.37, 1.0, 1.99, 2.0] {
            let y = tr.at(t).unwrap()[0];
            assert!((y - f64::exp(t)).abs() < 1e-9 * f64::exp(t), "{t}: {y}");
        }
        assert!(tr.at(2.5).is_err());
        let back = integrate(|_, y: &[f64; 1]| [y[0]], 1.0, [1.0], -1.0, 1e-12).unwrap();
        assert!((back.end().1[0] - f64::exp(-2.0)).abs() < 1e-11);
        assert!((back.at(0.0).unwrap()[0] - f64::exp(-1.0)).abs() < 1e-9);
    }

    #[test]
    fn rejects_tolerance() {
        assert!(integrate(|_, y: &[f64; 1]| *y, 0.0, [1.0], 1.0, 1e-3).is_err());
    }
}
