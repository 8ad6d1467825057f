//! Kummer's confluent hypergeometric function and the Whittaker functions.

use num_complex::Complex64;
use serde::Serialize;

use super::gamma::{gamma_complex, recip_gamma_complex};
use crate::error::{Error, Result};

/// Largest `|z|` accepted by the series.
pub const SERIES_RADIUS: f64 = 40.0;
const SERIES_CAP: usize = 2000;

/// `(M(a, b, z), dM/dz)` by the ascending series.
///
/// Off the positive axis the terms cancel: roughly `|z| / ln 10` digits are lost, so
/// values near [`SERIES_RADIUS`] carry only a few correct digits.
pub fn kummer_m(a: Complex64, b: Complex64, z: Complex64) -> Result<(Complex64, Complex64)> {
    if z.norm() > SERIES_RADIUS {
        return Err(Error::Truncation {
            cap: SERIES_CAP,
            at: z.norm(),
        });
    }
    let mut term = Complex64::from(1.0);
    let mut value = Complex64::from(0.0);
    // derivative series: sum of k t_k z^{k-1}, i.e. (a/b) M(a+1, b+1, z)
    let mut dterm = a / b;
    let mut deriv = Complex64::from(0.0);
    let mut small_run = 0;
    for k in 0..SERIES_CAP {
        let kf = k as f64;
        value += term;
        deriv += dterm;
        let small = term.norm() <= 1e-17 * value.norm() && dterm.norm() <= 1e-17 * deriv.norm().max(1e-300);
        small_run = if small { small_run + 1 } else { 0 };
        if small_run == 3 {
            return Ok((value, deriv));
        }
        term *= (a + kf) / (b + kf) * z / (kf + 1.0);
        dterm *= (a + kf + 1.0) / (b + kf + 1.0) * z / (kf + 1.0);
    }
    Err(Error::Truncation {
        cap: SERIES_CAP,
        at: z.norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum WhittakerKind {
    M,
    W,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WhittakerSpec {
    pub kappa: Complex64,
    pub mu: f64,
    pub kind: WhittakerKind,
}

/// `(M_{κ,μ}(z), M'_{κ,μ}(z))` with `M_{κ,μ}(z) = e^{-z/2} z^{μ+1/2} M(μ - κ + 1/2, 1 + 2μ, z)`.
pub fn whittaker_m(kappa: Complex64, mu: f64, z: Complex64) -> Result<(Complex64, Complex64)> {
    if z.norm() == 0.0 {
        return Err(Error::InvalidInput("Whittaker functions need z ≠ 0".into()));
    }
    let c = mu + 0.5;
    let (m, dm) = kummer_m(c - kappa, Complex64::from(1.0 + 2.0 * mu), z)?;
    let pre = (-0.5 * z).exp() * z.powc(Complex64::from(c));
    Ok((pre * m, pre * ((c / z - 0.5) * m + dm)))
}

/// `(W_{κ,μ}(z), W'_{κ,μ}(z))` from the two `M` solutions; `2μ` must not be an integer.
pub fn whittaker_w(kappa: Complex64, mu: f64, z: Complex64) -> Result<(Complex64, Complex64)> {
    if ((2.0 * mu) - (2.0 * mu).round()).abs() < 1e-12 {
        return Err(Error::InvalidInput(format!("2μ = {} is an integer", 2.0 * mu)));
    }
    let (mp, dmp) = whittaker_m(kappa, mu, z)?;
    let (mm, dmm) = whittaker_m(kappa, -mu, z)?;
    let ca = gamma_complex(Complex64::from(-2.0 * mu)) * recip_gamma_complex(0.5 - mu - kappa);
    let cb = gamma_complex(Complex64::from(2.0 * mu)) * recip_gamma_complex(0.5 + mu - kappa);
    Ok((ca * mp + cb * mm, ca * dmp + cb * dmm))
}

pub fn whittaker_eval(spec: &WhittakerSpec, z: Complex64) -> Result<Complex64> {
    Ok(match spec.kind {
        WhittakerKind::M => whittaker_m(spec.kappa, spec.mu, z)?.0,
        WhittakerKind::W => whittaker_w(spec.kappa, spec.mu, z)?.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kummer_closed_form() {
        let z = c(0.7, 0.0);
        let (m, dm) = kummer_m(c(1.0, 0.0), c(2.0, 0.0), z).unwrap();
        let exact = (z.exp() - 1.0) / z;
        assert!((m - exact).norm() < 1e-12);
        let dexact = (z.exp() * z - (z.exp() - 1.0)) / (z * z);
        assert!((dm - dexact).norm() < 1e-12);
        // M(a, a, z) = e^z
        let z = c(0.0, 6.5);
        let (m, _) = kummer_m(c(0.3, 0.2), c(0.3, 0.2), z).unwrap();
        assert!((m - z.exp()).norm() < 1e-12);
    }

    #[test]
    fn small_z_behaviour() {
        let mu = 14f64.sqrt() / 12.0;
        let z = c(0.0, 1e-6);
        let (m, _) = whittaker_m(c(0.0, 0.4), mu, z).unwrap();
        let lead = z.powc(Complex64::from(mu + 0.5));
        assert!((m / lead - 1.0).norm() < 1e-5);
    }

    /// `W'' + (-1/4 + κ/z + (1/4 - μ²)/z²) W` from analytic first derivatives and a
    /// complex-step-free central difference of the derivative.
    fn ode_residual(f: impl Fn(Complex64) -> (Complex64, Complex64), kappa: Complex64, mu: f64, z: Complex64) -> f64 {
        let h = 1e-4 * z.norm();
        let d2 = (f(z + h).1 - f(z - h).1) / (2.0 * h);
        let (w, _) = f(z);
        (d2 + (-0.25 + kappa / z + (0.25 - mu * mu) / (z * z)) * w).norm() / w.norm()
    }

    #[test]
    fn whittaker_ode() {
        let mu = 14f64.sqrt() / 12.0;
        let kappa = c(0.0, 0.37);
        for z in [c(0.0, 0.5), c(0.0, 2.0), c(0.3, 4.0), c(0.0, 9.0), c(1.5, -0.7)] {
            let rm = ode_residual(|z| whittaker_m(kappa, mu, z).unwrap(), kappa, mu, z);
            let rw = ode_residual(|z| whittaker_w(kappa, mu, z).unwrap(), kappa, mu, z);
            assert!(rm < 1e-8 && rw < 1e-8, "{z}: {rm} {rw}");
        }
    }

    #[test]
    fn w_decays_on_positive_axis() {
        // W_{κ,μ}(x) ~ x^κ e^{-x/2} for large x
        let (kappa, mu) = (c(0.3, 0.0), 0.2);
        let x = 25.0;
        let (w, _) = whittaker_w(kappa, mu, c(x, 0.0)).unwrap();
        let lead = x.powf(0.3) * (-x / 2.0).exp();
        assert!((w.re / lead - 1.0).abs() < 0.01, "{}", w.re / lead);
    }
}
