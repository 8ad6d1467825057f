//! Bessel functions of real order by the ascending series.

use std::f64::consts::PI;

use serde::Serialize;

use super::gamma::gamma;
use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// Largest argument accepted by the ascending series.
pub const SERIES_RADIUS: f64 = 30.0;
const SERIES_CAP: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BesselKind {
    J,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BesselSpec {
    pub order: f64,
    /// Argument scale `k` in `Z_ν(k x)`.
    pub scale: f64,
    pub kind: BesselKind,
}

/// `(J_ν(x), J_ν'(x))`.
pub fn bessel_j_with_derivative(nu: f64, x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            value: x,
            lo: 0.0,
            hi: SERIES_RADIUS,
        });
    }
    if x > SERIES_RADIUS {
        return Err(Error::Truncation { cap: SERIES_CAP, at: x });
    }
    let half = 0.5 * x;
    let q = half * half;
    let mut term = half.powf(nu) / gamma(nu + 1.0);
    let mut value = CompensatedSum::new();
    let mut deriv = CompensatedSum::new();
    let mut small_run = 0;
    for k in 0..SERIES_CAP {
        let kf = k as f64;
        value += term;
        deriv += term * (2.0 * kf + nu) / x;
        let small = term.abs() <= 1e-17 * value.value().abs();
        small_run = if small { small_run + 1 } else { 0 };
        if small_run == 3 {
            return Ok((value.value(), deriv.value()));
        }
        term *= -q / ((kf + 1.0) * (kf + 1.0 + nu));
    }
    Err(Error::Truncation { cap: SERIES_CAP, at: x })
}

fn check_non_integer(nu: f64) -> Result<()> {
    if (nu - nu.round()).abs() < 1e-12 {
        return Err(Error::InvalidInput(format!(
            "integer order {nu}: the Y connection formula needs a non-integer order"
        )));
    }
    Ok(())
}

/// `(Y_ν(x), Y_ν'(x))` from `(J_ν cos νπ - J_{-ν}) / sin νπ`.
pub fn bessel_y_with_derivative(nu: f64, x: f64) -> Result<(f64, f64)> {
    check_non_integer(nu)?;
    let (jp, djp) = bessel_j_with_derivative(nu, x)?;
    let (jm, djm) = bessel_j_with_derivative(-nu, x)?;
    let (s, c) = (nu * PI).sin_cos();
    Ok(((jp * c - jm) / s, (djp * c - djm) / s))
}

pub fn bessel_eval(spec: &BesselSpec, x: f64) -> Result<f64> {
    let arg = spec.scale * x;
    Ok(match spec.kind {
        BesselKind::J => bessel_j_with_derivative(spec.order, arg)?.0,
        BesselKind::Y => bessel_y_with_derivative(spec.order, arg)?.0,
    })
}
