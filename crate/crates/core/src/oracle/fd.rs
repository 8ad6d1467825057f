//! Finite-difference residuals and the finite-difference Schwarzian.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::CoordinateMap;

/// Sign convention of the radial equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Convention {
    /// `ψ'' + (E - V) ψ = 0`.
    #[default]
    Sh1,
    /// `ψ'' + (V - E) ψ = 0`, the operator `d²/dr² + V`.
    H0,
}

impl Convention {
    /// Coefficient `c` in `ψ'' + c ψ = 0`.
    pub fn coefficient(self, potential: f64, energy: f64) -> f64 {
        match self {
            Convention::Sh1 => energy - potential,
            Convention::H0 => potential - energy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub reference: f64,
    pub numeric: f64,
    pub relative_error: f64,
}

impl Comparison {
    pub fn new(reference: f64, numeric: f64) -> Self {
        let relative_error = (numeric - reference).abs() / reference.abs().max(f64::MIN_POSITIVE);
        Self {
            reference,
            numeric,
            relative_error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub name: String,
    pub residual_max: f64,
    pub grid: String,
    pub comparison: Option<Comparison>,
}

impl OracleReport {
    pub fn new(name: impl Into<String>, residual_max: f64, grid: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            residual_max,
            grid: grid.into(),
            comparison: None,
        }
    }

    pub fn with_comparison(mut self, c: Comparison) -> Self {
        self.comparison = Some(c);
        self
    }
}

/// Fourth-order central second derivative.
pub fn second_derivative(f: &mut impl FnMut(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    let (m2, m1, c, p1, p2) = (f(x - 2.0 * h)?, f(x - h)?, f(x)?, f(x + h)?, f(x + 2.0 * h)?);
    Ok((-p2 + 16.0 * p1 - 30.0 * c + 16.0 * m1 - m2) / (12.0 * h * h))
}

/// Second derivative by Richardson extrapolation of the 3-point difference (Ridders'
/// tableau), starting from step `h` and shrinking it by 1.4 per level.
///
/// The whole tableau is built and the entry with the smallest error estimate wins; an early
/// stop can lock in a pre-asymptotic estimate when `h` is large.
/// Returns the estimate and its error estimate. Useful near singular points, where no
/// single fixed step balances truncation against round-off.
pub fn second_derivative_extrapolated(f: &mut impl FnMut(f64) -> Result<f64>, x: f64, h: f64) -> Result<(f64, f64)> {
    const SHRINK: f64 = 1.4;
    const LEVELS: usize = 10;
    let fx = f(x)?;
    let mut diff = |h: f64| -> Result<f64> { Ok((f(x + h)? - 2.0 * fx + f(x - h)?) / (h * h)) };
    let mut table = [[0.0f64; LEVELS]; LEVELS];
    let mut step = h;
    table[0][0] = diff(step)?;
    let (mut best, mut err) = (table[0][0], f64::INFINITY);
    for i in 1..LEVELS {
        step /= SHRINK;
        table[0][i] = diff(step)?;
        let mut fac = SHRINK.powi(2);
        for j in 1..=i {
            table[j][i] = (table[j - 1][i] * fac - table[j - 1][i - 1]) / (fac - 1.0);
            fac *= SHRINK.powi(2);
            let e = (table[j][i] - table[j - 1][i])
                .abs()
                .max((table[j][i] - table[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = table[j][i];
            }
        }
    }
    Ok((best, err))
}

/// Default stencil step at `x`: small relative to the point, never reaching past 0 for `x > 0`.
pub fn default_step(x: f64) -> f64 {
    let h = 1e-3 * (1.0 + x.abs());
    if x > 0.0 {
        h.min(x / 3.0)
    } else {
        h
    }
}

/// `max |ψ''_FD + c(r) ψ| / max |ψ|` over the grid, with `c` from the convention.
pub fn fd_residual(
    psi: impl FnMut(f64) -> Result<f64>,
    potential: impl FnMut(f64) -> Result<f64>,
    energy: f64,
    grid: &[f64],
    convention: Convention,
) -> Result<OracleReport> {
    fd_residual_with_step(psi, potential, energy, grid, convention, default_step)
}

/// [`fd_residual`] with a caller-chosen stencil step.
pub fn fd_residual_with_step(
    mut psi: impl FnMut(f64) -> Result<f64>,
    mut potential: impl FnMut(f64) -> Result<f64>,
    energy: f64,
    grid: &[f64],
    convention: Convention,
    step: impl Fn(f64) -> f64,
) -> Result<OracleReport> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty grid".into()));
    }
    let mut worst = 0.0f64;
    let mut size = 0.0f64;
    for &x in grid {
        let value = psi(x)?;
        let d2 = second_derivative(&mut psi, x, step(x))?;
        let res = d2 + convention.coefficient(potential(x)?, energy) * value;
        worst = worst.max(res.abs());
        size = size.max(value.abs());
    }
    let residual_max = if size > 0.0 { worst / size } else { worst };
    let desc = format!("{} points on [{}, {}]", grid.len(), grid[0], grid[grid.len() - 1]);
    Ok(OracleReport::new("fd_residual", residual_max, desc))
}

/// [`fd_residual`] with the extrapolated second derivative; `initial_step(x)` must keep
/// `x ± h` inside the domain of `ψ`.
pub fn fd_residual_extrapolated(
    mut psi: impl FnMut(f64) -> Result<f64>,
    mut potential: impl FnMut(f64) -> Result<f64>,
    energy: f64,
    grid: &[f64],
    convention: Convention,
    initial_step: impl Fn(f64) -> f64,
) -> Result<OracleReport> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty grid".into()));
    }
    let (mut worst, mut size) = (0.0f64, 0.0f64);
    for &x in grid {
        let value = psi(x)?;
        let (d2, _) = second_derivative_extrapolated(&mut psi, x, initial_step(x))?;
        worst = worst.max((d2 + convention.coefficient(potential(x)?, energy) * value).abs());
        size = size.max(value.abs());
    }
    let residual_max = if size > 0.0 { worst / size } else { worst };
    let desc = format!(
        "{} points on [{}, {}], extrapolated",
        grid.len(),
        grid[0],
        grid[grid.len() - 1]
    );
    Ok(OracleReport::new("fd_residual", residual_max, desc))
}

/// `ρ'''/ρ' - 3/2 (ρ''/ρ')²` of `ρ(r)` by central differences of the inverse map.
pub fn fd_schwarzian(map: &CoordinateMap, r: f64) -> Result<f64> {
    let h = (1e-3 * (1.0 + r)).min(r / 4.0);
    let (lo, hi) = map.r_domain();
    if !(r - 3.0 * h > lo && r + 3.0 * h < hi) {
        return Err(Error::Domain { value: r, lo, hi });
    }
    let f = |k: f64| map.inverse(r + k * h);
    let v: Vec<f64> = [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]
        .iter()
        .map(|&k| f(k))
        .collect::<Result<_>>()?;
    let d1 = (-v[5] + 8.0 * v[4] - 8.0 * v[2] + v[1]) / (12.0 * h);
    let d2 = (-v[5] + 16.0 * v[4] - 30.0 * v[3] + 16.0 * v[2] - v[1]) / (12.0 * h * h);
    let d3 = (-v[6] + 8.0 * v[5] - 13.0 * v[4] + 13.0 * v[2] - 8.0 * v[1] + v[0]) / (8.0 * h * h * h);
    Ok(d3 / d1 - 1.5 * (d2 / d1).powi(2))
}

/// `|ρ'(r) sqrt(I1(ρ(r))) - 1|` with a central difference for `ρ'`.
pub fn map_ode_defect(map: &CoordinateMap, r: f64) -> Result<f64> {
    let h = (1e-3 * (1.0 + r)).min(r / 3.0);
    let d = (-map.inverse(r + 2.0 * h)? + 8.0 * map.inverse(r + h)? - 8.0 * map.inverse(r - h)?
        + map.inverse(r - 2.0 * h)?)
        / (12.0 * h);
    let rho = map.inverse(r)?;
    Ok((d * map.params().i1(rho).sqrt() - 1.0).abs())
}
