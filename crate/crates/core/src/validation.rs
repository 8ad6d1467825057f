//! Oracle sweeps shared by the `validate` command and the test suites.
//!
//! Each check returns the worst residual it saw; [`default_suite`] pairs them with
//! thresholds on a fixed set of parameter presets.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::fd::{fd_residual, fd_residual_extrapolated, map_ode_defect, Convention, OracleReport};
use crate::oracle::ode::integrate_second_order;
use crate::params::{CaseTag, CoordinateMap, HeunSixParams};
use crate::potential::{critical_points, v_eff, v_eff_explicit_form, v_eff_schwarzian_form, PotentialFamily};
use crate::qes::{build_polynomial, constraint_gamma, required_beta};
use crate::recurrence::{casoratian, limit_check, ratio_plateau};
use crate::series::{CanonicalParams, RadialWavefunction, SeriesSolution};
use crate::special::{zero_energy_state, ReducedV4};
use crate::susy::{Superpotential, NODE_EXCLUSION};

/// `|ρ|` up to which the Taylor series are trusted by the sweeps.
pub const SERIES_REACH: f64 = 2.0;

/// One representative parameter set per case.
pub fn case_presets() -> Vec<(CaseTag, HeunSixParams)> {
    let a = [0.3, -0.5, 0.2];
    let table = [
        (CaseTag::DeltaNegB2Pos, [1.0, 0.5, 1.0]),
        (CaseTag::DeltaZeroB1Pos, [1.0, 2.0, 1.0]),
        (CaseTag::DeltaZeroB1Neg, [0.04, -0.4, 1.0]),
        (CaseTag::DeltaZeroB0B1Zero, [0.0, 0.0, 1.0]),
        (CaseTag::DeltaPosB2Pos, [-0.5, 0.5, 1.0]),
        (CaseTag::DeltaPosB2Neg, [1.0, 0.5, -1.0]),
        (CaseTag::LinearB2Zero, [0.5, 1.0, 0.0]),
        (CaseTag::LinearB0B2Zero, [0.0, 1.0, 0.0]),
        (CaseTag::ConstantB1B2Zero, [2.0, 0.0, 0.0]),
    ];
    table
        .iter()
        .map(|&(tag, b)| (tag, HeunSixParams::new(a, b).expect("preset parameters are valid")))
        .collect()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// `count` radii whose `ρ(r)` stays within [`SERIES_REACH`], trimmed 5% from each end.
pub fn series_r_grid(map: &CoordinateMap, count: usize) -> Result<Vec<f64>> {
    let (rho_lo, rho_hi) = map.rho_domain();
    let (a, b) = (rho_lo.max(-SERIES_REACH), rho_hi.min(SERIES_REACH));
    if !(b - a > 0.1) {
        return Err(Error::InvalidInput(format!(
            "ρ-domain ({rho_lo}, {rho_hi}) barely meets |ρ| ≤ {SERIES_REACH}"
        )));
    }
    let r_at = |rho: f64, end: f64| {
        if rho == end {
            Ok(map.forward(rho).unwrap_or(0.0))
        } else {
            map.forward(rho)
        }
    };
    let (ra, rb) = (r_at(a, rho_lo)?, r_at(b, rho_hi)?);
    let m = 0.05 * (rb - ra);
    Ok(linspace(ra + m, rb - m, count.max(2)))
}

/// Radii inside the r-domain, away from both ends, for map checks.
pub fn map_r_grid(map: &CoordinateMap, count: usize) -> Vec<f64> {
    let (lo, hi) = map.r_domain();
    if hi.is_finite() {
        linspace(lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo), count)
    } else {
        let (l0, l1) = ((lo + 0.1f64).ln(), 20f64.ln());
        linspace(l0, l1, count).into_iter().map(f64::exp).collect()
    }
}

/// FD residual of `ψ'' + (E - V_eff) ψ` for the assembled wavefunction.
pub fn pipeline_residual(map: &CoordinateMap, energy: f64, combo: (f64, f64), count: usize) -> Result<OracleReport> {
    let grid = series_r_grid(map, count)?;
    let psi = RadialWavefunction::new(*map, energy, combo);
    // near a singular end ψ'' dwarfs ψ, so the step scales with the distance to either end
    // and the extrapolated difference keeps the oracle's own error below the tolerance
    let (lo, hi) = map.r_domain();
    let step = |x: f64| (0.02 * (1.0 + x.abs())).min((x - lo).min(hi - x) / 4.0);
    let mut rep = fd_residual_extrapolated(|r| psi.eval(r), |r| v_eff(map, r), energy, &grid, Convention::Sh1, step)?;
    rep.name = format!("pipeline[{}]", map.tag());
    Ok(rep)
}

/// Worst of `|r(ρ(r)) - r| / r` and `|ρ(r(ρ)) - ρ| / (1 + |ρ|)` on the map grid.
pub fn roundtrip_error(map: &CoordinateMap, count: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for r in map_r_grid(map, count) {
        let rho = map.inverse(r)?;
        worst = worst.max((map.forward(rho)? - r).abs() / r);
        let rho2 = map.inverse(map.forward(rho)?)?;
        worst = worst.max((rho2 - rho).abs() / (1.0 + rho.abs()));
    }
    Ok(worst)
}

/// Worst `|ρ'(r) sqrt(I1(ρ)) - 1|` on the map grid.
pub fn map_ode_error(map: &CoordinateMap, count: usize) -> Result<f64> {
    map_r_grid(map, count)
        .into_iter()
        .map(|r| map_ode_defect(map, r))
        .try_fold(0.0f64, |m, d| d.map(|d| m.max(d)))
}

/// Worst relative gap between the Schwarzian and the explicit form of `V_eff`.
pub fn v_eff_forms_error(map: &CoordinateMap, count: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for r in map_r_grid(map, count) {
        let rho = map.inverse(r)?;
        let a = v_eff_schwarzian_form(map.params(), rho)?;
        let b = v_eff_explicit_form(map.params(), rho)?;
        worst = worst.max((a - b).abs() / b.abs().max(1.0));
    }
    Ok(worst)
}

/// Worst relative gap between `T1`, `T2` and Dopri5 integration of the canonical
/// equation from the origin, at the given points.
pub fn series_ode_error(params: &CanonicalParams, points: &[f64]) -> Result<f64> {
    let (a, b, g) = (params.alpha(), params.beta(), params.gamma());
    let rhs = |x: f64, y: f64, dy: f64| (g + 3.0 * x * x) * dy - (a + (b - 3.0) * x) * y;
    let series = [SeriesSolution::t1(params), SeriesSolution::t2(params)];
    let lo = points.iter().copied().fold(0.0, f64::min);
    let hi = points.iter().copied().fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for (s, (y0, dy0)) in series.iter().zip([(1.0, 0.0), (0.0, 1.0)]) {
        let left = integrate_second_order(rhs, 0.0, y0, dy0, lo.min(-1e-3), 1e-12)?;
        let right = integrate_second_order(rhs, 0.0, y0, dy0, hi.max(1e-3), 1e-12)?;
        for &x in points {
            let traj = if x < 0.0 { &left } else { &right };
            let numeric = traj.at(x)?[0];
            let value = s.eval(x)?;
            worst = worst.max((value - numeric).abs() / value.abs().max(1.0));
        }
    }
    Ok(worst)
}

/// Largest coefficient of the canonical operator applied to the order-`n` polynomial,
/// relative to the largest polynomial coefficient.
pub fn qes_polynomial_residual(params: &CanonicalParams, n: usize) -> Result<f64> {
    let p = build_polynomial(params, n)?;
    let size = p.coeffs.iter().fold(1.0f64, |m, c| m.max(c.abs()));
    Ok(p.residual_coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs())) / size)
}

/// Worst relative gap between the direct Casoratian and the Abel product for `n ≤ n_max`.
pub fn casoratian_error(params: &CanonicalParams, n_max: usize) -> f64 {
    let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    (0..=n_max)
        .map(|n| {
            let c = casoratian(params, id, n);
            if c.abel == 0.0 {
                c.direct.abs()
            } else {
                (c.direct - c.abel).abs() / c.abel.abs()
            }
        })
        .fold(0.0, f64::max)
}

/// Worst `|W' + W² - Ω|` on `count` points of `[lo, hi]`, skipping a radius around nodes.
pub fn riccati_sweep(w: &Superpotential, lo: f64, hi: f64, count: usize) -> Result<f64> {
    let nodes = w.nodes(lo, hi, 10 * count)?;
    let mut worst = 0.0f64;
    for x in linspace(lo, hi, count) {
        if nodes.iter().any(|n| (x - n).abs() <= NODE_EXCLUSION) {
            continue;
        }
        worst = worst.max(w.riccati_residual(x)?.abs());
    }
    Ok(worst)
}

/// Worst `|V₊ - Ω| / (1 + |Ω|)` on the same kind of grid.
pub fn v_plus_error(w: &Superpotential, lo: f64, hi: f64, count: usize) -> Result<f64> {
    let nodes = w.nodes(lo, hi, 10 * count)?;
    let mut worst = 0.0f64;
    for x in linspace(lo, hi, count) {
        if nodes.iter().any(|n| (x - n).abs() <= NODE_EXCLUSION) {
            continue;
        }
        let (_, vp) = w.partner_potentials(x)?;
        worst = worst.max((vp - w.omega(x)).abs() / (1.0 + w.omega(x).abs()));
    }
    Ok(worst)
}

/// FD residual of the zero-energy state of the pure `b2` potential under the `H0` sign.
pub fn zero_energy_residual(b2: f64, c: (f64, f64), grid: &[f64]) -> Result<f64> {
    let params = HeunSixParams::new([0.0; 3], [0.0, 0.0, b2])?;
    let map = CoordinateMap::new(params)?;
    let rep = fd_residual(
        |r| zero_energy_state(&params, c.0, c.1, r),
        |r| v_eff(&map, r),
        0.0,
        grid,
        Convention::H0,
    )?;
    Ok(rep.residual_max)
}

/// FD residual of the reduced `b2 = 0` state (Whittaker, or Bessel at `E = v0`), taking
/// the worse of the real and imaginary parts.
pub fn reduced_state_residual(sys: &ReducedV4, energy: f64, c: (f64, f64), grid: &[f64]) -> Result<f64> {
    let part = |take_im: bool| {
        fd_residual(
            |r| {
                sys.state(energy, c.0, c.1, r)
                    .map(|z| if take_im { z.im } else { z.re })
            },
            |r| Ok(sys.potential(r)),
            energy,
            grid,
            Convention::H0,
        )
    };
    let re = part(false)?.residual_max;
    if energy == sys.v0 {
        return Ok(re);
    }
    Ok(re.max(part(true)?.residual_max))
}

/// `true` when the number of positive roots is one of the Descartes-possible counts.
pub fn descartes_sound(family: &PotentialFamily) -> Result<bool> {
    let rep = critical_points(family)?;
    Ok(rep.possible_counts.contains(&rep.roots.len()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationEntry {
    pub report: OracleReport,
    pub threshold: f64,
    pub passed: bool,
}

impl ValidationEntry {
    fn new(report: OracleReport, threshold: f64) -> Self {
        let passed = report.residual_max <= threshold;
        Self {
            report,
            threshold,
            passed,
        }
    }

    fn from_result(name: String, grid: &str, r: Result<f64>, threshold: f64) -> Self {
        match r {
            Ok(v) => Self::new(OracleReport::new(name, v, grid), threshold),
            Err(e) => Self {
                report: OracleReport::new(format!("{name}: {e}"), f64::INFINITY, grid),
                threshold,
                passed: false,
            },
        }
    }
}

type Check = Box<dyn Fn() -> ValidationEntry + Send + Sync>;

fn checks() -> Vec<Check> {
    let mut out: Vec<Check> = Vec::new();
    for (tag, params) in case_presets() {
        out.push(Box::new(move || {
            let r = CoordinateMap::new(params).and_then(|m| roundtrip_error(&m, 40));
            ValidationEntry::from_result(format!("map_roundtrip[{tag}]"), "40 radii", r, 1e-10)
        }));
        out.push(Box::new(move || {
            let r = CoordinateMap::new(params).and_then(|m| map_ode_error(&m, 40));
            ValidationEntry::from_result(format!("map_ode[{tag}]"), "40 radii", r, 1e-6)
        }));
        out.push(Box::new(move || {
            let r = CoordinateMap::new(params).and_then(|m| v_eff_forms_error(&m, 40));
            ValidationEntry::from_result(format!("v_eff_forms[{tag}]"), "40 radii", r, 1e-10)
        }));
        out.push(Box::new(move || {
            let r = CoordinateMap::new(params)
                .and_then(|m| pipeline_residual(&m, 0.7, (1.0, 0.5), 200))
                .map(|rep| rep.residual_max);
            ValidationEntry::from_result(format!("pipeline[{tag}]"), "200 radii", r, 1e-6)
        }));
    }
    let series_points: Vec<f64> = (1..=5).flat_map(|k| [0.3 * k as f64, -0.3 * k as f64]).collect();
    for (a, b, g) in [(1.0, 2.0, 3.0), (0.0, -1.0, -2.0), (-0.7, 4.5, 0.4)] {
        let pts = series_points.clone();
        out.push(Box::new(move || {
            let r = series_ode_error(&CanonicalParams::new(a, b, g), &pts);
            ValidationEntry::from_result(format!("series_vs_ode[{a},{b},{g}]"), "10 points, |ρ| ≤ 1.5", r, 1e-8)
        }));
    }
    for n in 0..=4 {
        out.push(Box::new(move || {
            // the N = 0 curve is α = 0 with γ free
            let alpha = if n == 0 { 0.0 } else { -2.0 };
            let gammas = if n == 0 { vec![1.0] } else { constraint_gamma(n, alpha) };
            let r = gammas
                .first()
                .copied()
                .ok_or(Error::InvalidInput("no real γ on the curve".into()))
                .and_then(|g| qes_polynomial_residual(&CanonicalParams::new(alpha, required_beta(n), g), n));
            ValidationEntry::from_result(format!("qes_polynomial[N={n}]"), "coefficients", r, 1e-10)
        }));
    }
    out.push(Box::new(|| {
        let c = CanonicalParams::new(0.4, 1.3, -0.8);
        ValidationEntry::new(
            OracleReport::new("casoratian_abel", casoratian_error(&c, 15), "n ≤ 15"),
            1e-10,
        )
    }));
    for (a, b, g) in [(1.0, 2.0, 3.0), (0.0, -1.0, -2.0)] {
        out.push(Box::new(move || {
            let c = CanonicalParams::new(a, b, g);
            ValidationEntry::new(
                OracleReport::new(
                    format!("w_tail[{a},{b},{g}]"),
                    limit_check(&c, 200),
                    "last 10% of n ≤ 200",
                ),
                1e-20,
            )
        }));
        out.push(Box::new(move || {
            let r = ratio_plateau(&CanonicalParams::new(a, b, g), (100, 300), 3).map(|p| p.drift);
            ValidationEntry::from_result(format!("birkhoff_drift[{a},{b},{g}]"), "n ∈ [100, 300]", r, 0.02)
        }));
    }
    for c1 in [0.0, 0.5, -0.5, 1.0] {
        out.push(Box::new(move || {
            let w = Superpotential::new(CanonicalParams::new(0.0, -1.0, -2.0), c1);
            ValidationEntry::from_result(
                format!("riccati[c1={c1}]"),
                "61 points, |ρ| ≤ 1.5",
                riccati_sweep(&w, -1.5, 1.5, 61),
                1e-8,
            )
        }));
        out.push(Box::new(move || {
            let w = Superpotential::new(CanonicalParams::new(0.0, -1.0, -2.0), c1);
            ValidationEntry::from_result(
                format!("v_plus[c1={c1}]"),
                "61 points, |ρ| ≤ 1.5",
                v_plus_error(&w, -1.5, 1.5, 61),
                1e-10,
            )
        }));
    }
    out.push(Box::new(|| {
        let grid = linspace(0.2, 3.0, 60);
        ValidationEntry::from_result(
            "zero_energy_bessel".into(),
            "60 radii",
            zero_energy_residual(1.0, (1.0, 0.5), &grid),
            1e-6,
        )
    }));
    // r ≤ 1.3 keeps |z| = sqrt(v5) r² below 8, where the Kummer series cancellation
    // stays far under the FD tolerance
    out.push(Box::new(|| {
        let grid = linspace(0.3, 1.3, 60);
        let r = ReducedV4::new(0.5, 0.7).and_then(|s| reduced_state_residual(&s, 3.1, (1.0, 0.5), &grid));
        ValidationEntry::from_result("whittaker_state".into(), "60 radii", r, 1e-6)
    }));
    out.push(Box::new(|| {
        let grid = linspace(0.3, 1.3, 60);
        let r = ReducedV4::new(0.5, 0.7).and_then(|s| reduced_state_residual(&s, 0.7, (1.0, 0.5), &grid));
        ValidationEntry::from_result("bessel_state_at_v0".into(), "60 radii", r, 1e-6)
    }));
    out
}

/// The full suite on the built-in presets. Checks run on scoped threads; the result
/// order is fixed.
pub fn default_suite() -> Vec<ValidationEntry> {
    let checks = checks();
    std::thread::scope(|s| {
        let handles: Vec<_> = checks.iter().map(|c| s.spawn(c)).collect();
        handles
            .into_iter()
            .zip(&checks)
            .map(|(h, _)| {
                h.join().unwrap_or_else(|_| ValidationEntry {
                    report: OracleReport::new("panicked", f64::INFINITY, ""),
                    threshold: 0.0,
                    passed: false,
                })
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_cover_every_case() {
        let tags: Vec<CaseTag> = case_presets().iter().map(|(t, _)| *t).collect();
        assert_eq!(tags, CaseTag::ALL.to_vec());
        for (tag, p) in case_presets() {
            assert_eq!(crate::params::classify(&p).unwrap(), tag);
        }
    }

    #[test]
    fn suite_passes() {
        let suite = default_suite();
        let failed: Vec<_> = suite.iter().filter(|e| !e.passed).collect();
        for e in &suite {
            eprintln!(
                "{:<40} {:.3e} / {:.0e}",
                e.report.name, e.report.residual_max, e.threshold
            );
        }
        assert!(failed.is_empty(), "{failed:#?}");
    }
}
