//! Superpotential of the canonical operator `v'' - Ω v`, its Riccati equation,
//! the partner potentials `V± = W² ± W'` and the ground state of `H₋`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::ode::integrate_second_order;
use crate::oracle::shooting::{LeftBoundary, SturmProblem};
use crate::roots::bracketed_root;
use crate::series::{CanonicalParams, Jet, SeriesSolution};

/// `|D| / (|e^f T1| + |c1 e^{-f} T1~|)` below which `W` is treated as sitting on a pole.
const NODE_TOL: f64 = 1e-12;
/// Points closer than this to a node are skipped by residual sweeps.
pub const NODE_EXCLUSION: f64 = 1e-3;

/// `W = D'/D` with `D = e^f T1(α,β,γ;ρ) + c1 e^{-f} T1(α,-β,γ;-ρ)`, `f = -γρ/2 - ρ³/2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Superpotential {
    params: CanonicalParams,
    c1: f64,
    t1: SeriesSolution,
    t1_reflected: SeriesSolution,
}

/// `D`, `D'` and the numerator pair `N = 6D'`, `N'` at one point.
#[derive(Debug, Clone, Copy)]
struct Parts {
    den: f64,
    den_d: f64,
    num: f64,
    num_d: f64,
}

/// `(F, F')` with `F = -3(γ + 3x²) T + 6 T'`.
fn f_pair(gamma: f64, x: f64, j: Jet) -> (f64, f64) {
    let s = gamma + 3.0 * x * x;
    (
        -3.0 * s * j.value + 6.0 * j.d1,
        -18.0 * x * j.value - 3.0 * s * j.d1 + 6.0 * j.d2,
    )
}

impl Superpotential {
    pub fn new(params: CanonicalParams, c1: f64) -> Self {
        Self {
            t1: SeriesSolution::t1(&params),
            t1_reflected: SeriesSolution::t1(&params.reflected()),
            params,
            c1,
        }
    }

    pub fn params(&self) -> &CanonicalParams {
        &self.params
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn series_order(&self) -> usize {
        self.t1.order().max(self.t1_reflected.order())
    }

    pub fn omega(&self, rho: f64) -> f64 {
        self.params.omega(rho)
    }

    pub fn f(&self, rho: f64) -> f64 {
        -0.5 * self.params.gamma() * rho - 0.5 * rho.powi(3)
    }

    fn f_prime(&self, rho: f64) -> f64 {
        -0.5 * (self.params.gamma() + 3.0 * rho * rho)
    }

    fn parts(&self, rho: f64) -> Result<Parts> {
        let g = self.params.gamma();
        let j = self.t1.eval_jet(rho)?;
        let (ef, fp) = (self.f(rho).exp(), self.f_prime(rho));
        let (big_f, big_fp) = f_pair(g, rho, j);
        let mut p = Parts {
            den: ef * j.value,
            den_d: ef * (fp * j.value + j.d1),
            num: ef * big_f,
            num_d: ef * (fp * big_f + big_fp),
        };
        let mut scale = p.den.abs();
        if self.c1 != 0.0 {
            let jr = self.t1_reflected.eval_jet(-rho)?;
            let emf = self.c1 * (-self.f(rho)).exp();
            let (rf, rfp) = f_pair(g, -rho, jr);
            p.den += emf * jr.value;
            p.den_d -= emf * (fp * jr.value + jr.d1);
            p.num -= emf * rf;
            p.num_d += emf * (fp * rf + rfp);
            scale += (emf * jr.value).abs();
        }
        if !(p.den.abs() > NODE_TOL * scale) {
            return Err(Error::NodeSingularity { rho });
        }
        Ok(p)
    }

    /// `W(ρ) = N / (6 D)`.
    pub fn w(&self, rho: f64) -> Result<f64> {
        let p = self.parts(rho)?;
        Ok(p.num / (6.0 * p.den))
    }

    /// `W'(ρ) = (N' D - N D') / (6 D²)` from the differentiated series.
    pub fn w_prime(&self, rho: f64) -> Result<f64> {
        let p = self.parts(rho)?;
        Ok((p.num_d * p.den - p.num * p.den_d) / (6.0 * p.den * p.den))
    }

    /// Zeros of `D` in `[lo, hi]`, located on a `samples`-point grid and refined.
    pub fn nodes(&self, lo: f64, hi: f64, samples: usize) -> Result<Vec<f64>> {
        let den = |x: f64| -> Result<f64> {
            let j = self.t1.eval_jet(x)?;
            let mut d = self.f(x).exp() * j.value;
            if self.c1 != 0.0 {
                d += self.c1 * (-self.f(x)).exp() * self.t1_reflected.eval(-x)?;
            }
            Ok(d)
        };
        let m = samples.max(2);
        let grid: Vec<f64> = (0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64).collect();
        let vals = grid.iter().map(|&x| den(x)).collect::<Result<Vec<_>>>()?;
        let mut out = Vec::new();
        for i in 0..m - 1 {
            if vals[i] == 0.0 {
                out.push(grid[i]);
            } else if vals[i] * vals[i + 1] < 0.0 {
                out.push(bracketed_root(|x| den(x).unwrap_or(f64::NAN), grid[i], grid[i + 1])?);
            }
        }
        Ok(out)
    }

    /// `W' + W² - Ω`.
    pub fn riccati_residual(&self, rho: f64) -> Result<f64> {
        let w = self.w(rho)?;
        Ok(self.w_prime(rho)? + w * w - self.omega(rho))
    }

    /// `(V₋, V₊) = (W² - W', W² + W')`.
    pub fn partner_potentials(&self, rho: f64) -> Result<(f64, f64)> {
        let w = self.w(rho)?;
        let wp = self.w_prime(rho)?;
        Ok((w * w - wp, w * w + wp))
    }

    /// `V₋` in the form `Ω - 2W'`.
    pub fn v_minus_from_omega(&self, rho: f64) -> Result<f64> {
        Ok(self.omega(rho) - 2.0 * self.w_prime(rho)?)
    }

    /// `v = e^f T1` with its first two derivatives.
    pub fn zero_mode_jet(&self, rho: f64) -> Result<Jet> {
        let j = self.t1.eval_jet(rho)?;
        let (e, fp, fpp) = (self.f(rho).exp(), self.f_prime(rho), -3.0 * rho);
        Ok(Jet {
            value: e * j.value,
            d1: e * (fp * j.value + j.d1),
            d2: e * ((fpp + fp * fp) * j.value + 2.0 * fp * j.d1 + j.d2),
        })
    }

    /// `(v'' - Ω v) / (|v''| + |Ω v|)` for `v = e^f T1`.
    pub fn zero_mode_residual(&self, rho: f64) -> Result<f64> {
        let v = self.zero_mode_jet(rho)?;
        let ov = self.omega(rho) * v.value;
        Ok((v.d2 - ov) / (v.d2.abs() + ov.abs()).max(f64::MIN_POSITIVE))
    }

    /// `(d/dρ + W)(-d/dρ + W) φ + (φ'' - Ω φ)`, relative to the size of `L_T φ`.
    ///
    /// The outer factor is expanded analytically: `-φ'' + (W' + W²) φ`.
    pub fn factorization_residual(&self, rho: f64, phi: Jet) -> Result<f64> {
        let w = self.w(rho)?;
        let wp = self.w_prime(rho)?;
        let product = -phi.d2 + (wp + w * w) * phi.value;
        let lt = phi.d2 - self.omega(rho) * phi.value;
        let scale = phi.d2.abs() + (self.omega(rho) * phi.value).abs();
        Ok((product + lt) / scale.max(f64::MIN_POSITIVE))
    }

    /// `W(-ρ; α, β) + W(ρ; α, -β)`, which vanishes for `γ = 0`, `c1 = 0`.
    pub fn parity_residual(&self, rho: f64) -> Result<f64> {
        let other = Superpotential::new(self.params.reflected(), self.c1);
        Ok(self.w(-rho)? + other.w(rho)?)
    }
}

pub fn superpotential(w: &Superpotential, rho: f64) -> Result<f64> {
    w.w(rho)
}

pub fn riccati_residual(w: &Superpotential, rho: f64) -> Result<f64> {
    w.riccati_residual(rho)
}

pub fn partner_potentials(w: &Superpotential, rho: f64) -> Result<(f64, f64)> {
    w.partner_potentials(rho)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundStateReport {
    pub domain: (f64, f64),
    /// Zeros of `v` in the domain; any zero makes `V₋` singular.
    pub nodes: Vec<f64>,
    /// `|1/v|` at the two ends relative to its maximum on the domain.
    pub zero_mode_tails: (f64, f64),
    pub normalizable: bool,
    pub lowest_h_minus: Option<f64>,
    /// `Some(true)` when the zero mode is normalizable and `H₋` has a level at 0.
    pub unbroken: Option<bool>,
}

/// Numerical evidence on whether `H₋ = -d² + V₋` has a zero-energy ground state.
///
/// `v` is integrated from the series data at the point of the domain nearest 0, so
/// `W = v'/v` and `V₋ = 2W² - Ω` are available on the whole domain. The candidate zero
/// mode of `H₋` is `exp(-∫W) = 1/v`.
pub fn ground_state_energy_check(w: &Superpotential, domain: (f64, f64)) -> Result<GroundStateReport> {
    let (lo, hi) = domain;
    if !(hi > lo) {
        return Err(Error::InvalidInput(format!("domain ({lo}, {hi})")));
    }
    let start = 0f64.clamp(lo, hi);
    let p = w.parts(start).or_else(|_| w.parts(start + 10.0 * NODE_EXCLUSION))?;
    let (v0, dv0) = (p.den, p.den_d);
    let omega = |x: f64| w.omega(x);
    let left = integrate_second_order(|x, y, _| omega(x) * y, start, v0, dv0, lo, 1e-12)?;
    let right = integrate_second_order(|x, y, _| omega(x) * y, start, v0, dv0, hi, 1e-12)?;
    let v_at = |x: f64| -> [f64; 2] {
        let traj = if x < start { &left } else { &right };
        traj.at(x).unwrap_or([f64::NAN; 2])
    };

    let m = 4000;
    let grid: Vec<f64> = (0..=m).map(|i| lo + (hi - lo) * i as f64 / m as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&x| v_at(x)[0]).collect();
    let nodes: Vec<f64> = grid
        .windows(2)
        .zip(vals.windows(2))
        .filter(|(_, v)| v[0] * v[1] <= 0.0)
        .filter_map(|(x, _)| bracketed_root(|t| v_at(t)[0], x[0], x[1]).ok())
        .collect();

    let inv_max = vals.iter().map(|v| 1.0 / v.abs()).fold(0.0, f64::max);
    let tails = (1.0 / (vals[0].abs() * inv_max), 1.0 / (vals[m].abs() * inv_max));
    let normalizable = nodes.is_empty() && tails.0 < 1e-6 && tails.1 < 1e-6;

    let mut report = GroundStateReport {
        domain,
        nodes,
        zero_mode_tails: tails,
        normalizable,
        lowest_h_minus: None,
        unbroken: None,
    };
    let v_minus = |x: f64| {
        let [v, dv] = v_at(x);
        let ww = dv / v;
        2.0 * ww * ww - omega(x)
    };
    // each node is a 2/(ρ - ρ0)² barrier, so the pieces between nodes decouple
    let mut cuts = vec![lo];
    for n in &report.nodes {
        cuts.push(n - NODE_EXCLUSION);
        cuts.push(n + NODE_EXCLUSION);
    }
    cuts.push(hi);
    let mut lowest: Option<f64> = None;
    for piece in cuts.chunks(2) {
        let (a, b) = (piece[0].max(lo), piece[1].min(hi));
        if b - a < 4.0 * NODE_EXCLUSION {
            continue;
        }
        let inner: Vec<f64> = (1..200).map(|i| a + (b - a) * i as f64 / 200.0).collect();
        let matching = inner
            .iter()
            .copied()
            .min_by(|x, y| v_minus(*x).total_cmp(&v_minus(*y)))
            .unwrap_or(0.5 * (a + b));
        let floor = v_minus(matching);
        let prob = SturmProblem {
            q: v_minus,
            w: |_: f64| 1.0,
            left: a,
            right: b,
            left_bc: LeftBoundary::Dirichlet,
            matching,
        };
        if let Ok(e0) = prob.eigenvalue(0, floor, floor + 10.0) {
            lowest = Some(lowest.map_or(e0, |l: f64| l.min(e0)));
        }
    }
    report.lowest_h_minus = lowest;
    report.unbroken = lowest.map(|e0| normalizable && e0.abs() <= 1e-4);
    Ok(report)
}
