//! Canonical form `y'' - (γ + 3ρ²) y' + [α + (β - 3) ρ] y = 0`, its Taylor
//! solutions about the origin and the radial wavefunction built from them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{CoordinateMap, HeunSixParams};
use crate::sum::CompensatedSum;

/// Hard cap on the number of series terms.
pub const TERM_CAP: usize = 500;
const TAIL_EPS: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergySplit {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub energy: f64,
}

/// Coefficients of `v'' + (A0 + A1 ρ + A2 ρ² - 9/4 ρ⁴) v = 0` and of its canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CanonicalParams {
    tch: [f64; 3],
    alpha: f64,
    beta: f64,
    gamma: f64,
    energy_split: Option<EnergySplit>,
}

impl CanonicalParams {
    pub fn from_tch(a0: f64, a1: f64, a2: f64) -> Self {
        Self {
            tch: [a0, a1, a2],
            alpha: a0 + a2 * a2 / 9.0,
            beta: a1,
            gamma: -2.0 * a2 / 3.0,
            energy_split: None,
        }
    }

    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        let a2 = -1.5 * gamma;
        Self {
            tch: [alpha - 0.25 * gamma * gamma, beta, a2],
            alpha,
            beta,
            gamma,
            energy_split: None,
        }
    }

    /// `A_i = a_i + E b_i`.
    pub fn from_energy(params: &HeunSixParams, energy: f64) -> Self {
        let (a, b) = (params.a(), params.b());
        let mut c = Self::from_tch(a[0] + energy * b[0], a[1] + energy * b[1], a[2] + energy * b[2]);
        c.energy_split = Some(EnergySplit { a, b, energy });
        c
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn tch(&self) -> [f64; 3] {
        self.tch
    }

    pub fn energy_split(&self) -> Option<EnergySplit> {
        self.energy_split
    }

    /// `(α, -β, γ)`, the parameters of the reflected solution.
    pub fn reflected(&self) -> Self {
        Self::new(self.alpha, -self.beta, self.gamma)
    }

    /// `Ω(ρ) = -A0 - A1 ρ - A2 ρ² + 9/4 ρ⁴`.
    pub fn omega(&self, rho: f64) -> f64 {
        let [a0, a1, a2] = self.tch;
        -a0 + rho * (-a1 + rho * (-a2 + 2.25 * rho * rho))
    }
}

pub fn canonicalize(a0: f64, a1: f64, a2: f64) -> CanonicalParams {
    CanonicalParams::from_tch(a0, a1, a2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SeriesKind {
    T1,
    T2,
    PolyW,
}

/// Value and first two derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub fn scale(self, c: f64) -> Self {
        Jet {
            value: c * self.value,
            d1: c * self.d1,
            d2: c * self.d2,
        }
    }
}

impl std::ops::Add for Jet {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Jet {
            value: self.value + o.value,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
        }
    }
}

/// Coefficient stream of a series solution; term `n` multiplies `ρ^(n + shift)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesSolution {
    pub kind: SeriesKind,
    pub coeffs: Vec<f64>,
    pub params: CanonicalParams,
}

pub fn t1_coeffs(params: &CanonicalParams, n_max: usize) -> SeriesSolution {
    let (a, b, g) = (params.alpha, params.beta, params.gamma);
    let mut e = Vec::with_capacity(n_max.max(2) + 1);
    e.extend_from_slice(&[1.0, 0.0, -0.5 * a]);
    for n in 3..=n_max {
        let nf = n as f64;
        let v = ((nf - 1.0) * g * e[n - 1] - a * e[n - 2] - (b + 6.0 - 3.0 * nf) * e[n - 3]) / (nf * (nf - 1.0));
        e.push(v);
    }
    e.truncate(n_max.max(2) + 1);
    SeriesSolution {
        kind: SeriesKind::T1,
        coeffs: e,
        params: *params,
    }
}

pub fn t2_coeffs(params: &CanonicalParams, n_max: usize) -> SeriesSolution {
    let (a, b, g) = (params.alpha, params.beta, params.gamma);
    let mut s = Vec::with_capacity(n_max.max(2) + 1);
    s.extend_from_slice(&[1.0, 0.5 * g, (g * g - a) / 6.0]);
    for n in 3..=n_max {
        let nf = n as f64;
        let v = (nf * g * s[n - 1] - a * s[n - 2] - (b + 3.0 - 3.0 * nf) * s[n - 3]) / (nf * (nf + 1.0));
        s.push(v);
    }
    SeriesSolution {
        kind: SeriesKind::T2,
        coeffs: s,
        params: *params,
    }
}

impl SeriesSolution {
    pub fn t1(params: &CanonicalParams) -> Self {
        t1_coeffs(params, TERM_CAP)
    }

    pub fn t2(params: &CanonicalParams) -> Self {
        t2_coeffs(params, TERM_CAP)
    }

    fn shift(&self) -> usize {
        match self.kind {
            SeriesKind::T2 => 1,
            SeriesKind::T1 | SeriesKind::PolyW => 0,
        }
    }

    /// Number of stored terms.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, rho: f64) -> Result<f64> {
        Ok(self.eval_jet(rho)?.value)
    }

    /// Value and term-wise first and second derivatives.
    ///
    /// Summation stops once three consecutive terms of all three sums are below
    /// `1e-16 (1 + |partial|)`. Polynomials are always summed in full.
    pub fn eval_jet(&self, rho: f64) -> Result<Jet> {
        let shift = self.shift();
        let (mut s0, mut s1, mut s2) = (CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new());
        // powers rho^(k-2), rho^(k-1), rho^k for exponent k
        let mut pw = [0.0f64; 3];
        let mut small_run = 0;
        for (n, &c) in self.coeffs.iter().enumerate() {
            let k = n + shift;
            pw = match k {
                0 => [0.0, 0.0, 1.0],
                1 => [0.0, 1.0, rho],
                2 => [1.0, rho, rho * rho],
                _ if n == 0 => [rho.powi(k as i32 - 2), rho.powi(k as i32 - 1), rho.powi(k as i32)],
                _ => [pw[1], pw[2], pw[2] * rho],
            };
            let kf = k as f64;
            let t0 = c * pw[2];
            let t1 = c * kf * pw[1];
            let t2 = c * kf * (kf - 1.0) * pw[0];
            s0 += t0;
            s1 += t1;
            s2 += t2;
            if self.kind == SeriesKind::PolyW {
                continue;
            }
            let small = t0.abs() <= TAIL_EPS * (1.0 + s0.value().abs())
                && t1.abs() <= TAIL_EPS * (1.0 + s1.value().abs())
                && t2.abs() <= TAIL_EPS * (1.0 + s2.value().abs());
            small_run = if small { small_run + 1 } else { 0 };
            if small_run == 3 {
                return Ok(Jet {
                    value: s0.value(),
                    d1: s1.value(),
                    d2: s2.value(),
                });
            }
        }
        if self.kind == SeriesKind::PolyW {
            Ok(Jet {
                value: s0.value(),
                d1: s1.value(),
                d2: s2.value(),
            })
        } else {
            Err(Error::Truncation {
                cap: self.coeffs.len(),
                at: rho,
            })
        }
    }

    /// `y'' - (γ + 3ρ²) y' + [α + (β - 3) ρ] y` from the term-wise derivatives.
    pub fn ode_residual(&self, rho: f64) -> Result<f64> {
        let j = self.eval_jet(rho)?;
        Ok(canonical_operator(&self.params, rho, j))
    }
}

pub fn canonical_operator(p: &CanonicalParams, rho: f64, j: Jet) -> f64 {
    j.d2 - (p.gamma + 3.0 * rho * rho) * j.d1 + (p.alpha + (p.beta - 3.0) * rho) * j.value
}

pub fn eval_series(s: &SeriesSolution, rho: f64) -> Result<f64> {
    s.eval(rho)
}

/// `T1 T2' - T1' T2`.
pub fn wronskian(params: &CanonicalParams, rho: f64) -> Result<f64> {
    let a = SeriesSolution::t1(params).eval_jet(rho)?;
    let b = SeriesSolution::t2(params).eval_jet(rho)?;
    Ok(a.value * b.d1 - a.d1 * b.value)
}

/// `γ T2(ρ) + T1(ρ) - exp(ρ³ + γρ) T1(α, -β, γ; -ρ)`.
pub fn decarreau_identity_residual(params: &CanonicalParams, rho: f64) -> Result<f64> {
    let t1 = SeriesSolution::t1(params).eval(rho)?;
    let t2 = SeriesSolution::t2(params).eval(rho)?;
    let refl = SeriesSolution::t1(&params.reflected()).eval(-rho)?;
    let g = params.gamma;
    Ok(g * t2 + t1 - (rho.powi(3) + g * rho).exp() * refl)
}

/// `ψ(r) = I1^{1/4} exp((A2/3)ρ - ρ³/2) [c1 T1(ρ) + c2 T2(ρ)]` at `ρ = ρ(r)`.
#[derive(Debug, Clone)]
pub struct RadialWavefunction {
    map: CoordinateMap,
    canonical: CanonicalParams,
    energy: f64,
    combo: (f64, f64),
    t1: SeriesSolution,
    t2: SeriesSolution,
}

impl RadialWavefunction {
    pub fn new(map: CoordinateMap, energy: f64, combo: (f64, f64)) -> Self {
        let canonical = CanonicalParams::from_energy(map.params(), energy);
        Self {
            t1: SeriesSolution::t1(&canonical),
            t2: SeriesSolution::t2(&canonical),
            map,
            canonical,
            energy,
            combo,
        }
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn canonical(&self) -> &CanonicalParams {
        &self.canonical
    }

    pub fn map(&self) -> &CoordinateMap {
        &self.map
    }

    /// Solution of the canonical equation entering the wavefunction.
    pub fn heun_factor(&self, rho: f64) -> Result<f64> {
        let (c1, c2) = self.combo;
        let mut y = 0.0;
        if c1 != 0.0 {
            y += c1 * self.t1.eval(rho)?;
        }
        if c2 != 0.0 {
            y += c2 * self.t2.eval(rho)?;
        }
        Ok(y)
    }

    /// `I1^{1/4} exp((A2/3)ρ - ρ³/2)`.
    pub fn prefactor(&self, rho: f64) -> f64 {
        let a2 = self.canonical.tch[2];
        self.map.params().i1(rho).max(0.0).powf(0.25) * (a2 / 3.0 * rho - 0.5 * rho.powi(3)).exp()
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        let rho = self.map.inverse(r)?;
        let y = self.heun_factor(rho)?;
        Ok(if y == 0.0 { 0.0 } else { self.prefactor(rho) * y })
    }
}

pub fn assemble_wavefunction(
    params: &HeunSixParams,
    energy: f64,
    map: &CoordinateMap,
    combo: (f64, f64),
    r: f64,
) -> Result<f64> {
    debug_assert_eq!(params, map.params());
    RadialWavefunction::new(*map, energy, combo).eval(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn canonical_examples() {
        let c = canonicalize(0.0, 0.0, 0.0);
        assert_eq!((c.alpha(), c.beta(), c.gamma()), (0.0, 0.0, 0.0));
        let c = canonicalize(1.0, 2.0, 3.0);
        assert_eq!((c.alpha(), c.beta(), c.gamma()), (2.0, 2.0, -2.0));
        let back = CanonicalParams::new(2.0, 2.0, -2.0);
        assert_eq!(back.tch(), [1.0, 2.0, 3.0]);
    }

    #[test]
    fn coefficient_examples() {
        let c = CanonicalParams::new(2.0, 0.0, 0.0);
        assert_eq!(t1_coeffs(&c, 5).coeffs[2], -1.0);
        let z = CanonicalParams::new(0.0, 0.0, 0.0);
        let e = t1_coeffs(&z, 5).coeffs;
        assert_eq!((e[0], e[1], e[3]), (1.0, 0.0, 0.5));
        let s = t2_coeffs(&CanonicalParams::new(0.0, 0.0, 4.0), 4).coeffs;
        assert_eq!(s[1], 2.0);
        let s = t2_coeffs(&CanonicalParams::new(6.0, 0.0, 0.0), 4).coeffs;
        assert_eq!(s[2], -1.0);
        let s = t2_coeffs(&z, 4).coeffs;
        assert_eq!(s[3], 0.5);
    }

    #[test]
    fn values_at_origin() {
        let c = CanonicalParams::new(1.0, 2.0, 3.0);
        assert_eq!(SeriesSolution::t1(&c).eval(0.0).unwrap(), 1.0);
        let j = SeriesSolution::t2(&c).eval_jet(0.0).unwrap();
        assert_eq!((j.value, j.d1), (0.0, 1.0));
    }

    #[test]
    fn wronskian_is_abel() {
        let c = CanonicalParams::new(0.7, -1.2, 0.4);
        for rho in [-1.5, -0.3, 0.0, 0.8, 1.9] {
            let w = wronskian(&c, rho).unwrap();
            let abel = (0.4 * rho + rho * rho * rho).exp();
            assert_relative_eq!(w, abel, max_relative = 1e-12);
        }
    }

    #[test]
    fn decarreau_examples() {
        let c = CanonicalParams::new(1.0, 2.0, 3.0);
        assert_eq!(decarreau_identity_residual(&c, 0.0).unwrap(), 0.0);
        assert!(decarreau_identity_residual(&c, 0.3).unwrap().abs() < 1e-12);
        let c = CanonicalParams::new(1.3, 0.4, 0.0);
        assert!(decarreau_identity_residual(&c, -0.9).unwrap().abs() < 1e-12);
    }

    #[test]
    fn ode_residual_small() {
        let c = CanonicalParams::new(-1.1, 2.5, 0.9);
        for s in [SeriesSolution::t1(&c), SeriesSolution::t2(&c)] {
            for rho in [-2.0, -0.5, 0.0, 1.0, 2.0] {
                assert!(s.ode_residual(rho).unwrap().abs() < 1e-10);
            }
        }
    }

    #[test]
    fn truncation_error_when_cap_too_small() {
        let c = CanonicalParams::new(1.0, 2.0, 3.0);
        assert!(matches!(t1_coeffs(&c, 10).eval(1.5), Err(Error::Truncation { .. })));
    }

    #[test]
    fn quartic_wavefunction() {
        let p = HeunSixParams::new([0.0; 3], [1.0, 0.0, 0.0]).unwrap();
        let map = CoordinateMap::new(p).unwrap();
        let e = 1.7;
        let c = CanonicalParams::from_energy(&p, e);
        let t1 = SeriesSolution::t1(&c);
        for r in [0.2, 0.9] {
            let psi = assemble_wavefunction(&p, e, &map, (1.0, 0.0), r).unwrap();
            assert_relative_eq!(
                psi,
                (-0.5 * r * r * r).exp() * t1.eval(r).unwrap(),
                max_relative = 1e-14
            );
        }
        assert_eq!(assemble_wavefunction(&p, e, &map, (0.0, 0.0), 0.5).unwrap(), 0.0);
    }
}
