//! Closed-form states: the zero-energy Bessel state of the pure `b2` case and the
//! Whittaker/Bessel states of the reduced `b2 = 0` potential.
//!
//! Both solve `ψ'' + (V - E) ψ = 0`, the operator `d²/dr² + V` (see [`Convention::H0`]).
//!
//! [`Convention::H0`]: crate::oracle::Convention::H0

use num_complex::Complex64;
use serde::Serialize;

use super::bessel::{bessel_j_with_derivative, bessel_y_with_derivative};
use super::whittaker::{whittaker_m, whittaker_w};
use crate::error::{Error, Result};
use crate::params::HeunSixParams;

/// Bessel order of the zero-energy state, from the `-3/(16 r²)` term.
pub fn zero_energy_order() -> f64 {
    7f64.sqrt() / 6.0
}

/// Bessel order and Whittaker `μ` of the reduced `b2 = 0` potential, from `-5/(36 r²)`.
pub fn reduced_order() -> f64 {
    14f64.sqrt() / 12.0
}

/// `ψ0(r) = sqrt(r) [C1 J_ν(k r^{3/2}) + C2 Y_ν(k r^{3/2})]`, `k = 2 sqrt(e4) / 3`,
/// `e4 = 9 / (2 b2^{3/2})`.
pub fn zero_energy_state(params: &HeunSixParams, c1: f64, c2: f64, r: f64) -> Result<f64> {
    let [b0, b1, b2] = params.b();
    if params.a() != [0.0; 3] || b0 != 0.0 || b1 != 0.0 || !(b2 > 0.0) {
        return Err(Error::InvalidInput(
            "zero-energy state needs a0 = a1 = a2 = b0 = b1 = 0 and b2 > 0".into(),
        ));
    }
    if !(r > 0.0) {
        return Err(Error::Domain {
            value: r,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    if c1 == 0.0 && c2 == 0.0 {
        return Ok(0.0);
    }
    let e4 = 9.0 / (2.0 * b2 * b2.sqrt());
    let x = 2.0 * e4.sqrt() / 3.0 * r.powf(1.5);
    let nu = zero_energy_order();
    let mut z = 0.0;
    if c1 != 0.0 {
        z += c1 * bessel_j_with_derivative(nu, x)?.0;
    }
    if c2 != 0.0 {
        z += c2 * bessel_y_with_derivative(nu, x)?.0;
    }
    Ok(r.sqrt() * z)
}

/// Normalisation of the Whittaker index `κ = i (E - v0) / (4 s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum KappaConvention {
    /// `s = sqrt(v5)`.
    #[default]
    SqrtV5,
    /// `s = sqrt(5)`.
    SqrtFive,
}

/// `V = v0 - 5/(36 r²) + v5 r²` with `v5 = 81 / (16 b1²)`: the `b2 = 0` potential
/// with `v1 = v3 = v4 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedV4 {
    pub b1: f64,
    pub v0: f64,
    pub kappa_convention: KappaConvention,
}

impl ReducedV4 {
    pub fn new(b1: f64, v0: f64) -> Result<Self> {
        if !(b1 > 0.0) {
            return Err(Error::InvalidParams(format!("b1 = {b1} must be positive")));
        }
        Ok(Self {
            b1,
            v0,
            kappa_convention: KappaConvention::SqrtV5,
        })
    }

    pub fn with_kappa_convention(mut self, c: KappaConvention) -> Self {
        self.kappa_convention = c;
        self
    }

    pub fn v5(&self) -> f64 {
        81.0 / (16.0 * self.b1 * self.b1)
    }

    pub fn potential(&self, r: f64) -> f64 {
        self.v0 - 5.0 / (36.0 * r * r) + self.v5() * r * r
    }

    pub fn kappa(&self, energy: f64) -> Complex64 {
        let s = match self.kappa_convention {
            KappaConvention::SqrtV5 => self.v5().sqrt(),
            KappaConvention::SqrtFive => 5f64.sqrt(),
        };
        Complex64::new(0.0, (energy - self.v0) / (4.0 * s))
    }

    /// `r^{-1/2} [C1 M_{κ,μ}(z) + C2 W_{κ,μ}(z)]`, `z = i sqrt(v5) r²`.
    pub fn whittaker_state(&self, energy: f64, c1: Complex64, c2: Complex64, r: f64) -> Result<Complex64> {
        if !(r > 0.0) {
            return Err(Error::Domain {
                value: r,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        let z = Complex64::new(0.0, self.v5().sqrt() * r * r);
        let (kappa, mu) = (self.kappa(energy), reduced_order());
        let mut w = Complex64::from(0.0);
        if c1 != Complex64::from(0.0) {
            w += c1 * whittaker_m(kappa, mu, z)?.0;
        }
        if c2 != Complex64::from(0.0) {
            w += c2 * whittaker_w(kappa, mu, z)?.0;
        }
        Ok(w / r.sqrt())
    }

    /// `sqrt(r) [C1 J_μ(sqrt(v5) r² / 2) + C2 Y_μ(·)]`, the state at `E = v0`.
    pub fn bessel_state(&self, c1: f64, c2: f64, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain {
                value: r,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        let x = 0.5 * self.v5().sqrt() * r * r;
        let mu = reduced_order();
        let mut z = 0.0;
        if c1 != 0.0 {
            z += c1 * bessel_j_with_derivative(mu, x)?.0;
        }
        if c2 != 0.0 {
            z += c2 * bessel_y_with_derivative(mu, x)?.0;
        }
        Ok(r.sqrt() * z)
    }

    /// The Bessel form at `E = v0`, the Whittaker form otherwise.
    pub fn state(&self, energy: f64, c1: f64, c2: f64, r: f64) -> Result<Complex64> {
        if energy == self.v0 {
            Ok(Complex64::from(self.bessel_state(c1, c2, r)?))
        } else {
            self.whittaker_state(energy, Complex64::from(c1), Complex64::from(c2), r)
        }
    }
}

/// `ψ_E(r)` of the reduced potential `v0 - 5/(36 r²) + v5 r²`, `v0 = -a1 / b1`.
pub fn v4_reduced_state(b1: f64, v0: f64, energy: f64, c1: f64, c2: f64, r: f64) -> Result<Complex64> {
    ReducedV4::new(b1, v0)?.state(energy, c1, c2, r)
}
