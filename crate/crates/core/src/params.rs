//! The six-parameter family, its case classification and the coordinate maps
//! `rho <-> r` solving `rho'(r) = 1 / sqrt(I1(rho(r)))`.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots::bracketed_root;

/// `a_i` shape the potential, `b_i` couple to the energy: `A_i = a_i + E b_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeunSixParams {
    a: [f64; 3],
    b: [f64; 3],
    delta: f64,
}

impl HeunSixParams {
    pub fn new(a: [f64; 3], b: [f64; 3]) -> Result<Self> {
        if a.iter().chain(b.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("non-finite coefficient".into()));
        }
        if b.iter().all(|&x| x == 0.0) {
            return Err(Error::InvalidParams("b0 = b1 = b2 = 0 (I1 identically zero)".into()));
        }
        let delta = b[1] * b[1] - 4.0 * b[0] * b[2];
        Ok(Self { a, b, delta })
    }

    /// From `[a0, a1, a2, b0, b1, b2]`.
    pub fn from_slice(v: &[f64]) -> Result<Self> {
        match v {
            [a0, a1, a2, b0, b1, b2] => Self::new([*a0, *a1, *a2], [*b0, *b1, *b2]),
            _ => Err(Error::InvalidParams(format!(
                "expected 6 values a0,a1,a2,b0,b1,b2, got {}",
                v.len()
            ))),
        }
    }

    pub fn a(&self) -> [f64; 3] {
        self.a
    }

    pub fn b(&self) -> [f64; 3] {
        self.b
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.a[0], self.a[1], self.a[2], self.b[0], self.b[1], self.b[2]]
    }

    /// `I0(rho) = a0 + a1 rho + a2 rho^2 - 9/4 rho^4`
    pub fn i0(&self, rho: f64) -> f64 {
        let [a0, a1, a2] = self.a;
        a0 + rho * (a1 + rho * (a2 - 2.25 * rho * rho))
    }

    /// `I1(rho) = b0 + b1 rho + b2 rho^2`
    pub fn i1(&self, rho: f64) -> f64 {
        let [b0, b1, b2] = self.b;
        b0 + rho * (b1 + rho * b2)
    }

    pub fn i1_prime(&self, rho: f64) -> f64 {
        self.b[1] + 2.0 * self.b[2] * rho
    }

    pub fn i1_second(&self) -> f64 {
        2.0 * self.b[2]
    }

    /// Sign of the discriminant with a relative dead zone, so that parameters
    /// like `b1 = 2 sqrt(b0 b2)` computed in floating point still land on `Δ = 0`.
    fn delta_sign(&self) -> i8 {
        let [b0, b1, b2] = self.b;
        let scale = b1 * b1 + 4.0 * (b0 * b2).abs();
        if self.delta.abs() <= 1e-13 * scale {
            0
        } else if self.delta > 0.0 {
            1
        } else {
            -1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CaseTag {
    /// Δ < 0, b2 > 0: I1 > 0 on the whole line.
    DeltaNegB2Pos,
    /// Δ = 0, b1 > 0: `I1 = (sqrt(b2) rho + sqrt(b0))^2`.
    DeltaZeroB1Pos,
    /// Δ = 0, b1 < 0: `I1 = (sqrt(b2) rho - sqrt(b0))^2`.
    DeltaZeroB1Neg,
    /// b0 = b1 = 0, b2 > 0.
    DeltaZeroB0B1Zero,
    /// Δ > 0, b2 > 0: I1 > 0 right of the larger root.
    DeltaPosB2Pos,
    /// Δ > 0, b2 < 0: I1 > 0 between the roots; the r-range is bounded.
    DeltaPosB2Neg,
    /// b2 = 0, b1 > 0, b0 ≠ 0.
    LinearB2Zero,
    /// b0 = b2 = 0, b1 > 0.
    LinearB0B2Zero,
    /// b1 = b2 = 0, b0 > 0.
    ConstantB1B2Zero,
}

impl CaseTag {
    pub const ALL: [CaseTag; 9] = [
        CaseTag::DeltaNegB2Pos,
        CaseTag::DeltaZeroB1Pos,
        CaseTag::DeltaZeroB1Neg,
        CaseTag::DeltaZeroB0B1Zero,
        CaseTag::DeltaPosB2Pos,
        CaseTag::DeltaPosB2Neg,
        CaseTag::LinearB2Zero,
        CaseTag::LinearB0B2Zero,
        CaseTag::ConstantB1B2Zero,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseTag::DeltaNegB2Pos => "DeltaNeg_b2Pos",
            CaseTag::DeltaZeroB1Pos => "DeltaZero_b1Pos",
            CaseTag::DeltaZeroB1Neg => "DeltaZero_b1Neg",
            CaseTag::DeltaZeroB0B1Zero => "DeltaZero_b0b1Zero",
            CaseTag::DeltaPosB2Pos => "DeltaPos_b2Pos",
            CaseTag::DeltaPosB2Neg => "DeltaPos_b2Neg",
            CaseTag::LinearB2Zero => "Linear_b2Zero",
            CaseTag::LinearB0B2Zero => "Linear_b0b2Zero",
            CaseTag::ConstantB1B2Zero => "Constant_b1b2Zero",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Case of the family, from the sign pattern of `(b0, b1, b2, Δ)`.
///
/// Rejected patterns: no interval with `I1 > 0` (b2 < 0 with Δ ≤ 0, b1 = b2 = 0
/// with b0 ≤ 0) and `b2 = 0, b1 < 0`, where the increasing map has no half-line
/// of `r` to live on.
pub fn classify(params: &HeunSixParams) -> Result<CaseTag> {
    let [b0, b1, b2] = params.b;
    let ds = params.delta_sign();
    if b2 > 0.0 {
        Ok(match ds {
            -1 => CaseTag::DeltaNegB2Pos,
            1 => CaseTag::DeltaPosB2Pos,
            _ if b1 > 0.0 => CaseTag::DeltaZeroB1Pos,
            _ if b1 < 0.0 => CaseTag::DeltaZeroB1Neg,
            _ if b0 == 0.0 => CaseTag::DeltaZeroB0B1Zero,
            _ => unreachable!("Δ = 0 with b1 = 0 and b2 > 0 forces b0 = 0"),
        })
    } else if b2 < 0.0 {
        if ds > 0 {
            Ok(CaseTag::DeltaPosB2Neg)
        } else {
            Err(Error::InfeasibleCase(format!(
                "b2 = {b2} < 0 with Δ = {} ≤ 0: I1 is never positive on an interval",
                params.delta
            )))
        }
    } else if b1 > 0.0 {
        Ok(if b0 == 0.0 {
            CaseTag::LinearB0B2Zero
        } else {
            CaseTag::LinearB2Zero
        })
    } else if b1 < 0.0 {
        Err(Error::InfeasibleCase(format!(
            "b2 = 0 and b1 = {b1} < 0: rho is bounded above and r cannot start at 0"
        )))
    } else if b0 > 0.0 {
        Ok(CaseTag::ConstantB1B2Zero)
    } else {
        Err(Error::InfeasibleCase(format!("b1 = b2 = 0 with b0 = {b0} ≤ 0")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InversionMode {
    ClosedForm,
    MonotoneRootFind,
}

/// `r(rho)` and `rho(r)` for one parameter set.
///
/// The additive constant of `r(rho)` is fixed so that `r = 0` at `anchor`, the
/// lower end of `rho_domain` when finite. For Δ < 0 the lower end is `-∞`, and the
/// anchor is the vertex `-b1 / (2 b2)` of `I1`, where the closed form vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoordinateMap {
    params: HeunSixParams,
    tag: CaseTag,
    rho_domain: (f64, f64),
    r_domain: (f64, f64),
    inversion_mode: InversionMode,
    anchor: f64,
    /// Roots of I1 when Δ > 0 (ascending).
    roots: Option<(f64, f64)>,
}

/// Roots of `b2 x^2 + b1 x + b0` in ascending order, by the cancellation-free formula.
fn quadratic_roots(b0: f64, b1: f64, b2: f64, sqrt_delta: f64) -> (f64, f64) {
    let t = -0.5 * (b1 + b1.signum() * sqrt_delta);
    let (x1, x2) = if b1 == 0.0 {
        let x = sqrt_delta / (2.0 * b2.abs());
        (-x, x)
    } else {
        (t / b2, b0 / t)
    };
    if x1 <= x2 {
        (x1, x2)
    } else {
        (x2, x1)
    }
}

impl CoordinateMap {
    pub fn new(params: HeunSixParams) -> Result<Self> {
        let tag = classify(&params)?;
        let [b0, b1, b2] = params.b;
        let delta = params.delta;
        let inf = f64::INFINITY;
        let mut roots = None;
        let (rho_domain, r_hi, mode) = match tag {
            CaseTag::DeltaNegB2Pos => ((-b1 / (2.0 * b2), inf), inf, InversionMode::MonotoneRootFind),
            CaseTag::DeltaZeroB1Pos | CaseTag::DeltaZeroB0B1Zero => ((0.0, inf), inf, InversionMode::ClosedForm),
            CaseTag::DeltaZeroB1Neg => ((2.0 * (b0 / b2).sqrt(), inf), inf, InversionMode::ClosedForm),
            CaseTag::DeltaPosB2Pos => {
                let (r1, r2) = quadratic_roots(b0, b1, b2, delta.sqrt());
                roots = Some((r1, r2));
                ((r2, inf), inf, InversionMode::MonotoneRootFind)
            }
            CaseTag::DeltaPosB2Neg => {
                let (r1, r2) = quadratic_roots(b0, b1, b2, delta.sqrt());
                roots = Some((r1, r2));
                let length = PI * delta / (8.0 * (-b2).powf(1.5));
                ((r1, r2), length, InversionMode::MonotoneRootFind)
            }
            CaseTag::LinearB2Zero | CaseTag::LinearB0B2Zero => ((-b0 / b1, inf), inf, InversionMode::ClosedForm),
            CaseTag::ConstantB1B2Zero => ((0.0, inf), inf, InversionMode::ClosedForm),
        };
        Ok(Self {
            params,
            tag,
            rho_domain,
            r_domain: (0.0, r_hi),
            inversion_mode: mode,
            anchor: rho_domain.0,
            roots,
        })
    }

    pub fn params(&self) -> &HeunSixParams {
        &self.params
    }

    pub fn tag(&self) -> CaseTag {
        self.tag
    }

    pub fn rho_domain(&self) -> (f64, f64) {
        self.rho_domain
    }

    pub fn r_domain(&self) -> (f64, f64) {
        self.r_domain
    }

    pub fn inversion_mode(&self) -> InversionMode {
        self.inversion_mode
    }

    /// The `rho` at which `r = 0`.
    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    /// Whether `r` ranges over the whole half-line `(0, ∞)`.
    pub fn covers_half_line(&self) -> bool {
        self.r_domain.1.is_infinite()
    }

    /// `r(rho)`.
    pub fn forward(&self, rho: f64) -> Result<f64> {
        let (lo, hi) = self.rho_domain;
        if !(rho >= lo && rho <= hi) {
            return Err(Error::Domain { value: rho, lo, hi });
        }
        Ok(self.forward_unchecked(rho))
    }

    fn forward_unchecked(&self, rho: f64) -> f64 {
        let [b0, b1, b2] = self.params.b;
        let delta = self.params.delta;
        match self.tag {
            CaseTag::DeltaNegB2Pos => {
                let u = rho + b1 / (2.0 * b2);
                let i1 = b2 * u * u - delta / (4.0 * b2);
                0.5 * u * i1.sqrt() - delta / (8.0 * b2 * b2.sqrt()) * (2.0 * b2 * u / (-delta).sqrt()).asinh()
            }
            CaseTag::DeltaZeroB1Pos => rho * (0.5 * b2.sqrt() * rho + b0.sqrt()),
            CaseTag::DeltaZeroB1Neg => 0.5 * b2.sqrt() * rho * (rho - self.rho_domain.0),
            CaseTag::DeltaZeroB0B1Zero => 0.5 * b2.sqrt() * rho * rho,
            CaseTag::DeltaPosB2Pos => {
                let (r1, r2) = self.roots.expect("roots set for Δ > 0");
                let q = delta.sqrt();
                let u = rho + b1 / (2.0 * b2);
                let i1 = (b2 * (rho - r1) * (rho - r2)).max(0.0);
                let t = (2.0 * b2 * (rho - r2) / q).max(0.0);
                let acosh = (t + (t * (2.0 + t)).sqrt()).ln_1p();
                0.5 * u * i1.sqrt() - delta / (8.0 * b2 * b2.sqrt()) * acosh
            }
            CaseTag::DeltaPosB2Neg => {
                let (r1, r2) = self.roots.expect("roots set for Δ > 0");
                let q = delta.sqrt();
                let nb2 = -b2;
                let u = rho + b1 / (2.0 * b2);
                let i1 = (nb2 * (rho - r1) * (r2 - rho)).max(0.0);
                let t = (2.0 * nb2 * (rho - r1) / q).clamp(0.0, 2.0);
                let acos = 2.0 * (0.5 * t).sqrt().asin();
                0.5 * u * i1.sqrt() + delta / (8.0 * nb2 * nb2.sqrt()) * acos
            }
            CaseTag::LinearB2Zero | CaseTag::LinearB0B2Zero => {
                let s = (b1 * (rho - self.rho_domain.0)).max(0.0);
                2.0 / (3.0 * b1) * s * s.sqrt()
            }
            CaseTag::ConstantB1B2Zero => b0.sqrt() * rho,
        }
    }

    /// `rho(r)`.
    pub fn inverse(&self, r: f64) -> Result<f64> {
        let (lo, hi) = self.r_domain;
        if !(r >= lo && r <= hi) {
            return Err(Error::Domain { value: r, lo, hi });
        }
        if r == 0.0 {
            return Ok(self.anchor);
        }
        let [b0, b1, b2] = self.params.b;
        match self.tag {
            CaseTag::DeltaZeroB1Pos => {
                let s = b0.sqrt();
                Ok(2.0 * r / (s + (b0 + 2.0 * b2.sqrt() * r).sqrt()))
            }
            CaseTag::DeltaZeroB1Neg => Ok((b0.sqrt() + (b0 + 2.0 * b2.sqrt() * r).sqrt()) / b2.sqrt()),
            CaseTag::DeltaZeroB0B1Zero => Ok((2.0 * r / b2.sqrt()).sqrt()),
            CaseTag::LinearB2Zero | CaseTag::LinearB0B2Zero => {
                Ok(self.rho_domain.0 + (1.5 * b1 * r).powf(2.0 / 3.0) / b1)
            }
            CaseTag::ConstantB1B2Zero => Ok(r / b0.sqrt()),
            CaseTag::DeltaNegB2Pos | CaseTag::DeltaPosB2Pos | CaseTag::DeltaPosB2Neg => self.inverse_by_root(r),
        }
    }

    fn inverse_by_root(&self, r: f64) -> Result<f64> {
        let (lo, hi) = self.rho_domain;
        if r == self.r_domain.1 {
            return Ok(hi);
        }
        let upper = if hi.is_finite() {
            hi
        } else {
            let mut step = (self.asymptotic(r) - lo).abs().max(1.0);
            let mut x = lo + step;
            while self.forward_unchecked(x) < r {
                step *= 2.0;
                x = lo + step;
                if !x.is_finite() {
                    return Err(Error::Convergence { iterations: 0 });
                }
            }
            x
        };
        bracketed_root(|x| self.forward_unchecked(x) - r, lo, upper)
    }

    /// Leading large-`r` form of `rho(r)`.
    ///
    /// For `b2 < 0` the r-range is the bounded interval `(0, R)` and the map
    /// approaches the right root `rho2` of I1; the returned form is the expansion
    /// about that end, `rho2 - (3 (R - r) / 2)^{2/3} / cbrt(|b2| (rho2 - rho1))`.
    pub fn asymptotic(&self, r: f64) -> f64 {
        let [b0, b1, b2] = self.params.b;
        match self.tag {
            CaseTag::DeltaNegB2Pos
            | CaseTag::DeltaZeroB1Pos
            | CaseTag::DeltaZeroB1Neg
            | CaseTag::DeltaZeroB0B1Zero
            | CaseTag::DeltaPosB2Pos => (2.0 * r / b2.sqrt()).sqrt(),
            CaseTag::DeltaPosB2Neg => {
                let (r1, r2) = self.roots.expect("roots set for Δ > 0");
                let remaining = (self.r_domain.1 - r).max(0.0);
                r2 - (1.5 * remaining).powf(2.0 / 3.0) / ((-b2) * (r2 - r1)).cbrt()
            }
            CaseTag::LinearB2Zero | CaseTag::LinearB0B2Zero => (1.5 * b1 * r).powf(2.0 / 3.0) / b1,
            CaseTag::ConstantB1B2Zero => r / b0.sqrt(),
        }
    }
}
