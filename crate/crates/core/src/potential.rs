//! Effective potential built from the six parameters, the named closed-form
//! families and their critical points.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{CaseTag, CoordinateMap, HeunSixParams};
use crate::roots::{poly_eval, positive_roots, sign_changes};

/// The energy-affine split `I = I0 + E I1` of the normal-form coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoseSplit {
    /// Ascending coefficients of I0; the quartic one is fixed to `-9/4`.
    pub i0_coeffs: [f64; 5],
    pub i1_coeffs: [f64; 3],
}

impl BoseSplit {
    pub fn new(params: &HeunSixParams) -> Self {
        let [a0, a1, a2] = params.a();
        Self {
            i0_coeffs: [a0, a1, a2, 0.0, -2.25],
            i1_coeffs: params.b(),
        }
    }

    pub fn i0(&self, rho: f64) -> f64 {
        poly_eval(&self.i0_coeffs, rho)
    }

    pub fn i1(&self, rho: f64) -> f64 {
        poly_eval(&self.i1_coeffs, rho)
    }
}

fn check_regular(params: &HeunSixParams, rho: f64) -> Result<f64> {
    let i1 = params.i1(rho);
    if i1.abs() < 1e-14 * (1.0 + rho * rho) {
        Err(Error::SingularPoint { rho })
    } else {
        Ok(i1)
    }
}

/// Schwarzian of `rho(r)` expressed through I1: `(5 I1'^2 - 4 I1 I1'') / (8 I1^3)`.
pub fn schwarzian_via_i1(params: &HeunSixParams, rho: f64) -> Result<f64> {
    let i1 = check_regular(params, rho)?;
    let d1 = params.i1_prime(rho);
    let d2 = params.i1_second();
    Ok((5.0 * d1 * d1 - 4.0 * i1 * d2) / (8.0 * i1 * i1 * i1))
}

/// `V_eff` at a point of the `rho` line, written as `-I0/I1 - S/2`.
pub fn v_eff_schwarzian_form(params: &HeunSixParams, rho: f64) -> Result<f64> {
    let i1 = check_regular(params, rho)?;
    Ok(-params.i0(rho) / i1 - 0.5 * schwarzian_via_i1(params, rho)?)
}

/// `V_eff` at a point of the `rho` line, explicit rational form in the six parameters.
pub fn v_eff_explicit_form(params: &HeunSixParams, rho: f64) -> Result<f64> {
    let i1 = check_regular(params, rho)?;
    let [a0, a1, a2] = params.a();
    let [b0, b1, b2] = params.b();
    let rho2 = rho * rho;
    let first = -(4.0 * a0 + 4.0 * a1 * rho + 4.0 * a2 * rho2 - 9.0 * rho2 * rho2) / (4.0 * i1);
    let second =
        -(12.0 * b2 * b2 * rho2 + 12.0 * b1 * b2 * rho + 5.0 * b1 * b1 - 8.0 * b0 * b2) / (16.0 * i1 * i1 * i1);
    Ok(first + second)
}

/// `V_eff(r)`.
pub fn v_eff(map: &CoordinateMap, r: f64) -> Result<f64> {
    let rho = map.inverse(r)?;
    v_eff_explicit_form(map.params(), rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FamilyKind {
    /// Δ = 0, b1 > 0, in the variable `s = sqrt(b0 + 2 sqrt(b2) r)`.
    V1,
    /// Δ = 0, b1 < 0, same variable.
    V2Variant,
    /// b0 = b1 = 0.
    V3,
    /// b2 = 0.
    V4,
    /// b0 = b2 = 0.
    V5,
    General,
}

impl FamilyKind {
    fn prefix(self) -> &'static str {
        match self {
            FamilyKind::V1 => "c",
            FamilyKind::V2Variant => "d",
            FamilyKind::V3 => "e",
            FamilyKind::V4 => "v",
            FamilyKind::V5 => "u",
            FamilyKind::General => "",
        }
    }
}

/// A named potential family with its coefficient list, indexed from 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialFamily {
    pub kind: FamilyKind,
    pub coeffs: Vec<f64>,
    pub params: HeunSixParams,
}

pub fn v1_coefficients(params: &HeunSixParams) -> [f64; 6] {
    let [a0, a1, a2] = params.a();
    let [b0, _, b2] = params.b();
    let (sb0, sb2) = (b0.sqrt(), b2.sqrt());
    [
        63.0 * b0 / (4.0 * b2 * b2) - a2 / b2,
        2.0 * a2 * sb0 / b2 - a1 / sb2 - 9.0 * b0 * sb0 / (b2 * b2),
        -a0 + a1 * sb0 / sb2 + 9.0 * b0 * b0 / (4.0 * b2 * b2) - a2 * b0 / b2,
        -0.75 * b2,
        -9.0 * sb0 / (b2 * b2),
        9.0 / (2.0 * b2 * sb2),
    ]
}

pub fn v2_coefficients(params: &HeunSixParams) -> [f64; 6] {
    let [a0, a1, a2] = params.a();
    let [b0, _, b2] = params.b();
    let (sb0, sb2) = (b0.sqrt(), b2.sqrt());
    [
        63.0 * b0 / (4.0 * b2 * b2) - a2 / b2,
        -2.0 * a2 * sb0 / b2 - a1 / sb2 + 9.0 * b0 * sb0 / (b2 * b2),
        -a0 - a1 * sb0 / sb2 + 9.0 * b0 * b0 / (4.0 * b2 * b2) - a2 * b0 / b2,
        -0.75 * b2,
        9.0 * sb0 / (b2 * b2),
        9.0 / (2.0 * b2 * sb2),
    ]
}

pub fn v3_coefficients(params: &HeunSixParams) -> [f64; 5] {
    let [a0, a1, a2] = params.a();
    let b2 = params.b()[2];
    [
        -a2 / b2,
        -a1 / (std::f64::consts::SQRT_2 * b2.powf(0.75)),
        -a0 / (2.0 * b2.sqrt()),
        -3.0 / 16.0,
        9.0 / (2.0 * b2 * b2.sqrt()),
    ]
}

/// Valid for any `b2 = 0, b1 > 0`, including `b0 = 0`.
pub fn v4_coefficients(params: &HeunSixParams) -> [f64; 6] {
    let [a0, a1, a2] = params.a();
    let [b0, b1, _] = params.b();
    let q = b0 / b1;
    [
        -a1 / b1 + 2.0 * a2 * b0 / (b1 * b1) - 9.0 * q * q * q / b1,
        (2.0 / (3.0 * b1)).powf(2.0 / 3.0) * (a1 * q - a0 - a2 * q * q + 2.25 * q * q * q * q),
        -5.0 / 36.0,
        1.5f64.powf(2.0 / 3.0) * b1.powf(-4.0 / 3.0) * (13.5 * q * q - a2),
        -(3f64.powf(10.0 / 3.0)) * b0 / (2f64.powf(4.0 / 3.0) * b1.powf(8.0 / 3.0)),
        81.0 / (16.0 * b1 * b1),
    ]
}

pub fn v5_coefficients(params: &HeunSixParams) -> [f64; 5] {
    let [a0, a1, a2] = params.a();
    let b1 = params.b()[1];
    [
        -a1 / b1,
        -a0 * (4.0 / (9.0 * b1 * b1)).cbrt(),
        -5.0 / 36.0,
        -a2 * (9.0 / (4.0 * b1.powi(4))).cbrt(),
        81.0 / (16.0 * b1 * b1),
    ]
}

/// `(a0, a1, a2)` that cancel `c0, c1, c2`.
pub fn v1_zeroing(b0: f64, b2: f64) -> [f64; 3] {
    let q = b0 / b2;
    [9.0 * q * q, 22.5 * q * q.sqrt(), 63.0 * b0 / (4.0 * b2)]
}

/// `(a0, a1, a2)` that cancel `d0, d1, d2`.
pub fn v2_zeroing(b0: f64, b2: f64) -> [f64; 3] {
    let q = b0 / b2;
    [9.0 * q * q, -22.5 * q * q.sqrt(), 63.0 * b0 / (4.0 * b2)]
}

/// `(a0, a1, a2)` that cancel `v0, v1, v3`.
pub fn v4_zeroing(b0: f64, b1: f64) -> [f64; 3] {
    let q = b0 / b1;
    [6.75 * q.powi(4), 18.0 * q.powi(3), 13.5 * q * q]
}

pub fn family_coefficients(params: &HeunSixParams, tag: CaseTag) -> Result<PotentialFamily> {
    let (kind, coeffs) = match tag {
        CaseTag::DeltaZeroB1Pos => (FamilyKind::V1, v1_coefficients(params).to_vec()),
        CaseTag::DeltaZeroB1Neg => (FamilyKind::V2Variant, v2_coefficients(params).to_vec()),
        CaseTag::DeltaZeroB0B1Zero => (FamilyKind::V3, v3_coefficients(params).to_vec()),
        CaseTag::LinearB2Zero => (FamilyKind::V4, v4_coefficients(params).to_vec()),
        CaseTag::LinearB0B2Zero => (FamilyKind::V5, v5_coefficients(params).to_vec()),
        other => return Err(Error::UnsupportedFamily(other)),
    };
    Ok(PotentialFamily {
        kind,
        coeffs,
        params: *params,
    })
}

impl PotentialFamily {
    /// The closed family when the case has one, otherwise `General`.
    pub fn for_params(params: &HeunSixParams) -> Result<Self> {
        let tag = crate::params::classify(params)?;
        Ok(family_coefficients(params, tag).unwrap_or(PotentialFamily {
            kind: FamilyKind::General,
            coeffs: Vec::new(),
            params: *params,
        }))
    }

    /// `(name, value)` pairs such as `("c3", -0.75)`.
    pub fn named(&self) -> impl Iterator<Item = (String, f64)> + '_ {
        let prefix = self.kind.prefix();
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (format!("{prefix}{i}"), c))
    }

    fn s_variable(&self, r: f64) -> f64 {
        let [b0, _, b2] = self.params.b();
        (b0 + 2.0 * b2.sqrt() * r).sqrt()
    }

    /// Evaluate at `r > 0`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain {
                value: r,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        let c = &self.coeffs;
        Ok(match self.kind {
            FamilyKind::V1 | FamilyKind::V2Variant => {
                let s = self.s_variable(r);
                let s2 = s * s;
                c[0] + c[1] / s + c[2] / s2 + c[3] / (s2 * s2) + c[4] * s + c[5] * r
            }
            FamilyKind::V3 => c[0] + c[1] / r.sqrt() + c[2] / r + c[3] / (r * r) + c[4] * r,
            FamilyKind::V4 => {
                let t2 = r.cbrt().powi(2);
                c[0] + c[1] / t2 + c[2] / (r * r) + c[3] * t2 + c[4] * t2 * t2 + c[5] * r * r
            }
            FamilyKind::V5 => {
                let t2 = r.cbrt().powi(2);
                c[0] + c[1] / t2 + c[2] / (r * r) + c[3] * t2 + c[4] * r * r
            }
            FamilyKind::General => v_eff(&CoordinateMap::new(self.params)?, r)?,
        })
    }

    /// Ascending coefficients of the polynomial whose positive roots are the
    /// critical points in the family's substituted variable.
    fn critical_polynomial(&self) -> Option<Vec<f64>> {
        let c = &self.coeffs;
        match self.kind {
            FamilyKind::V1 | FamilyKind::V2Variant => {
                let sb2 = self.params.b()[2].sqrt();
                Some(vec![-4.0 * c[3], 0.0, -2.0 * c[2], -c[1], 0.0, c[4], c[5] / sb2])
            }
            FamilyKind::V3 => Some(vec![-4.0 * c[3], 0.0, -2.0 * c[2], -c[1], 0.0, 0.0, 2.0 * c[4]]),
            FamilyKind::V4 => Some(vec![-3.0 * c[2], 0.0, -c[1], 0.0, c[3], 2.0 * c[4], 3.0 * c[5]]),
            FamilyKind::V5 => Some(vec![-3.0 * c[2], -c[1], c[3], 3.0 * c[4]]),
            FamilyKind::General => None,
        }
    }

    /// Map a root of the critical polynomial back to `r`; `None` if it lies at `r ≤ 0`.
    fn root_to_r(&self, t: f64) -> Option<f64> {
        let r = match self.kind {
            FamilyKind::V1 | FamilyKind::V2Variant => {
                let [b0, _, b2] = self.params.b();
                (t * t - b0) / (2.0 * b2.sqrt())
            }
            FamilyKind::V3 => t * t,
            FamilyKind::V4 => t.powf(1.5),
            FamilyKind::V5 => t.powf(0.75),
            FamilyKind::General => return None,
        };
        (r > 0.0).then_some(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Extremum {
    Min,
    Max,
    Inflection,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub r: f64,
    pub value: f64,
    pub kind: Extremum,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPointReport {
    /// Ascending coefficients of the substituted polynomial.
    pub polynomial: Vec<f64>,
    pub sign_changes: usize,
    pub possible_counts: Vec<usize>,
    /// Positive roots of the polynomial in its own variable.
    pub roots: Vec<f64>,
    /// Roots that land at `r > 0`, classified.
    pub critical_points: Vec<CriticalPoint>,
}

fn classify_extremum(family: &PotentialFamily, r: f64) -> Result<(f64, Extremum)> {
    let mut h = 1e-5 * (1.0 + r);
    if r - h <= 0.0 {
        h = 0.5 * r;
    }
    let v = family.eval(r)?;
    let d2 = (family.eval(r + h)? - 2.0 * v + family.eval(r - h)?) / (h * h);
    let noise = 100.0 * f64::EPSILON * (1.0 + v.abs()) / (h * h);
    let kind = if d2.abs() <= noise {
        Extremum::Inflection
    } else if d2 > 0.0 {
        Extremum::Min
    } else {
        Extremum::Max
    };
    Ok((v, kind))
}

pub fn critical_points(family: &PotentialFamily) -> Result<CriticalPointReport> {
    let polynomial = family
        .critical_polynomial()
        .ok_or(Error::InvalidInput("critical points need a named family".into()))?;
    let changes = sign_changes(&polynomial);
    let possible_counts = (0..=changes).rev().step_by(2).collect();
    let roots = positive_roots(&polynomial);
    let mut critical = Vec::new();
    for &t in &roots {
        if let Some(r) = family.root_to_r(t) {
            let (value, kind) = classify_extremum(family, r)?;
            critical.push(CriticalPoint { r, value, kind });
        }
    }
    Ok(CriticalPointReport {
        polynomial,
        sign_changes: changes,
        possible_counts,
        roots,
        critical_points: critical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(a: [f64; 3], b: [f64; 3]) -> HeunSixParams {
        HeunSixParams::new(a, b).unwrap()
    }

    #[test]
    fn v1_zeroed_value_at_origin() {
        let p = params(v1_zeroing(1.0, 1.0), [1.0, 2.0, 1.0]);
        assert_eq!(p.a(), [9.0, 22.5, 15.75]);
        let map = CoordinateMap::new(p).unwrap();
        assert_relative_eq!(v_eff(&map, 0.0).unwrap(), -39.0 / 4.0, max_relative = 1e-14);
        let fam = family_coefficients(&p, map.tag()).unwrap();
        let c = &fam.coeffs;
        for x in &c[..3] {
            assert!(x.abs() < 1e-13);
        }
        assert_eq!(&c[3..], &[-0.75, -9.0, 4.5]);
        let r = 0.8;
        let closed = -3.0 / (4.0 * (1.0f64 + 2.0 * r).powi(2)) - 9.0 * (1.0f64 + 2.0 * r).sqrt() + 4.5 * r;
        assert_relative_eq!(fam.eval(r).unwrap(), closed, max_relative = 1e-13);
        assert_relative_eq!(v_eff(&map, r).unwrap(), closed, max_relative = 1e-13);
    }

    #[test]
    fn v3_pure() {
        let p = params([0.0; 3], [0.0, 0.0, 1.0]);
        let map = CoordinateMap::new(p).unwrap();
        for r in [0.1, 1.0, 7.5] {
            let expect = -3.0 / (16.0 * r * r) + 4.5 * r;
            assert_relative_eq!(v_eff(&map, r).unwrap(), expect, max_relative = 1e-13);
        }
    }

    #[test]
    fn v5_and_v4_examples() {
        let p = params([0.0; 3], [0.0, 1.0, 0.0]);
        let fam = family_coefficients(&p, CaseTag::LinearB0B2Zero).unwrap();
        assert_eq!(fam.coeffs[0], 0.0);
        assert_relative_eq!(fam.coeffs[2], -5.0 / 36.0);
        assert_relative_eq!(fam.coeffs[4], 81.0 / 16.0);
        let v = v4_coefficients(&p);
        assert_eq!([v[0], v[1], v[3], v[4]], [0.0; 4]);
        assert_relative_eq!(v[5], 81.0 / 16.0);
    }

    #[test]
    fn v4_zeroing_cancels() {
        let (b0, b1) = (0.7, 1.9);
        let p = params(v4_zeroing(b0, b1), [b0, b1, 0.0]);
        let v = v4_coefficients(&p);
        for x in [v[0], v[1], v[3]] {
            assert!(x.abs() < 1e-12, "{v:?}");
        }
    }

    #[test]
    fn v2_zeroing_cancels() {
        let (b0, b2) = (1.3, 0.4);
        let p = params(v2_zeroing(b0, b2), [b0, -2.0 * (b0 * b2).sqrt(), b2]);
        let d = v2_coefficients(&p);
        for x in &d[..3] {
            assert!(x.abs() < 1e-11, "{d:?}");
        }
    }

    #[test]
    fn families_match_general() {
        let a = [0.7, -1.3, 2.1];
        let cases = [
            [1.7, 2.0 * (1.7f64 * 0.6).sqrt(), 0.6],
            [1.7, -2.0 * (1.7f64 * 0.6).sqrt(), 0.6],
            [0.0, 0.0, 0.6],
            [1.7, 0.6, 0.0],
            [-0.4, 0.6, 0.0],
            [0.0, 0.6, 0.0],
        ];
        for b in cases {
            let p = params(a, b);
            let map = CoordinateMap::new(p).unwrap();
            let fam = family_coefficients(&p, map.tag()).unwrap();
            for r in [0.05, 0.9, 4.0, 30.0] {
                let g = v_eff(&map, r).unwrap();
                assert_relative_eq!(fam.eval(r).unwrap(), g, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn schwarzian_examples() {
        let p = params([0.0; 3], [1.0, 0.0, 0.0]);
        assert_eq!(schwarzian_via_i1(&p, 0.3).unwrap(), 0.0);
        let p = params([0.0; 3], [0.0, 1.0, 0.0]);
        assert_relative_eq!(schwarzian_via_i1(&p, 1.0).unwrap(), 5.0 / 8.0);
        assert!(matches!(schwarzian_via_i1(&p, 0.0), Err(Error::SingularPoint { .. })));
    }

    #[test]
    fn v3_positive_a_has_no_extrema() {
        let p = params([1.0, 2.0, 0.5], [0.0, 0.0, 1.0]);
        let fam = family_coefficients(&p, CaseTag::DeltaZeroB0B1Zero).unwrap();
        let rep = critical_points(&fam).unwrap();
        assert_eq!(rep.sign_changes, 0);
        assert!(rep.roots.is_empty());
    }

    #[test]
    fn v5_negative_a2_has_no_extrema() {
        let p = params([1.0, 0.3, -2.0], [0.0, 1.5, 0.0]);
        let fam = family_coefficients(&p, CaseTag::LinearB0B2Zero).unwrap();
        let rep = critical_points(&fam).unwrap();
        assert!(rep.roots.is_empty());
    }

    #[test]
    fn v3_max_then_min() {
        let p = params([-20.0, 0.0, 0.0], [0.0, 0.0, 1.0]);
        let fam = family_coefficients(&p, CaseTag::DeltaZeroB0B1Zero).unwrap();
        let rep = critical_points(&fam).unwrap();
        assert_eq!(rep.sign_changes, 2);
        assert_eq!(rep.possible_counts, vec![2, 0]);
        let kinds: Vec<_> = rep.critical_points.iter().map(|c| c.kind).collect();
        assert_eq!(kinds, vec![Extremum::Max, Extremum::Min]);
        let h = 1e-6;
        for cp in &rep.critical_points {
            let d = (fam.eval(cp.r + h).unwrap() - fam.eval(cp.r - h).unwrap()) / (2.0 * h);
            assert!(d.abs() < 1e-4 * (1.0 + cp.value.abs()), "{d}");
        }
    }

    #[test]
    fn pure_v3_is_monotone() {
        let p = params([0.0; 3], [0.0, 0.0, 1.0]);
        let fam = family_coefficients(&p, CaseTag::DeltaZeroB0B1Zero).unwrap();
        assert!(critical_points(&fam).unwrap().roots.is_empty());
    }
}
