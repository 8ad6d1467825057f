//! C interface to `triheun`.
//!
//! Every function returns a [`TriheunStatus`] and writes results through out-pointers.
//! On failure the message is kept per thread and read with [`triheun_last_error`].
//! Handles are opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use triheun::oracle::ShootingProblem;
use triheun::potential::v_eff;
use triheun::qes::{build_polynomial, energy_eigenvalue};
use triheun::series::{RadialWavefunction, SeriesSolution};
use triheun::{CanonicalParams, CaseTag, CoordinateMap, Error, HeunSixParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriheunStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParams = 2,
    Domain = 3,
    NoConvergence = 4,
    Singular = 5,
    BufferTooSmall = 6,
    Numerical = 7,
    Panic = 99,
}

/// Mirror of the coordinate-map cases.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriheunCase {
    DeltaNegB2Pos = 0,
    DeltaZeroB1Pos = 1,
    DeltaZeroB1Neg = 2,
    DeltaZeroB0B1Zero = 3,
    DeltaPosB2Pos = 4,
    DeltaPosB2Neg = 5,
    LinearB2Zero = 6,
    LinearB0B2Zero = 7,
    ConstantB1B2Zero = 8,
}

impl From<CaseTag> for TriheunCase {
    fn from(tag: CaseTag) -> Self {
        match tag {
            CaseTag::DeltaNegB2Pos => Self::DeltaNegB2Pos,
            CaseTag::DeltaZeroB1Pos => Self::DeltaZeroB1Pos,
            CaseTag::DeltaZeroB1Neg => Self::DeltaZeroB1Neg,
            CaseTag::DeltaZeroB0B1Zero => Self::DeltaZeroB0B1Zero,
            CaseTag::DeltaPosB2Pos => Self::DeltaPosB2Pos,
            CaseTag::DeltaPosB2Neg => Self::DeltaPosB2Neg,
            CaseTag::LinearB2Zero => Self::LinearB2Zero,
            CaseTag::LinearB0B2Zero => Self::LinearB0B2Zero,
            CaseTag::ConstantB1B2Zero => Self::ConstantB1B2Zero,
        }
    }
}

/// Which Taylor solution of the canonical equation to evaluate.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriheunSeries {
    /// `y(0) = 1, y'(0) = 0`.
    T1 = 0,
    /// `y(0) = 0, y'(0) = 1`.
    T2 = 1,
}

/// Coordinate map for one parameter set.
pub struct TriheunMap(CoordinateMap);

/// Radial wavefunction built on a map at a fixed energy.
pub struct TriheunWavefunction(RadialWavefunction);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> TriheunStatus {
    match err {
        Error::InvalidParams(_) | Error::InfeasibleCase(_) | Error::InvalidInput(_) | Error::BetaMismatch { .. } => {
            TriheunStatus::InvalidParams
        }
        Error::Domain { .. } => TriheunStatus::Domain,
        Error::Convergence { .. } | Error::Truncation { .. } | Error::StepUnderflow { .. } => {
            TriheunStatus::NoConvergence
        }
        Error::SingularPoint { .. } | Error::NodeSingularity { .. } | Error::DivisionByZero(_) => {
            TriheunStatus::Singular
        }
        _ => TriheunStatus::Numerical,
    }
}

struct Fail(TriheunStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(TriheunStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, turning errors and panics into a status plus the thread's last error.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> TriheunStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error(String::new());
            TriheunStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            TriheunStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn triple(p: *const f64, what: &str) -> Result<[f64; 3], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok([*p, *p.add(1), *p.add(2)])
}

unsafe fn map_ref<'a>(map: *const TriheunMap) -> Result<&'a CoordinateMap, Fail> {
    map.as_ref().map(|m| &m.0).ok_or_else(|| null("map"))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn triheun_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds the coordinate map for `I0 = a0 + a1 ρ + a2 ρ²`, `I1 = b0 + b1 ρ + b2 ρ²`.
///
/// # Safety
/// `a` and `b` point to three doubles each; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn triheun_map_new(a: *const f64, b: *const f64, out: *mut *mut TriheunMap) -> TriheunStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let params = HeunSixParams::new(triple(a, "a")?, triple(b, "b")?)?;
        let map = CoordinateMap::new(params)?;
        out.write(Box::into_raw(Box::new(TriheunMap(map))));
        Ok(())
    })
}

/// # Safety
/// `map` is null or came from [`triheun_map_new`] and has not been freed.
#[no_mangle]
pub unsafe extern "C" fn triheun_map_free(map: *mut TriheunMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// # Safety
/// `map` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn triheun_map_case(map: *const TriheunMap, out: *mut TriheunCase) -> TriheunStatus {
    guard(|| write(out, map_ref(map)?.tag().into(), "out"))
}

/// Open ρ-interval where `I1 > 0`; infinite ends are reported as ±infinity.
///
/// # Safety
/// `map` is a live handle; `lo` and `hi` are writable.
#[no_mangle]
pub unsafe extern "C" fn triheun_map_rho_domain(map: *const TriheunMap, lo: *mut f64, hi: *mut f64) -> TriheunStatus {
    guard(|| {
        let (l, h) = map_ref(map)?.rho_domain();
        write(lo, l, "lo")?;
        write(hi, h, "hi")
    })
}

/// # Safety
/// `map` is a live handle; `lo` and `hi` are writable.
#[no_mangle]
pub unsafe extern "C" fn triheun_map_r_domain(map: *const TriheunMap, lo: *mut f64, hi: *mut f64) -> TriheunStatus {
    guard(|| {
        let (l, h) = map_ref(map)?.r_domain();
        write(lo, l, "lo")?;
        write(hi, h, "hi")
    })
}

/// `r(ρ)`.
///
/// # Safety
/// `map` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn triheun_map_forward(map: *const TriheunMap, rho: f64, out: *mut f64) -> TriheunStatus {
    guard(|| write(out, map_ref(map)?.forward(rho)?, "out"))
}

/// `ρ(r)`.
///
/// # Safety
/// `map` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn triheun_map_inverse(map: *const TriheunMap, r: f64, out: *mut f64) -> TriheunStatus {
    guard(|| write(out, map_ref(map)?.inverse(r)?, "out"))
}

/// Effective potential at radius `r`.
///
/// # Safety
/// `map` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn triheun_map_potential(map: *const TriheunMap, r: f64, out: *mut f64) -> TriheunStatus {
    guard(|| write(out, v_eff(map_ref(map)?, r)?, "out"))
}

/// Wavefunction `c1 T1 + c2 T2` dressed by the map prefactor at `energy`.
/// The map is copied, so the map handle may be freed afterwards.
///
/// # Safety
/// `map` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn triheun_wavefunction_new(
    map: *const TriheunMap,
    energy: f64,
    c1: f64,
    c2: f64,
    out: *mut *mut TriheunWavefunction,
) -> TriheunStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let psi = RadialWavefunction::new(*map_ref(map)?, energy, (c1, c2));
        out.write(Box::into_raw(Box::new(TriheunWavefunction(psi))));
        Ok(())
    })
}

/// # Safety
/// `psi` is null or came from [`triheun_wavefunction_new`] and has not been freed.
#[no_mangle]
pub unsafe extern "C" fn triheun_wavefunction_free(psi: *mut TriheunWavefunction) {
    if !psi.is_null() {
        drop(Box::from_raw(psi));
    }
}

/// # Safety
/// `psi` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn triheun_wavefunction_eval(
    psi: *const TriheunWavefunction,
    r: f64,
    out: *mut f64,
) -> TriheunStatus {
    guard(|| {
        let psi = psi.as_ref().ok_or_else(|| null("psi"))?;
        write(out, psi.0.eval(r)?, "out")
    })
}

/// Value of a Taylor solution of `y'' - (γ + 3ρ²) y' + (α + (β - 3) ρ) y = 0`.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn triheun_series_eval(
    alpha: f64,
    beta: f64,
    gamma: f64,
    which: TriheunSeries,
    rho: f64,
    out: *mut f64,
) -> TriheunStatus {
    guard(|| {
        let p = CanonicalParams::new(alpha, beta, gamma);
        let s = match which {
            TriheunSeries::T1 => SeriesSolution::t1(&p),
            TriheunSeries::T2 => SeriesSolution::t2(&p),
        };
        write(out, s.eval(rho)?, "out")
    })
}

/// Energy of the order-`n` polynomial state, `(3(n+1) - a1) / b1`.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn triheun_qes_energy(a1: f64, b1: f64, n: usize, out: *mut f64) -> TriheunStatus {
    guard(|| write(out, energy_eigenvalue(a1, b1, n)?, "out"))
}

/// Coefficients `w_0 .. w_n` (ascending, `w_n = 1`) of the polynomial solution at
/// `β = 3(n+1)`. `(α, γ)` must lie on the order-`n` constraint curve.
/// `len` is the capacity of `coeffs` and must be at least `n + 1`.
///
/// # Safety
/// `coeffs` points to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn triheun_qes_polynomial(
    alpha: f64,
    gamma: f64,
    n: usize,
    coeffs: *mut f64,
    len: usize,
) -> TriheunStatus {
    guard(|| {
        if coeffs.is_null() {
            return Err(null("coeffs"));
        }
        if len < n + 1 {
            return Err(Fail(
                TriheunStatus::BufferTooSmall,
                format!("need {} coefficients, buffer holds {len}", n + 1),
            ));
        }
        let p = CanonicalParams::new(alpha, 3.0 * (n as f64 + 1.0), gamma);
        let poly = build_polynomial(&p, n)?;
        ptr::copy_nonoverlapping(poly.coeffs.as_ptr(), coeffs, n + 1);
        Ok(())
    })
}

/// Level with `n` nodes of `-v'' + (9/4 ρ⁴ - a2 ρ² - a1 ρ - a0) v = E v` on the real line.
///
/// # Safety
/// `a` points to three doubles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn triheun_quartic_level(a: *const f64, n: usize, out: *mut f64) -> TriheunStatus {
    guard(|| {
        let level = ShootingProblem::new(triple(a, "a")?).eigenvalue(n)?;
        write(out, level, "out")
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn triheun_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
