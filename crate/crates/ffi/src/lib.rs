//! C ABI for `torus-cohomology`.
//!
//! Objects cross the boundary as opaque handles that the caller frees with
//! the matching `*_free` function. Every fallible call returns a
//! [`TcStatus`]; on failure [`tc_last_error`] describes what went wrong on the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use torus_cohomology::cohomology::{self, Case, CohomologySolution};
use torus_cohomology::diophantine::{check_diophantine, FrequencyVector};
use torus_cohomology::fourier::FourierSeries;
use torus_cohomology::lincocycle::LinearCocycle;
use torus_cohomology::parabolic::{pair, ParabolicAffineMap};
use torus_cohomology::Error;

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TcStatus {
    Ok = 0,
    /// Generic failure inside the library.
    Error = 1,
    /// Resonance, small divisor or another obstruction verdict.
    Obstructed = 2,
    InvalidArgument = 3,
    NullPointer = 4,
    ParseError = 5,
    Panic = 6,
}

/// Real or complex Fourier series on `T^d`.
pub struct TcSeries(FourierSeries);

/// Output of the cohomological equation solver.
pub struct TcSolution(CohomologySolution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> TcStatus {
    if err.is_obstruction() {
        TcStatus::Obstructed
    } else {
        match err {
            Error::Domain(_) | Error::InvalidLift(_) => TcStatus::InvalidArgument,
            _ => TcStatus::Error,
        }
    }
}

fn guard(f: impl FnOnce() -> Result<TcStatus, (TcStatus, String)>) -> TcStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside torus-cohomology");
            TcStatus::Panic
        }
    }
}

fn lib<T>(r: torus_cohomology::Result<T>) -> Result<T, (TcStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (TcStatus, String) {
    (TcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (TcStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], (TcStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), (TcStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn tc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses `{"dim", "real", "coeffs": [{"k", "re", "im"}]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_series_from_json(json: *const c_char, out: *mut *mut TcSeries) -> TcStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| (TcStatus::ParseError, "json is not UTF-8".to_string()))?;
        let series: FourierSeries =
            serde_json::from_str(text).map_err(|e| (TcStatus::ParseError, format!("invalid series JSON: {e}")))?;
        write(out, Box::into_raw(Box::new(TcSeries(series))), "out")?;
        Ok(TcStatus::Ok)
    })
}

/// Serializes a series; free the string with [`tc_string_free`].
///
/// # Safety
/// `series` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_series_to_json(series: *const TcSeries, out: *mut *mut c_char) -> TcStatus {
    guard(|| {
        let s = deref(series, "series")?;
        let text = serde_json::to_string(&s.0).map_err(|e| (TcStatus::Error, e.to_string()))?;
        let c = CString::new(text).map_err(|e| (TcStatus::Error, e.to_string()))?;
        write(out, c.into_raw(), "out")?;
        Ok(TcStatus::Ok)
    })
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `series` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tc_series_free(series: *mut TcSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Dimension of the torus, or 0 for a null handle.
///
/// # Safety
/// `series` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tc_series_dim(series: *const TcSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.dim())
}

/// Evaluates a real series at `theta[0..len]`.
///
/// # Safety
/// `theta` must hold `len` doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_series_evaluate(
    series: *const TcSeries,
    theta: *const f64,
    len: usize,
    out: *mut f64,
) -> TcStatus {
    guard(|| {
        let s = deref(series, "series")?;
        let theta = slice(theta, len, "theta")?;
        let value = lib(s.0.evaluate(theta))?;
        write(out, value, "out")?;
        Ok(TcStatus::Ok)
    })
}

/// Solves `u∘R_α - u = ξ - c` (`flow == 0`) or `X_α u = ξ - c` (otherwise).
/// A solution with resonant modes is still returned, with status
/// `Obstructed`.
///
/// # Safety
/// `alpha` must hold `len` doubles; `xi` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tc_solve(
    xi: *const TcSeries,
    alpha: *const f64,
    len: usize,
    divisor_floor: f64,
    flow: i32,
    out: *mut *mut TcSolution,
) -> TcStatus {
    guard(|| {
        let xi = deref(xi, "xi")?;
        let alpha = lib(FrequencyVector::new(slice(alpha, len, "alpha")?.to_vec()))?;
        let case = if flow == 0 { Case::Map } else { Case::Flow };
        let solution = lib(cohomology::solve(&xi.0, &alpha, divisor_floor, case))?;
        let status = if solution.is_complete() {
            TcStatus::Ok
        } else {
            set_error(format!("{} resonant modes", solution.resonant_set.len()));
            TcStatus::Obstructed
        };
        write(out, Box::into_raw(Box::new(TcSolution(solution))), "out")?;
        Ok(status)
    })
}

/// Copies the transfer function out of a solution.
///
/// # Safety
/// `solution` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tc_solution_transfer(solution: *const TcSolution, out: *mut *mut TcSeries) -> TcStatus {
    guard(|| {
        let s = deref(solution, "solution")?;
        write(out, Box::into_raw(Box::new(TcSeries(s.0.u.clone()))), "out")?;
        Ok(TcStatus::Ok)
    })
}

/// The mean `c(ξ)` removed before solving; NaN for a null handle.
///
/// # Safety
/// `solution` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn tc_solution_mean(solution: *const TcSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.0.c)
}

/// # Safety
/// `solution` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn tc_solution_resonant_count(solution: *const TcSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.0.resonant_set.len())
}

/// # Safety
/// `solution` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tc_solution_free(solution: *mut TcSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Scans `0 < |p|∞ <= radius` for `|p·α| >= C |p|∞^-τ`. Writes the worst
/// margin and whether the bound held; a failed bound is not an error.
///
/// # Safety
/// `alpha` must hold `len` doubles; `worst_margin` and `holds` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_check_diophantine(
    alpha: *const f64,
    len: usize,
    c: f64,
    tau: f64,
    radius: u64,
    worst_margin: *mut f64,
    holds: *mut bool,
) -> TcStatus {
    guard(|| {
        let alpha = lib(FrequencyVector::new(slice(alpha, len, "alpha")?.to_vec()))?;
        let cert = lib(check_diophantine(&alpha, c, tau, radius))?;
        write(worst_margin, cert.worst_margin, "worst_margin")?;
        write(holds, cert.holds, "holds")?;
        Ok(TcStatus::Ok)
    })
}

/// `⟨T_m, ψ⟩` for the map `(x, y) ↦ (x + ρ, y + n₀x + β)`, with the
/// truncation chosen to cover the support of `ψ`.
///
/// # Safety
/// `psi` must be live; `re` and `im` writable.
#[no_mangle]
pub unsafe extern "C" fn tc_tm_pair(
    m: i64,
    n0: i64,
    rho: f64,
    beta: f64,
    psi: *const TcSeries,
    re: *mut f64,
    im: *mut f64,
) -> TcStatus {
    guard(|| {
        let psi = deref(psi, "psi")?;
        let map = lib(ParabolicAffineMap::new(n0, rho, beta))?;
        let p = lib(pair(m, &map, &psi.0))?;
        write(re, p.value.re, "re")?;
        write(im, p.value.im, "im")?;
        Ok(TcStatus::Ok)
    })
}

/// Finite-time Lyapunov exponent of the constant cocycle `(x, v) ↦ (x + ρ, Mv)`
/// with `M = [[m[0], m[1]], [m[2], m[3]]]`.
///
/// # Safety
/// `matrix` must hold 4 doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_lyapunov(rho: f64, matrix: *const f64, x0: f64, n: u64, out: *mut f64) -> TcStatus {
    guard(|| {
        let m = slice(matrix, 4, "matrix")?;
        let c = lib(LinearCocycle::constant(rho, [[m[0], m[1]], [m[2], m[3]]], false))?;
        let lambda = lib(c.lyapunov_exponent(x0, n))?;
        write(out, lambda, "out")?;
        Ok(TcStatus::Ok)
    })
}
