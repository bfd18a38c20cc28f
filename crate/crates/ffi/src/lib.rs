//! C ABI over `strange-qmf`.
//!
//! Exact values are returned as opaque `QmfCyclotomic` handles owned by the
//! caller and released with `qmf_cyclotomic_free`. Strings returned by the
//! library are released with `qmf_string_free`. Every fallible call returns a
//! `QmfStatus`; on failure `qmf_last_error_message` describes the error on
//! the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use strange_qmf::cyclotomic::Cyclotomic;
use strange_qmf::eichler::{self, KernelBranch, QuadratureConfig};
use strange_qmf::error::Error;
use strange_qmf::hpc::HpComplex;
use strange_qmf::lfunctions;
use strange_qmf::modularforms::{self, UHPoint};
use strange_qmf::strange::{self, Component, RationalPoint};

/// Result codes. Values 1-4 match the command line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QmfStatus {
    Ok = 0,
    Internal = 1,
    OutsideDomain = 2,
    SingularDenominator = 3,
    ToleranceNotMet = 4,
    InvalidArgument = 5,
    NullPointer = 6,
}

/// An exact element of a cyclotomic field.
pub struct QmfCyclotomic {
    inner: Cyclotomic,
}

/// Settings of the period integrals.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct QmfQuadratureConfig {
    pub eps: f64,
    pub upper: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    pub precision: u32,
    /// 0 for the principal branch of the kernel, 1 for the second sheet.
    pub branch: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> QmfStatus {
    match e {
        Error::InvalidInput(_) => QmfStatus::InvalidArgument,
        _ => match e.exit_code() {
            2 => QmfStatus::OutsideDomain,
            3 => QmfStatus::SingularDenominator,
            4 => QmfStatus::ToleranceNotMet,
            _ => QmfStatus::Internal,
        },
    }
}

/// Runs `f`, recording errors and panics.
fn guard<F: FnOnce() -> Result<(), (QmfStatus, String)>>(f: F) -> QmfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            QmfStatus::Ok
        }
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            QmfStatus::Internal
        }
    }
}

fn lib<T>(r: Result<T, Error>) -> Result<T, (QmfStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null() -> (QmfStatus, String) {
    (QmfStatus::NullPointer, "null pointer argument".into())
}

fn invalid(msg: &str) -> (QmfStatus, String) {
    (QmfStatus::InvalidArgument, msg.into())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, (QmfStatus, String)> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s).to_str().map_err(|_| invalid("string is not UTF-8"))
}

unsafe fn write_handle(out: *mut *mut QmfCyclotomic, v: Cyclotomic) -> Result<(), (QmfStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    *out = Box::into_raw(Box::new(QmfCyclotomic { inner: v }));
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (QmfStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    let c = CString::new(s).map_err(|_| invalid("string contains NUL"))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn handle<'a>(h: *const QmfCyclotomic) -> Result<&'a Cyclotomic, (QmfStatus, String)> {
    h.as_ref().map(|c| &c.inner).ok_or_else(null)
}

fn point(a: i64, k: i64) -> Result<RationalPoint, (QmfStatus, String)> {
    lib(RationalPoint::new(a, k))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn qmf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Exact value of component `component` ("1", "2", "3" or "F") at `a/k`.
///
/// # Safety
/// `component` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qmf_strange_eval(
    component: *const c_char,
    a: i64,
    k: i64,
    out: *mut *mut QmfCyclotomic,
) -> QmfStatus {
    guard(|| {
        let c: Component = lib(read_str(component)?.parse())?;
        let v = lib(strange::strange_eval(c, &point(a, k)?))?;
        write_handle(out, v.exact)
    })
}

/// Parses the canonical text form such as `3 - 2*z3`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qmf_cyclotomic_parse(text: *const c_char, out: *mut *mut QmfCyclotomic) -> QmfStatus {
    guard(|| {
        let v: Cyclotomic = lib(read_str(text)?.parse())?;
        write_handle(out, v)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `h` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qmf_cyclotomic_free(h: *mut QmfCyclotomic) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Canonical text form; release with `qmf_string_free`.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qmf_cyclotomic_to_string(h: *const QmfCyclotomic, out: *mut *mut c_char) -> QmfStatus {
    guard(|| write_string(out, handle(h)?.to_string()))
}

/// JSON form `{"field": N, "coeffs": [[j, "p/q"], ...]}`; release with
/// `qmf_string_free`.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qmf_cyclotomic_to_json(h: *const QmfCyclotomic, out: *mut *mut c_char) -> QmfStatus {
    guard(|| {
        let j = serde_json::to_string(&handle(h)?.to_json()).map_err(|e| (QmfStatus::Internal, e.to_string()))?;
        write_string(out, j)
    })
}

/// Complex embedding `zeta_N -> e^{2 pi i / N}` rounded to doubles.
///
/// # Safety
/// `h` must be a live handle; `re` and `im` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn qmf_cyclotomic_embed(h: *const QmfCyclotomic, re: *mut f64, im: *mut f64) -> QmfStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null());
        }
        let e = handle(h)?.embed(64);
        *re = e.re_f64();
        *im = e.im_f64();
        Ok(())
    })
}

/// Writes 1 to `out` when the two values are equal, else 0.
///
/// # Safety
/// Both handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qmf_cyclotomic_equal(
    a: *const QmfCyclotomic,
    b: *const QmfCyclotomic,
    out: *mut i32,
) -> QmfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = i32::from(handle(a)? == handle(b)?);
        Ok(())
    })
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qmf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library defaults: eps 1e-9, upper 1e9, rel_tol 1e-10, depth 20,
/// 128 bits, second sheet.
#[no_mangle]
pub extern "C" fn qmf_quadrature_config_default() -> QmfQuadratureConfig {
    let d = QuadratureConfig::default();
    QmfQuadratureConfig {
        eps: d.eps,
        upper: d.upper,
        rel_tol: d.rel_tol,
        max_depth: d.max_depth,
        precision: d.precision,
        branch: match d.branch {
            KernelBranch::Principal => 0,
            KernelBranch::SecondSheet => 1,
        },
    }
}

fn config(cfg: Option<&QmfQuadratureConfig>) -> Result<QuadratureConfig, (QmfStatus, String)> {
    let c = *cfg.unwrap_or(&qmf_quadrature_config_default());
    let branch = match c.branch {
        0 => KernelBranch::Principal,
        1 => KernelBranch::SecondSheet,
        _ => return Err(invalid("branch must be 0 or 1")),
    };
    let q = QuadratureConfig {
        eps: c.eps,
        upper: c.upper,
        rel_tol: c.rel_tol,
        max_depth: c.max_depth,
        precision: c.precision,
        branch,
    };
    lib(q.validate())?;
    Ok(q)
}

/// `Omega(a/k)` along the vertical ray. `cfg` may be null for the defaults.
///
/// # Safety
/// `re`, `im` and `error_estimate` must be valid pointers; `cfg` valid or null.
#[no_mangle]
pub unsafe extern "C" fn qmf_omega(
    a: i64,
    k: i64,
    cfg: *const QmfQuadratureConfig,
    re: *mut f64,
    im: *mut f64,
    error_estimate: *mut f64,
) -> QmfStatus {
    guard(|| {
        if re.is_null() || im.is_null() || error_estimate.is_null() {
            return Err(null());
        }
        let q = config(cfg.as_ref())?;
        let r = lib(eichler::omega(&point(a, k)?, &q))?;
        *re = r.value.re_f64();
        *im = r.value.im_f64();
        *error_estimate = r.error_estimate;
        Ok(())
    })
}

/// `(theta_1, theta_2, theta_3)` at `z = re + i im`, written to `out` as
/// six doubles `re_1, im_1, re_2, im_2, re_3, im_3`.
///
/// # Safety
/// `out` must point to six writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qmf_h_vector(re: f64, im: f64, precision: u32, out: *mut f64) -> QmfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        if precision < 24 {
            return Err(invalid("precision must be at least 24 bits"));
        }
        let z = lib(UHPoint::new(HpComplex::from_f64(re, im, precision)))?;
        let h = lib(modularforms::h_vector(&z, precision))?;
        let out = std::slice::from_raw_parts_mut(out, 6);
        for (j, v) in h.iter().enumerate() {
            out[2 * j] = v.re_f64();
            out[2 * j + 1] = v.im_f64();
        }
        Ok(())
    })
}

/// Exact `G(a, b, c) = sum_{n<c} e((a n^2 + b n)/c)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qmf_gauss_sum(a: i64, b: i64, c: u64, out: *mut *mut QmfCyclotomic) -> QmfStatus {
    guard(|| write_handle(out, lib(lfunctions::gauss_sum(a, b, c))?))
}

/// Exact `L(-n, chi)` for the character of family `family` (1 or 2) attached
/// to `e^{2 pi i a/k}`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qmf_l_value(
    family: u32,
    a: i64,
    k: i64,
    n: u32,
    out: *mut *mut QmfCyclotomic,
) -> QmfStatus {
    guard(|| {
        let x = point(a, k)?;
        let chi = match family {
            1 => lib(lfunctions::chi_l1(&x))?,
            2 => lib(lfunctions::chi_l2(&x))?,
            _ => return Err(invalid("family must be 1 or 2")),
        };
        write_handle(out, lib(lfunctions::l_value(&chi, n))?)
    })
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn qmf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
