//! C ABI over `crossmeasure`.
//!
//! Handles are opaque and owned by the caller once returned; free them with the
//! matching `*_free`. Strings returned through `char **` must be released with
//! `cm_string_free`. Every fallible call returns a `CmStatus`; on failure the
//! message is available from `cm_last_error` on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use crossmeasure::certificate::{verify_dual_feasibility, verify_third_certificate, EpsilonChoice};
use crossmeasure::measure::{is_cross_intersecting, product_measure, ProbabilityVector, SubsetFamily};
use crossmeasure::oracle::max_cross_product;
use crossmeasure::rational::format_rational;
use crossmeasure::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Precondition = 5,
    SizeCap = 6,
    /// The call succeeded and the answer is negative (an infeasible certificate,
    /// or an oracle maximum below `p1 p2`).
    False = 7,
    Panic = 8,
}

/// Opaque probability vector.
pub struct CmProbabilityVector(ProbabilityVector);

/// Opaque family of subsets of `[n]`.
pub struct CmFamily(SubsetFamily);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(clean).expect("no interior NUL"));
}

fn status_of(e: &Error) -> CmStatus {
    match e {
        Error::Parse(_) | Error::InvalidProbability { .. } => CmStatus::Parse,
        Error::SizeCap { .. } => CmStatus::SizeCap,
        Error::Precondition(_) | Error::NotVerified | Error::SearchExhausted(_) => CmStatus::Precondition,
        _ => CmStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<CmStatus, (CmStatus, String)>) -> CmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            CmStatus::Panic
        }
    }
}

fn lib(e: Error) -> (CmStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, (CmStatus, String)> {
    if p.is_null() {
        return Err((CmStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (CmStatus::InvalidUtf8, "string is not UTF-8".into()))
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, (CmStatus, String)> {
    p.as_ref().ok_or((CmStatus::NullPointer, "null handle".into()))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (CmStatus, String)> {
    if out.is_null() {
        return Err((CmStatus::NullPointer, "null output pointer".into()));
    }
    let c = CString::new(s).map_err(|_| (CmStatus::InvalidArgument, "interior NUL".to_string()))?;
    *out = c.into_raw();
    Ok(())
}

fn json_err(e: serde_json::Error) -> (CmStatus, String) {
    (CmStatus::InvalidArgument, e.to_string())
}

/// Parse `"1/2,1/3"` into a new vector handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cm_pv_parse(text: *const c_char, out: *mut *mut CmProbabilityVector) -> CmStatus {
    guard(|| {
        let s = read_str(text)?;
        if out.is_null() {
            return Err((CmStatus::NullPointer, "null output pointer".into()));
        }
        let pv = ProbabilityVector::parse(s).map_err(lib)?;
        *out = Box::into_raw(Box::new(CmProbabilityVector(pv)));
        Ok(CmStatus::Ok)
    })
}

/// # Safety
/// `pv` must come from `cm_pv_parse` and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cm_pv_free(pv: *mut CmProbabilityVector) {
    if !pv.is_null() {
        drop(Box::from_raw(pv));
    }
}

/// Number of coordinates, or 0 for a null handle.
///
/// # Safety
/// `pv` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cm_pv_len(pv: *const CmProbabilityVector) -> usize {
    pv.as_ref().map_or(0, |p| p.0.n())
}

/// Parse a family literal such as `[[1,2],[3]]` over `[n]`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cm_family_from_json(n: usize, json: *const c_char, out: *mut *mut CmFamily) -> CmStatus {
    guard(|| {
        let s = read_str(json)?;
        if out.is_null() {
            return Err((CmStatus::NullPointer, "null output pointer".into()));
        }
        let f = SubsetFamily::from_json(n, s).map_err(lib)?;
        *out = Box::into_raw(Box::new(CmFamily(f)));
        Ok(CmStatus::Ok)
    })
}

/// # Safety
/// `f` must come from `cm_family_from_json` and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cm_family_free(f: *mut CmFamily) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Number of members, or 0 for a null handle.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cm_family_len(f: *const CmFamily) -> usize {
    f.as_ref().map_or(0, |f| f.0.len())
}

/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cm_family_to_json(f: *const CmFamily, out: *mut *mut c_char) -> CmStatus {
    guard(|| {
        let f = deref(f)?;
        write_string(out, f.0.to_json())?;
        Ok(CmStatus::Ok)
    })
}

/// Exact measure of `f` as a `"num/den"` string.
///
/// # Safety
/// Handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cm_measure(
    pv: *const CmProbabilityVector,
    f: *const CmFamily,
    out: *mut *mut c_char,
) -> CmStatus {
    guard(|| {
        let (pv, f) = (deref(pv)?, deref(f)?);
        let m = product_measure(&pv.0, &f.0).map_err(lib)?;
        write_string(out, format_rational(&m))?;
        Ok(CmStatus::Ok)
    })
}

/// # Safety
/// Handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cm_is_cross_intersecting(a: *const CmFamily, b: *const CmFamily, out: *mut bool) -> CmStatus {
    guard(|| {
        let (a, b) = (deref(a)?, deref(b)?);
        if out.is_null() {
            return Err((CmStatus::NullPointer, "null output pointer".into()));
        }
        *out = is_cross_intersecting(&a.0, &b.0).map_err(lib)?;
        Ok(CmStatus::Ok)
    })
}

/// Verify a certificate (`third` selects the one for entries at most 1/3;
/// otherwise `ε2 = 0`) and write the JSON report. Returns `CM_STATUS_FALSE`
/// with the report still written when the certificate is infeasible.
///
/// # Safety
/// Handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cm_certify(
    pv1: *const CmProbabilityVector,
    pv2: *const CmProbabilityVector,
    third: bool,
    out: *mut *mut c_char,
) -> CmStatus {
    guard(|| {
        let (a, b) = (deref(pv1)?, deref(pv2)?);
        let report = if third {
            verify_third_certificate(&a.0, &b.0)
        } else {
            verify_dual_feasibility(&a.0, &b.0, EpsilonChoice::Zero)
        }
        .map_err(lib)?;
        write_string(out, serde_json::to_string(&report).map_err(json_err)?)?;
        Ok(if report.feasible { CmStatus::Ok } else { CmStatus::False })
    })
}

/// Exhaustive oracle (`n ≤ 5`); writes the extremal report as JSON. Returns
/// `CM_STATUS_FALSE` when the maximum differs from `p1 p2`.
///
/// # Safety
/// Handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cm_oracle(
    pv1: *const CmProbabilityVector,
    pv2: *const CmProbabilityVector,
    out: *mut *mut c_char,
) -> CmStatus {
    guard(|| {
        let (a, b) = (deref(pv1)?, deref(pv2)?);
        let report = max_cross_product(&a.0, &b.0).map_err(lib)?;
        write_string(out, serde_json::to_string(&report).map_err(json_err)?)?;
        Ok(if report.max_equals_p1p2 { CmStatus::Ok } else { CmStatus::False })
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
