use std::ffi::{CStr, CString};
use std::ptr;

use crossmeasure_ffi::*;

fn pv(text: &str) -> *mut CmProbabilityVector {
    let c = CString::new(text).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cm_pv_parse(c.as_ptr(), &mut out) }, CmStatus::Ok);
    out
}

fn family(n: usize, json: &str) -> *mut CmFamily {
    let c = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cm_family_from_json(n, c.as_ptr(), &mut out) }, CmStatus::Ok);
    out
}

fn take(s: *mut std::ffi::c_char) -> String {
    let owned = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { cm_string_free(s) };
    owned
}

#[test]
fn measure_and_cross_check() {
    let p = pv("1/2,1/3");
    assert_eq!(unsafe { cm_pv_len(p) }, 2);
    let star = family(2, "[[1],[1,2]]");
    let other = family(2, "[[2]]");
    assert_eq!(unsafe { cm_family_len(star) }, 2);

    let mut s = ptr::null_mut();
    assert_eq!(unsafe { cm_measure(p, star, &mut s) }, CmStatus::Ok);
    assert_eq!(take(s), "1/2");

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { cm_family_to_json(star, &mut json) }, CmStatus::Ok);
    assert_eq!(take(json), "[[1],[1,2]]");

    let mut cross = true;
    assert_eq!(unsafe { cm_is_cross_intersecting(star, other, &mut cross) }, CmStatus::Ok);
    assert!(!cross);
    assert_eq!(unsafe { cm_is_cross_intersecting(star, star, &mut cross) }, CmStatus::Ok);
    assert!(cross);

    unsafe {
        cm_family_free(star);
        cm_family_free(other);
        cm_pv_free(p);
    }
}

#[test]
fn certify_and_oracle() {
    let (a, b) = (pv("1/2,1/3"), pv("1/2,1/4"));
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cm_certify(a, b, false, &mut out) }, CmStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(report["bound"], "1/4");

    let c = pv("3/5,1/3");
    let d = pv("1/2,1/3");
    assert_eq!(unsafe { cm_certify(c, d, false, &mut out) }, CmStatus::False);
    take(out);

    assert_eq!(unsafe { cm_oracle(a, b, &mut out) }, CmStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(report["max"], "1/4");
    unsafe {
        for h in [a, b, c, d] {
            cm_pv_free(h);
        }
    }
}

#[test]
fn errors_are_reported() {
    let bad = CString::new("1/2,3/2").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cm_pv_parse(bad.as_ptr(), &mut out) }, CmStatus::Parse);
    assert!(out.is_null());
    let msg = unsafe { CStr::from_ptr(cm_last_error()) }.to_str().unwrap();
    assert!(msg.contains("3/2"), "{msg}");

    assert_eq!(unsafe { cm_pv_parse(ptr::null(), &mut out) }, CmStatus::NullPointer);
    let mut flag = false;
    assert_eq!(unsafe { cm_is_cross_intersecting(ptr::null(), ptr::null(), &mut flag) }, CmStatus::NullPointer);

    let big = pv("1/2,1/2,1/2,1/2,1/2,1/2");
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { cm_oracle(big, big, &mut s) }, CmStatus::SizeCap);
    unsafe {
        cm_pv_free(big);
        cm_pv_free(ptr::null_mut());
        cm_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/crossmeasure.h")).unwrap();
    for name in ["cm_pv_parse", "cm_family_from_json", "cm_certify", "cm_oracle", "cm_last_error", "CM_STATUS_OK"] {
        assert!(header.contains(name), "missing {name}");
    }
    assert!(header.contains("typedef struct CmFamily CmFamily"));
}
