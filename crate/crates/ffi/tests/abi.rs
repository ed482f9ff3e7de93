use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use jetcount_ffi::*;

const DEFS: &str = "\
[scheme A1]
vars = x
[scheme T]
vars = t
[scheme D]
vars = x
eqs = x^2
dim = 0
ci = yes
[scheme X]
vars = x1, x2
eqs = x1*x2^2
dim = 1
ci = yes
[morphism sq]
source = A1
target = T
maps = x^2
";

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { jc_string_free(s) };
    out
}

fn last_error() -> String {
    let p = jc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn defs() -> *mut JcDefs {
    let text = CString::new(DEFS).unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { jc_defs_parse(text.as_ptr(), &mut d) }, JcStatus::Ok);
    d
}

fn scheme(d: *const JcDefs, name: &str) -> *mut JcScheme {
    let name = CString::new(name).unwrap();
    let mut x = ptr::null_mut();
    assert_eq!(unsafe { jc_defs_scheme(d, name.as_ptr(), &mut x) }, JcStatus::Ok);
    x
}

#[test]
fn counts_and_jets() {
    let d = defs();
    let x = scheme(d, "D");
    let mut out = ptr::null_mut();
    let st = unsafe { jc_count_points(x, 3, 4, JcMethod::Tree, JcLimits::default(), &mut out) };
    assert_eq!(st, JcStatus::Ok);
    assert_eq!(take(out), "9");
    let st = unsafe { jc_count_points(x, 3, 4, JcMethod::Naive, JcLimits::default(), &mut out) };
    assert_eq!(st, JcStatus::Ok);
    assert_eq!(take(out), "9");
    let j = scheme(d, "X");
    assert_eq!(unsafe { jc_jet_equations(j, 1, &mut out) }, JcStatus::Ok);
    assert_eq!(take(out), "x1*x2^2\nx1(1)*x2^2 + 2*x1*x2*x2(1)");
    unsafe {
        jc_scheme_free(x);
        jc_scheme_free(j);
        jc_defs_free(d);
    }
}

#[test]
fn fiber_and_diagnose() {
    let d = defs();
    let mut phi = ptr::null_mut();
    assert_eq!(unsafe { jc_defs_morphism(d, ptr::null(), &mut phi) }, JcStatus::Ok);
    let (mut g, mut h) = (ptr::null_mut(), ptr::null_mut());
    let y = [0u64];
    let st = unsafe { jc_fiber_gh(phi, y.as_ptr(), 1, 5, 3, JcLimits::default(), &mut g, &mut h) };
    assert_eq!(st, JcStatus::Ok);
    assert_eq!((take(g), take(h)), ("5".to_string(), "5".to_string()));
    let primes = [3u64, 5];
    let mut out = ptr::null_mut();
    let st = unsafe { jc_diagnose_json(phi, primes.as_ptr(), 2, 4, 0, 0, JcLimits::default(), &mut out) };
    assert_eq!(st, JcStatus::Ok);
    let doc: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(doc["verdicts"][0]["outcome"], "refuted");
    assert_eq!(doc["verdicts"][2]["fitted"]["epsilon"]["den"], "2");
    unsafe {
        jc_morphism_free(phi);
        jc_defs_free(d);
    }
}

#[test]
fn presburger_sup() {
    let expr = CString::new("s * q^(-s)").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { jc_presburger_sup(expr.as_ptr(), 2, 1, &mut out) }, JcStatus::Ok);
    let doc: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(doc["sup"], "1/2");
    assert_eq!(doc["argmax"], 1);
    let expr = CString::new("q^s - 1").unwrap();
    assert_eq!(unsafe { jc_presburger_sup(expr.as_ptr(), 2, 1, &mut out) }, JcStatus::Refused);
}

#[test]
fn errors_are_reported() {
    let bad = CString::new("[scheme X]\nvars = x\ncolour = red\n").unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { jc_defs_parse(bad.as_ptr(), &mut d) }, JcStatus::Parse);
    assert!(d.is_null());
    assert!(last_error().contains("line 3"));

    let mut out = ptr::null_mut();
    let st = unsafe { jc_count_points(ptr::null(), 3, 1, JcMethod::Auto, JcLimits::default(), &mut out) };
    assert_eq!(st, JcStatus::NullArgument);

    let d = defs();
    let x = scheme(d, "D");
    let tight = JcLimits { budget: 10, prime_floor: 0 };
    let st = unsafe { jc_count_points(x, 3, 6, JcMethod::Naive, tight, &mut out) };
    assert_eq!(st, JcStatus::Budget);
    assert!(last_error().contains("budget"));
    let st = unsafe { jc_count_points(x, 4, 1, JcMethod::Tree, JcLimits::default(), &mut out) };
    assert_eq!(st, JcStatus::Invalid);
    let st = unsafe { jc_count_points(x, 3, 1, JcMethod::Tree, JcLimits::default(), &mut out) };
    assert_eq!(st, JcStatus::Ok);
    assert!(jc_last_error().is_null());
    take(out);
    unsafe {
        jc_scheme_free(x);
        jc_defs_free(d);
    }
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/jetcount.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["jc_defs_parse", "jc_count_points", "jc_last_error", "jc_string_free", "JC_STATUS_BUDGET"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(status) = Command::new("cc").args(["-fsyntax-only", "-x", "c"]).arg(&header).status() else {
        eprintln!("no C compiler; syntax check skipped");
        return;
    };
    assert!(status.success());
}
