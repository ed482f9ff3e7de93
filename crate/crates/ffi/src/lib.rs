//! C ABI for jetcount.
//!
//! Objects are opaque handles created by `jc_*_parse`/`jc_defs_*` calls and
//! released with the matching `*_free`. Every fallible call returns a
//! [`JcStatus`]; on failure `jc_last_error` describes the problem for the
//! calling thread. Strings handed out by the library are released with
//! `jc_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use jetcount::count::{count_points_naive, count_points_tree};
use jetcount::defs::Definitions;
use jetcount::diagnostics::{diagnose_json, scan_gh, ScanSpec};
use jetcount::limits::Limits;
use jetcount::measures::gh_record;
use jetcount::presburger::{sup_over_domain, ConstructibleFunction, Supremum};
use jetcount::scheme::{jet_prolong, AffineScheme, PolyMorphism};
use jetcount::{count::Method, Error};
use num_bigint::BigInt;
use num_rational::BigRational;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JcStatus {
    Ok = 0,
    Parse = 1,
    Invalid = 2,
    Budget = 3,
    Refused = 4,
    Coverage = 5,
    NullArgument = 6,
    Utf8 = 7,
    Panic = 8,
}

/// Parsed definition file.
pub struct JcDefs(Definitions);
pub struct JcScheme(AffineScheme);
pub struct JcMorphism(PolyMorphism);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JcMethod {
    Auto = 0,
    Naive = 1,
    Tree = 2,
}

impl From<JcMethod> for Method {
    fn from(m: JcMethod) -> Self {
        match m {
            JcMethod::Auto => Method::Auto,
            JcMethod::Naive => Method::Naive,
            JcMethod::Tree => Method::Tree,
        }
    }
}

/// Work budget and prime floor; zero fields take the library defaults.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct JcLimits {
    pub budget: u64,
    pub prime_floor: u64,
}

impl From<JcLimits> for Limits {
    fn from(l: JcLimits) -> Self {
        let d = Limits::default();
        Limits {
            budget: if l.budget == 0 { d.budget } else { l.budget },
            prime_floor: if l.prime_floor == 0 { d.prime_floor } else { l.prime_floor },
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(JcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse { .. } | Error::UnknownVariable { .. } | Error::Definition { .. } => JcStatus::Parse,
            Error::Budget { .. } => JcStatus::Budget,
            Error::Refused(_) => JcStatus::Refused,
            Error::Coverage(_) => JcStatus::Coverage,
            _ => JcStatus::Invalid,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> JcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            JcStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            JcStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(JcStatus::NullArgument, format!("`{what}` is null"))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(JcStatus::Utf8, format!("`{what}` is not UTF-8")))
}

unsafe fn opt_text<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Fail> {
    if p.is_null() {
        Ok(None)
    } else {
        c_str(p, what).map(Some)
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(JcStatus::Invalid, "output contains a nul byte".into()))?;
    put(out, c.into_raw(), "out")
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn jc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn jc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `text` must be a valid C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn jc_defs_parse(text: *const c_char, out: *mut *mut JcDefs) -> JcStatus {
    guard(|| {
        let defs = Definitions::parse(c_str(text, "text")?)?;
        put(out, Box::into_raw(Box::new(JcDefs(defs))), "out")
    })
}

/// # Safety
/// `defs` must be null or a handle from `jc_defs_parse`.
#[no_mangle]
pub unsafe extern "C" fn jc_defs_free(defs: *mut JcDefs) {
    if !defs.is_null() {
        drop(Box::from_raw(defs));
    }
}

/// Copies a scheme out of `defs`. A null `name` picks the only scheme.
///
/// # Safety
/// Pointers must be valid; `name` may be null.
#[no_mangle]
pub unsafe extern "C" fn jc_defs_scheme(defs: *const JcDefs, name: *const c_char, out: *mut *mut JcScheme) -> JcStatus {
    guard(|| {
        let x = handle(defs, "defs")?.0.scheme(opt_text(name, "name")?)?.clone();
        put(out, Box::into_raw(Box::new(JcScheme(x))), "out")
    })
}

/// # Safety
/// Pointers must be valid; `name` may be null.
#[no_mangle]
pub unsafe extern "C" fn jc_defs_morphism(
    defs: *const JcDefs,
    name: *const c_char,
    out: *mut *mut JcMorphism,
) -> JcStatus {
    guard(|| {
        let phi = handle(defs, "defs")?.0.morphism(opt_text(name, "name")?)?.clone();
        put(out, Box::into_raw(Box::new(JcMorphism(phi))), "out")
    })
}

/// # Safety
/// `x` must be null or a handle from `jc_defs_scheme`.
#[no_mangle]
pub unsafe extern "C" fn jc_scheme_free(x: *mut JcScheme) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// # Safety
/// `phi` must be null or a handle from `jc_defs_morphism`.
#[no_mangle]
pub unsafe extern "C" fn jc_morphism_free(phi: *mut JcMorphism) {
    if !phi.is_null() {
        drop(Box::from_raw(phi));
    }
}

/// Equations of `J_k(X)`, one per line.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn jc_jet_equations(x: *const JcScheme, k: u32, out: *mut *mut c_char) -> JcStatus {
    guard(|| {
        let sys = jet_prolong(&handle(x, "scheme")?.0, k);
        let lines: Vec<String> = sys.scheme.equations().iter().map(|e| e.to_string()).collect();
        put_string(out, lines.join("\n"))
    })
}

/// `#X(Z/p^k)` as a decimal string.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn jc_count_points(
    x: *const JcScheme,
    p: u64,
    k: u32,
    method: JcMethod,
    limits: JcLimits,
    out: *mut *mut c_char,
) -> JcStatus {
    guard(|| {
        let x = &handle(x, "scheme")?.0;
        let limits = Limits::from(limits);
        let r = match method {
            JcMethod::Naive => count_points_naive(x, p, k, &limits)?,
            JcMethod::Tree | JcMethod::Auto => count_points_tree(x, p, k, &limits)?,
        };
        put_string(out, r.count.to_string())
    })
}

/// g and h of one fiber as rational strings `num/den` (or integers).
///
/// # Safety
/// Pointers must be valid; `y` must hold `y_len` entries.
#[no_mangle]
pub unsafe extern "C" fn jc_fiber_gh(
    phi: *const JcMorphism,
    y: *const u64,
    y_len: usize,
    p: u64,
    k: u32,
    limits: JcLimits,
    out_g: *mut *mut c_char,
    out_h: *mut *mut c_char,
) -> JcStatus {
    guard(|| {
        if out_g.is_null() || out_h.is_null() {
            return Err(null("out"));
        }
        let y = slice(y, y_len, "y")?;
        let rec = gh_record(&handle(phi, "morphism")?.0, y, p, k, Method::Auto, &limits.into())?;
        put_string(out_g, rec.g.to_string())?;
        if let Err(e) = put_string(out_h, rec.h.to_string()) {
            jc_string_free(*out_g);
            *out_g = ptr::null_mut();
            return Err(e);
        }
        Ok(())
    })
}

/// Scans all fibers and returns the verdict document as JSON.
///
/// # Safety
/// Pointers must be valid; `primes` must hold `n_primes` entries.
#[no_mangle]
pub unsafe extern "C" fn jc_diagnose_json(
    phi: *const JcMorphism,
    primes: *const u64,
    n_primes: usize,
    k_max: u32,
    seed: u64,
    cap: u64,
    limits: JcLimits,
    out: *mut *mut c_char,
) -> JcStatus {
    guard(|| {
        let primes = slice(primes, n_primes, "primes")?.to_vec();
        let mut spec = ScanSpec::new(handle(phi, "morphism")?.0.clone(), primes, k_max).with_limits(limits.into());
        spec.seed = seed;
        if cap > 0 {
            spec.cap = cap;
        }
        let report = diagnose_json(&scan_gh(&spec)?)?;
        put_string(out, serde_json::to_string(&report).expect("json"))
    })
}

/// Supremum of a constructible function at `q = q_num/q_den`, as JSON.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn jc_presburger_sup(
    expr: *const c_char,
    q_num: i64,
    q_den: i64,
    out: *mut *mut c_char,
) -> JcStatus {
    guard(|| {
        if q_den == 0 {
            return Err(Fail(JcStatus::Invalid, "q has a zero denominator".into()));
        }
        let f = ConstructibleFunction::parse(c_str(expr, "expr")?)?;
        let q = BigRational::new(BigInt::from(q_num), BigInt::from(q_den));
        let doc = match sup_over_domain(&f, &q)? {
            Supremum::Bounded { sup, argmax, tail_bound } => serde_json::json!({
                "bounded": true, "sup": sup.to_string(), "argmax": argmax, "tail_bound": tail_bound,
            }),
            Supremum::Unbounded { term, witness_s, witness_value } => serde_json::json!({
                "bounded": false, "term": term, "witness_s": witness_s, "witness_value": witness_value.to_string(),
            }),
        };
        put_string(out, doc.to_string())
    })
}
