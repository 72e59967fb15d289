//! C ABI for `bidisc`.
//!
//! Signings and factorizations are opaque handles created by this library
//! and released with the matching `_free` function. Every entry point
//! returns a [`BidiscStatus`]; on failure [`bidisc_last_error_message`]
//! describes the error for the calling thread. Panics never cross the
//! boundary and are reported as [`BidiscStatus::Panic`].
//!
//! Rational outputs are returned as numerator and denominator in lowest
//! terms with a positive denominator.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bidisc::census::count_switchers;
use bidisc::cyclic::{factorize_high_disc, CyclicOptions};
use bidisc::dichotomy::{classify, ClassifyOptions};
use bidisc::io::parse_signing;
use bidisc::rational::{ratio, Rational};
use bidisc::switching::{factorize_many_switchers, CrownCache, CrownMode, SwitcherOptions};
use bidisc::{disc_graph, Error, OneFactorization, SignMatrix};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BidiscStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    ConstructionFailed = 4,
    /// The call completed but its result does not meet the requested bound.
    BoundUnmet = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BidiscCrownMode {
    Auto = 0,
    Exact = 1,
    Heuristic = 2,
}

/// Switcher counts: `s = s1 + s2`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BidiscCensus {
    pub n: usize,
    pub s: u64,
    pub s1: u64,
    pub s2: u64,
}

/// Opaque signing handle.
pub struct BidiscSigning(SignMatrix);

/// Opaque 1-factorization handle.
pub struct BidiscFactorization(OneFactorization);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> BidiscStatus {
    match e {
        Error::Parse { .. } => BidiscStatus::ParseError,
        Error::Construction { .. }
        | Error::Timeout { .. }
        | Error::TooFewSwitchers { .. }
        | Error::Inconsistent(_)
        | Error::InvalidStructure(_) => BidiscStatus::ConstructionFailed,
        _ => BidiscStatus::InvalidArgument,
    }
}

fn fail(status: BidiscStatus, message: impl Into<String>) -> BidiscStatus {
    set_error(message.into());
    status
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<BidiscStatus, (BidiscStatus, String)>) -> BidiscStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err((s, msg))) => fail(s, msg),
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(BidiscStatus::Panic, format!("panic: {msg}"))
        }
    }
}

fn lift(e: Error) -> (BidiscStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (BidiscStatus, String) {
    (BidiscStatus::NullPointer, format!("{what} is null"))
}

fn rational_arg(num: i64, den: i64, what: &str) -> Result<Rational, (BidiscStatus, String)> {
    if den == 0 {
        return Err((BidiscStatus::InvalidArgument, format!("{what} has zero denominator")));
    }
    Ok(ratio(num as i128, den as i128))
}

fn write_rational(r: Rational, num: *mut i64, den: *mut i64) -> Result<(), (BidiscStatus, String)> {
    if num.is_null() || den.is_null() {
        return Err(null("output pointer"));
    }
    let (p, q) = (i64::try_from(*r.numer()), i64::try_from(*r.denom()));
    match (p, q) {
        (Ok(p), Ok(q)) => {
            // SAFETY: both pointers were checked non-null; the caller
            // guarantees they are valid for writes.
            unsafe {
                *num = p;
                *den = q;
            }
            Ok(())
        }
        _ => Err((BidiscStatus::InvalidArgument, "rational does not fit in i64".into())),
    }
}

/// Message for the last failed call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bidisc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates a signing from `n * n` row-major entries, each `-1` or `+1`.
///
/// # Safety
/// `entries` must point to `n * n` readable values and `out` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn bidisc_signing_new(n: usize, entries: *const i8, out: *mut *mut BidiscSigning) -> BidiscStatus {
    guard(|| {
        if entries.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let len = n.checked_mul(n).ok_or((BidiscStatus::InvalidArgument, "n too large".to_string()))?;
        let data = std::slice::from_raw_parts(entries, len).to_vec();
        let m = SignMatrix::new(n, data).map_err(lift)?;
        *out = Box::into_raw(Box::new(BidiscSigning(m)));
        Ok(BidiscStatus::Ok)
    })
}

/// Parses a signing file (line 1 `n`, then `n` lines over `{+,-}`).
///
/// # Safety
/// `text` must be a nul-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bidisc_signing_parse(text: *const c_char, out: *mut *mut BidiscSigning) -> BidiscStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| (BidiscStatus::ParseError, format!("input is not UTF-8: {e}")))?;
        let m = parse_signing(s).map_err(lift)?;
        *out = Box::into_raw(Box::new(BidiscSigning(m)));
        Ok(BidiscStatus::Ok)
    })
}

/// Releases a signing. Null is ignored.
///
/// # Safety
/// `signing` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bidisc_signing_free(signing: *mut BidiscSigning) {
    if !signing.is_null() {
        drop(Box::from_raw(signing));
    }
}

/// Order `n` of the signing, or 0 for null.
///
/// # Safety
/// `signing` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bidisc_signing_n(signing: *const BidiscSigning) -> usize {
    signing.as_ref().map_or(0, |s| s.0.n())
}

/// # Safety
/// `signing` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bidisc_signing_census(signing: *const BidiscSigning, out: *mut BidiscCensus) -> BidiscStatus {
    guard(|| {
        let s = signing.as_ref().ok_or_else(|| null("signing"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let c = count_switchers(&s.0);
        *out = BidiscCensus {
            n: c.n,
            s: c.s,
            s1: c.s1,
            s2: c.s2,
        };
        Ok(BidiscStatus::Ok)
    })
}

/// Discrepancy `|sum of entries| / n^2`.
///
/// # Safety
/// `signing` must be a live handle; `num` and `den` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bidisc_signing_disc(signing: *const BidiscSigning, num: *mut i64, den: *mut i64) -> BidiscStatus {
    guard(|| {
        let s = signing.as_ref().ok_or_else(|| null("signing"))?;
        write_rational(disc_graph(&s.0), num, den)?;
        Ok(BidiscStatus::Ok)
    })
}

/// Cyclic-shift factorization for signings with large discrepancy. Returns
/// `BoundUnmet` (with a valid handle in `out`) when some matching misses
/// the concentration bound.
///
/// # Safety
/// `signing` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bidisc_factorize_cyclic(
    signing: *const BidiscSigning,
    seed: u64,
    max_tries: usize,
    out: *mut *mut BidiscFactorization,
) -> BidiscStatus {
    guard(|| {
        let s = signing.as_ref().ok_or_else(|| null("signing"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let opts = CyclicOptions {
            max_tries,
            sampler_bound: None,
            seed,
        };
        let o = factorize_high_disc(&s.0, &opts).map_err(lift)?;
        *out = Box::into_raw(Box::new(BidiscFactorization(o.factorization)));
        Ok(if o.report.all_within_bound {
            BidiscStatus::Ok
        } else {
            set_error("some matching misses the concentration bound".into());
            BidiscStatus::BoundUnmet
        })
    })
}

/// Switching factorization for signings with many switchers. `eta_den = 0`
/// uses the measured switcher density. Returns `BoundUnmet` (with a valid
/// handle in `out`) when some matching misses `eta / 8 - 3 / n`.
///
/// # Safety
/// `signing` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bidisc_factorize_switcher(
    signing: *const BidiscSigning,
    eta_num: i64,
    eta_den: i64,
    crown_mode: BidiscCrownMode,
    seed: u64,
    out: *mut *mut BidiscFactorization,
) -> BidiscStatus {
    guard(|| {
        let s = signing.as_ref().ok_or_else(|| null("signing"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let mut opts = SwitcherOptions {
            eta: if eta_den == 0 { None } else { Some(rational_arg(eta_num, eta_den, "eta")?) },
            seed,
            ..SwitcherOptions::default()
        };
        opts.crown.mode = match crown_mode {
            BidiscCrownMode::Auto => CrownMode::Auto,
            BidiscCrownMode::Exact => CrownMode::Exact,
            BidiscCrownMode::Heuristic => CrownMode::Heuristic,
        };
        let o = factorize_many_switchers(&s.0, &opts, CrownCache::global()).map_err(lift)?;
        *out = Box::into_raw(Box::new(BidiscFactorization(o.factorization)));
        Ok(if o.report.all_meet_bound {
            BidiscStatus::Ok
        } else {
            set_error("some matching misses eta/8 - 3/n".into());
            BidiscStatus::BoundUnmet
        })
    })
}

/// Number of matchings (equal to `n`), or 0 for null.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bidisc_factorization_n(f: *const BidiscFactorization) -> usize {
    f.as_ref().map_or(0, |f| f.0.n())
}

/// Writes matching `t` into `out[0..n]`: `x_i` is matched to `y_{out[i]}`.
///
/// # Safety
/// `f` must be a live handle and `out` valid for `n` writes.
#[no_mangle]
pub unsafe extern "C" fn bidisc_factorization_matching(f: *const BidiscFactorization, t: usize, out: *mut usize) -> BidiscStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(|| null("factorization"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let pm = f
            .0
            .matchings()
            .get(t)
            .ok_or_else(|| (BidiscStatus::InvalidArgument, format!("matching {t} out of range")))?;
        std::slice::from_raw_parts_mut(out, pm.n()).copy_from_slice(pm.map());
        Ok(BidiscStatus::Ok)
    })
}

/// Smallest matching discrepancy of `f` under `signing`.
///
/// # Safety
/// Handles must be live; `num` and `den` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bidisc_factorization_min_disc(
    f: *const BidiscFactorization,
    signing: *const BidiscSigning,
    num: *mut i64,
    den: *mut i64,
) -> BidiscStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(|| null("factorization"))?;
        let s = signing.as_ref().ok_or_else(|| null("signing"))?;
        write_rational(f.0.min_disc(&s.0).map_err(lift)?, num, den)?;
        Ok(BidiscStatus::Ok)
    })
}

/// Releases a factorization. Null is ignored.
///
/// # Safety
/// `f` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bidisc_factorization_free(f: *mut BidiscFactorization) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Runs the classifier for `epsilon = eps_num / eps_den` and writes its
/// certificate as a JSON string to `json_out`, to be released with
/// [`bidisc_string_free`]. Returns `BoundUnmet` (with the JSON written) when
/// no branch verified.
///
/// # Safety
/// `signing` must be a live handle and `json_out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bidisc_certify(
    signing: *const BidiscSigning,
    eps_num: i64,
    eps_den: i64,
    seed: u64,
    json_out: *mut *mut c_char,
) -> BidiscStatus {
    guard(|| {
        let s = signing.as_ref().ok_or_else(|| null("signing"))?;
        if json_out.is_null() {
            return Err(null("json_out"));
        }
        let eps = rational_arg(eps_num, eps_den, "epsilon")?;
        let opts = ClassifyOptions {
            seed,
            ..ClassifyOptions::default()
        };
        let cert = classify(&s.0, eps, &opts, CrownCache::global()).map_err(lift)?;
        let text = serde_json::to_string(&cert).map_err(|e| (BidiscStatus::Panic, e.to_string()))?;
        *json_out = CString::new(text).expect("JSON has no nul bytes").into_raw();
        Ok(if cert.success {
            BidiscStatus::Ok
        } else {
            set_error("no branch verified".into());
            BidiscStatus::BoundUnmet
        })
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bidisc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
