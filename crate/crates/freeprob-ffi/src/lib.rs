//! C ABI for the freeprob toolkit: opaque handles, integer status codes,
//! and a generated `include/freeprob.h` header (see `build.rs`).
//!
//! Ownership rules: every `*_new`/`*_catalog`/check function returns an
//! owned pointer that must be released with the matching `*_free`; strings
//! returned by `fp_*_json` are released with `fp_string_free`. All
//! functions are safe to call from multiple threads; the last-error message
//! is thread-local.

#![allow(clippy::missing_safety_doc)] // pointer/ownership contracts are documented per function

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use freeprob::checkers::{
    fid_grid_check, fsd_grid_check, CheckOptions, Half, HalfPlaneGrid,
};
use freeprob::cumulants::{fid_cumulant_criterion, fsd_cumulant_criterion};
use freeprob::levy::fsd_monotonicity_check;
use freeprob::measures::{catalog_lookup, measure_from_json, measure_to_json, MeasureSpec};
use freeprob::report::{to_json_string, CheckReport, Verdict};
use freeprob::transforms::{
    cauchy_eval, free_cumulant_transform_derivative_eval, free_cumulant_transform_eval,
    invert_reciprocal_cauchy, reciprocal_cauchy_eval, voiculescu_eval, TransformOptions,
};
use num_complex::Complex64;

/// Status codes returned by fallible functions.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpStatus {
    FpOk = 0,
    /// Invalid argument (null pointer, bad UTF-8, unknown name, bad params).
    FpErrArgument = 1,
    /// Evaluation failed (convergence, quadrature, continuation, ...).
    FpErrEval = 2,
    /// The measure lacks a representation required by the operation.
    FpErrUnsupported = 3,
    /// No witness is attached to the report.
    FpNoWitness = 4,
    /// Internal panic; the library state is still valid.
    FpErrInternal = 5,
}

/// Transform selector for `fp_transform_eval`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpTransformOp {
    /// Cauchy transform G (upper half plane).
    FpOpCauchy = 0,
    /// Reciprocal Cauchy transform F = 1/G (upper half plane).
    FpOpReciprocal = 1,
    /// Right inverse of F (upper half plane).
    FpOpInverse = 2,
    /// Voiculescu transform phi (upper half plane).
    FpOpVoiculescu = 3,
    /// Free cumulant transform C (lower half plane).
    FpOpCumulant = 4,
    /// Derivative C' of the free cumulant transform (lower half plane).
    FpOpCumulantDerivative = 5,
}

/// Half-plane grid geometry for the FID/FSD checks; pass NULL for defaults
/// (radii 1e-2..1e3 at 25 per decade, 64 angles).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FpGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub per_decade: usize,
    pub angles: usize,
}

/// Opaque measure handle.
pub struct FpMeasure(MeasureSpec);

/// Opaque check-report handle.
pub struct FpReport(CheckReport, Option<serde_json::Value>);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

fn classify(e: &freeprob::error::Error) -> FpStatus {
    use freeprob::error::Error::*;
    set_error(&e.to_string());
    match e {
        UnknownDistribution(_) | ParameterDomain(_) | Usage(_) | Truncation { .. }
        | OrderCap(..) | NotAMomentSequence(_) | InvalidRho(_) => FpStatus::FpErrArgument,
        UnsupportedRepresentation(_) => FpStatus::FpErrUnsupported,
        _ => FpStatus::FpErrEval,
    }
}

unsafe fn cstr<'a>(p: *const c_char) -> Option<&'a str> {
    if p.is_null() {
        return None;
    }
    CStr::from_ptr(p).to_str().ok()
}

fn guarded<T, F: FnOnce() -> Option<T>>(f: F) -> Option<T> {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(v) => v,
        Err(_) => {
            set_error("internal panic");
            None
        }
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn fp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copies the thread-local last error message into `buf` (truncated to
/// `len - 1` bytes, always NUL-terminated); returns the full message length.
#[no_mangle]
pub unsafe extern "C" fn fp_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Builds a catalog measure; `params` is a `key=value` record like
/// `"a=0, r=2"` (NULL for defaults). Returns NULL on error.
#[no_mangle]
pub unsafe extern "C" fn fp_measure_catalog(
    name: *const c_char,
    params: *const c_char,
) -> *mut FpMeasure {
    guarded(|| {
        let name = cstr(name).or_else(|| {
            set_error("name must be valid UTF-8 and non-null");
            None
        })?;
        let record = match cstr(params) {
            Some(s) => match s.parse() {
                Ok(r) => r,
                Err(e) => {
                    set_error(&format!("{e}"));
                    return None;
                }
            },
            None => Default::default(),
        };
        match catalog_lookup(name, &record) {
            Ok(m) => Some(Box::into_raw(Box::new(FpMeasure(m)))),
            Err(e) => {
                classify(&e);
                None
            }
        }
    })
    .unwrap_or(std::ptr::null_mut())
}

/// Reads a measure from its tagged JSON document. Returns NULL on error.
#[no_mangle]
pub unsafe extern "C" fn fp_measure_from_json(json: *const c_char) -> *mut FpMeasure {
    guarded(|| {
        let text = cstr(json).or_else(|| {
            set_error("json must be valid UTF-8 and non-null");
            None
        })?;
        let value: serde_json::Value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(e) => {
                set_error(&format!("bad JSON: {e}"));
                return None;
            }
        };
        match measure_from_json(&value) {
            Ok(m) => Some(Box::into_raw(Box::new(FpMeasure(m)))),
            Err(e) => {
                classify(&e);
                None
            }
        }
    })
    .unwrap_or(std::ptr::null_mut())
}

/// Serializes a measure to its tagged JSON document (free with
/// `fp_string_free`).
#[no_mangle]
pub unsafe extern "C" fn fp_measure_to_json(m: *const FpMeasure) -> *mut c_char {
    guarded(|| {
        let m = m.as_ref()?;
        let doc = measure_to_json(&m.0);
        CString::new(to_json_string(&doc)).ok().map(CString::into_raw)
    })
    .unwrap_or(std::ptr::null_mut())
}

#[no_mangle]
pub unsafe extern "C" fn fp_measure_free(m: *mut FpMeasure) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

#[no_mangle]
pub unsafe extern "C" fn fp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn grid_from(grid: *const FpGrid, half: Half) -> HalfPlaneGrid {
    let base = match half {
        Half::Upper => HalfPlaneGrid::upper_default(),
        Half::Lower => HalfPlaneGrid::lower_default(),
    };
    if grid.is_null() {
        return base;
    }
    let g = unsafe { *grid };
    HalfPlaneGrid {
        r_min: g.r_min,
        r_max: g.r_max,
        per_decade: g.per_decade.max(1),
        angles: g.angles.max(2),
        ..base
    }
}

/// Grid FSD check (Im C' over a lower-half-plane grid); NULL grid uses the
/// defaults. Returns NULL only on argument errors.
#[no_mangle]
pub unsafe extern "C" fn fp_check_fsd(
    m: *const FpMeasure,
    grid: *const FpGrid,
) -> *mut FpReport {
    guarded(|| {
        let m = m.as_ref()?;
        let rep = fsd_grid_check(&m.0, &grid_from(grid, Half::Lower), &CheckOptions::default());
        Some(Box::into_raw(Box::new(FpReport(rep, None))))
    })
    .unwrap_or(std::ptr::null_mut())
}

/// Grid FID check (Im phi over an upper-half-plane grid).
#[no_mangle]
pub unsafe extern "C" fn fp_check_fid(
    m: *const FpMeasure,
    grid: *const FpGrid,
) -> *mut FpReport {
    guarded(|| {
        let m = m.as_ref()?;
        let rep = fid_grid_check(&m.0, &grid_from(grid, Half::Upper), &CheckOptions::default());
        Some(Box::into_raw(Box::new(FpReport(rep, None))))
    })
    .unwrap_or(std::ptr::null_mut())
}

/// Exact Hankel FSD criterion on `{n kappa_n}` at the given order; needs a
/// measure with moments.
#[no_mangle]
pub unsafe extern "C" fn fp_check_fsd_cumulant(
    m: *const FpMeasure,
    order: usize,
) -> *mut FpReport {
    hankel_check(m, order, true)
}

/// Exact Hankel FID criterion on `{kappa_n}` at the given order.
#[no_mangle]
pub unsafe extern "C" fn fp_check_fid_cumulant(
    m: *const FpMeasure,
    order: usize,
) -> *mut FpReport {
    hankel_check(m, order, false)
}

unsafe fn hankel_check(m: *const FpMeasure, order: usize, fsd: bool) -> *mut FpReport {
    guarded(|| {
        let m = m.as_ref()?;
        let moments = match m.0.moments() {
            Some(ms) => ms,
            None => {
                set_error("measure carries no moments");
                return None;
            }
        };
        let result = if fsd {
            fsd_cumulant_criterion(moments, order)
        } else {
            fid_cumulant_criterion(moments, order)
        };
        match result {
            Ok((rep, hankel)) => Some(Box::into_raw(Box::new(FpReport(
                rep,
                Some(hankel.to_json()),
            )))),
            Err(e) => {
                classify(&e);
                None
            }
        }
    })
    .unwrap_or(std::ptr::null_mut())
}

/// Levy-measure monotonicity check; needs a measure with a characteristic
/// triplet.
#[no_mangle]
pub unsafe extern "C" fn fp_check_levy_monotone(m: *const FpMeasure) -> *mut FpReport {
    guarded(|| {
        let m = m.as_ref()?;
        let t = match m.0.triplet() {
            Some(t) => t,
            None => {
                set_error("measure carries no free characteristic triplet");
                return None;
            }
        };
        Some(Box::into_raw(Box::new(FpReport(
            fsd_monotonicity_check(t.levy_measure()),
            None,
        ))))
    })
    .unwrap_or(std::ptr::null_mut())
}

/// Report verdict: 0 = pass, 1 = fail, 2 = inconclusive, -1 on null input.
#[no_mangle]
pub unsafe extern "C" fn fp_report_verdict(r: *const FpReport) -> i32 {
    match r.as_ref() {
        Some(r) => match r.0.verdict {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        },
        None => -1,
    }
}

/// Worst signed margin of the check (max imaginary part for half-plane
/// checks); NaN on null input.
#[no_mangle]
pub unsafe extern "C" fn fp_report_margin(r: *const FpReport) -> f64 {
    r.as_ref().map(|r| r.0.margin).unwrap_or(f64::NAN)
}

/// Witness location and value, when the report carries one.
#[no_mangle]
pub unsafe extern "C" fn fp_report_witness(
    r: *const FpReport,
    loc_re: *mut f64,
    loc_im: *mut f64,
    val_re: *mut f64,
    val_im: *mut f64,
) -> FpStatus {
    let r = match r.as_ref() {
        Some(r) => r,
        None => return FpStatus::FpErrArgument,
    };
    match &r.0.witness {
        Some(w) => {
            if !loc_re.is_null() {
                *loc_re = w.location.re;
            }
            if !loc_im.is_null() {
                *loc_im = w.location.im;
            }
            if !val_re.is_null() {
                *val_re = w.value.re;
            }
            if !val_im.is_null() {
                *val_im = w.value.im;
            }
            FpStatus::FpOk
        }
        None => FpStatus::FpNoWitness,
    }
}

/// Full report as deterministic JSON (free with `fp_string_free`).
#[no_mangle]
pub unsafe extern "C" fn fp_report_json(r: *const FpReport) -> *mut c_char {
    guarded(|| {
        let r = r.as_ref()?;
        let doc = match &r.1 {
            Some(hankel) => serde_json::json!({"check": r.0, "hankel": hankel}),
            None => serde_json::json!({"check": r.0}),
        };
        CString::new(to_json_string(&doc)).ok().map(CString::into_raw)
    })
    .unwrap_or(std::ptr::null_mut())
}

#[no_mangle]
pub unsafe extern "C" fn fp_report_free(r: *mut FpReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Evaluates one analytic transform at `re + i im`, writing the value and
/// an error estimate.
#[no_mangle]
pub unsafe extern "C" fn fp_transform_eval(
    m: *const FpMeasure,
    op: FpTransformOp,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
    out_err: *mut f64,
) -> FpStatus {
    let m = match m.as_ref() {
        Some(m) => m,
        None => {
            set_error("null measure");
            return FpStatus::FpErrArgument;
        }
    };
    let z = Complex64::new(re, im);
    let opts = TransformOptions::default();
    let run = || -> Result<(Complex64, f64), freeprob::error::Error> {
        Ok(match op {
            FpTransformOp::FpOpCauchy => {
                let v = cauchy_eval(&m.0, z, &opts)?;
                (v.value, v.est_error)
            }
            FpTransformOp::FpOpReciprocal => {
                let v = reciprocal_cauchy_eval(&m.0, z, &opts)?;
                (v.value, v.est_error)
            }
            FpTransformOp::FpOpInverse => {
                let v = invert_reciprocal_cauchy(&m.0, z, &opts)?;
                (v, opts.newton_tol * (1.0 + v.norm()))
            }
            FpTransformOp::FpOpVoiculescu => {
                let v = voiculescu_eval(&m.0, z, &opts)?;
                (v.value, v.est_error)
            }
            FpTransformOp::FpOpCumulant => {
                let v = free_cumulant_transform_eval(&m.0, z, &opts)?;
                (v.value, v.est_error)
            }
            FpTransformOp::FpOpCumulantDerivative => {
                let v = free_cumulant_transform_derivative_eval(&m.0, z, &opts)?;
                (v.value, v.est_error)
            }
        })
    };
    match catch_unwind(AssertUnwindSafe(run)) {
        Ok(Ok((v, e))) => {
            if !out_re.is_null() {
                *out_re = v.re;
            }
            if !out_im.is_null() {
                *out_im = v.im;
            }
            if !out_err.is_null() {
                *out_err = e;
            }
            FpStatus::FpOk
        }
        Ok(Err(e)) => classify(&e),
        Err(_) => {
            set_error("internal panic");
            FpStatus::FpErrInternal
        }
    }
}

/// Askey-Wimp-Kerov density `kappa_c(t)`.
#[no_mangle]
pub unsafe extern "C" fn fp_awk_density(c: f64, t: f64, out: *mut f64) -> FpStatus {
    match catch_unwind(|| freeprob::awk::awk_density(c, t)) {
        Ok(Ok(v)) => {
            if !out.is_null() {
                *out = v;
            }
            FpStatus::FpOk
        }
        Ok(Err(e)) => classify(&e),
        Err(_) => {
            set_error("internal panic");
            FpStatus::FpErrInternal
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    #[test]
    fn catalog_check_roundtrip_through_the_abi() {
        unsafe {
            let name = c("free_poisson");
            let params = c("lambda=1, alpha=1");
            let m = fp_measure_catalog(name.as_ptr(), params.as_ptr());
            assert!(!m.is_null());

            let grid = FpGrid {
                r_min: 1e-2,
                r_max: 1e2,
                per_decade: 10,
                angles: 24,
            };
            let rep = fp_check_fsd(m, &grid);
            assert!(!rep.is_null());
            assert_eq!(fp_report_verdict(rep), 1);
            let (mut lr, mut li, mut vr, mut vi) = (0.0, 0.0, 0.0, 0.0);
            assert_eq!(
                fp_report_witness(rep, &mut lr, &mut li, &mut vr, &mut vi),
                FpStatus::FpOk
            );
            assert!(vi > 10.0, "witness Im C' = {vi}");
            let json = fp_report_json(rep);
            assert!(!json.is_null());
            let text = CStr::from_ptr(json).to_str().unwrap();
            assert!(text.contains("\"verdict\":\"fail\""));
            fp_string_free(json);
            fp_report_free(rep);

            let rep = fp_check_fid(m, &grid);
            assert_eq!(fp_report_verdict(rep), 0);
            fp_report_free(rep);

            let rep = fp_check_fsd_cumulant(m, 2);
            assert_eq!(fp_report_verdict(rep), 1);
            fp_report_free(rep);

            let rep = fp_check_levy_monotone(m);
            assert_eq!(fp_report_verdict(rep), 1, "atomic Levy measure");
            fp_report_free(rep);

            fp_measure_free(m);
        }
    }

    #[test]
    fn transform_eval_and_errors() {
        unsafe {
            let name = c("semicircle");
            let params = c("a=0, r=2");
            let m = fp_measure_catalog(name.as_ptr(), params.as_ptr());
            let (mut re, mut im, mut err) = (0.0, 0.0, 0.0);
            let st = fp_transform_eval(
                m,
                FpTransformOp::FpOpCumulantDerivative,
                0.0,
                -1.0,
                &mut re,
                &mut im,
                &mut err,
            );
            assert_eq!(st, FpStatus::FpOk);
            assert!((re).abs() < 1e-12 && (im + 2.0).abs() < 1e-12);

            // wrong half plane is an argument error
            let st = fp_transform_eval(
                m,
                FpTransformOp::FpOpCumulant,
                0.0,
                1.0,
                &mut re,
                &mut im,
                &mut err,
            );
            assert_eq!(st, FpStatus::FpErrArgument);
            let mut buf = [0 as c_char; 128];
            let n = fp_last_error(buf.as_mut_ptr(), buf.len());
            assert!(n > 0);
            fp_measure_free(m);

            // unknown catalog name returns null and sets the error
            let bad = c("not_a_distribution");
            let m = fp_measure_catalog(bad.as_ptr(), std::ptr::null());
            assert!(m.is_null());
        }
    }

    #[test]
    fn measure_json_roundtrip_through_abi() {
        unsafe {
            let name = c("semicircle");
            let m = fp_measure_catalog(name.as_ptr(), std::ptr::null());
            let json = fp_measure_to_json(m);
            assert!(!json.is_null());
            let back = fp_measure_from_json(json);
            assert!(!back.is_null());
            fp_string_free(json);
            fp_measure_free(back);
            fp_measure_free(m);
        }
    }

    #[test]
    fn awk_density_through_abi() {
        unsafe {
            let mut v = 0.0;
            assert_eq!(fp_awk_density(0.0, 0.0, &mut v), FpStatus::FpOk);
            assert!((v - 0.3989422804014327).abs() < 1e-12);
            assert_eq!(fp_awk_density(-2.0, 0.0, &mut v), FpStatus::FpErrArgument);
        }
    }
}
