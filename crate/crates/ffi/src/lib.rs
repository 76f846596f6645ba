//! C interface to `anosov-core`.
//!
//! Inputs are NUL-terminated UTF-8 JSON strings in the same formats the
//! command line reads. Every fallible call returns an [`AnosovStatus`];
//! on failure [`anosov_last_error`] describes the problem. Strings handed
//! out by the library are released with [`anosov_string_free`], handles
//! with their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use anosov_core::automorphism::{AutomorphismInput, GradedAutomorphism};
use anosov_core::graded_ring::GradedRing;
use anosov_core::intersection_form::{self, UnimodularForm};
use anosov_core::lefschetz::{self, Convention};
use anosov_core::toral_oracle::{self, ToralMap};
use anosov_core::verdict::{self, Conclusion, ManifoldSpec, ObstructionReport};
use anosov_core::{Error, IntMatrix};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnosovStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed JSON or input outside the supported hypotheses.
    InvalidInput = 3,
    /// An internal cross-check disagreed.
    CheckFailed = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnosovConclusion {
    NoAnosov = 0,
    NoTransitiveAnosov = 1,
    ParityConstraint = 2,
    Inconclusive = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnosovConvention {
    /// `Σ (-1)^d Tr(M_d^{-l})`, the default.
    Inverse = 0,
    /// `Σ (-1)^d Tr(M_d^l)`.
    Forward = 1,
}

/// Cohomology ring with its graded bases.
pub struct AnosovRing(GradedRing);

/// Ring automorphism as per-degree matrices.
pub struct AnosovAutomorphism(GradedAutomorphism);

/// Result of running the obstruction rules on a manifold.
pub struct AnosovReport(ObstructionReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

type Failure = (AnosovStatus, String);

fn core_failure(e: Error) -> Failure {
    let status = if e.is_check_failure() { AnosovStatus::CheckFailed } else { AnosovStatus::InvalidInput };
    (status, e.to_string())
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    (AnosovStatus::InvalidInput, e.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> AnosovStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            AnosovStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            AnosovStatus::Panic
        }
    }
}

/// # Safety
/// `s` is null or a valid NUL-terminated string.
unsafe fn input<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err((AnosovStatus::NullPointer, "null input string".into()));
    }
    CStr::from_ptr(s).to_str().map_err(|e| (AnosovStatus::InvalidUtf8, e.to_string()))
}

fn check_out<T>(out: *mut T) -> Result<(), Failure> {
    if out.is_null() {
        Err((AnosovStatus::NullPointer, "null output pointer".into()))
    } else {
        Ok(())
    }
}

/// # Safety
/// `out` is a valid, non-null pointer.
unsafe fn emit(out: *mut *mut c_char, text: String) -> Result<(), Failure> {
    let c = CString::new(text).map_err(invalid)?;
    *out = c.into_raw();
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string(v).map_err(invalid)
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn anosov_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` is null or was returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn anosov_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a ring description, a sphere product `{"factors": ...}` or a
/// manifold spec with a `"kind"`.
///
/// # Safety
/// `json` is a NUL-terminated string; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn anosov_ring_from_json(json: *const c_char, out: *mut *mut AnosovRing) -> AnosovStatus {
    guard(|| {
        check_out(out)?;
        let text = input(json)?;
        let ring = anosov_core::cli::ring_from_json(text).map_err(|f| (AnosovStatus::InvalidInput, f.message))?;
        *out = Box::into_raw(Box::new(AnosovRing(ring)));
        Ok(())
    })
}

/// # Safety
/// `ring` is null or a handle from [`anosov_ring_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn anosov_ring_free(ring: *mut AnosovRing) {
    if !ring.is_null() {
        drop(Box::from_raw(ring));
    }
}

/// Top degree, or 0 for a null handle.
///
/// # Safety
/// `ring` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn anosov_ring_top_degree(ring: *const AnosovRing) -> u32 {
    ring.as_ref().map_or(0, |r| r.0.top_degree())
}

/// # Safety
/// `ring` is a live handle; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn anosov_ring_betti(ring: *const AnosovRing, degree: u32, out: *mut usize) -> AnosovStatus {
    guard(|| {
        check_out(out)?;
        let r = ring.as_ref().ok_or((AnosovStatus::NullPointer, "null ring".into()))?;
        *out = if degree <= r.0.top_degree() { r.0.betti(degree) } else { 0 };
        Ok(())
    })
}

/// Builds an automorphism from `{"images": ...}` or `{"degree_matrices": ...}`
/// and checks that it preserves cup products.
///
/// # Safety
/// `ring` is a live handle, `json` a NUL-terminated string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn anosov_automorphism_from_json(
    ring: *const AnosovRing,
    json: *const c_char,
    out: *mut *mut AnosovAutomorphism,
) -> AnosovStatus {
    guard(|| {
        check_out(out)?;
        let r = ring.as_ref().ok_or((AnosovStatus::NullPointer, "null ring".into()))?;
        let desc: AutomorphismInput = serde_json::from_str(input(json)?).map_err(invalid)?;
        let aut = desc.resolve(&r.0).map_err(|e| core_failure(e.into()))?;
        *out = Box::into_raw(Box::new(AnosovAutomorphism(aut)));
        Ok(())
    })
}

/// # Safety
/// `aut` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn anosov_automorphism_free(aut: *mut AnosovAutomorphism) {
    if !aut.is_null() {
        drop(Box::from_raw(aut));
    }
}

/// Lefschetz numbers `Λ(f^l)`, `l = 1..len`, as JSON.
///
/// # Safety
/// `aut` is a live handle; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn anosov_lefschetz_json(
    aut: *const AnosovAutomorphism,
    len: u64,
    convention: AnosovConvention,
    out: *mut *mut c_char,
) -> AnosovStatus {
    guard(|| {
        check_out(out)?;
        let a = aut.as_ref().ok_or((AnosovStatus::NullPointer, "null automorphism".into()))?;
        let conv = match convention {
            AnosovConvention::Inverse => Convention::Inverse,
            AnosovConvention::Forward => Convention::Forward,
        };
        let seq = lefschetz::lefschetz_sequence(&a.0, len, conv).map_err(|e| core_failure(e.into()))?;
        emit(out, to_json(&seq)?)
    })
}

/// Growth classification of `|Λ(f^l)|` against the periodic-orbit laws.
///
/// # Safety
/// `aut` is a live handle; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn anosov_compatibility_json(aut: *const AnosovAutomorphism, out: *mut *mut c_char) -> AnosovStatus {
    guard(|| {
        check_out(out)?;
        let a = aut.as_ref().ok_or((AnosovStatus::NullPointer, "null automorphism".into()))?;
        let report = lefschetz::anosov_compatibility(&a.0).map_err(|e| core_failure(e.into()))?;
        emit(out, to_json(&report)?)
    })
}

/// Runs every obstruction rule on a manifold spec.
///
/// # Safety
/// `spec` is a NUL-terminated string; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn anosov_analyze(spec: *const c_char, out: *mut *mut AnosovReport) -> AnosovStatus {
    guard(|| {
        check_out(out)?;
        let spec = ManifoldSpec::from_json(input(spec)?).map_err(core_failure)?;
        let report = verdict::apply_rules(&spec).map_err(core_failure)?;
        *out = Box::into_raw(Box::new(AnosovReport(report)));
        Ok(())
    })
}

/// # Safety
/// `report` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn anosov_report_free(report: *mut AnosovReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Strongest conclusion in the report; `Inconclusive` for a null handle.
///
/// # Safety
/// `report` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn anosov_report_strongest(report: *const AnosovReport) -> AnosovConclusion {
    match report.as_ref().map(|r| r.0.strongest()) {
        Some(Conclusion::NoAnosov) => AnosovConclusion::NoAnosov,
        Some(Conclusion::NoTransitiveAnosov) => AnosovConclusion::NoTransitiveAnosov,
        Some(Conclusion::ParityConstraint) => AnosovConclusion::ParityConstraint,
        Some(Conclusion::Inconclusive) | None => AnosovConclusion::Inconclusive,
    }
}

/// Whether some verdict rests on a bounded search only.
///
/// # Safety
/// `report` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn anosov_report_bounded_only(report: *const AnosovReport) -> bool {
    report.as_ref().is_some_and(|r| r.0.bounded_only)
}

/// # Safety
/// `report` is a live handle; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn anosov_report_json(report: *const AnosovReport, out: *mut *mut c_char) -> AnosovStatus {
    guard(|| {
        check_out(out)?;
        let r = report.as_ref().ok_or((AnosovStatus::NullPointer, "null report".into()))?;
        emit(out, to_json(&r.0)?)
    })
}

/// The four rank-2 forms and their special isometry groups, as text.
///
/// # Safety
/// `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn anosov_form_tables(out: *mut *mut c_char) -> AnosovStatus {
    guard(|| {
        check_out(out)?;
        let text = intersection_form::render_rank2_tables().map_err(|e| core_failure(e.into()))?;
        emit(out, text)
    })
}

/// Isometry analysis of a unimodular form given as a JSON matrix.
///
/// # Safety
/// `matrix` is a NUL-terminated string; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn anosov_form_analyze_json(
    matrix: *const c_char,
    chi_nonzero: bool,
    bound: i64,
    out: *mut *mut c_char,
) -> AnosovStatus {
    guard(|| {
        check_out(out)?;
        let q: IntMatrix = serde_json::from_str(input(matrix)?).map_err(invalid)?;
        let form = UnimodularForm::new(q).map_err(|e| core_failure(e.into()))?;
        let report = intersection_form::theorem110_check(&form, chi_nonzero, bound).map_err(|e| core_failure(e.into()))?;
        emit(out, to_json(&report)?)
    })
}

/// Fixed-point counts of a hyperbolic toral automorphism by three routes.
///
/// # Safety
/// `matrix` is a NUL-terminated string; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn anosov_oracle_cross_check_json(matrix: *const c_char, len: u64, out: *mut *mut c_char) -> AnosovStatus {
    guard(|| {
        check_out(out)?;
        let a: IntMatrix = serde_json::from_str(input(matrix)?).map_err(invalid)?;
        let map = ToralMap::hyperbolic(a).map_err(|e| core_failure(e.into()))?;
        let report = toral_oracle::lefschetz_cross_check(&map, len).map_err(|e| core_failure(e.into()))?;
        emit(out, to_json(&report)?)
    })
}
