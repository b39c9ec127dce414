//! C ABI for the multiplicative-partial-isometry toolkit.
//!
//! Conventions:
//!
//! * Handles (`MpisoCandidate`, `MpisoClassification`) are opaque; create
//!   them through the constructors here and release them with the matching
//!   `*_free` function exactly once.
//! * Every fallible function returns an [`MpisoStatus`]; `MPISO_STATUS_OK`
//!   (0) means success.  On failure, [`mpiso_last_error_message`] returns a
//!   human-readable detail string for the calling thread.
//! * Complex matrices cross the boundary as interleaved row-major doubles:
//!   `2·rows·cols` values `re₀₀, im₀₀, re₀₁, im₀₁, …`.
//! * Strings returned as `char*` are owned by the caller and must be
//!   released with [`mpiso_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;

use mpiso::builder::{generate, ExampleSpec};
use mpiso::classify::{classify, ClassificationReport};
use mpiso::error::Error;
use mpiso::fileio::canonical_json;
use mpiso::matrix::Matrix;
use mpiso::mpi::MpiCandidate;
use mpiso::report::classification_value;
use mpiso::tol::Tolerance;

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpisoStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Matrix dimensions are inconsistent or unsupported.
    Dimension = 3,
    /// A tolerance was outside `(0, 1)`.
    Tolerance = 4,
    /// A matrix expected to be positive semidefinite is not.
    NotPsd = 5,
    /// An iterative numerical routine failed to converge.
    Numeric = 6,
    /// A span is not closed under the algebra operations.
    NotAlgebra = 7,
    /// A leg has no two-sided unit where one is required.
    NotUnital = 8,
    /// Antipode requested outside the star-closed scope.
    NoAntipode = 9,
    /// An operator does not belong to the expected leg.
    NotLegElement = 10,
    /// An algebra presentation fails its construction hypotheses.
    Presentation = 11,
    /// A representation is not a faithful unital *-homomorphism.
    Representation = 12,
    /// Quasibasis construction failed (functional not faithful/positive).
    Quasibasis = 13,
    /// A map is not a valid action of the algebra.
    Action = 14,
    /// Supports or projected subspaces do not match.
    Support = 15,
    /// A structural prerequisite (e.g. a classification level) is not met.
    Prerequisite = 16,
    /// Malformed input document or parameter.
    Format = 17,
    /// Filesystem error.
    Io = 18,
    /// JSON error.
    Json = 19,
    /// An internal invariant failed.
    Internal = 20,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let sanitized: Vec<u8> = msg.bytes().filter(|&b| b != 0).collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(e: &Error) -> MpisoStatus {
    match e {
        Error::Dim(_) => MpisoStatus::Dimension,
        Error::Tolerance(_) => MpisoStatus::Tolerance,
        Error::NotPsd(_) => MpisoStatus::NotPsd,
        Error::Numeric(_) => MpisoStatus::Numeric,
        Error::NotAlgebra(_) => MpisoStatus::NotAlgebra,
        Error::NotUnital(_) => MpisoStatus::NotUnital,
        Error::NoAntipode(_) => MpisoStatus::NoAntipode,
        Error::NotLegElement(_) => MpisoStatus::NotLegElement,
        Error::Presentation(_) => MpisoStatus::Presentation,
        Error::Representation(_) => MpisoStatus::Representation,
        Error::Quasibasis(_) => MpisoStatus::Quasibasis,
        Error::Action(_) => MpisoStatus::Action,
        Error::Support(_) => MpisoStatus::Support,
        Error::Prerequisite(_) => MpisoStatus::Prerequisite,
        Error::Format(_) => MpisoStatus::Format,
        Error::Io(_) => MpisoStatus::Io,
        Error::Json(_) => MpisoStatus::Json,
    }
}

fn fail(e: &Error) -> MpisoStatus {
    set_last_error(&e.to_string());
    status_of(e)
}

/// Runs a closure, converting panics into `Internal` so unwinding never
/// crosses the C boundary.
fn guarded(f: impl FnOnce() -> MpisoStatus) -> MpisoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic");
            MpisoStatus::Internal
        }
    }
}

/// An operator on `H⊗H` under test, with its tolerance. Opaque.
pub struct MpisoCandidate {
    inner: MpiCandidate,
}

/// A finished classification. Opaque.
pub struct MpisoClassification {
    report: ClassificationReport,
}

/// Detail message for the most recent failure on this thread.
///
/// The pointer stays valid until the next failing call on the same thread.
/// Never free it.
///
/// # Safety
/// The returned pointer must not be written through or freed.
#[no_mangle]
pub unsafe extern "C" fn mpiso_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned by a function documented to
/// transfer string ownership, or null. Passing any other pointer, or the
/// same pointer twice, is undefined behavior.
#[no_mangle]
pub unsafe extern "C" fn mpiso_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn matrix_from_interleaved(data: &[f64], rows: usize, cols: usize) -> Matrix {
    let entries: Vec<Complex64> = data
        .chunks_exact(2)
        .map(|p| Complex64::new(p[0], p[1]))
        .collect();
    Matrix::from_vec(rows, cols, entries).expect("length checked by caller")
}

/// Creates a candidate from an operator on `H⊗H`.
///
/// `data` holds `2·side²·side²` interleaved doubles (the operator is
/// `side²×side²`, row-major), where `side` is the dimension of `H`.
/// `tol` is the relative tolerance for equality and rank decisions.
/// On success, `*out` owns the candidate; release with
/// [`mpiso_candidate_free`].
///
/// # Safety
/// `data` must point to at least `2·side⁴` readable doubles and `out` to a
/// writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn mpiso_candidate_new(
    data: *const f64,
    side: usize,
    tol: f64,
    out: *mut *mut MpisoCandidate,
) -> MpisoStatus {
    if data.is_null() || out.is_null() {
        set_last_error("null argument");
        return MpisoStatus::NullArgument;
    }
    if side == 0 || side > 256 {
        set_last_error("side must lie in 1..=256");
        return MpisoStatus::Dimension;
    }
    let n = side * side;
    let slice = std::slice::from_raw_parts(data, 2 * n * n);
    guarded(|| {
        let tolerance = match Tolerance::uniform(tol) {
            Ok(t) => t,
            Err(e) => return fail(&e),
        };
        let v = matrix_from_interleaved(slice, n, n);
        match MpiCandidate::new(v, tolerance) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(MpisoCandidate { inner }));
                MpisoStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Builds one of the reference examples.
///
/// `kind` is `"nonunital"` (ignore `n`), `"cyclic"` (cyclic group algebra
/// of order `n`), or `"pair-groupoid"` (full matrix algebra `M_n`).
///
/// # Safety
/// `kind` must be a NUL-terminated string and `out` a writable slot.
#[no_mangle]
pub unsafe extern "C" fn mpiso_generate(
    kind: *const c_char,
    n: usize,
    tol: f64,
    out: *mut *mut MpisoCandidate,
) -> MpisoStatus {
    if kind.is_null() || out.is_null() {
        set_last_error("null argument");
        return MpisoStatus::NullArgument;
    }
    let kind = match CStr::from_ptr(kind).to_str() {
        Ok(s) => s,
        Err(_) => {
            set_last_error("kind is not valid UTF-8");
            return MpisoStatus::InvalidUtf8;
        }
    };
    guarded(|| {
        let spec = match kind {
            "nonunital" => ExampleSpec::NonunitalCounterexample,
            "cyclic" => ExampleSpec::CyclicGroup(n),
            "pair-groupoid" => ExampleSpec::PairGroupoid(n),
            other => {
                return fail(&Error::Format(format!(
                    "unknown example kind \"{other}\""
                )))
            }
        };
        let tolerance = match Tolerance::uniform(tol) {
            Ok(t) => t,
            Err(e) => return fail(&e),
        };
        match generate(spec, &tolerance) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(MpisoCandidate { inner: g.candidate }));
                MpisoStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a candidate.
///
/// # Safety
/// `c` must come from a constructor of this library and not have been freed
/// before; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn mpiso_candidate_free(c: *mut MpisoCandidate) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Writes the dimension of `H` to `*side`.
///
/// # Safety
/// `c` must be a live candidate handle; `side` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mpiso_candidate_dim(
    c: *const MpisoCandidate,
    side: *mut usize,
) -> MpisoStatus {
    if c.is_null() || side.is_null() {
        set_last_error("null argument");
        return MpisoStatus::NullArgument;
    }
    *side = (*c).inner.dim_h();
    MpisoStatus::Ok
}

/// Copies the operator out as interleaved row-major doubles
/// (`2·side⁴` values; query `side` with [`mpiso_candidate_dim`]).
///
/// # Safety
/// `c` must be a live candidate handle; `data` must point to at least
/// `2·side⁴` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn mpiso_candidate_data(
    c: *const MpisoCandidate,
    data: *mut f64,
) -> MpisoStatus {
    if c.is_null() || data.is_null() {
        set_last_error("null argument");
        return MpisoStatus::NullArgument;
    }
    let v = (*c).inner.v();
    let n = v.rows() * v.cols();
    let out = std::slice::from_raw_parts_mut(data, 2 * n);
    for (k, z) in v.vectorize().into_iter().enumerate() {
        out[2 * k] = z.re;
        out[2 * k + 1] = z.im;
    }
    MpisoStatus::Ok
}

/// Checks the five defining equations.
///
/// Writes whether all equations pass to `*is_mpi` and the worst residual to
/// `*max_residual`.
///
/// # Safety
/// `c` must be a live candidate handle; `is_mpi` and `max_residual` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mpiso_check_mpi(
    c: *const MpisoCandidate,
    is_mpi: *mut bool,
    max_residual: *mut f64,
) -> MpisoStatus {
    if c.is_null() || is_mpi.is_null() || max_residual.is_null() {
        set_last_error("null argument");
        return MpisoStatus::NullArgument;
    }
    guarded(|| match (*c).inner.check_mpi() {
        Ok(axioms) => {
            *is_mpi = axioms.is_mpi;
            *max_residual = axioms.max_residual();
            MpisoStatus::Ok
        }
        Err(e) => fail(&e),
    })
}

/// Runs the full classification.
///
/// On success, `*out` owns the classification; release it with
/// [`mpiso_classification_free`].
///
/// # Safety
/// `c` must be a live candidate handle and `out` a writable slot.
#[no_mangle]
pub unsafe extern "C" fn mpiso_classify(
    c: *const MpisoCandidate,
    out: *mut *mut MpisoClassification,
) -> MpisoStatus {
    if c.is_null() || out.is_null() {
        set_last_error("null argument");
        return MpisoStatus::NullArgument;
    }
    guarded(|| match classify(&(*c).inner) {
        Ok(report) => {
            *out = Box::into_raw(Box::new(MpisoClassification { report }));
            MpisoStatus::Ok
        }
        Err(e) => fail(&e),
    })
}

/// Releases a classification.
///
/// # Safety
/// `r` must come from [`mpiso_classify`] and not have been freed before;
/// null is ignored.
#[no_mangle]
pub unsafe extern "C" fn mpiso_classification_free(r: *mut MpisoClassification) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

fn owned_c_string(s: String) -> *mut c_char {
    let bytes: Vec<u8> = s.into_bytes().into_iter().filter(|&b| b != 0).collect();
    CString::new(bytes).unwrap_or_default().into_raw()
}

/// Returns the verdict string (e.g. `"C*-Hopf (multiplicative unitary)"`).
///
/// The caller owns the returned string; release it with
/// [`mpiso_string_free`].
///
/// # Safety
/// `r` must be a live classification handle.
#[no_mangle]
pub unsafe extern "C" fn mpiso_classification_verdict(
    r: *const MpisoClassification,
) -> *mut c_char {
    if r.is_null() {
        return std::ptr::null_mut();
    }
    owned_c_string((*r).report.verdict.to_string())
}

/// Returns the full classification as canonical JSON.
///
/// The caller owns the returned string; release it with
/// [`mpiso_string_free`].
///
/// # Safety
/// `r` must be a live classification handle.
#[no_mangle]
pub unsafe extern "C" fn mpiso_classification_json(
    r: *const MpisoClassification,
) -> *mut c_char {
    if r.is_null() {
        return std::ptr::null_mut();
    }
    owned_c_string(canonical_json(&classification_value(&(*r).report)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn nonunital_interleaved() -> Vec<f64> {
        // e₁₁⊗e₁₂ + e₂₂⊗e₂₂ on C²⊗C², row-major 4×4.
        let mut m = vec![0.0f64; 2 * 16];
        let set = |m: &mut Vec<f64>, r: usize, c: usize| m[2 * (4 * r + c)] = 1.0;
        set(&mut m, 0, 1); // e₁₁⊗e₁₂
        set(&mut m, 3, 3); // e₂₂⊗e₂₂
        m
    }

    #[test]
    fn candidate_roundtrips_and_classifies() {
        unsafe {
            let data = nonunital_interleaved();
            let mut cand: *mut MpisoCandidate = ptr::null_mut();
            assert_eq!(
                mpiso_candidate_new(data.as_ptr(), 2, 1e-9, &mut cand),
                MpisoStatus::Ok
            );
            let mut side = 0usize;
            assert_eq!(mpiso_candidate_dim(cand, &mut side), MpisoStatus::Ok);
            assert_eq!(side, 2);

            let mut back = vec![0.0f64; 2 * 16];
            assert_eq!(mpiso_candidate_data(cand, back.as_mut_ptr()), MpisoStatus::Ok);
            assert_eq!(back, data);

            let mut is_mpi = false;
            let mut worst = f64::NAN;
            assert_eq!(mpiso_check_mpi(cand, &mut is_mpi, &mut worst), MpisoStatus::Ok);
            assert!(is_mpi);
            assert!(worst <= 1e-12);

            let mut class: *mut MpisoClassification = ptr::null_mut();
            assert_eq!(mpiso_classify(cand, &mut class), MpisoStatus::Ok);
            let verdict = mpiso_classification_verdict(class);
            assert_eq!(
                CStr::from_ptr(verdict).to_str().unwrap(),
                "MPI, non-unital"
            );
            mpiso_string_free(verdict);
            let json = mpiso_classification_json(class);
            let text = CStr::from_ptr(json).to_str().unwrap();
            assert!(text.contains("\"is_unital\":false"));
            mpiso_string_free(json);
            mpiso_classification_free(class);
            mpiso_candidate_free(cand);
        }
    }

    #[test]
    fn generation_and_error_paths() {
        unsafe {
            let mut cand: *mut MpisoCandidate = ptr::null_mut();
            let kind = CString::new("cyclic").unwrap();
            assert_eq!(
                mpiso_generate(kind.as_ptr(), 3, 1e-9, &mut cand),
                MpisoStatus::Ok
            );
            let mut side = 0usize;
            assert_eq!(mpiso_candidate_dim(cand, &mut side), MpisoStatus::Ok);
            assert_eq!(side, 3);
            mpiso_candidate_free(cand);

            let bad_kind = CString::new("mystery").unwrap();
            let mut out: *mut MpisoCandidate = ptr::null_mut();
            assert_eq!(
                mpiso_generate(bad_kind.as_ptr(), 2, 1e-9, &mut out),
                MpisoStatus::Format
            );
            let msg = CStr::from_ptr(mpiso_last_error_message());
            assert!(msg.to_str().unwrap().contains("mystery"));

            assert_eq!(
                mpiso_generate(kind.as_ptr(), 0, 1e-9, &mut out),
                MpisoStatus::Presentation
            );

            assert_eq!(
                mpiso_candidate_new(ptr::null(), 2, 1e-9, &mut out),
                MpisoStatus::NullArgument
            );
            let data = nonunital_interleaved();
            assert_eq!(
                mpiso_candidate_new(data.as_ptr(), 2, 2.0, &mut out),
                MpisoStatus::Tolerance
            );
        }
    }

    #[test]
    fn header_is_generated_with_the_public_surface() {
        let header = std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/include/mpiso.h"
        ))
        .expect("generated header");
        for symbol in [
            "mpiso_candidate_new",
            "mpiso_candidate_free",
            "mpiso_check_mpi",
            "mpiso_classify",
            "mpiso_classification_verdict",
            "mpiso_classification_json",
            "mpiso_generate",
            "mpiso_last_error_message",
            "mpiso_string_free",
            "MPISO_H",
        ] {
            assert!(header.contains(symbol), "header lacks {symbol}");
        }
    }
}
