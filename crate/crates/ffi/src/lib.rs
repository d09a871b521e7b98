//! C ABI for the pch toolkit.
//!
//! Circuits and certificates cross the boundary as opaque handles owned by
//! the caller and released with the matching `*_free` function. Every
//! fallible call returns a [`PchError`]; on failure a description is
//! available from [`pch_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::ptr;
use std::slice;
use std::time::Duration;

use pch::aiger::{self, Aig};
use pch::certificate::{read_certificate, write_certificate, Certificate};
use pch::checker::{validate, CheckOptions, Outcome, Strategy};
use pch::encoder::encode;
use pch::ic3::{prove, Ic3Error, Ic3Options, ProveOutcome};
use pch::miter::build_equivalence_miter;

/// Parsed circuit.
pub struct PchCircuit(Aig);

/// Parsed or generated certificate.
pub struct PchCertificate(Certificate);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PchError {
    Ok = 0,
    NullPointer = 1,
    Parse = 2,
    Encode = 3,
    Miter = 4,
    ResourceLimit = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PchProveResult {
    Proved = 0,
    Counterexample = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PchVerdict {
    Valid = 0,
    Invalid = 1,
    Rejected = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PchStrategy {
    Split = 0,
    Tseitin = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(code: PchError, msg: impl ToString) -> PchError {
    let msg = CString::new(msg.to_string().replace('\0', " ")).unwrap();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
    code
}

fn into_c_string(s: impl Into<Vec<u8>>) -> *mut c_char {
    let mut bytes = s.into();
    bytes.retain(|&b| b != 0);
    CString::new(bytes).unwrap().into_raw()
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pch_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pch_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn bytes<'a>(data: *const u8, len: usize) -> Option<&'a [u8]> {
    if data.is_null() {
        (len == 0).then_some(&[])
    } else {
        Some(slice::from_raw_parts(data, len))
    }
}

/// Parses an ASCII or binary AIGER file image.
///
/// # Safety
/// `data` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pch_circuit_parse(data: *const u8, len: usize, out: *mut *mut PchCircuit) -> PchError {
    let Some(input) = bytes(data, len) else {
        return fail(PchError::NullPointer, "data is NULL");
    };
    if out.is_null() {
        return fail(PchError::NullPointer, "out is NULL");
    }
    match aiger::parse(input) {
        Ok(aig) => {
            *out = Box::into_raw(Box::new(PchCircuit(aig)));
            PchError::Ok
        }
        Err(e) => fail(PchError::Parse, e),
    }
}

/// # Safety
/// `circuit` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn pch_circuit_free(circuit: *mut PchCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// Number of latches, or 0 for NULL.
///
/// # Safety
/// `circuit` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pch_circuit_num_latches(circuit: *const PchCircuit) -> usize {
    circuit.as_ref().map_or(0, |c| c.0.latches.len())
}

/// ASCII AIGER text of the circuit; free with [`pch_string_free`].
///
/// # Safety
/// `circuit` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pch_circuit_write_ascii(circuit: *const PchCircuit, out: *mut *mut c_char) -> PchError {
    let (Some(c), false) = (circuit.as_ref(), out.is_null()) else {
        return fail(PchError::NullPointer, "circuit or out is NULL");
    };
    *out = into_c_string(aiger::serialize_ascii(&c.0));
    PchError::Ok
}

/// Equivalence miter of two circuits.
///
/// # Safety
/// `spec` and `implementation` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pch_miter(
    spec: *const PchCircuit,
    implementation: *const PchCircuit,
    out: *mut *mut PchCircuit,
) -> PchError {
    let (Some(s), Some(i), false) = (spec.as_ref(), implementation.as_ref(), out.is_null()) else {
        return fail(PchError::NullPointer, "spec, implementation or out is NULL");
    };
    match build_equivalence_miter(&s.0, &i.0) {
        Ok(m) => {
            *out = Box::into_raw(Box::new(PchCircuit(m)));
            PchError::Ok
        }
        Err(e) => fail(PchError::Miter, e),
    }
}

/// Runs IC3 on the selected safety bit. On `PCH_PROVE_RESULT_PROVED` a
/// certificate bound to the circuit's digest is stored in `out_cert`; on
/// `PCH_PROVE_RESULT_COUNTEREXAMPLE` the AIGER witness text is stored in
/// `out_witness` when that pointer is non-NULL. A `time_limit_ms` of 0
/// means no limit.
///
/// # Safety
/// `circuit` must be a live handle; `out_result` and `out_cert` must be
/// writable; `out_witness` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn pch_prove(
    circuit: *const PchCircuit,
    safety_index: usize,
    time_limit_ms: u64,
    out_result: *mut PchProveResult,
    out_cert: *mut *mut PchCertificate,
    out_witness: *mut *mut c_char,
) -> PchError {
    let (Some(c), false, false) = (circuit.as_ref(), out_result.is_null(), out_cert.is_null()) else {
        return fail(PchError::NullPointer, "circuit, out_result or out_cert is NULL");
    };
    let ts = match encode(&c.0, safety_index) {
        Ok(ts) => ts,
        Err(e) => return fail(PchError::Encode, e),
    };
    let opts = Ic3Options {
        time_limit: (time_limit_ms > 0).then(|| Duration::from_millis(time_limit_ms)),
        ..Default::default()
    };
    match prove(&ts, &opts) {
        Ok(ProveOutcome::Proved(cert)) => {
            *out_result = PchProveResult::Proved;
            *out_cert = Box::into_raw(Box::new(PchCertificate(cert.with_digest_of(&c.0))));
            PchError::Ok
        }
        Ok(ProveOutcome::Counterexample(mut cex)) => {
            cex.safety_index = safety_index;
            *out_result = PchProveResult::Counterexample;
            *out_cert = ptr::null_mut();
            if !out_witness.is_null() {
                *out_witness = into_c_string(cex.to_witness());
            }
            PchError::Ok
        }
        Err(Ic3Error::ResourceLimit) => fail(PchError::ResourceLimit, Ic3Error::ResourceLimit),
        Err(e) => fail(PchError::Internal, e),
    }
}

/// Parses a certificate file image.
///
/// # Safety
/// `data` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pch_certificate_parse(data: *const u8, len: usize, out: *mut *mut PchCertificate) -> PchError {
    let Some(input) = bytes(data, len) else {
        return fail(PchError::NullPointer, "data is NULL");
    };
    if out.is_null() {
        return fail(PchError::NullPointer, "out is NULL");
    }
    match read_certificate(input) {
        Ok(c) => {
            *out = Box::into_raw(Box::new(PchCertificate(c)));
            PchError::Ok
        }
        Err(e) => fail(PchError::Parse, e),
    }
}

/// Certificate file text; free with [`pch_string_free`].
///
/// # Safety
/// `cert` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pch_certificate_write(cert: *const PchCertificate, out: *mut *mut c_char) -> PchError {
    let (Some(c), false) = (cert.as_ref(), out.is_null()) else {
        return fail(PchError::NullPointer, "cert or out is NULL");
    };
    *out = into_c_string(write_certificate(&c.0));
    PchError::Ok
}

/// Number of clauses, or 0 for NULL.
///
/// # Safety
/// `cert` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pch_certificate_num_clauses(cert: *const PchCertificate) -> usize {
    cert.as_ref().map_or(0, |c| c.0.len())
}

/// # Safety
/// `cert` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn pch_certificate_free(cert: *mut PchCertificate) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}

/// Runs the three validation queries. `check_digest` nonzero rejects
/// certificates stamped for a different circuit. `out_query_us` may be NULL;
/// otherwise it receives the summed query time in microseconds.
///
/// # Safety
/// `circuit` and `cert` must be live handles; `out_verdict` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn pch_validate(
    circuit: *const PchCircuit,
    cert: *const PchCertificate,
    safety_index: usize,
    strategy: PchStrategy,
    check_digest: i32,
    out_verdict: *mut PchVerdict,
    out_query_us: *mut u64,
) -> PchError {
    let (Some(c), Some(f), false) = (circuit.as_ref(), cert.as_ref(), out_verdict.is_null()) else {
        return fail(PchError::NullPointer, "circuit, cert or out_verdict is NULL");
    };
    let opts = CheckOptions {
        strategy: match strategy {
            PchStrategy::Split => Strategy::Split,
            PchStrategy::Tseitin => Strategy::Tseitin,
        },
        check_digest: check_digest != 0,
        parallel: false,
    };
    let verdict = validate(&c.0, safety_index, &f.0, &opts);
    *out_verdict = match verdict.outcome {
        Outcome::Valid => PchVerdict::Valid,
        Outcome::Invalid { .. } => PchVerdict::Invalid,
        Outcome::Rejected(_) => PchVerdict::Rejected,
    };
    if !out_query_us.is_null() {
        *out_query_us = verdict.query_time().as_micros() as u64;
    }
    PchError::Ok
}
