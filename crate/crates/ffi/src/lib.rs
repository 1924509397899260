//! C ABI over `scp-core`.
//!
//! Conventions shared by every function:
//!
//! * Fallible calls return an [`ScpStatus`]; `SCP_STATUS_OK` is zero. Results
//!   are written through out-pointers only on success.
//! * On failure a human-readable message is stored per thread and can be read
//!   with [`scp_last_error_message`] until the next failing call on that thread.
//! * Strings handed out by this library are NUL-terminated UTF-8 and must be
//!   released with [`scp_string_free`]. Handles are released with their own
//!   `*_free` function. Passing NULL to any `*_free` function is a no-op.
//! * Panics never cross the boundary; they surface as `SCP_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use scp_core::oracle::OracleError;
use scp_core::quantum::render_expression;
use scp_core::sampler::SampleError;
use scp_core::{
    build_matrix, describe_set, enumerate_completions, enumerate_variants, lift, parse_scp,
    prepare, sample_rounds, sample_until, set_expression, Assignment, MatrixError, ScpInstance,
    SetId, TernaryMatrix,
};
use serde_json::json;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScpStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// An input string was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The DSL source failed to parse.
    Parse = 3,
    /// The instance failed validation.
    InvalidInstance = 4,
    /// Two constraints disagree on a cell.
    Contradiction = 5,
    /// Enumeration would exceed the requested cap.
    CapExceeded = 6,
    /// A set name is not part of the instance.
    UnknownSet = 7,
    /// A target assignment is malformed, has the wrong shape, or is unreachable.
    InvalidTarget = 8,
    /// A row or column index is out of range.
    OutOfRange = 9,
    /// An internal panic was caught.
    Panic = 10,
}

/// Opaque parsed instance.
pub struct ScpInstanceHandle(ScpInstance);

/// Opaque ternary matrix built from an instance.
pub struct ScpMatrixHandle(TernaryMatrix);

struct Failure(ScpStatus, String);

impl From<MatrixError> for Failure {
    fn from(e: MatrixError) -> Self {
        let status = match e {
            MatrixError::Invalid(_) => ScpStatus::InvalidInstance,
            MatrixError::Contradiction { .. } => ScpStatus::Contradiction,
            MatrixError::UnknownSet(_) => ScpStatus::UnknownSet,
            MatrixError::CapExceeded { .. } => ScpStatus::CapExceeded,
        };
        Failure(status, e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        let status = match e {
            OracleError::CapExceeded { .. } => ScpStatus::CapExceeded,
            _ => ScpStatus::InvalidInstance,
        };
        Failure(status, e.to_string())
    }
}

impl From<SampleError> for Failure {
    fn from(e: SampleError) -> Self {
        Failure(ScpStatus::InvalidTarget, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NULs were replaced");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ScpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ScpStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {msg}"));
            ScpStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(ScpStatus::NullPointer, format!("{what} is NULL")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure(ScpStatus::NullPointer, format!("{what} is NULL")))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(ScpStatus::NullPointer, format!("{what} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(ScpStatus::InvalidUtf8, format!("{what}: {e}")))
}

fn emit(out: &mut *mut c_char, text: String) -> Result<(), Failure> {
    let c = CString::new(text)
        .map_err(|_| Failure(ScpStatus::Panic, "output contained a NUL byte".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn emit_json(out: &mut *mut c_char, value: &serde_json::Value) -> Result<(), Failure> {
    emit(out, value.to_string())
}

/// Message for the most recent failure on this thread, or NULL if none.
///
/// The pointer stays valid until the next failing call on the same thread.
/// Do not free it.
#[no_mangle]
pub extern "C" fn scp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn scp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a pointer obtained from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn scp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses DSL source into a new instance handle.
///
/// # Safety
/// `source` must be NULL or a valid NUL-terminated string; `out` must be NULL
/// or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scp_instance_parse(
    source: *const c_char,
    out: *mut *mut ScpInstanceHandle,
) -> ScpStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let text = read_str(source, "source")?;
        let inst = parse_scp(text).map_err(|e| Failure(ScpStatus::Parse, e.to_string()))?;
        *out = Box::into_raw(Box::new(ScpInstanceHandle(inst)));
        Ok(())
    })
}

/// # Safety
/// `instance` must be NULL or a handle from [`scp_instance_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn scp_instance_free(instance: *mut ScpInstanceHandle) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Renders the instance back to canonical DSL text.
///
/// # Safety
/// `instance` must be a live instance handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scp_instance_to_dsl(
    instance: *const ScpInstanceHandle,
    out: *mut *mut c_char,
) -> ScpStatus {
    guard(|| {
        let inst = borrow(instance, "instance")?;
        let out = out_ptr(out, "out")?;
        emit(out, inst.0.to_dsl())
    })
}

/// Applies every constraint of `instance` and returns a new matrix handle.
///
/// # Safety
/// `instance` must be a live instance handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scp_matrix_build(
    instance: *const ScpInstanceHandle,
    out: *mut *mut ScpMatrixHandle,
) -> ScpStatus {
    guard(|| {
        let inst = borrow(instance, "instance")?;
        let out = out_ptr(out, "out")?;
        let m = build_matrix(&inst.0)?;
        *out = Box::into_raw(Box::new(ScpMatrixHandle(m)));
        Ok(())
    })
}

/// # Safety
/// `matrix` must be NULL or a handle from [`scp_matrix_build`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn scp_matrix_free(matrix: *mut ScpMatrixHandle) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// Writes the number of elements (rows) and sets (columns).
///
/// # Safety
/// `matrix` must be a live handle; `rows` and `cols` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scp_matrix_dims(
    matrix: *const ScpMatrixHandle,
    rows: *mut usize,
    cols: *mut usize,
) -> ScpStatus {
    guard(|| {
        let m = borrow(matrix, "matrix")?;
        let rows = out_ptr(rows, "rows")?;
        let cols = out_ptr(cols, "cols")?;
        *rows = m.0.rows();
        *cols = m.0.cols();
        Ok(())
    })
}

/// Writes the cell value: 1 for member, -1 for non-member, 0 for uncertain.
///
/// # Safety
/// `matrix` must be a live handle; `value` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scp_matrix_get(
    matrix: *const ScpMatrixHandle,
    row: usize,
    col: usize,
    value: *mut i8,
) -> ScpStatus {
    guard(|| {
        let m = borrow(matrix, "matrix")?;
        let value = out_ptr(value, "value")?;
        if row >= m.0.rows() || col >= m.0.cols() {
            return Err(Failure(
                ScpStatus::OutOfRange,
                format!("cell ({row}, {col}) outside {}x{}", m.0.rows(), m.0.cols()),
            ));
        }
        *value = m.0.get(row, col).code();
        Ok(())
    })
}

/// Writes the number of uncertain cells.
///
/// # Safety
/// `matrix` must be a live handle; `count` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scp_matrix_uncertain_count(
    matrix: *const ScpMatrixHandle,
    count: *mut usize,
) -> ScpStatus {
    guard(|| {
        let m = borrow(matrix, "matrix")?;
        *out_ptr(count, "count")? = m.0.uncertain_positions().len();
        Ok(())
    })
}

/// `{"elements": [...], "sets": [...], "entries": [[1, -1, 0], ...]}`.
///
/// # Safety
/// `matrix` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scp_matrix_to_json(
    matrix: *const ScpMatrixHandle,
    out: *mut *mut c_char,
) -> ScpStatus {
    guard(|| {
        let m = borrow(matrix, "matrix")?;
        emit_json(out_ptr(out, "out")?, &m.0.to_json())
    })
}

/// Lifted matrix as JSON, with `"in"`, `"out"` or `"superposed"` per cell.
///
/// # Safety
/// `matrix` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scp_quantum_to_json(
    matrix: *const ScpMatrixHandle,
    out: *mut *mut c_char,
) -> ScpStatus {
    guard(|| {
        let m = borrow(matrix, "matrix")?;
        emit_json(out_ptr(out, "out")?, &lift(&m.0).to_json())
    })
}

/// One set as a sum of kets, e.g. `X = |0>.(a+d) + |1>.(b+c+f) + ...`.
///
/// # Safety
/// `matrix` must be a live handle; `set` a NUL-terminated string; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scp_set_expression(
    matrix: *const ScpMatrixHandle,
    set: *const c_char,
    out: *mut *mut c_char,
) -> ScpStatus {
    guard(|| {
        let m = borrow(matrix, "matrix")?;
        let set = SetId::new(read_str(set, "set")?);
        let out = out_ptr(out, "out")?;
        let expr = set_expression(&lift(&m.0), &set)?;
        emit(out, render_expression(&expr))
    })
}

/// `{"set", "uncertain", "variants": [{"name", "index", "members"}]}` for one set.
///
/// # Safety
/// `matrix` must be a live handle; `set` a NUL-terminated string; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scp_variants_json(
    matrix: *const ScpMatrixHandle,
    set: *const c_char,
    cap: u32,
    out: *mut *mut c_char,
) -> ScpStatus {
    guard(|| {
        let m = borrow(matrix, "matrix")?;
        let set = SetId::new(read_str(set, "set")?);
        let out = out_ptr(out, "out")?;
        let d = describe_set(&m.0, &set)?;
        let variants = enumerate_variants(&m.0, &set, cap)?;
        emit_json(
            out,
            &json!({
                "set": set,
                "uncertain": d.uncertain,
                "variants": variants
                    .iter()
                    .map(|v| json!({"name": v.name(), "index": v.index, "members": v.members}))
                    .collect::<Vec<_>>(),
            }),
        )
    })
}

/// Every consistent completion: `{"elements", "sets", "uncertain_cells", "completions"}`.
///
/// Each completion is an array of bit rows, 0 for member and 1 for non-member.
///
/// # Safety
/// `matrix` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scp_completions_json(
    matrix: *const ScpMatrixHandle,
    cap: u32,
    out: *mut *mut c_char,
) -> ScpStatus {
    guard(|| {
        let m = borrow(matrix, "matrix")?;
        let out = out_ptr(out, "out")?;
        let completions = enumerate_completions(&m.0, cap)?;
        emit_json(
            out,
            &json!({
                "elements": m.0.elements(),
                "sets": m.0.sets(),
                "uncertain_cells": m.0.uncertain_cells(),
                "completions": completions.completions(),
            }),
        )
    })
}

/// Runs exactly `rounds` measurement rounds and reports per-cell member frequencies.
///
/// # Safety
/// `matrix` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scp_sample_json(
    matrix: *const ScpMatrixHandle,
    seed: u64,
    rounds: u64,
    out: *mut *mut c_char,
) -> ScpStatus {
    guard(|| {
        let m = borrow(matrix, "matrix")?;
        let out = out_ptr(out, "out")?;
        let report = sample_rounds(&prepare(&lift(&m.0)), seed, rounds);
        emit_json(out, &report.to_json())
    })
}

/// Samples until the register measures `target_json` (an array of bit rows).
///
/// `max_rounds == 0` selects the default budget of `2^(u+4)` rounds, where `u`
/// is the number of uncertain cells.
///
/// # Safety
/// `matrix` must be a live handle; `target_json` a NUL-terminated string;
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scp_sample_until_json(
    matrix: *const ScpMatrixHandle,
    target_json: *const c_char,
    seed: u64,
    max_rounds: u64,
    out: *mut *mut c_char,
) -> ScpStatus {
    guard(|| {
        let m = borrow(matrix, "matrix")?;
        let text = read_str(target_json, "target_json")?;
        let out = out_ptr(out, "out")?;
        let target = Assignment::from_json(text)
            .map_err(|e| Failure(ScpStatus::InvalidTarget, format!("target: {e}")))?;
        let register = prepare(&lift(&m.0));
        let budget = if max_rounds == 0 {
            register.default_max_rounds()
        } else {
            max_rounds
        };
        let report = sample_until(&register, &target, seed, budget)?;
        emit_json(out, &report.to_json())
    })
}
