//! C ABI for outrank-dp.
//!
//! Objects cross the boundary as opaque handles. Constructors write the new
//! handle through an out-pointer; release it with the matching `odp_*_free`.
//! Every fallible call returns an [`OdpStatus`]; on failure `odp_last_error`
//! describes the cause.
//! Strings returned by the library must be released with `odp_string_free`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::{c_char, size_t};
use outrank_dp::aggregation::aggregate_sam;
use outrank_dp::data_io::{read_evaluations, read_matrix, write_matrix};
use outrank_dp::evaluation::{mae, spearman_scores};
use outrank_dp::model::validate_problem;
use outrank_dp::pipeline::rank_matrix;
use outrank_dp::privacy::{anonymize_matrix, PrivacyParams};
use outrank_dp::{Config, Error, ErrorCategory, EvaluationSet, Mechanism, Method, PerformanceMatrix};

/// Parsed and validated problem configuration.
pub struct OdpConfig(Config);

/// Per-user evaluations grouped by alternative.
pub struct OdpEvaluations(EvaluationSet);

/// Alternatives x criteria performance matrix.
pub struct OdpMatrix(PerformanceMatrix);

/// Status codes. The first four match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdpStatus {
    Ok = 0,
    ConfigError = 2,
    DataError = 3,
    PrivacyError = 4,
    NullPointer = 10,
    InvalidUtf8 = 11,
    BufferTooSmall = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdpMechanism {
    None = 0,
    Dp = 1,
    Idp = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdpMethod {
    Electre3 = 0,
    Promethee2 = 1,
}

impl From<OdpMechanism> for Mechanism {
    fn from(m: OdpMechanism) -> Self {
        match m {
            OdpMechanism::None => Mechanism::None,
            OdpMechanism::Dp => Mechanism::Dp,
            OdpMechanism::Idp => Mechanism::Idp,
        }
    }
}

impl From<OdpMethod> for Method {
    fn from(m: OdpMethod) -> Self {
        match m {
            OdpMethod::Electre3 => Method::Electre3,
            OdpMethod::Promethee2 => Method::Promethee2,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(OdpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.category() {
            ErrorCategory::Config => OdpStatus::ConfigError,
            ErrorCategory::Data => OdpStatus::DataError,
            ErrorCategory::Privacy => OdpStatus::PrivacyError,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: OdpStatus, msg: &str) -> Failure {
    Failure(status, msg.to_string())
}

fn lift<T, E: Into<Error>>(r: Result<T, E>) -> Result<T, Failure> {
    r.map_err(|e| Failure::from(e.into()))
}

/// Runs `f`, converting errors and panics into a status plus last-error message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> OdpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            OdpStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            OdpStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(OdpStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(OdpStatus::InvalidUtf8, "argument is not valid UTF-8"))
}

unsafe fn obj<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| fail(OdpStatus::NullPointer, "null handle"))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(fail(OdpStatus::NullPointer, "null output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn odp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn odp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates a JSON configuration.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn odp_config_from_json(json: *const c_char, out: *mut *mut OdpConfig) -> OdpStatus {
    guard(|| {
        let text = str_arg(json)?;
        put(out, OdpConfig(lift(Config::from_json(text))?))
    })
}

/// Loads a bundled configuration: `"synthetic"` or `"beer"`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn odp_config_bundled(name: *const c_char, out: *mut *mut OdpConfig) -> OdpStatus {
    guard(|| {
        let config = match str_arg(name)? {
            "synthetic" => Config::synthetic(),
            "beer" => Config::beer(),
            other => return Err(fail(OdpStatus::ConfigError, &format!("no bundled config '{other}'"))),
        };
        put(out, OdpConfig(config))
    })
}

/// # Safety
/// `config` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn odp_config_free(config: *mut OdpConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Parses an evaluations CSV (`alternative_id,user_id,<criteria...>`).
///
/// # Safety
/// Pointers must be valid; `csv` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn odp_evaluations_from_csv(
    config: *const OdpConfig,
    csv: *const c_char,
    out: *mut *mut OdpEvaluations,
) -> OdpStatus {
    guard(|| {
        let config = obj(config)?;
        let text = str_arg(csv)?;
        let evals = lift(read_evaluations(text.as_bytes(), &config.0.criteria))?;
        put(out, OdpEvaluations(evals))
    })
}

/// # Safety
/// `evals` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn odp_evaluations_free(evals: *mut OdpEvaluations) {
    if !evals.is_null() {
        drop(Box::from_raw(evals));
    }
}

/// Parses a matrix CSV (`alternative_id,<criteria...>`).
///
/// # Safety
/// Pointers must be valid; `csv` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn odp_matrix_from_csv(
    config: *const OdpConfig,
    csv: *const c_char,
    out: *mut *mut OdpMatrix,
) -> OdpStatus {
    guard(|| {
        let config = obj(config)?;
        let text = str_arg(csv)?;
        put(out, OdpMatrix(lift(read_matrix(text.as_bytes(), &config.0.criteria))?))
    })
}

/// Averages the evaluations into the performance matrix OM.
///
/// # Safety
/// Pointers must be valid handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn odp_aggregate(
    config: *const OdpConfig,
    evals: *const OdpEvaluations,
    out: *mut *mut OdpMatrix,
) -> OdpStatus {
    guard(|| {
        let criteria = &obj(config)?.0.criteria;
        let om = lift(aggregate_sam(&obj(evals)?.0, criteria))?;
        lift(validate_problem(criteria, &om))?;
        put(out, OdpMatrix(om))
    })
}

/// Adds Laplace noise to `om` with budget `epsilon` per alternative. Output is
/// clamped to the criterion domains unless the config disables clamping.
///
/// # Safety
/// Pointers must be valid handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn odp_anonymize(
    config: *const OdpConfig,
    om: *const OdpMatrix,
    evals: *const OdpEvaluations,
    mechanism: OdpMechanism,
    epsilon: f64,
    seed: u64,
    out: *mut *mut OdpMatrix,
) -> OdpStatus {
    guard(|| {
        let config = &obj(config)?.0;
        let params = PrivacyParams {
            epsilon,
            mechanism: mechanism.into(),
            clamp_output: config.privacy.clamp_output,
            seed,
        };
        let (noisy, _) = lift(anonymize_matrix(&obj(om)?.0, &obj(evals)?.0, &config.criteria, &params))?;
        put(out, OdpMatrix(noisy))
    })
}

/// Writes the row and column counts.
///
/// # Safety
/// `matrix` must be a valid handle; `rows` and `cols` must be writable.
#[no_mangle]
pub unsafe extern "C" fn odp_matrix_shape(matrix: *const OdpMatrix, rows: *mut size_t, cols: *mut size_t) -> OdpStatus {
    guard(|| {
        let m = &obj(matrix)?.0;
        if rows.is_null() || cols.is_null() {
            return Err(fail(OdpStatus::NullPointer, "null output pointer"));
        }
        *rows = m.n_alternatives();
        *cols = m.n_criteria();
        Ok(())
    })
}

/// Copies the row-major values into `buf`, which must hold rows * cols doubles.
///
/// # Safety
/// `buf` must point to at least `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn odp_matrix_values(matrix: *const OdpMatrix, buf: *mut f64, len: size_t) -> OdpStatus {
    guard(|| {
        let values = obj(matrix)?.0.values();
        if buf.is_null() {
            return Err(fail(OdpStatus::NullPointer, "null buffer"));
        }
        if len < values.len() {
            return Err(fail(
                OdpStatus::BufferTooSmall,
                &format!("need {} values, got {len}", values.len()),
            ));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
        Ok(())
    })
}

/// Serializes the matrix as CSV; free the result with `odp_string_free`.
///
/// # Safety
/// `matrix` must be a valid handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn odp_matrix_to_csv(matrix: *const OdpMatrix, out: *mut *mut c_char) -> OdpStatus {
    guard(|| {
        let m = &obj(matrix)?.0;
        if out.is_null() {
            return Err(fail(OdpStatus::NullPointer, "null output pointer"));
        }
        let mut buf = Vec::new();
        lift(write_matrix(m, &mut buf))?;
        let s = CString::new(buf).map_err(|_| fail(OdpStatus::DataError, "matrix text contains NUL"))?;
        *out = s.into_raw();
        Ok(())
    })
}

/// # Safety
/// `matrix` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn odp_matrix_free(matrix: *mut OdpMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// Ranks the matrix and writes one rank score per alternative (row order)
/// into `scores`; 1 is best and tied alternatives share the mean position.
///
/// # Safety
/// `scores` must point to at least `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn odp_rank(
    config: *const OdpConfig,
    matrix: *const OdpMatrix,
    method: OdpMethod,
    scores: *mut f64,
    len: size_t,
) -> OdpStatus {
    guard(|| {
        let config = &obj(config)?.0;
        let m = &obj(matrix)?.0;
        if scores.is_null() {
            return Err(fail(OdpStatus::NullPointer, "null buffer"));
        }
        if len < m.n_alternatives() {
            return Err(fail(
                OdpStatus::BufferTooSmall,
                &format!("need {} scores, got {len}", m.n_alternatives()),
            ));
        }
        let ranking = lift(rank_matrix(method.into(), m, &config.criteria, &config.ranking()))?;
        for (i, e) in ranking.entries.iter().enumerate() {
            *scores.add(i) = e.score;
        }
        Ok(())
    })
}

/// Mean absolute cellwise difference of two same-shaped matrices.
///
/// # Safety
/// Handles must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn odp_mae(a: *const OdpMatrix, b: *const OdpMatrix, out: *mut f64) -> OdpStatus {
    guard(|| {
        let v = lift(mae(&obj(a)?.0, &obj(b)?.0))?;
        if out.is_null() {
            return Err(fail(OdpStatus::NullPointer, "null output pointer"));
        }
        *out = v;
        Ok(())
    })
}

/// Tie-aware Spearman correlation of two score vectors of length `n`.
/// A constant input yields 0 and sets `*degenerate` to 1.
///
/// # Safety
/// `x` and `y` must point to `n` doubles; `out` and `degenerate` must be
/// writable (`degenerate` may be NULL).
#[no_mangle]
pub unsafe extern "C" fn odp_spearman(
    x: *const f64,
    y: *const f64,
    n: size_t,
    out: *mut f64,
    degenerate: *mut i32,
) -> OdpStatus {
    guard(|| {
        if x.is_null() || y.is_null() || out.is_null() {
            return Err(fail(OdpStatus::NullPointer, "null pointer argument"));
        }
        let xs = std::slice::from_raw_parts(x, n);
        let ys = std::slice::from_raw_parts(y, n);
        let r = lift(spearman_scores(xs, ys))?;
        *out = r.coefficient;
        if !degenerate.is_null() {
            *degenerate = i32::from(r.degenerate);
        }
        Ok(())
    })
}
