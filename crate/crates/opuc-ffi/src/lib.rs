//! C ABI for the opuc library.
//!
//! Measures are opaque handles created from measure-spec TOML (text or
//! file); every function returns an [`OpucStatus`] code and writes results
//! through out-pointers. `opuc_last_error` returns a thread-local message
//! for the most recent failure on the calling thread.
//!
//! The generated header lands in `include/opuc.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use num_complex::Complex64;
use opuc::config::MeasureSpecFile;
use opuc::measure::PsMeasure;
use opuc::outer::OuterEvaluator;
use opuc::Error;

/// Opaque measure handle.
pub struct OpucMeasure {
    measure: PsMeasure,
}

/// Status codes mirroring the CLI exit-code taxonomy.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpucStatus {
    Ok = 0,
    /// Bad spec text, bad parameters, class refusals.
    ConfigError = 2,
    /// Numerical failure during evaluation.
    NumericalError = 3,
    /// A required pointer argument was null.
    NullArgument = 4,
    /// A string argument was not valid UTF-8.
    BadUtf8 = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap_or_default());
}

fn status_for(err: &Error) -> OpucStatus {
    match err {
        Error::Config(_) | Error::Contract(_) | Error::Parse(_) | Error::Class(_) => {
            OpucStatus::ConfigError
        }
        _ => OpucStatus::NumericalError,
    }
}

fn fail(err: Error) -> OpucStatus {
    let code = status_for(&err);
    set_error(&err.to_string());
    code
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn opuc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, OpucStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(OpucStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        OpucStatus::BadUtf8
    })
}

fn build_handle(spec: MeasureSpecFile, out: *mut *mut OpucMeasure) -> OpucStatus {
    match spec.build_measure(None) {
        Ok(measure) => {
            let handle = Box::new(OpucMeasure { measure });
            unsafe { *out = Box::into_raw(handle) };
            OpucStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Create a measure from measure-spec TOML text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn opuc_measure_from_toml(
    text: *const c_char,
    out: *mut *mut OpucMeasure,
) -> OpucStatus {
    if out.is_null() {
        set_error("null out pointer");
        return OpucStatus::NullArgument;
    }
    *out = ptr::null_mut();
    let text = match read_str(text) {
        Ok(t) => t,
        Err(code) => return code,
    };
    match MeasureSpecFile::parse(text) {
        Ok(spec) => build_handle(spec, out),
        Err(e) => fail(e),
    }
}

/// Create a measure from a measure-spec file path.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn opuc_measure_from_file(
    path: *const c_char,
    out: *mut *mut OpucMeasure,
) -> OpucStatus {
    if out.is_null() {
        set_error("null out pointer");
        return OpucStatus::NullArgument;
    }
    *out = ptr::null_mut();
    let path = match read_str(path) {
        Ok(t) => t,
        Err(code) => return code,
    };
    match MeasureSpecFile::load(Path::new(path)) {
        Ok(spec) => build_handle(spec, out),
        Err(e) => fail(e),
    }
}

/// Release a measure handle.
///
/// # Safety
/// `handle` must come from a creation call and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn opuc_measure_free(handle: *mut OpucMeasure) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

unsafe fn borrow<'a>(handle: *const OpucMeasure) -> Result<&'a PsMeasure, OpucStatus> {
    if handle.is_null() {
        set_error("null measure handle");
        return Err(OpucStatus::NullArgument);
    }
    Ok(&(*handle).measure)
}

/// Class verdicts of the measure.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn opuc_measure_classes(
    handle: *const OpucMeasure,
    is_szego: *mut bool,
    is_poly_szego: *mut bool,
) -> OpucStatus {
    let measure = match borrow(handle) {
        Ok(m) => m,
        Err(c) => return c,
    };
    if is_szego.is_null() || is_poly_szego.is_null() {
        set_error("null out pointer");
        return OpucStatus::NullArgument;
    }
    *is_szego = measure.is_szego;
    *is_poly_szego = measure.is_poly_szego;
    OpucStatus::Ok
}

/// Verblunsky coefficients α₀..α_{n−1} into caller-provided arrays.
///
/// # Safety
/// `re` and `im` must point to at least `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn opuc_verblunsky(
    handle: *const OpucMeasure,
    n: usize,
    re: *mut f64,
    im: *mut f64,
) -> OpucStatus {
    let measure = match borrow(handle) {
        Ok(m) => m,
        Err(c) => return c,
    };
    if (re.is_null() || im.is_null()) && n > 0 {
        set_error("null output array");
        return OpucStatus::NullArgument;
    }
    match measure.verblunsky(n) {
        Ok(alpha) => {
            for k in 0..n {
                *re.add(k) = alpha.get(k).re;
                *im.add(k) = alpha.get(k).im;
            }
            OpucStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Both sides of the sum rule for the measure's own weight. `z_trace` is
/// written only when the measure has finite Verblunsky support
/// (`has_trace`).
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn opuc_sum_rule(
    handle: *const OpucMeasure,
    z_direct: *mut f64,
    z_trace: *mut f64,
    has_trace: *mut bool,
) -> OpucStatus {
    let measure = match borrow(handle) {
        Ok(m) => m,
        Err(c) => return c,
    };
    if z_direct.is_null() || z_trace.is_null() || has_trace.is_null() {
        set_error("null out pointer");
        return OpucStatus::NullArgument;
    }
    let weight = measure.weight().clone();
    let direct = match opuc::sumrule::z_direct(measure, &weight) {
        Ok((v, _)) => v,
        Err(e) => return fail(e),
    };
    *z_direct = direct;
    *has_trace = false;
    *z_trace = 0.0;
    if let Some(alpha) = measure.finite_alpha() {
        match opuc::sumrule::z_trace(alpha, &weight) {
            Ok(v) => {
                *z_trace = v;
                *has_trace = true;
            }
            Err(e) => return fail(e),
        }
    }
    OpucStatus::Ok
}

unsafe fn eval_outer(
    handle: *const OpucMeasure,
    n_max: usize,
    out_re: *mut f64,
    out_im: *mut f64,
    f: impl FnOnce(&OuterEvaluator) -> opuc::Result<Complex64>,
) -> OpucStatus {
    let measure = match borrow(handle) {
        Ok(m) => m,
        Err(c) => return c,
    };
    if out_re.is_null() || out_im.is_null() {
        set_error("null out pointer");
        return OpucStatus::NullArgument;
    }
    let ev = match OuterEvaluator::new(measure, n_max) {
        Ok(ev) => ev,
        Err(e) => return fail(e),
    };
    match f(&ev) {
        Ok(v) => {
            *out_re = v.re;
            *out_im = v.im;
            OpucStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Modified Szegő function D̃ at z = z_re + i·z_im (|z| < 1).
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn opuc_dtilde(
    handle: *const OpucMeasure,
    z_re: f64,
    z_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> OpucStatus {
    eval_outer(handle, 0, out_re, out_im, |ev| {
        ev.dtilde(Complex64::new(z_re, z_im))
    })
}

/// ξₙ = D̃·φ̃*ₙ at z (|z| < 1).
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn opuc_xi(
    handle: *const OpucMeasure,
    n: usize,
    z_re: f64,
    z_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> OpucStatus {
    eval_outer(handle, n, out_re, out_im, |ev| {
        ev.xi(n, Complex64::new(z_re, z_im))
    })
}

/// Classical extremal distance min{‖f‖²_σ : deg f ≤ n, f(0) = 1}.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn opuc_classical_distance(
    handle: *const OpucMeasure,
    n: usize,
    out: *mut f64,
) -> OpucStatus {
    let measure = match borrow(handle) {
        Ok(m) => m,
        Err(c) => return c,
    };
    if out.is_null() {
        set_error("null out pointer");
        return OpucStatus::NullArgument;
    }
    match opuc::variational::classical_distance(measure, n) {
        Ok(v) => {
            *out = v;
            OpucStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Run the full experiment pipeline: every task on the measure in
/// `spec_path`, reports written under `out_dir`. `all_passed` receives the
/// summary verdict; a false verdict is not an error (the reports carry the
/// failing checks).
///
/// # Safety
/// `spec_path` and `out_dir` must be NUL-terminated strings; `all_passed`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn opuc_run_experiment(
    spec_path: *const c_char,
    out_dir: *const c_char,
    n_max: usize,
    seed: u64,
    workers: usize,
    all_passed: *mut bool,
) -> OpucStatus {
    if all_passed.is_null() {
        set_error("null out pointer");
        return OpucStatus::NullArgument;
    }
    let spec_path = match read_str(spec_path) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let out_dir = match read_str(out_dir) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let config = match opuc::config::ExperimentConfig::resolve(
        Path::new(spec_path),
        "",
        None,
        n_max,
        seed,
        Path::new(out_dir),
        workers.max(1),
    ) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    match opuc::runner::run_experiment(&config) {
        Ok(result) => {
            *all_passed = result.all_passed;
            OpucStatus::Ok
        }
        Err(e) => fail(e),
    }
}
