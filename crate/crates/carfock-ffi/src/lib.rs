//! C ABI over the carfock library: opaque handles, integer status codes,
//! and a thread-local last-error message. Every function returns CfStatus;
//! results come back through out-pointers. Strings returned through out
//! pointers are owned by the caller and must be released with
//! `cf_string_free`; handles with `cf_state_free` / `cf_density_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use carfock::channels::{
    erasure_choi, erasure_ppt_spectrum, erasure_quantum_capacity, grassmann_output_state,
    AccelerationParam, ErasureParams,
};
use carfock::density::{partial_transpose_second, spectrum_of, DensityMatrix};
use carfock::entanglement::eof_wootters;
use carfock::io;
use carfock::roof::{eof_convex_roof, RoofConfig, RoofConstraint};
use carfock::{Error, FockVector, ModeOrder, Parity};

/// Status code returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Input text did not parse; see cf_last_error_message.
    ParseError = 3,
    /// Arguments were structurally valid but out of domain.
    InvalidArgument = 4,
    /// The operation requires parity superselection and the input violates it.
    SsrViolation = 5,
    /// Unexpected internal failure.
    InternalError = 6,
}

/// Occupation-parity classification of a pure state.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfParity {
    Even = 0,
    Odd = 1,
    Mixed = 2,
}

/// Opaque pure-state handle.
pub struct CfState(FockVector);

/// Opaque density-matrix handle.
pub struct CfDensity(DensityMatrix);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let cstring = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstring));
}

fn status_of(err: &Error) -> CfStatus {
    match err {
        Error::Parse { .. } => CfStatus::ParseError,
        Error::SsrViolation(_) => CfStatus::SsrViolation,
        Error::Io(_) | Error::Optimization(_) => CfStatus::InternalError,
        _ => CfStatus::InvalidArgument,
    }
}

fn fail(err: Error) -> CfStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

/// Runs a closure at the ABI boundary: catches panics and reports them as
/// InternalError instead of unwinding into C.
fn guarded(f: impl FnOnce() -> CfStatus) -> CfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal panic: {msg}"));
            CfStatus::InternalError
        }
    }
}

unsafe fn utf8_arg<'a>(ptr: *const c_char) -> Result<&'a str, CfStatus> {
    if ptr.is_null() {
        set_error("null string argument".into());
        return Err(CfStatus::NullArgument);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        set_error("string argument is not UTF-8".into());
        CfStatus::InvalidUtf8
    })
}

unsafe fn state_arg<'a>(ptr: *const CfState) -> Result<&'a FockVector, CfStatus> {
    if ptr.is_null() {
        set_error("null state handle".into());
        return Err(CfStatus::NullArgument);
    }
    Ok(unsafe { &(*ptr).0 })
}

unsafe fn density_arg<'a>(ptr: *const CfDensity) -> Result<&'a DensityMatrix, CfStatus> {
    if ptr.is_null() {
        set_error("null density handle".into());
        return Err(CfStatus::NullArgument);
    }
    Ok(unsafe { &(*ptr).0 })
}

fn require_out<T>(ptr: *mut T) -> Result<(), CfStatus> {
    if ptr.is_null() {
        set_error("null out pointer".into());
        return Err(CfStatus::NullArgument);
    }
    Ok(())
}

macro_rules! ffi_try {
    ($expr:expr) => {
        match $expr {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

fn emit_string(text: String, out: *mut *mut c_char) -> CfStatus {
    match CString::new(text) {
        Ok(cstring) => {
            unsafe { *out = cstring.into_raw() };
            CfStatus::Ok
        }
        Err(_) => {
            set_error("output text contains an interior NUL".into());
            CfStatus::InternalError
        }
    }
}

/// Semantic version of the underlying library. Static storage; do not free.
#[no_mangle]
pub extern "C" fn cf_version() -> *const c_char {
    const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Message describing the most recent failure on this thread, or null if
/// none. Caller frees with cf_string_free.
#[no_mangle]
pub extern "C" fn cf_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|msg| msg.clone().into_raw())
            .unwrap_or(std::ptr::null_mut())
    })
}

/// Releases a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn cf_string_free(ptr: *mut c_char) {
    if !ptr.is_null() {
        drop(unsafe { CString::from_raw(ptr) });
    }
}

#[no_mangle]
pub unsafe extern "C" fn cf_state_parse(text: *const c_char, out: *mut *mut CfState) -> CfStatus {
    guarded(|| {
        ffi_try!(require_out(out));
        let text = ffi_try!(unsafe { utf8_arg(text) });
        match io::parse_state(text) {
            Ok(state) => {
                unsafe { *out = Box::into_raw(Box::new(CfState(state))) };
                CfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn cf_state_free(ptr: *mut CfState) {
    if !ptr.is_null() {
        drop(unsafe { Box::from_raw(ptr) });
    }
}

#[no_mangle]
pub unsafe extern "C" fn cf_state_to_string(state: *const CfState, out: *mut *mut c_char) -> CfStatus {
    guarded(|| {
        ffi_try!(require_out(out));
        let state = ffi_try!(unsafe { state_arg(state) });
        emit_string(io::write_state(state), out)
    })
}

#[no_mangle]
pub unsafe extern "C" fn cf_state_norm(state: *const CfState, out: *mut f64) -> CfStatus {
    guarded(|| {
        ffi_try!(require_out(out));
        let state = ffi_try!(unsafe { state_arg(state) });
        unsafe { *out = state.norm() };
        CfStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn cf_state_parity(state: *const CfState, out: *mut CfParity) -> CfStatus {
    guarded(|| {
        ffi_try!(require_out(out));
        let state = ffi_try!(unsafe { state_arg(state) });
        match state.parity() {
            Ok(parity) => {
                let mapped = match parity {
                    Parity::Even => CfParity::Even,
                    Parity::Odd => CfParity::Odd,
                    Parity::Mixed => CfParity::Mixed,
                };
                unsafe { *out = mapped };
                CfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn cf_state_ssr_valid(state: *const CfState, out: *mut bool) -> CfStatus {
    guarded(|| {
        ffi_try!(require_out(out));
        let state = ffi_try!(unsafe { state_arg(state) });
        unsafe { *out = state.ssr_check().is_valid() };
        CfStatus::Ok
    })
}

/// Rewrites the state in the mode order given as a label list ("acb" or
/// "a,c,b"), applying the fermionic reordering signs.
#[no_mangle]
pub unsafe extern "C" fn cf_state_reorder(
    state: *const CfState,
    order: *const c_char,
    out: *mut *mut CfState,
) -> CfStatus {
    guarded(|| {
        ffi_try!(require_out(out));
        let state = ffi_try!(unsafe { state_arg(state) });
        let spec = ffi_try!(unsafe { utf8_arg(order) });
        let target = match ModeOrder::new(io::split_labels(spec)) {
            Ok(order) => order,
            Err(e) => return fail(e),
        };
        match state.reorder_modes(&target) {
            Ok(reordered) => {
                unsafe { *out = Box::into_raw(Box::new(CfState(reordered))) };
                CfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Projects onto the state and traces out the labeled modes.
#[no_mangle]
pub unsafe extern "C" fn cf_state_reduce(
    state: *const CfState,
    trace_out: *const c_char,
    out: *mut *mut CfDensity,
) -> CfStatus {
    guarded(|| {
        ffi_try!(require_out(out));
        let state = ffi_try!(unsafe { state_arg(state) });
        let labels = io::split_labels(ffi_try!(unsafe { utf8_arg(trace_out) }));
        let result = DensityMatrix::outer(state).and_then(|rho| rho.partial_trace(labels));
        match result {
            Ok(reduced) => {
                unsafe { *out = Box::into_raw(Box::new(CfDensity(reduced))) };
                CfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn cf_density_parse(text: *const c_char, out: *mut *mut CfDensity) -> CfStatus {
    guarded(|| {
        ffi_try!(require_out(out));
        let text = ffi_try!(unsafe { utf8_arg(text) });
        match io::parse_density(text) {
            Ok(rho) => {
                unsafe { *out = Box::into_raw(Box::new(CfDensity(rho))) };
                CfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn cf_density_free(ptr: *mut CfDensity) {
    if !ptr.is_null() {
        drop(unsafe { Box::from_raw(ptr) });
    }
}

#[no_mangle]
pub unsafe extern "C" fn cf_density_to_string(rho: *const CfDensity, out: *mut *mut c_char) -> CfStatus {
    guarded(|| {
        ffi_try!(require_out(out));
        let rho = ffi_try!(unsafe { density_arg(rho) });
        emit_string(io::write_density(rho), out)
    })
}

#[no_mangle]
pub unsafe extern "C" fn cf_density_dim(rho: *const CfDensity, out: *mut usize) -> CfStatus {
    guarded(|| {
        ffi_try!(require_out(out));
        let rho = ffi_try!(unsafe { density_arg(rho) });
        unsafe { *out = rho.dim() };
        CfStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn cf_density_ssr_valid(rho: *const CfDensity, out: *mut bool) -> CfStatus {
    guarded(|| {
        ffi_try!(require_out(out));
        let rho = ffi_try!(unsafe { density_arg(rho) });
        unsafe { *out = rho.ssr_check().is_valid() };
        CfStatus::Ok
    })
}

/// Negativity across the cut separating the last mode from the rest.
#[no_mangle]
pub unsafe extern "C" fn cf_density_negativity(rho: *const CfDensity, out: *mut f64) -> CfStatus {
    guarded(|| {
        ffi_try!(require_out(out));
        let rho = ffi_try!(unsafe { density_arg(rho) });
        let Some(last) = rho.order().labels().last().cloned() else {
            return fail(Error::WrongModeCount { expected: 1, found: 0 });
        };
        match carfock::entanglement::negativity(rho, [last]) {
            Ok(value) => {
                unsafe { *out = value };
                CfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn cf_density_eof_wootters(rho: *const CfDensity, out: *mut f64) -> CfStatus {
    guarded(|| {
        ffi_try!(require_out(out));
        let rho = ffi_try!(unsafe { density_arg(rho) });
        match eof_wootters(rho) {
            Ok(value) => {
                unsafe { *out = value };
                CfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Entanglement of formation by convex-roof minimization. With
/// `ssr_constrained` true the decomposition members must have definite
/// parity and the input must pass the superselection check. `converged`
/// reports whether the optimizer met its stall tolerance; on false the
/// value is an upper bound.
#[no_mangle]
pub unsafe extern "C" fn cf_density_eof_roof(
    rho: *const CfDensity,
    ssr_constrained: bool,
    seed: u64,
    restarts: u32,
    out_value: *mut f64,
    out_converged: *mut bool,
) -> CfStatus {
    guarded(|| {
        ffi_try!(require_out(out_value));
        ffi_try!(require_out(out_converged));
        let rho = ffi_try!(unsafe { density_arg(rho) });
        let constraint = if ssr_constrained {
            RoofConstraint::ParitySsr
        } else {
            RoofConstraint::Unconstrained
        };
        let config = RoofConfig { seed, restarts, ..RoofConfig::default() };
        match eof_convex_roof(rho, constraint, &config) {
            Ok((report, _)) => {
                unsafe {
                    *out_value = report.value;
                    *out_converged = report.converged;
                }
                CfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn cf_erasure_quantum_capacity(p: f64, out: *mut f64) -> CfStatus {
    guarded(|| {
        ffi_try!(require_out(out));
        match ErasureParams::new(p) {
            Ok(params) => {
                unsafe { *out = erasure_quantum_capacity(params) };
                CfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Negativity of the erasure channel's Choi state.
#[no_mangle]
pub unsafe extern "C" fn cf_erasure_negativity(p: f64, out: *mut f64) -> CfStatus {
    guarded(|| {
        ffi_try!(require_out(out));
        let params = match ErasureParams::new(p) {
            Ok(params) => params,
            Err(e) => return fail(e),
        };
        let choi = erasure_choi(params);
        let value = partial_transpose_second(&choi, 2, 3)
            .and_then(|pt| spectrum_of(&pt))
            .map(|s| s.negative_weight());
        match value {
            Ok(value) => {
                unsafe { *out = value };
                CfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Writes the six eigenvalues of the partially transposed Choi state into
/// `out`, descending. `out` must point to at least 6 doubles.
#[no_mangle]
pub unsafe extern "C" fn cf_erasure_ppt_spectrum(p: f64, out: *mut f64) -> CfStatus {
    guarded(|| {
        ffi_try!(require_out(out));
        match ErasureParams::new(p) {
            Ok(params) => {
                let spectrum = erasure_ppt_spectrum(params);
                let eigenvalues = spectrum.eigenvalues();
                unsafe { std::ptr::copy_nonoverlapping(eigenvalues.as_ptr(), out, 6) };
                CfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Two-mode output state of the accelerated observer, r in [0, pi/4].
#[no_mangle]
pub unsafe extern "C" fn cf_grassmann_state(r: f64, out: *mut *mut CfDensity) -> CfStatus {
    guarded(|| {
        ffi_try!(require_out(out));
        match AccelerationParam::new(r) {
            Ok(param) => {
                let rho = grassmann_output_state(param);
                unsafe { *out = Box::into_raw(Box::new(CfDensity(rho))) };
                CfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
