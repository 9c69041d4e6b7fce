//! C ABI for swingbench.
//!
//! Models are opaque handles created by `sb_model_from_json` or
//! `sb_model_smib` and released with `sb_model_free`. Every fallible call
//! returns an `SbStatus`; on failure `sb_last_error_message` describes the
//! most recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use swingbench::closed_form::{min_damping_ratio, system_eigenvalues};
use swingbench::metrics::closed_form_norms;
use swingbench::network::parse_network_str;
use swingbench::oracles::{h2_gramian, hinf_search};
use swingbench::system::{OutputKind, SwingModel};
use swingbench::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    ValidationError = 4,
    DisconnectedGraph = 5,
    NonPositiveParameter = 6,
    InvalidArgument = 7,
    NumericalError = 8,
    NoClosedForm = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

/// Output selector. `kappa` arguments are read only for `Combined`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbOutput {
    Phase = 0,
    EdgePhase = 1,
    Frequency = 2,
    Combined = 3,
}

/// Opaque model handle.
pub struct SbModel {
    inner: SwingModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> SbStatus {
    match err {
        Error::Parse { .. } => SbStatus::ParseError,
        Error::Validation(_) => SbStatus::ValidationError,
        Error::DisconnectedGraph { .. } => SbStatus::DisconnectedGraph,
        Error::NonPositiveParameter { .. } => SbStatus::NonPositiveParameter,
        Error::InvalidArgument(_) | Error::InvalidGrid(_) | Error::DimensionMismatch { .. } => {
            SbStatus::InvalidArgument
        }
        _ => SbStatus::NumericalError,
    }
}

fn fail(status: SbStatus, msg: &str) -> SbStatus {
    set_error(msg);
    status
}

/// Runs `f`, translating errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), SbStatus>>(f: F) -> SbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SbStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(SbStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: swingbench::Result<T>) -> Result<T, SbStatus> {
    r.map_err(|e| fail(status_of(&e), &e.to_string()))
}

fn output_kind(output: SbOutput, kappa: f64) -> Result<OutputKind, SbStatus> {
    Ok(match output {
        SbOutput::Phase => OutputKind::PhaseCohesiveness,
        SbOutput::EdgePhase => OutputKind::EdgePhase,
        SbOutput::Frequency => OutputKind::Frequency,
        SbOutput::Combined => {
            if !(kappa > 0.0 && kappa.is_finite()) {
                return Err(fail(SbStatus::NonPositiveParameter, &format!("kappa must be positive, got {kappa}")));
            }
            OutputKind::Combined { kappa }
        }
    })
}

unsafe fn model_ref<'a>(model: *const SbModel) -> Result<&'a SwingModel, SbStatus> {
    model.as_ref().map(|m| &m.inner).ok_or_else(|| fail(SbStatus::NullPointer, "model handle is null"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), SbStatus> {
    if out.is_null() {
        return Err(fail(SbStatus::NullPointer, "output pointer is null"));
    }
    *out = value;
    Ok(())
}

fn into_handle(model: SwingModel) -> *mut SbModel {
    Box::into_raw(Box::new(SbModel { inner: model }))
}

/// Builds a model from a network JSON document.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_model_from_json(json: *const c_char, out: *mut *mut SbModel) -> SbStatus {
    guard(|| {
        if json.is_null() {
            return Err(fail(SbStatus::NullPointer, "json is null"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|_| fail(SbStatus::InvalidUtf8, "json is not UTF-8"))?;
        let spec = lift(parse_network_str(text))?;
        let model = lift(SwingModel::from_network(&spec))?;
        write_out(out, into_handle(model))
    })
}

/// Builds a single-machine-infinite-bus model.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_model_smib(inertia: f64, damping: f64, b: f64, out: *mut *mut SbModel) -> SbStatus {
    guard(|| {
        let model = lift(SwingModel::smib(inertia, damping, b))?;
        write_out(out, into_handle(model))
    })
}

/// Returns a copy of `model` with new inertia and damping.
///
/// # Safety
/// `model` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_model_with_params(
    model: *const SbModel,
    inertia: f64,
    damping: f64,
    out: *mut *mut SbModel,
) -> SbStatus {
    guard(|| {
        let m = model_ref(model)?;
        let next = lift(m.with_params(inertia, damping))?;
        write_out(out, into_handle(next))
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sb_model_free(model: *mut SbModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of modes (nodes, or 1 for a single machine).
///
/// # Safety
/// `model` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_model_mode_count(model: *const SbModel, out: *mut usize) -> SbStatus {
    guard(|| write_out(out, model_ref(model)?.eigenvalues().len()))
}

/// Smallest nonzero Laplacian eigenvalue (or `B` for a single machine).
///
/// # Safety
/// `model` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_model_lambda2(model: *const SbModel, out: *mut f64) -> SbStatus {
    guard(|| write_out(out, model_ref(model)?.governing_lambda()))
}

/// Smallest modal damping ratio.
///
/// # Safety
/// `model` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_min_damping_ratio(model: *const SbModel, out: *mut f64) -> SbStatus {
    guard(|| {
        let m = model_ref(model)?;
        write_out(out, min_damping_ratio(m.inertia(), m.damping(), m.lambda_max()))
    })
}

/// Writes the `2 * mode_count` poles, two per mode, into `re` and `im`.
///
/// # Safety
/// `re` and `im` must each hold `len` doubles; `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sb_poles(
    model: *const SbModel,
    re: *mut f64,
    im: *mut f64,
    len: usize,
    written: *mut usize,
) -> SbStatus {
    guard(|| {
        let m = model_ref(model)?;
        let need = 2 * m.eigenvalues().len();
        write_out(written, need)?;
        if len < need {
            return Err(fail(SbStatus::BufferTooSmall, &format!("need {need} entries, got {len}")));
        }
        if re.is_null() || im.is_null() {
            return Err(fail(SbStatus::NullPointer, "pole buffer is null"));
        }
        let re = std::slice::from_raw_parts_mut(re, need);
        let im = std::slice::from_raw_parts_mut(im, need);
        for (k, p) in system_eigenvalues(m.inertia(), m.damping(), m.eigenvalues()).iter().enumerate() {
            re[2 * k] = p.s1.re;
            im[2 * k] = p.s1.im;
            re[2 * k + 1] = p.s2.re;
            im[2 * k + 1] = p.s2.im;
        }
        Ok(())
    })
}

/// Closed-form H2 and H-infinity norms. Returns `NoClosedForm` for the
/// combined output.
///
/// # Safety
/// `model` must be a live handle; `h2` and `hinf` writable pointers.
#[no_mangle]
pub unsafe extern "C" fn sb_closed_form_norms(
    model: *const SbModel,
    output: SbOutput,
    kappa: f64,
    h2: *mut f64,
    hinf: *mut f64,
) -> SbStatus {
    guard(|| {
        let m = model_ref(model)?;
        let kind = output_kind(output, kappa)?;
        match lift(closed_form_norms(m, kind))? {
            Some((a, b)) => {
                write_out(h2, a.value)?;
                write_out(hinf, b.value)
            }
            None => Err(fail(SbStatus::NoClosedForm, "no closed form for this output")),
        }
    })
}

/// H2 norm from the controllability/observability Gramian.
///
/// # Safety
/// `model` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_h2_oracle(model: *const SbModel, output: SbOutput, kappa: f64, out: *mut f64) -> SbStatus {
    guard(|| {
        let m = model_ref(model)?;
        let kind = output_kind(output, kappa)?;
        write_out(out, lift(h2_gramian(m, kind))?.h2)
    })
}

/// H-infinity norm by frequency search. `argmax` may be null.
///
/// # Safety
/// `model` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_hinf_oracle(
    model: *const SbModel,
    output: SbOutput,
    kappa: f64,
    rel_tol: f64,
    out: *mut f64,
    argmax: *mut f64,
) -> SbStatus {
    guard(|| {
        let m = model_ref(model)?;
        let kind = output_kind(output, kappa)?;
        let r = lift(hinf_search(m, kind, rel_tol))?;
        write_out(out, r.hinf)?;
        if !argmax.is_null() {
            *argmax = r.argmax_omega;
        }
        Ok(())
    })
}

/// Message of the last failed call on this thread. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn sb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn sb_status_name(status: SbStatus) -> *const c_char {
    let s: &'static CStr = match status {
        SbStatus::Ok => c"Ok",
        SbStatus::NullPointer => c"NullPointer",
        SbStatus::InvalidUtf8 => c"InvalidUtf8",
        SbStatus::ParseError => c"ParseError",
        SbStatus::ValidationError => c"ValidationError",
        SbStatus::DisconnectedGraph => c"DisconnectedGraph",
        SbStatus::NonPositiveParameter => c"NonPositiveParameter",
        SbStatus::InvalidArgument => c"InvalidArgument",
        SbStatus::NumericalError => c"NumericalError",
        SbStatus::NoClosedForm => c"NoClosedForm",
        SbStatus::BufferTooSmall => c"BufferTooSmall",
        SbStatus::Panic => c"Panic",
    };
    s.as_ptr()
}
