//! C ABI over `hv2q-core`.
//!
//! Objects cross the boundary as opaque handles created by `*_new` or
//! `*_singlet` functions and released with the matching `*_free`. Every
//! fallible call returns an [`Hv2qStatus`]; on failure a message is kept per
//! thread and can be read with [`hv2q_last_error`]. Panics never unwind into
//! the caller. They are caught and reported as `HV2Q_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hv2q_core::frame::schmidt_decompose;
use hv2q_core::linalg::{UnitVec3, Vec3, C64};
use hv2q_core::oracle::qm_averages;
use hv2q_core::report::{to_json_pretty, Envelope};
use hv2q_core::states::{singlet, LocalObservable, TwoQubitState};
use hv2q_core::verify::{verify, ModelKind, VerificationReport, VerifyOptions};
use hv2q_core::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hv2qStatus {
    Ok = 0,
    /// Malformed or out-of-domain input (bad JSON, zero vector, too few samples).
    InvalidInput = 1,
    /// A required pointer argument was null.
    NullPointer = 2,
    /// A numerical routine failed or an internal consistency check tripped.
    Numerical = 3,
    /// A Rust panic was caught at the boundary.
    Panic = 4,
}

/// Hidden-variable model selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hv2qModel {
    /// Bell's singlet model; other states are rejected.
    Bell = 0,
    /// Sphere model for any pure state.
    General = 1,
    /// Circle model with one real hidden parameter.
    Minimal = 2,
}

impl From<Hv2qModel> for ModelKind {
    fn from(m: Hv2qModel) -> Self {
        match m {
            Hv2qModel::Bell => ModelKind::Bell,
            Hv2qModel::General => ModelKind::General,
            Hv2qModel::Minimal => ModelKind::Minimal,
        }
    }
}

/// Opaque two-qubit pure state.
pub struct Hv2qState(TwoQubitState);

/// Opaque local observable α₁ I + α₂ σ·a.
pub struct Hv2qObservable(LocalObservable);

/// Opaque verification report together with its JSON rendering.
pub struct Hv2qReport {
    report: VerificationReport,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> Hv2qStatus {
    match e {
        Error::InvalidInput(_) | Error::NotUnit { .. } | Error::NotHermitian { .. } | Error::Json(_) => {
            Hv2qStatus::InvalidInput
        }
        _ => Hv2qStatus::Numerical,
    }
}

enum Fail {
    Core(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

/// Runs `f`, records any failure and maps it to a status.
fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> Hv2qStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => Hv2qStatus::Ok,
        Ok(Err(Fail::Core(e))) => {
            let s = status_of(&e);
            set_error(e.to_string());
            s
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer passed as {what}"));
            Hv2qStatus::NullPointer
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            Hv2qStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn store<T>(out: *mut *mut T, value: T, what: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(what));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hv2q_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hv2q_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// State from 8 doubles: (re, im) of the amplitudes on |00⟩, |01⟩, |10⟩, |11⟩.
/// The vector is normalized.
///
/// # Safety
/// `amplitudes` must point to 8 readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hv2q_state_new(amplitudes: *const f64, out: *mut *mut Hv2qState) -> Hv2qStatus {
    guard(|| {
        if amplitudes.is_null() {
            return Err(Fail::Null("amplitudes"));
        }
        let a = std::slice::from_raw_parts(amplitudes, 8);
        let amps = [0, 1, 2, 3].map(|i| C64::new(a[2 * i], a[2 * i + 1]));
        store(out, Hv2qState(TwoQubitState::from_amplitudes(amps)?), "out")
    })
}

/// The singlet (|01⟩ − |10⟩)/√2.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hv2q_state_singlet(out: *mut *mut Hv2qState) -> Hv2qStatus {
    guard(|| store(out, Hv2qState(singlet()), "out"))
}

/// State from `{"amplitudes": [[re, im] x4]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hv2q_state_from_json(json: *const c_char, out: *mut *mut Hv2qState) -> Hv2qStatus {
    guard(|| {
        if json.is_null() {
            return Err(Fail::Null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Error::InvalidInput(format!("state JSON is not UTF-8: {e}")))?;
        let s: TwoQubitState = serde_json::from_str(text).map_err(Error::from)?;
        store(out, Hv2qState(s), "out")
    })
}

/// Larger Schmidt weight μ₁ ∈ [1/2, 1].
///
/// # Safety
/// `state` must be a live handle; `mu1` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hv2q_state_mu1(state: *const Hv2qState, mu1: *mut f64) -> Hv2qStatus {
    guard(|| {
        let s = deref(state, "state")?;
        if mu1.is_null() {
            return Err(Fail::Null("mu1"));
        }
        *mu1 = schmidt_decompose(&s.0).mu1;
        Ok(())
    })
}

/// Releases a state. NULL is ignored.
///
/// # Safety
/// `state` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hv2q_state_free(state: *mut Hv2qState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Observable α₁ I + α₂ σ·a; the axis (x, y, z) is normalized and a negative
/// α₂ flips it.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hv2q_observable_new(
    alpha1: f64,
    alpha2: f64,
    x: f64,
    y: f64,
    z: f64,
    out: *mut *mut Hv2qObservable,
) -> Hv2qStatus {
    guard(|| {
        let o = LocalObservable::canonicalize(alpha1, alpha2, Vec3::new(x, y, z))?;
        store(out, Hv2qObservable(o), "out")
    })
}

/// σ·a for a unit vector a.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hv2q_observable_spin(x: f64, y: f64, z: f64, out: *mut *mut Hv2qObservable) -> Hv2qStatus {
    guard(|| {
        let a = UnitVec3::normalize(Vec3::new(x, y, z))?;
        store(out, Hv2qObservable(LocalObservable::spin(a)), "out")
    })
}

/// Releases an observable. NULL is ignored.
///
/// # Safety
/// `obs` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hv2q_observable_free(obs: *mut Hv2qObservable) {
    if !obs.is_null() {
        drop(Box::from_raw(obs));
    }
}

/// Quantum moments ⟨X⊗I⟩, ⟨I⊗Y⟩, ⟨X⊗Y⟩ written to `moments[0..3]`.
///
/// # Safety
/// Handles must be live; `moments` must point to 3 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hv2q_qm_moments(
    state: *const Hv2qState,
    x: *const Hv2qObservable,
    y: *const Hv2qObservable,
    moments: *mut f64,
) -> Hv2qStatus {
    guard(|| {
        let (s, x, y) = (deref(state, "state")?, deref(x, "x")?, deref(y, "y")?);
        if moments.is_null() {
            return Err(Fail::Null("moments"));
        }
        let m = qm_averages(&s.0, &x.0, &y.0)?.direct;
        std::slice::from_raw_parts_mut(moments, 3).copy_from_slice(&[m.x, m.y, m.xy]);
        Ok(())
    })
}

/// Runs a model against the quantum prediction. `samples` = 0 skips Monte
/// Carlo; otherwise at least 10000 are required. Estimates pass within
/// `sigma` standard errors.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hv2q_verify(
    state: *const Hv2qState,
    x: *const Hv2qObservable,
    y: *const Hv2qObservable,
    model: Hv2qModel,
    samples: u64,
    seed: u64,
    sigma: f64,
    out: *mut *mut Hv2qReport,
) -> Hv2qStatus {
    guard(|| {
        let (s, x, y) = (deref(state, "state")?, deref(x, "x")?, deref(y, "y")?);
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidInput(format!("sigma must be positive (got {sigma})")).into());
        }
        let opts = VerifyOptions {
            samples,
            seed,
            sigma_threshold: sigma,
            ..VerifyOptions::default()
        };
        let report = verify(&s.0, &x.0, &y.0, model.into(), &opts)?;
        let json = to_json_pretty(&Envelope::new("verify", report.pass, &report))?;
        let json = CString::new(json).map_err(|e| Error::Numerical(e.to_string()))?;
        store(out, Hv2qReport { report, json }, "out")
    })
}

/// Overall verdict: 1 if every check passed, 0 otherwise, −1 for NULL.
///
/// # Safety
/// `report` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn hv2q_report_pass(report: *const Hv2qReport) -> i32 {
    report.as_ref().map_or(-1, |r| i32::from(r.report.pass))
}

/// Model moments ⟨X⟩, ⟨Y⟩, ⟨XY⟩ and the largest deviation from the quantum
/// values, written to `values[0..4]`.
///
/// # Safety
/// `report` must be live; `values` must point to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hv2q_report_analytic(report: *const Hv2qReport, values: *mut f64) -> Hv2qStatus {
    guard(|| {
        let r = &deref(report, "report")?.report;
        if values.is_null() {
            return Err(Fail::Null("values"));
        }
        let a = r.analytic;
        std::slice::from_raw_parts_mut(values, 4).copy_from_slice(&[a.x, a.y, a.xy, r.analytic_discrepancy]);
        Ok(())
    })
}

/// The full report as JSON (schema 1). Owned by the report; valid until
/// [`hv2q_report_free`].
///
/// # Safety
/// `report` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn hv2q_report_json(report: *const Hv2qReport) -> *const c_char {
    report.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// Releases a report. NULL is ignored.
///
/// # Safety
/// `report` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hv2q_report_free(report: *mut Hv2qReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
