//! C ABI over the kinopax planner.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call returns a
//! [`KpxStatus`]; on failure a human-readable message is available from
//! [`kpx_last_error_message`] on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use kinopax::bench::Scenario;
use kinopax::{Error, PlanOutcome};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KpxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Schema = 3,
    UnknownScenario = 4,
    InvalidProblem = 5,
    InvalidConfig = 6,
    Io = 7,
    BufferTooSmall = 8,
    NoSolution = 9,
    Internal = 10,
}

/// A loaded scenario: problem, planner configuration and trial settings.
pub struct KpxScenario {
    inner: Scenario,
}

/// The outcome of one planning run.
pub struct KpxResult {
    inner: PlanOutcome,
    state_dim: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> KpxStatus {
    match err {
        Error::Schema { .. } => KpxStatus::Schema,
        Error::UnknownScenario(_) => KpxStatus::UnknownScenario,
        Error::Problem(_) | Error::InvalidSegment(_) => KpxStatus::InvalidProblem,
        Error::Config(_) | Error::GridTooFine { .. } => KpxStatus::InvalidConfig,
        Error::Io { .. } => KpxStatus::Io,
        Error::PropagationDiverged { .. } => KpxStatus::Internal,
    }
}

fn fail(status: KpxStatus, msg: impl Into<String>) -> KpxStatus {
    set_error(msg);
    status
}

fn from_error(err: Error) -> KpxStatus {
    let status = status_of(&err);
    fail(status, err.to_string())
}

/// Runs `f`, turning a panic into [`KpxStatus::Internal`].
fn guard(f: impl FnOnce() -> KpxStatus) -> KpxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            fail(KpxStatus::Internal, format!("internal error: {msg}"))
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, KpxStatus> {
    if p.is_null() {
        return Err(fail(KpxStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(KpxStatus::InvalidUtf8, "string argument is not valid UTF-8"))
}

unsafe fn store_scenario(
    loaded: kinopax::Result<Scenario>,
    out: *mut *mut KpxScenario,
) -> KpxStatus {
    match loaded {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(KpxScenario { inner }));
            KpxStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// Message of the last failure on this thread, or null if none. The pointer
/// stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn kpx_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kpx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a scenario document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kpx_scenario_from_json(
    json: *const c_char,
    out: *mut *mut KpxScenario,
) -> KpxStatus {
    guard(|| {
        if out.is_null() {
            return fail(KpxStatus::NullPointer, "null output pointer");
        }
        match read_str(json) {
            Ok(text) => store_scenario(Scenario::from_json_str(text), out),
            Err(s) => s,
        }
    })
}

/// Loads a bundled scenario by name or a scenario file by path.
///
/// # Safety
/// `name_or_path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kpx_scenario_load(
    name_or_path: *const c_char,
    out: *mut *mut KpxScenario,
) -> KpxStatus {
    guard(|| {
        if out.is_null() {
            return fail(KpxStatus::NullPointer, "null output pointer");
        }
        match read_str(name_or_path) {
            Ok(name) => store_scenario(Scenario::load(name), out),
            Err(s) => s,
        }
    })
}

/// Releases a scenario. Null is ignored.
///
/// # Safety
/// `scenario` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kpx_scenario_free(scenario: *mut KpxScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

unsafe fn with_scenario(scenario: *mut KpxScenario, f: impl FnOnce(&mut Scenario)) -> KpxStatus {
    match scenario.as_mut() {
        Some(s) => {
            f(&mut s.inner);
            KpxStatus::Ok
        }
        None => fail(KpxStatus::NullPointer, "null scenario"),
    }
}

/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpx_scenario_set_seed(scenario: *mut KpxScenario, seed: u64) -> KpxStatus {
    with_scenario(scenario, |s| s.config.seed = seed)
}

/// Sets the worker thread count; must be at least 1.
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpx_scenario_set_workers(
    scenario: *mut KpxScenario,
    workers: usize,
) -> KpxStatus {
    if workers == 0 {
        return fail(KpxStatus::InvalidConfig, "workers must be at least 1");
    }
    with_scenario(scenario, |s| s.config.workers = workers)
}

/// Wall-clock budget in milliseconds; 0 removes it.
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpx_scenario_set_time_limit_ms(
    scenario: *mut KpxScenario,
    ms: u64,
) -> KpxStatus {
    with_scenario(scenario, |s| {
        s.config.t_max = (ms > 0).then(|| Duration::from_millis(ms))
    })
}

/// Iteration budget; 0 removes it.
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpx_scenario_set_max_iterations(
    scenario: *mut KpxScenario,
    n: u64,
) -> KpxStatus {
    with_scenario(scenario, |s| s.config.max_iterations = (n > 0).then_some(n))
}

/// Propagation budget; 0 removes it.
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpx_scenario_set_max_propagations(
    scenario: *mut KpxScenario,
    n: u64,
) -> KpxStatus {
    with_scenario(scenario, |s| {
        s.config.max_propagations = (n > 0).then_some(n)
    })
}

/// State dimension of the scenario's model, or 0 for a null handle.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpx_scenario_state_dim(scenario: *const KpxScenario) -> usize {
    scenario
        .as_ref()
        .map_or(0, |s| s.inner.problem.model.state_dim())
}

/// Runs the planner. A run that finds no solution still succeeds; check
/// [`kpx_result_success`].
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kpx_plan(
    scenario: *const KpxScenario,
    out: *mut *mut KpxResult,
) -> KpxStatus {
    guard(|| {
        let Some(s) = scenario.as_ref() else {
            return fail(KpxStatus::NullPointer, "null scenario");
        };
        if out.is_null() {
            return fail(KpxStatus::NullPointer, "null output pointer");
        }
        match kinopax::plan(&s.inner.problem, &s.inner.config) {
            Ok(inner) => {
                let state_dim = s.inner.problem.model.state_dim();
                *out = Box::into_raw(Box::new(KpxResult { inner, state_dim }));
                KpxStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases a result. Null is ignored.
///
/// # Safety
/// `result` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kpx_result_free(result: *mut KpxResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpx_result_success(result: *const KpxResult) -> bool {
    result.as_ref().is_some_and(|r| r.inner.success())
}

/// Best solution cost; +infinity when no solution was found.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpx_result_cost(result: *const KpxResult) -> f64 {
    result.as_ref().map_or(f64::INFINITY, |r| r.inner.best.cost)
}

/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpx_result_iterations(result: *const KpxResult) -> u64 {
    result.as_ref().map_or(0, |r| r.inner.stats.iterations)
}

/// Number of nodes in the final tree.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpx_result_node_count(result: *const KpxResult) -> usize {
    result.as_ref().map_or(0, |r| r.inner.node_count)
}

/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpx_result_state_dim(result: *const KpxResult) -> usize {
    result.as_ref().map_or(0, |r| r.state_dim)
}

/// Number of states on the solution trajectory, 0 without a solution.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpx_result_state_count(result: *const KpxResult) -> usize {
    result
        .as_ref()
        .and_then(|r| r.inner.trajectory.as_ref())
        .map_or(0, |t| t.states.len())
}

/// Copies the trajectory states row-major into `buf`, which must hold
/// `state_count * state_dim` doubles.
///
/// # Safety
/// `result` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn kpx_result_copy_states(
    result: *const KpxResult,
    buf: *mut f64,
    len: usize,
) -> KpxStatus {
    let Some(r) = result.as_ref() else {
        return fail(KpxStatus::NullPointer, "null result");
    };
    let Some(traj) = r.inner.trajectory.as_ref() else {
        return fail(KpxStatus::NoSolution, "result has no solution trajectory");
    };
    let need = traj.states.len() * r.state_dim;
    if len < need {
        return fail(
            KpxStatus::BufferTooSmall,
            format!("buffer holds {len} values, {need} needed"),
        );
    }
    if buf.is_null() {
        return fail(KpxStatus::NullPointer, "null buffer");
    }
    let dst = std::slice::from_raw_parts_mut(buf, need);
    for (row, state) in dst.chunks_exact_mut(r.state_dim).zip(&traj.states) {
        row.copy_from_slice(&state.0);
    }
    KpxStatus::Ok
}
