//! C ABI for `netreserve`.
//!
//! Objects are opaque handles created by `nr_*_new` style functions and
//! released with the matching `nr_*_free`. Every fallible function returns an
//! [`NrStatus`]; on failure a description is available from
//! [`nr_last_error_message`] on the same thread. Panics never cross the
//! boundary and are reported as [`NrStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use netreserve::cli::{cmd_run, ExperimentConfig};
use netreserve::ew_policy::ExpWeights;
use netreserve::harness::regret_bound;
use netreserve::model::{
    theta_bound, total_cost, three_server_instance, ActionSpace, CostModel, RequestBounds,
    RequestVector, ReservationVector,
};
use netreserve::rl_policy::SoftmaxBandit;
use netreserve::transfer::solve_transfer;
use netreserve::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    InvalidConfig = 4,
    Io = 5,
    Runtime = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Per-component cost of one slot.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NrCost {
    pub reservation: f64,
    pub transfer: f64,
    pub violation: f64,
    pub total: f64,
}

/// Network instance: action space, request bounds and cost model.
pub struct NrModel {
    space: ActionSpace,
    bounds: RequestBounds,
    model: CostModel,
}

/// Full-information exponential weights.
pub struct NrHedge {
    inner: ExpWeights,
}

/// Softmax bandit baseline.
pub struct NrBandit {
    inner: SoftmaxBandit,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    let c = CString::new(message).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(NrStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::IndexOutOfRange { .. } | Error::OutOfBounds { .. } => NrStatus::OutOfRange,
            Error::Config(_) => NrStatus::InvalidConfig,
            Error::Io { .. } | Error::Csv(_) => NrStatus::Io,
            Error::Runtime(_) => NrStatus::Runtime,
            _ => NrStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: NrStatus, message: impl Into<String>) -> Failure {
    Failure(status, message.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            clear_error();
            NrStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            NrStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(ptr: *const T, name: &str) -> Result<&'a T, Failure> {
    unsafe { ptr.as_ref() }.ok_or_else(|| fail(NrStatus::NullPointer, format!("`{name}` is NULL")))
}

unsafe fn deref_mut<'a, T>(ptr: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    unsafe { ptr.as_mut() }.ok_or_else(|| fail(NrStatus::NullPointer, format!("`{name}` is NULL")))
}

unsafe fn slice<'a, T>(ptr: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(fail(NrStatus::NullPointer, format!("`{name}` is NULL")));
    }
    Ok(unsafe { std::slice::from_raw_parts(ptr, len) })
}

unsafe fn slice_mut<'a, T>(ptr: *mut T, len: usize, name: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if ptr.is_null() {
        return Err(fail(NrStatus::NullPointer, format!("`{name}` is NULL")));
    }
    Ok(unsafe { std::slice::from_raw_parts_mut(ptr, len) })
}

unsafe fn string(ptr: *const c_char, name: &str) -> Result<String, Failure> {
    if ptr.is_null() {
        return Err(fail(NrStatus::NullPointer, format!("`{name}` is NULL")));
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map(str::to_owned)
        .map_err(|_| fail(NrStatus::InvalidArgument, format!("`{name}` is not UTF-8")))
}

fn copy_out(src: &[f64], out: &mut [f64]) -> Result<(), Failure> {
    if out.len() < src.len() {
        return Err(fail(
            NrStatus::BufferTooSmall,
            format!("buffer holds {} values, {} needed", out.len(), src.len()),
        ));
    }
    out[..src.len()].copy_from_slice(src);
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next call into the library from this thread.
#[no_mangle]
pub extern "C" fn nr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Builds the three-server reference instance.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn nr_model_three_server(out: *mut *mut NrModel) -> NrStatus {
    guard(|| {
        let out = unsafe { deref_mut(out, "out") }?;
        let (space, bounds, model) = three_server_instance();
        *out = Box::into_raw(Box::new(NrModel { space, bounds, model }));
        Ok(())
    })
}

/// Builds the instance described by the TOML experiment config `text`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nr_model_from_toml(text: *const c_char, out: *mut *mut NrModel) -> NrStatus {
    guard(|| {
        let text = unsafe { string(text, "text") }?;
        let out = unsafe { deref_mut(out, "out") }?;
        let resolved = ExperimentConfig::from_toml_str(&text)?.resolve()?;
        let exp = resolved.experiment;
        *out = Box::into_raw(Box::new(NrModel {
            space: exp.space,
            bounds: exp.bounds,
            model: exp.model,
        }));
        Ok(())
    })
}

/// # Safety
/// `model` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nr_model_free(model: *mut NrModel) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Number of servers, or 0 for a NULL handle.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nr_model_servers(model: *const NrModel) -> usize {
    unsafe { model.as_ref() }.map_or(0, |m| m.space.n_servers())
}

/// Number of reservation vectors, or 0 for a NULL handle.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nr_model_action_count(model: *const NrModel) -> usize {
    unsafe { model.as_ref() }.map_or(0, |m| m.space.cardinality())
}

/// Exact bound on each cost component over all reservation and request pairs.
///
/// # Safety
/// `model` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nr_model_theta(model: *const NrModel, out: *mut f64) -> NrStatus {
    guard(|| {
        let m = unsafe { deref(model, "model") }?;
        let out = unsafe { deref_mut(out, "out") }?;
        *out = theta_bound(&m.space, &m.bounds, &m.model)?;
        Ok(())
    })
}

/// Writes the reservation vector with index `action` into `out[0..len]`,
/// where `len` must equal the number of servers.
///
/// # Safety
/// `model` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn nr_model_decode_action(
    model: *const NrModel,
    action: usize,
    out: *mut i64,
    len: usize,
) -> NrStatus {
    guard(|| {
        let m = unsafe { deref(model, "model") }?;
        let out = unsafe { slice_mut(out, len, "out") }?;
        if len != m.space.n_servers() {
            return Err(fail(NrStatus::InvalidArgument, "len must equal the number of servers"));
        }
        out.copy_from_slice(&m.space.decode(action)?.0);
        Ok(())
    })
}

fn vectors(
    m: &NrModel,
    reservation: &[i64],
    request: &[i64],
) -> Result<(ReservationVector, RequestVector), Failure> {
    let a = ReservationVector(reservation.to_vec());
    if !m.space.contains(&a) {
        return Err(Error::OutOfBounds { values: a.0 }.into());
    }
    if request.iter().any(|&b| b < 0) {
        return Err(Error::OutOfBounds { values: request.to_vec() }.into());
    }
    Ok((a, RequestVector(request.to_vec())))
}

/// Cost of reserving `reservation` when `request` arrives, with the optimal
/// job transfer. Both arrays hold `len` = number of servers entries.
///
/// # Safety
/// `model` must be a live handle, the arrays valid for `len` reads and `out`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nr_model_cost(
    model: *const NrModel,
    reservation: *const i64,
    request: *const i64,
    len: usize,
    out: *mut NrCost,
) -> NrStatus {
    guard(|| {
        let m = unsafe { deref(model, "model") }?;
        let a = unsafe { slice(reservation, len, "reservation") }?;
        let b = unsafe { slice(request, len, "request") }?;
        let out = unsafe { deref_mut(out, "out") }?;
        let (a, b) = vectors(m, a, b)?;
        let c = total_cost(&a, &b, &m.model);
        *out = NrCost {
            reservation: c.reservation,
            transfer: c.transfer,
            violation: c.violation,
            total: c.total,
        };
        Ok(())
    })
}

/// Optimal job transfer for `(reservation, request)`. The plan is written
/// row-major into `plan[0..len*len]` (`plan[i*len + j]` jobs from server `i`
/// to server `j`); `out.reservation` is left at zero.
///
/// # Safety
/// `model` must be a live handle, the vectors valid for `len` reads, `plan`
/// valid for `len * len` writes and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nr_solve_transfer(
    model: *const NrModel,
    reservation: *const i64,
    request: *const i64,
    len: usize,
    plan: *mut u32,
    out: *mut NrCost,
) -> NrStatus {
    guard(|| {
        let m = unsafe { deref(model, "model") }?;
        let a = unsafe { slice(reservation, len, "reservation") }?;
        let b = unsafe { slice(request, len, "request") }?;
        let plan = unsafe { slice_mut(plan, len * len, "plan") }?;
        let out = unsafe { deref_mut(out, "out") }?;
        if len != m.space.n_servers() {
            return Err(fail(NrStatus::InvalidArgument, "len must equal the number of servers"));
        }
        let (a, b) = vectors(m, a, b)?;
        let s = solve_transfer(&a, &b, &m.model);
        plan.copy_from_slice(s.plan.flattened());
        *out = NrCost {
            reservation: 0.0,
            transfer: s.transfer_cost,
            violation: s.violation_cost,
            total: s.objective,
        };
        Ok(())
    })
}

/// High-probability regret bound for horizon `horizon`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nr_regret_bound(
    horizon: usize,
    theta: f64,
    action_count: usize,
    delta: f64,
    out: *mut f64,
) -> NrStatus {
    guard(|| {
        let out = unsafe { deref_mut(out, "out") }?;
        *out = regret_bound(horizon, theta, action_count, delta)?;
        Ok(())
    })
}

/// Exponential weights over `action_count` actions with step size `eta` and
/// discount `discount` (1 for none).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nr_hedge_new(
    action_count: usize,
    eta: f64,
    discount: f64,
    out: *mut *mut NrHedge,
) -> NrStatus {
    guard(|| {
        let out = unsafe { deref_mut(out, "out") }?;
        let inner = ExpWeights::new(action_count, eta, discount)?;
        *out = Box::into_raw(Box::new(NrHedge { inner }));
        Ok(())
    })
}

/// # Safety
/// `hedge` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nr_hedge_free(hedge: *mut NrHedge) {
    if !hedge.is_null() {
        drop(unsafe { Box::from_raw(hedge) });
    }
}

/// Charges every action its cost for one slot.
///
/// # Safety
/// `hedge` must be a live handle and `costs` valid for `len` reads.
#[no_mangle]
pub unsafe extern "C" fn nr_hedge_update(hedge: *mut NrHedge, costs: *const f64, len: usize) -> NrStatus {
    guard(|| {
        let h = unsafe { deref_mut(hedge, "hedge") }?;
        let costs = unsafe { slice(costs, len, "costs") }?;
        h.inner.update(costs)?;
        Ok(())
    })
}

/// Writes the current action probabilities into `out[0..len]`.
///
/// # Safety
/// `hedge` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn nr_hedge_probabilities(hedge: *const NrHedge, out: *mut f64, len: usize) -> NrStatus {
    guard(|| {
        let h = unsafe { deref(hedge, "hedge") }?;
        let out = unsafe { slice_mut(out, len, "out") }?;
        copy_out(h.inner.distribution().probs(), out)
    })
}

/// Inverse-CDF draw for a caller-supplied uniform `u` in `[0, 1)`.
///
/// # Safety
/// `hedge` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nr_hedge_sample(hedge: *const NrHedge, u: f64, out: *mut usize) -> NrStatus {
    guard(|| {
        let h = unsafe { deref(hedge, "hedge") }?;
        let out = unsafe { deref_mut(out, "out") }?;
        if !(0.0..1.0).contains(&u) {
            return Err(fail(NrStatus::InvalidArgument, "u must lie in [0, 1)"));
        }
        *out = h.inner.distribution().quantile(u);
        Ok(())
    })
}

/// Softmax bandit over `action_count` actions.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nr_bandit_new(
    action_count: usize,
    beta: f64,
    tau: f64,
    q_init: f64,
    out: *mut *mut NrBandit,
) -> NrStatus {
    guard(|| {
        let out = unsafe { deref_mut(out, "out") }?;
        let inner = SoftmaxBandit::new(action_count, beta, tau, q_init)?;
        *out = Box::into_raw(Box::new(NrBandit { inner }));
        Ok(())
    })
}

/// # Safety
/// `bandit` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nr_bandit_free(bandit: *mut NrBandit) {
    if !bandit.is_null() {
        drop(unsafe { Box::from_raw(bandit) });
    }
}

/// Moves the value of `action` toward `reward`.
///
/// # Safety
/// `bandit` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn nr_bandit_update(bandit: *mut NrBandit, action: usize, reward: f64) -> NrStatus {
    guard(|| {
        let b = unsafe { deref_mut(bandit, "bandit") }?;
        b.inner.update(action, reward)?;
        Ok(())
    })
}

/// Writes the current action probabilities into `out[0..len]`.
///
/// # Safety
/// `bandit` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn nr_bandit_probabilities(bandit: *const NrBandit, out: *mut f64, len: usize) -> NrStatus {
    guard(|| {
        let b = unsafe { deref(bandit, "bandit") }?;
        let out = unsafe { slice_mut(out, len, "out") }?;
        copy_out(b.inner.distribution().probs(), out)
    })
}

/// Writes the value estimates into `out[0..len]`.
///
/// # Safety
/// `bandit` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn nr_bandit_values(bandit: *const NrBandit, out: *mut f64, len: usize) -> NrStatus {
    guard(|| {
        let b = unsafe { deref(bandit, "bandit") }?;
        let out = unsafe { slice_mut(out, len, "out") }?;
        copy_out(b.inner.q_values(), out)
    })
}

/// Runs every (policy, seed) pair of the config file at `path`, like
/// `netreserve run`. `seeds` (length `n_seeds`, may be NULL when zero) and
/// `outdir` (may be NULL) override the config.
///
/// # Safety
/// `path` and a non-NULL `outdir` must be NUL-terminated strings; `seeds`
/// must be valid for `n_seeds` reads.
#[no_mangle]
pub unsafe extern "C" fn nr_run_config_file(
    path: *const c_char,
    seeds: *const u64,
    n_seeds: usize,
    outdir: *const c_char,
) -> NrStatus {
    guard(|| {
        let path = PathBuf::from(unsafe { string(path, "path") }?);
        let seeds = unsafe { slice(seeds, n_seeds, "seeds") }?;
        let outdir = if outdir.is_null() {
            None
        } else {
            Some(PathBuf::from(unsafe { string(outdir, "outdir") }?))
        };
        cmd_run(&path, seeds, outdir.as_deref(), &mut std::io::sink())?;
        Ok(())
    })
}
