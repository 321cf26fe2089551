//! C ABI over `seiarb`.
//!
//! Every fallible function returns a [`SeiarbStatus`]; on failure the
//! message is available from [`seiarb_last_error_message`] on the same
//! thread. Handles are opaque and must be released with the matching
//! `_free` function. Panics are caught at the boundary and reported as
//! `SEIARB_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use seiarb::cea::{analyze, CeaAnalysis};
use seiarb::config::RunConfig;
use seiarb::metrics::OutcomeSummary;
use seiarb::model::compute_r0;
use seiarb::runner::{parse_records, solve_baseline, solve_strategy, StrategyOutcome};
use seiarb::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeiarbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Numeric = 4,
    Cea = 5,
    BufferTooSmall = 6,
    Io = 7,
    Panic = 8,
}

/// Loaded and validated run configuration.
pub struct SeiarbConfig {
    inner: RunConfig,
}

/// One solved strategy with its outcome summary.
pub struct SeiarbSolution {
    inner: StrategyOutcome,
}

/// Per-scenario and overall cost-effectiveness analysis.
pub struct SeiarbCeaReport {
    inner: CeaAnalysis,
}

/// Plain-data copy of a strategy's outcome. `time_to_efficacy_1` is negative
/// when the efficacy curves never saturate.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SeiarbSummary {
    pub strategy_id: u32,
    pub infections_averted: f64,
    pub total_cost: f64,
    pub recoveries: f64,
    pub objective_j: f64,
    pub peak_i: f64,
    pub time_to_efficacy_1: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl From<&OutcomeSummary> for SeiarbSummary {
    fn from(s: &OutcomeSummary) -> Self {
        Self {
            strategy_id: s.strategy_id.unwrap_or(0),
            infections_averted: s.infections_averted,
            total_cost: s.total_cost,
            recoveries: s.recoveries,
            objective_j: s.objective_j,
            peak_i: s.peak_i,
            time_to_efficacy_1: s.time_to_efficacy_1.unwrap_or(-1.0),
            converged: s.converged,
            iterations: s.iterations,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(err: &Error) -> SeiarbStatus {
    match err {
        Error::Config { .. } => SeiarbStatus::Config,
        Error::Cea(_) | Error::Records { .. } | Error::Csv(_) => SeiarbStatus::Cea,
        Error::Io(_) => SeiarbStatus::Io,
        _ => SeiarbStatus::Numeric,
    }
}

fn fail(status: SeiarbStatus, message: impl Into<String>) -> SeiarbStatus {
    set_error(message);
    status
}

fn guard<F: FnOnce() -> Result<(), SeiarbStatus>>(f: F) -> SeiarbStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SeiarbStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(SeiarbStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: seiarb::Result<T>) -> Result<T, SeiarbStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, SeiarbStatus> {
    if s.is_null() {
        return Err(fail(SeiarbStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(SeiarbStatus::InvalidUtf8, "argument is not valid UTF-8"))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, SeiarbStatus> {
    p.as_ref()
        .ok_or_else(|| fail(SeiarbStatus::NullPointer, format!("null {what} handle")))
}

fn out_ptr<T>(p: *mut T) -> Result<(), SeiarbStatus> {
    if p.is_null() {
        Err(fail(SeiarbStatus::NullPointer, "null output pointer"))
    } else {
        Ok(())
    }
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn seiarb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Built-in default configuration.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn seiarb_config_default(out: *mut *mut SeiarbConfig) -> SeiarbStatus {
    guard(|| {
        out_ptr(out)?;
        let inner = RunConfig::default();
        *out = Box::into_raw(Box::new(SeiarbConfig { inner }));
        Ok(())
    })
}

/// Parses and validates a TOML configuration.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` as in
/// [`seiarb_config_default`].
#[no_mangle]
pub unsafe extern "C" fn seiarb_config_from_toml(
    toml: *const c_char,
    out: *mut *mut SeiarbConfig,
) -> SeiarbStatus {
    guard(|| {
        out_ptr(out)?;
        let inner = lift(RunConfig::from_toml_str(text(toml)?))?;
        lift(inner.validate())?;
        *out = Box::into_raw(Box::new(SeiarbConfig { inner }));
        Ok(())
    })
}

/// # Safety
/// `config` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn seiarb_config_free(config: *mut SeiarbConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Basic reproduction number of the configured parameters.
///
/// # Safety
/// `config` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn seiarb_config_r0(config: *const SeiarbConfig, out: *mut f64) -> SeiarbStatus {
    guard(|| {
        let c = handle(config, "config")?;
        out_ptr(out)?;
        *out = lift(compute_r0(&c.inner.params))?;
        Ok(())
    })
}

/// Solves the zero-control baseline and strategy `strategy_id` (1-14).
///
/// # Safety
/// `config` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn seiarb_solve_strategy(
    config: *const SeiarbConfig,
    strategy_id: u32,
    out: *mut *mut SeiarbSolution,
) -> SeiarbStatus {
    guard(|| {
        let c = handle(config, "config")?;
        out_ptr(out)?;
        let baseline = lift(solve_baseline(&c.inner))?;
        let inner = lift(solve_strategy(&c.inner, strategy_id, &baseline))?;
        *out = Box::into_raw(Box::new(SeiarbSolution { inner }));
        Ok(())
    })
}

/// # Safety
/// `solution` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn seiarb_solution_free(solution: *mut SeiarbSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Number of grid nodes, or 0 for a NULL handle.
///
/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn seiarb_solution_len(solution: *const SeiarbSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.inner.solution.len())
}

/// # Safety
/// `solution` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn seiarb_solution_summary(
    solution: *const SeiarbSolution,
    out: *mut SeiarbSummary,
) -> SeiarbStatus {
    guard(|| {
        let s = handle(solution, "solution")?;
        out_ptr(out)?;
        *out = SeiarbSummary::from(&s.inner.summary);
        Ok(())
    })
}

unsafe fn copy_rows<const N: usize>(
    rows: impl ExactSizeIterator<Item = [f64; N]>,
    buf: *mut f64,
    capacity: usize,
) -> Result<(), SeiarbStatus> {
    let needed = rows.len() * N;
    if capacity < needed {
        return Err(fail(
            SeiarbStatus::BufferTooSmall,
            format!("buffer holds {capacity} values, {needed} needed"),
        ));
    }
    out_ptr(buf)?;
    let dst = std::slice::from_raw_parts_mut(buf, needed);
    for (chunk, row) in dst.chunks_exact_mut(N).zip(rows) {
        chunk.copy_from_slice(&row);
    }
    Ok(())
}

/// Copies states row-major as `len * 6` values (S, E, I, A, R, B per node).
///
/// # Safety
/// `buf` must point to `capacity` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn seiarb_solution_states(
    solution: *const SeiarbSolution,
    buf: *mut f64,
    capacity: usize,
) -> SeiarbStatus {
    guard(|| {
        let s = handle(solution, "solution")?;
        copy_rows(s.inner.solution.states.iter().map(|x| x.to_array()), buf, capacity)
    })
}

/// Copies controls row-major as `len * 4` values (u1..u4 per node).
///
/// # Safety
/// `buf` must point to `capacity` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn seiarb_solution_controls(
    solution: *const SeiarbSolution,
    buf: *mut f64,
    capacity: usize,
) -> SeiarbStatus {
    guard(|| {
        let s = handle(solution, "solution")?;
        copy_rows(s.inner.solution.controls.iter().map(|u| u.to_array()), buf, capacity)
    })
}

/// Runs the per-scenario and overall eliminations on CSV text with header
/// `strategy_id,infections_averted,cost,recoveries`.
///
/// # Safety
/// `csv` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn seiarb_cea_replay_csv(
    csv: *const c_char,
    out: *mut *mut SeiarbCeaReport,
) -> SeiarbStatus {
    guard(|| {
        out_ptr(out)?;
        let records = lift(parse_records(text(csv)?.as_bytes(), Path::new("<input>")))?;
        let inner = lift(analyze(&records))?;
        *out = Box::into_raw(Box::new(SeiarbCeaReport { inner }));
        Ok(())
    })
}

/// Overall winning strategy id.
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn seiarb_cea_winner(report: *const SeiarbCeaReport, out: *mut u32) -> SeiarbStatus {
    guard(|| {
        let r = handle(report, "report")?;
        out_ptr(out)?;
        *out = r.inner.overall.winner;
        Ok(())
    })
}

/// Full report as JSON. Release with [`seiarb_string_free`].
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn seiarb_cea_to_json(
    report: *const SeiarbCeaReport,
    out: *mut *mut c_char,
) -> SeiarbStatus {
    guard(|| {
        let r = handle(report, "report")?;
        out_ptr(out)?;
        let json = lift(serde_json::to_string(&r.inner).map_err(Error::from))?;
        *out = CString::new(json)
            .map_err(|_| fail(SeiarbStatus::Cea, "report contains NUL"))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `report` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn seiarb_cea_free(report: *mut SeiarbCeaReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn seiarb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
