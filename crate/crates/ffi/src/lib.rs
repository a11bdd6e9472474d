//! C ABI over `ma-secrecy`.
//!
//! Every fallible function returns an [`MsStatus`]. On failure a
//! description is available from [`ms_last_error_message`] on the same
//! thread. Objects are opaque handles released with their `_free`
//! function; strings returned by the library are released with
//! [`ms_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ma_secrecy::harness::BaseScenario;
use ma_secrecy::scenario::Dims;
use ma_secrecy::{
    bcd_solve, AntennaLayout, Beamformer, Error, PlacementConfig, Scenario, SolveReport, SolverConfig, C64,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Validation = 4,
    Infeasible = 5,
    Solver = 6,
    Invariant = 7,
    Io = 8,
    Panic = 9,
    BufferTooSmall = 10,
}

/// Problem instance.
pub struct MsScenario(Scenario);

/// Result of a solve.
pub struct MsReport(SolveReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> MsStatus {
    match e {
        Error::Argument(_) | Error::Config(_) => MsStatus::InvalidArgument,
        Error::Parse(_) => MsStatus::Parse,
        Error::Validation(_) => MsStatus::Validation,
        Error::Infeasible { .. } => MsStatus::Infeasible,
        Error::Invariant(_) => MsStatus::Invariant,
        Error::Solver(_) => MsStatus::Solver,
        Error::Io(_) => MsStatus::Io,
    }
}

struct Fail(MsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(MsStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MsStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MsStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn to_c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s).map(CString::into_raw).map_err(|_| Fail(MsStatus::InvalidArgument, "string contains NUL".into()))
}

/// Message of the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ms_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ms_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Draws a random instance.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ms_scenario_draw(
    users: usize,
    eves: usize,
    antennas: usize,
    snr_db: f64,
    region_side: f64,
    seed: u64,
    out: *mut *mut MsScenario,
) -> MsStatus {
    guard(|| {
        let base = BaseScenario { dims: Dims { users, eves, antennas }, snr_db, region_side };
        let s = base.draw(seed)?;
        write_out(out, Box::into_raw(Box::new(MsScenario(s))))
    })
}

/// Parses and validates a scenario from JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ms_scenario_from_json(json: *const c_char, out: *mut *mut MsScenario) -> MsStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|_| Fail(MsStatus::Parse, "json is not UTF-8".into()))?;
        let s = Scenario::from_json(text)?;
        write_out(out, Box::into_raw(Box::new(MsScenario(s))))
    })
}

/// Serializes a scenario. Free the result with [`ms_string_free`].
///
/// # Safety
/// `scenario` must come from this library; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ms_scenario_to_json(scenario: *const MsScenario, out: *mut *mut c_char) -> MsStatus {
    guard(|| {
        let s = as_ref(scenario, "scenario")?;
        write_out(out, to_c_string(s.0.to_json()?)?)
    })
}

/// Number of users, eavesdroppers and antennas.
///
/// # Safety
/// `scenario` must come from this library; the outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ms_scenario_dims(
    scenario: *const MsScenario,
    users: *mut usize,
    eves: *mut usize,
    antennas: *mut usize,
) -> MsStatus {
    guard(|| {
        let s = &as_ref(scenario, "scenario")?.0;
        write_out(users, s.num_users)?;
        write_out(eves, s.num_eves)?;
        write_out(antennas, s.num_antennas)
    })
}

/// # Safety
/// `scenario` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ms_scenario_free(scenario: *mut MsScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ms_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Runs the solver. `fixed_positions` selects the fixed-array baseline;
/// `grid_points` of 0 keeps the default grid.
///
/// # Safety
/// `scenario` must come from this library; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ms_solve(
    scenario: *const MsScenario,
    fixed_positions: bool,
    grid_points: usize,
    out: *mut *mut MsReport,
) -> MsStatus {
    guard(|| {
        let s = &as_ref(scenario, "scenario")?.0;
        let mut config = if fixed_positions { SolverConfig::fpa() } else { SolverConfig::default() };
        if grid_points != 0 {
            config.placement = PlacementConfig { grid_points, ..config.placement };
        }
        let report = bcd_solve(s, &config)?;
        write_out(out, Box::into_raw(Box::new(MsReport(report))))
    })
}

/// Sum secrecy rate of the reported solution, in bits/s/Hz.
///
/// # Safety
/// `report` must come from this library; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ms_report_sum_rate(report: *const MsReport, out: *mut f64) -> MsStatus {
    guard(|| write_out(out, as_ref(report, "report")?.0.sum_rate()))
}

/// # Safety
/// `report` must come from this library; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ms_report_iterations(report: *const MsReport, out: *mut usize) -> MsStatus {
    guard(|| write_out(out, as_ref(report, "report")?.0.iterations))
}

/// # Safety
/// `report` must come from this library; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ms_report_converged(report: *const MsReport, out: *mut bool) -> MsStatus {
    guard(|| write_out(out, as_ref(report, "report")?.0.converged))
}

/// Copies the per-iteration sum-rate trajectory into `buf`. `len` receives
/// the trajectory length; if it exceeds `cap` nothing is copied and
/// `MS_STATUS_BUFFER_TOO_SMALL` is returned. `buf` may be null when `cap` is 0.
///
/// # Safety
/// `buf` must be valid for `cap` writes; `len` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ms_report_trajectory(
    report: *const MsReport,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> MsStatus {
    guard(|| {
        let traj = &as_ref(report, "report")?.0.objective_trajectory;
        write_out(len, traj.len())?;
        if traj.len() > cap {
            return Err(Fail(
                MsStatus::BufferTooSmall,
                format!("trajectory has {} entries, buffer holds {cap}", traj.len()),
            ));
        }
        if !traj.is_empty() {
            if buf.is_null() {
                return Err(null("buf"));
            }
            ptr::copy_nonoverlapping(traj.as_ptr(), buf, traj.len());
        }
        Ok(())
    })
}

/// Antenna positions of the reported solution as `x0, y0, x1, y1, ...`.
/// `cap` counts doubles and must be at least twice the antenna count.
///
/// # Safety
/// `buf` must be valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn ms_report_positions(report: *const MsReport, buf: *mut f64, cap: usize) -> MsStatus {
    guard(|| {
        let pos = &as_ref(report, "report")?.0.final_layout.positions;
        if cap < 2 * pos.len() {
            return Err(Fail(MsStatus::BufferTooSmall, format!("need {} doubles", 2 * pos.len())));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(pos.as_ptr().cast::<f64>(), buf, 2 * pos.len());
        Ok(())
    })
}

/// Serializes the full report. Free the result with [`ms_string_free`].
///
/// # Safety
/// `report` must come from this library; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ms_report_to_json(report: *const MsReport, out: *mut *mut c_char) -> MsStatus {
    guard(|| {
        let r = as_ref(report, "report")?;
        let json = serde_json::to_string(&r.0).map_err(Error::from)?;
        write_out(out, to_c_string(json)?)
    })
}

/// # Safety
/// `report` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ms_report_free(report: *mut MsReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Sum secrecy rate of an arbitrary design.
///
/// `positions` holds `2 * antennas` doubles (`x0, y0, ...`). `beamformer`
/// holds `2 * antennas * users` doubles: user-major columns of interleaved
/// real and imaginary parts.
///
/// # Safety
/// Both arrays must hold the stated number of doubles.
#[no_mangle]
pub unsafe extern "C" fn ms_secrecy_rate(
    scenario: *const MsScenario,
    positions: *const f64,
    beamformer: *const f64,
    out: *mut f64,
) -> MsStatus {
    guard(|| {
        let s = &as_ref(scenario, "scenario")?.0;
        if positions.is_null() {
            return Err(null("positions"));
        }
        if beamformer.is_null() {
            return Err(null("beamformer"));
        }
        let (m, k) = (s.num_antennas, s.num_users);
        let pos = std::slice::from_raw_parts(positions, 2 * m);
        let layout = AntennaLayout::new(pos.chunks_exact(2).map(|p| [p[0], p[1]]).collect());
        let raw = std::slice::from_raw_parts(beamformer, 2 * m * k);
        let columns =
            raw.chunks_exact(2 * m).map(|col| col.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect()).collect();
        let rates = ma_secrecy::rates::sum_secrecy_rate(&Beamformer { columns }, &layout, s)?;
        write_out(out, rates.sum_secrecy_rate)
    })
}
