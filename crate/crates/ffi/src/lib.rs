//! C ABI over the `wardsim` simulator.
//!
//! Simulations are exposed as opaque handles created by
//! [`ws_simulation_new`] and released by [`ws_simulation_free`]. Every
//! fallible call returns a [`WsStatus`]; the message for the most recent
//! failure on the calling thread is available from [`ws_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use wardsim::experiments::{enumerate_combos, run_experiment, ExperimentPlan};
use wardsim::io::{write_results_file, write_summary_file};
use wardsim::{
    AttributionCounters, CleaningPolicy, CleaningSchedule, ConfigError, Error, Grid, Parameters,
    Scenario, SimConfig, SimulationState, SurfaceKind,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameters = 2,
    InvalidConfig = 3,
    UnknownExperiment = 4,
    Io = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsPolicy {
    None = 0,
    Total = 1,
    Random = 2,
}

/// Model parameters, field for field.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WsParameters {
    pub a_r: f64,
    pub a_s: f64,
    pub a_c: f64,
    pub a_d: f64,
    pub k_r: f64,
    pub k_s: f64,
    pub k_c: f64,
    pub k_d: f64,
    pub p_rs: f64,
    pub p_sc: f64,
    pub p_sd: f64,
    pub p_cd: f64,
    pub p_cr: f64,
    pub p_dr: f64,
    pub p_ds: f64,
    pub p_death: f64,
    pub p_ic: f64,
    pub p_id: f64,
    pub p_ht: f64,
    pub p_lt: f64,
    pub shed_c: f64,
    pub shed_d: f64,
    pub min_stay_r: u32,
    pub min_stay_s: u32,
    pub min_stay_c: u32,
    pub min_stay_d: u32,
    pub initial_patients: u32,
    pub admissions_per_tick: u32,
    pub capacity: u32,
}

impl From<&Parameters> for WsParameters {
    fn from(p: &Parameters) -> Self {
        WsParameters {
            a_r: p.a_r,
            a_s: p.a_s,
            a_c: p.a_c,
            a_d: p.a_d,
            k_r: p.k_r,
            k_s: p.k_s,
            k_c: p.k_c,
            k_d: p.k_d,
            p_rs: p.p_rs,
            p_sc: p.p_sc,
            p_sd: p.p_sd,
            p_cd: p.p_cd,
            p_cr: p.p_cr,
            p_dr: p.p_dr,
            p_ds: p.p_ds,
            p_death: p.p_death,
            p_ic: p.p_ic,
            p_id: p.p_id,
            p_ht: p.p_ht,
            p_lt: p.p_lt,
            shed_c: p.shed_c,
            shed_d: p.shed_d,
            min_stay_r: p.min_stay_r,
            min_stay_s: p.min_stay_s,
            min_stay_c: p.min_stay_c,
            min_stay_d: p.min_stay_d,
            initial_patients: p.initial_patients,
            admissions_per_tick: p.admissions_per_tick,
            capacity: p.capacity,
        }
    }
}

impl From<&WsParameters> for Parameters {
    fn from(p: &WsParameters) -> Self {
        Parameters {
            a_r: p.a_r,
            a_s: p.a_s,
            a_c: p.a_c,
            a_d: p.a_d,
            k_r: p.k_r,
            k_s: p.k_s,
            k_c: p.k_c,
            k_d: p.k_d,
            p_rs: p.p_rs,
            p_sc: p.p_sc,
            p_sd: p.p_sd,
            p_cd: p.p_cd,
            p_cr: p.p_cr,
            p_dr: p.p_dr,
            p_ds: p.p_ds,
            p_death: p.p_death,
            p_ic: p.p_ic,
            p_id: p.p_id,
            p_ht: p.p_ht,
            p_lt: p.p_lt,
            shed_c: p.shed_c,
            shed_d: p.shed_d,
            min_stay_r: p.min_stay_r,
            min_stay_s: p.min_stay_s,
            min_stay_c: p.min_stay_c,
            min_stay_d: p.min_stay_d,
            initial_patients: p.initial_patients,
            admissions_per_tick: p.admissions_per_tick,
            capacity: p.capacity,
        }
    }
}

/// Intervention settings. `policy` takes a `WsPolicy` value.
/// Interval/rate fields are ignored for `WS_POLICY_NONE`; `random_count`
/// only applies to `WS_POLICY_RANDOM`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WsScenario {
    pub direct_infection: bool,
    pub policy: u32,
    pub ht_interval: u32,
    pub ht_rate: f64,
    pub lt_interval: u32,
    pub lt_rate: f64,
    pub random_count: u32,
}

impl TryFrom<&WsScenario> for Scenario {
    type Error = u32;

    fn try_from(s: &WsScenario) -> Result<Self, u32> {
        let schedule = CleaningSchedule {
            ht_interval: s.ht_interval,
            ht_rate: s.ht_rate,
            lt_interval: s.lt_interval,
            lt_rate: s.lt_rate,
        };
        let cleaning = match s.policy {
            p if p == WsPolicy::None as u32 => CleaningPolicy::None,
            p if p == WsPolicy::Total as u32 => CleaningPolicy::Total(schedule),
            p if p == WsPolicy::Random as u32 => CleaningPolicy::Random {
                schedule,
                count_per_type: s.random_count,
            },
            other => return Err(other),
        };
        Ok(Scenario {
            direct_infection: s.direct_infection,
            cleaning,
        })
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WsCounters {
    pub infected_by_ht: u64,
    pub infected_by_lt: u64,
    pub infected_by_colonized: u64,
    pub infected_by_diseased: u64,
    pub admissions: u64,
    pub discharges: u64,
    pub deaths: u64,
    pub spontaneous_colonizations: u64,
}

impl From<&AttributionCounters> for WsCounters {
    fn from(c: &AttributionCounters) -> Self {
        WsCounters {
            infected_by_ht: c.infected_by_ht,
            infected_by_lt: c.infected_by_lt,
            infected_by_colonized: c.infected_by_colonized,
            infected_by_diseased: c.infected_by_diseased,
            admissions: c.admissions,
            discharges: c.discharges,
            deaths: c.deaths,
            spontaneous_colonizations: c.spontaneous_colonizations,
        }
    }
}

/// Opaque simulation handle.
pub struct WsSimulation {
    config: SimConfig,
    state: SimulationState,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: WsStatus, msg: impl Into<String>) -> WsStatus {
    set_error(msg);
    status
}

fn status_of(err: &Error) -> WsStatus {
    match err {
        Error::Param(_) | Error::Replica { .. } => WsStatus::InvalidParameters,
        Error::Config(ConfigError::UnknownExperiment(_)) => WsStatus::UnknownExperiment,
        Error::Config(ConfigError::Param(_)) => WsStatus::InvalidParameters,
        Error::Config(_) => WsStatus::InvalidConfig,
        Error::Io { .. } | Error::Csv(_) => WsStatus::Io,
        _ => WsStatus::InvalidConfig,
    }
}

fn guard(f: impl FnOnce() -> WsStatus) -> WsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(WsStatus::Panic, "internal panic"),
    }
}

fn build_config(
    params: *const WsParameters,
    scenario: *const WsScenario,
    seed: u64,
    horizon: u32,
) -> Result<SimConfig, WsStatus> {
    let params = if params.is_null() {
        Parameters::default()
    } else {
        // SAFETY: non-null pointers are required to reference a valid struct.
        Parameters::from(unsafe { &*params })
    };
    let scenario = if scenario.is_null() {
        Scenario::default()
    } else {
        // SAFETY: as above.
        Scenario::try_from(unsafe { &*scenario })
            .map_err(|p| fail(WsStatus::InvalidConfig, format!("unknown policy {p}")))?
    };
    let params = params
        .validate()
        .map_err(|e| fail(WsStatus::InvalidParameters, e.to_string()))?;
    let cleaning = scenario
        .cleaning
        .validate()
        .map_err(|e| fail(WsStatus::InvalidConfig, e.to_string()))?;
    Ok(SimConfig {
        params,
        scenario: Scenario {
            cleaning,
            ..scenario
        },
        seed,
        horizon,
    })
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ws_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ws_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Fills `out` with the default model parameters.
///
/// # Safety
/// `out` must be NULL or point to writable memory for one `WsParameters`.
#[no_mangle]
pub unsafe extern "C" fn ws_parameters_default(out: *mut WsParameters) -> WsStatus {
    if out.is_null() {
        return fail(WsStatus::NullPointer, "out is null");
    }
    out.write(WsParameters::from(&Parameters::default()));
    WsStatus::Ok
}

/// Checks a parameter set without running anything.
///
/// # Safety
/// `params` must be NULL or point to a valid `WsParameters`.
#[no_mangle]
pub unsafe extern "C" fn ws_parameters_validate(params: *const WsParameters) -> WsStatus {
    if params.is_null() {
        return fail(WsStatus::NullPointer, "params is null");
    }
    match Parameters::from(&*params).validate() {
        Ok(_) => WsStatus::Ok,
        Err(e) => fail(WsStatus::InvalidParameters, e.to_string()),
    }
}

/// Creates a simulation at tick 0 with its initial cohort admitted. NULL
/// `params` or `scenario` select the defaults (no cleaning, no direct
/// contact).
///
/// # Safety
/// `params`/`scenario` must be NULL or valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_simulation_new(
    params: *const WsParameters,
    scenario: *const WsScenario,
    seed: u64,
    horizon: u32,
    out: *mut *mut WsSimulation,
) -> WsStatus {
    if out.is_null() {
        return fail(WsStatus::NullPointer, "out is null");
    }
    guard(|| match build_config(params, scenario, seed, horizon) {
        Ok(config) => {
            let state = SimulationState::initialize(&config);
            out.write(Box::into_raw(Box::new(WsSimulation { config, state })));
            WsStatus::Ok
        }
        Err(status) => status,
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `sim` must be NULL or a handle from `ws_simulation_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ws_simulation_free(sim: *mut WsSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Advances by up to `ticks` ticks, stopping at the configured horizon.
/// Writes the number of ticks actually run to `advanced` when non-NULL.
///
/// # Safety
/// `sim` must be a live handle; `advanced` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn ws_simulation_step(
    sim: *mut WsSimulation,
    ticks: u32,
    advanced: *mut u32,
) -> WsStatus {
    let Some(sim) = sim.as_mut() else {
        return fail(WsStatus::NullPointer, "sim is null");
    };
    guard(|| {
        let remaining = u64::from(sim.config.horizon).saturating_sub(sim.state.tick);
        let n = u64::from(ticks).min(remaining) as u32;
        for _ in 0..n {
            sim.state.step(&sim.config);
        }
        if !advanced.is_null() {
            advanced.write(n);
        }
        WsStatus::Ok
    })
}

/// Runs the simulation to its horizon.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ws_simulation_run(sim: *mut WsSimulation) -> WsStatus {
    ws_simulation_step(sim, u32::MAX, ptr::null_mut())
}

/// Current tick, or 0 for NULL.
///
/// # Safety
/// `sim` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ws_simulation_tick(sim: *const WsSimulation) -> u64 {
    sim.as_ref().map_or(0, |s| s.state.tick)
}

/// Number of patients on the ward, or 0 for NULL.
///
/// # Safety
/// `sim` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ws_simulation_population(sim: *const WsSimulation) -> u32 {
    sim.as_ref().map_or(0, |s| s.state.population() as u32)
}

/// Writes patient counts per state (resistant, susceptible, colonized,
/// diseased) into `out[0..4]`.
///
/// # Safety
/// `sim` must be a live handle; `out` must have room for 4 values.
#[no_mangle]
pub unsafe extern "C" fn ws_simulation_state_counts(
    sim: *const WsSimulation,
    out: *mut u32,
) -> WsStatus {
    let (Some(sim), false) = (sim.as_ref(), out.is_null()) else {
        return fail(WsStatus::NullPointer, "null argument");
    };
    for (i, n) in sim.state.count_by_state().into_iter().enumerate() {
        out.add(i).write(n as u32);
    }
    WsStatus::Ok
}

/// Total contamination over all high-touch (`high_touch` true) or low-touch
/// surfaces. Returns a negative value for NULL.
///
/// # Safety
/// `sim` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ws_simulation_contamination(
    sim: *const WsSimulation,
    high_touch: bool,
) -> f64 {
    let kind = if high_touch {
        SurfaceKind::HighTouch
    } else {
        SurfaceKind::LowTouch
    };
    sim.as_ref()
        .map_or(-1.0, |s| s.state.grid.total_contamination(kind))
}

/// Copies the attribution and flow counters.
///
/// # Safety
/// `sim` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ws_simulation_counters(
    sim: *const WsSimulation,
    out: *mut WsCounters,
) -> WsStatus {
    let (Some(sim), false) = (sim.as_ref(), out.is_null()) else {
        return fail(WsStatus::NullPointer, "null argument");
    };
    out.write(WsCounters::from(&sim.state.counters));
    WsStatus::Ok
}

/// One-shot replica: create, run to `horizon`, report counters.
///
/// # Safety
/// Same pointer rules as `ws_simulation_new`; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ws_run_replica(
    params: *const WsParameters,
    scenario: *const WsScenario,
    seed: u64,
    horizon: u32,
    out: *mut WsCounters,
) -> WsStatus {
    if out.is_null() {
        return fail(WsStatus::NullPointer, "out is null");
    }
    guard(|| match build_config(params, scenario, seed, horizon) {
        Ok(config) => match wardsim::run_replica(&config) {
            Ok(r) => {
                out.write(WsCounters::from(&r.counters));
                WsStatus::Ok
            }
            Err(e) => fail(WsStatus::InvalidParameters, e.to_string()),
        },
        Err(status) => status,
    })
}

/// Number of combinations in factorial experiment 1, 2 or 3.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_experiment_combo_count(experiment_id: u32, out: *mut u32) -> WsStatus {
    if out.is_null() {
        return fail(WsStatus::NullPointer, "out is null");
    }
    match enumerate_combos(experiment_id) {
        Ok(c) => {
            out.write(c.len() as u32);
            WsStatus::Ok
        }
        Err(e) => fail(WsStatus::UnknownExperiment, e.to_string()),
    }
}

unsafe fn path_arg<'a>(p: *const c_char, name: &str) -> Result<&'a Path, WsStatus> {
    if p.is_null() {
        return Err(fail(WsStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Path::new)
        .map_err(|_| fail(WsStatus::InvalidConfig, format!("{name} is not UTF-8")))
}

/// Runs experiment 1, 2 or 3 (0 for all three) with default parameters and
/// writes the results and summary CSV files.
///
/// # Safety
/// Both paths must be valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn ws_experiment_run(
    experiment_id: u32,
    replicas: u32,
    base_seed: u64,
    horizon: u32,
    parallelism: u32,
    results_path: *const c_char,
    summary_path: *const c_char,
) -> WsStatus {
    let (results_path, summary_path) = match (
        path_arg(results_path, "results_path"),
        path_arg(summary_path, "summary_path"),
    ) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(s), _) | (_, Err(s)) => return s,
    };
    guard(|| {
        let ids: Vec<u32> = if experiment_id == 0 {
            vec![1, 2, 3]
        } else {
            vec![experiment_id]
        };
        let run = || -> Result<(), Error> {
            let plan = ExperimentPlan::for_experiments(&ids, replicas, base_seed, horizon)?;
            let out = run_experiment(&plan, parallelism as usize)?;
            write_results_file(&out.results, results_path)?;
            write_summary_file(&out.summaries, summary_path)?;
            Ok(())
        };
        match run() {
            Ok(()) => WsStatus::Ok,
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Copies the text layout (30 lines of 30 glyphs, `\n`-terminated, plus a
/// trailing NUL) into `buf`. With a NULL or short buffer, writes the
/// required size to `needed` and returns `WS_STATUS_BUFFER_TOO_SMALL`.
///
/// # Safety
/// `buf` must be NULL or hold `len` writable bytes; `needed` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn ws_layout_render(buf: *mut c_char, len: usize, needed: *mut usize) -> WsStatus {
    let text = Grid::generate_layout().render();
    let required = text.len() + 1;
    if !needed.is_null() {
        needed.write(required);
    }
    if buf.is_null() || len < required {
        return fail(WsStatus::BufferTooSmall, format!("need {required} bytes"));
    }
    ptr::copy_nonoverlapping(text.as_ptr().cast::<c_char>(), buf, text.len());
    buf.add(text.len()).write(0);
    WsStatus::Ok
}
