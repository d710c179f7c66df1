//! C ABI over `qme_core`.
//!
//! Every fallible function returns a [`QmeStatus`] and writes its results
//! through out-pointers. On failure the message is kept per thread and can
//! be read with [`qme_last_error_message`]. Objects with internal structure
//! are handed out as opaque pointers and must be released with the matching
//! `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qme_core::engine::{average_power, erasure_cost, Engine, EngineParams, Trajectory};
use qme_core::measurement::{kraus_pair, measure_ground_state, KrausFamily, MeasurementReport, Outcome};
use qme_core::meter::meter_budget;
use qme_core::numerics::{airy_ai_pair, airy_zero};
use qme_core::scenarios::{scenario, Overrides, ScenarioKind};
use qme_core::sweep::{find_epsilon_star, find_max_work_hard_window, find_zeno_zeta};
use qme_core::trap::{energy, TrapSpec};
use qme_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmeStatus {
    Ok = 0,
    Domain = 1,
    Quadrature = 2,
    Bracket = 3,
    Contract = 4,
    ImpossibleOutcome = 5,
    Config = 6,
    NullPointer = 7,
    OutOfRange = 8,
    Panic = 9,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QmeStatus {
    match e {
        Error::Domain(_) => QmeStatus::Domain,
        Error::Quadrature { .. } => QmeStatus::Quadrature,
        Error::Bracket { .. } => QmeStatus::Bracket,
        Error::Contract(_) => QmeStatus::Contract,
        Error::ImpossibleOutcome(_) => QmeStatus::ImpossibleOutcome,
        Error::Config(_) => QmeStatus::Config,
    }
}

struct Fail(QmeStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(QmeStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, translating errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> QmeStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => QmeStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            QmeStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn input<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message of the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qme_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmeFamily {
    Sine = 0,
    Hard = 1,
    Smooth = 2,
}

impl From<QmeFamily> for KrausFamily {
    fn from(f: QmeFamily) -> Self {
        match f {
            QmeFamily::Sine => KrausFamily::SineRamp,
            QmeFamily::Hard => KrausFamily::HardWindow,
            QmeFamily::Smooth => KrausFamily::SmoothC2,
        }
    }
}

impl From<KrausFamily> for QmeFamily {
    fn from(f: KrausFamily) -> Self {
        match f {
            KrausFamily::SineRamp => QmeFamily::Sine,
            KrausFamily::HardWindow => QmeFamily::Hard,
            KrausFamily::SmoothC2 => QmeFamily::Smooth,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmeOutcome {
    Inside = 0,
    Outside = 1,
}

/// Ai and Ai' at `z`.
///
/// # Safety
/// `ai` and `ai_prime` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qme_airy(z: f64, ai: *mut f64, ai_prime: *mut f64) -> QmeStatus {
    guard(|| {
        if !z.is_finite() {
            return Err(Fail(QmeStatus::Domain, format!("Airy argument {z} is not finite")));
        }
        let (a, ap) = airy_ai_pair(z);
        *out(ai, "ai")? = a;
        *out(ai_prime, "ai_prime")? = ap;
        Ok(())
    })
}

/// n-th zero of Ai, `n >= 1`.
///
/// # Safety
/// `zero` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qme_airy_zero(n: u32, zero: *mut f64) -> QmeStatus {
    guard(|| {
        *out(zero, "zero")? = airy_zero(n as usize)?;
        Ok(())
    })
}

/// Energy of level `n >= 1` with the wall at `u_wall`.
///
/// # Safety
/// `value` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qme_level_energy(u_wall: f64, n: u32, value: *mut f64) -> QmeStatus {
    guard(|| {
        *out(value, "value")? = energy(&TrapSpec::new(u_wall)?, n as usize)?;
        Ok(())
    })
}

/// Result of measuring the ground state. Opaque.
pub struct QmeMeasurement {
    report: MeasurementReport,
}

/// Scalar part of a measurement. Energies of impossible outcomes are NaN;
/// the hard window reports infinite heat and post-state energies.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmeMeasurementSummary {
    pub family: QmeFamily,
    pub epsilon: f64,
    pub w: f64,
    pub p_i: f64,
    pub p_o: f64,
    pub e_initial: f64,
    pub e_i: f64,
    pub e_o: f64,
    pub work: f64,
    pub heat: f64,
    pub efficiency: f64,
    pub heat_dumped: f64,
}

/// Measures the ground state of the trap with the wall at the origin.
///
/// # Safety
/// `handle` must be valid for writes. On success `*handle` owns a new
/// object to be released with [`qme_measurement_free`].
#[no_mangle]
pub unsafe extern "C" fn qme_measure_ground_state(
    family: QmeFamily,
    epsilon: f64,
    w: f64,
    handle: *mut *mut QmeMeasurement,
) -> QmeStatus {
    guard(|| {
        let slot = out(handle, "handle")?;
        let report = measure_ground_state(&kraus_pair(family.into(), epsilon, w)?)?;
        *slot = Box::into_raw(Box::new(QmeMeasurement { report }));
        Ok(())
    })
}

/// # Safety
/// `handle` must come from [`qme_measure_ground_state`]; `summary` must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qme_measurement_summary(
    handle: *const QmeMeasurement,
    summary: *mut QmeMeasurementSummary,
) -> QmeStatus {
    guard(|| {
        let r = &input(handle, "handle")?.report;
        *out(summary, "summary")? = QmeMeasurementSummary {
            family: r.kraus.family.into(),
            epsilon: r.kraus.epsilon,
            w: r.kraus.w,
            p_i: r.p_i,
            p_o: r.p_o,
            e_initial: r.e_initial,
            e_i: r.e_i.unwrap_or(f64::NAN),
            e_o: r.e_o.unwrap_or(f64::NAN),
            work: r.work,
            heat: r.heat,
            efficiency: r.efficiency,
            heat_dumped: r.heat_dumped,
        };
        Ok(())
    })
}

/// Post-measurement wavefunction of `outcome` at `u`.
///
/// # Safety
/// `handle` must come from [`qme_measure_ground_state`]; `value` must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qme_measurement_post_state(
    handle: *const QmeMeasurement,
    outcome: QmeOutcome,
    u: f64,
    value: *mut f64,
) -> QmeStatus {
    guard(|| {
        let r = &input(handle, "handle")?.report;
        let (state, label) = match outcome {
            QmeOutcome::Inside => (&r.post_i, Outcome::Inside.label()),
            QmeOutcome::Outside => (&r.post_o, Outcome::Outside.label()),
        };
        let state = state.as_ref().ok_or(Error::ImpossibleOutcome(label))?;
        *out(value, "value")? = state.value(u);
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or come from [`qme_measure_ground_state`], and must
/// not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qme_measurement_free(handle: *mut QmeMeasurement) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmeEngineParams {
    pub epsilon: f64,
    pub w: f64,
    pub family: QmeFamily,
    pub tau_i: f64,
    pub tau_o: f64,
    pub t_demon: f64,
}

impl From<QmeEngineParams> for EngineParams {
    fn from(p: QmeEngineParams) -> Self {
        EngineParams::new(p.epsilon, p.w, p.family.into())
            .with_durations(p.tau_i, p.tau_o)
            .with_demon_temperature(p.t_demon)
    }
}

/// Parameters with durations equal to `epsilon` (1 when it is 0) and a demon
/// at zero temperature.
#[no_mangle]
pub extern "C" fn qme_engine_params_default(epsilon: f64, w: f64, family: QmeFamily) -> QmeEngineParams {
    let p = EngineParams::new(epsilon, w, family.into());
    QmeEngineParams {
        epsilon,
        w,
        family,
        tau_i: p.tau_i,
        tau_o: p.tau_o,
        t_demon: p.t_demon,
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmeCycleRecord {
    pub index: u64,
    pub outcome: QmeOutcome,
    pub wall_before: f64,
    pub wall_after: f64,
    pub work: f64,
    pub quantum_heat_drawn: f64,
    pub heat_dumped: f64,
    pub erasure_cost: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmeTotals {
    pub work: f64,
    pub heat: f64,
    pub dumped: f64,
    pub wall_position: f64,
    pub elapsed_time: f64,
    pub successes: u64,
}

/// A simulated run. Opaque.
pub struct QmeTrajectory {
    inner: Trajectory,
}

/// Runs `n_cycles` cycles from `seed`; identical inputs give identical runs.
///
/// # Safety
/// `params` must be readable and `handle` valid for writes. On success
/// `*handle` must be released with [`qme_trajectory_free`].
#[no_mangle]
pub unsafe extern "C" fn qme_trajectory_run(
    params: *const QmeEngineParams,
    n_cycles: u64,
    seed: u64,
    handle: *mut *mut QmeTrajectory,
) -> QmeStatus {
    guard(|| {
        let params: EngineParams = (*input(params, "params")?).into();
        let slot = out(handle, "handle")?;
        let inner = Engine::new(params)?.run_stream(n_cycles, seed, 0)?;
        *slot = Box::into_raw(Box::new(QmeTrajectory { inner }));
        Ok(())
    })
}

/// Number of cycles, 0 for a null handle.
///
/// # Safety
/// `handle` must be null or come from [`qme_trajectory_run`].
#[no_mangle]
pub unsafe extern "C" fn qme_trajectory_len(handle: *const QmeTrajectory) -> u64 {
    handle.as_ref().map_or(0, |t| t.inner.records.len() as u64)
}

/// # Safety
/// `handle` must come from [`qme_trajectory_run`]; `record` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn qme_trajectory_record(
    handle: *const QmeTrajectory,
    index: u64,
    record: *mut QmeCycleRecord,
) -> QmeStatus {
    guard(|| {
        let t = &input(handle, "handle")?.inner;
        let r = usize::try_from(index)
            .ok()
            .and_then(|i| t.records.get(i))
            .ok_or_else(|| Fail(QmeStatus::OutOfRange, format!("cycle {index} of {}", t.records.len())))?;
        *out(record, "record")? = QmeCycleRecord {
            index: r.index,
            outcome: match r.outcome {
                Outcome::Inside => QmeOutcome::Inside,
                Outcome::Outside => QmeOutcome::Outside,
            },
            wall_before: r.wall_before,
            wall_after: r.wall_after,
            work: r.work,
            quantum_heat_drawn: r.quantum_heat_drawn,
            heat_dumped: r.heat_dumped,
            erasure_cost: r.erasure_cost,
        };
        Ok(())
    })
}

/// # Safety
/// `handle` must come from [`qme_trajectory_run`]; `totals` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn qme_trajectory_totals(handle: *const QmeTrajectory, totals: *mut QmeTotals) -> QmeStatus {
    guard(|| {
        let t = &input(handle, "handle")?.inner.totals;
        *out(totals, "totals")? = QmeTotals {
            work: t.work,
            heat: t.heat,
            dumped: t.dumped,
            wall_position: t.wall_position,
            elapsed_time: t.elapsed_time,
            successes: t.successes,
        };
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or come from [`qme_trajectory_run`], and must not
/// be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qme_trajectory_free(handle: *mut QmeTrajectory) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// # Safety
/// `params` must be readable; `power` and `velocity` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qme_average_power(
    params: *const QmeEngineParams,
    power: *mut f64,
    velocity: *mut f64,
) -> QmeStatus {
    guard(|| {
        let (p, v) = average_power(&(*input(params, "params")?).into())?;
        *out(power, "power")? = p;
        *out(velocity, "velocity")? = v;
        Ok(())
    })
}

/// # Safety
/// `value` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qme_erasure_cost(p_i: f64, p_o: f64, value: *mut f64) -> QmeStatus {
    guard(|| {
        *out(value, "value")? = erasure_cost(p_i, p_o)?;
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmeMeterBudget {
    pub omega_m: f64,
    pub w_m: f64,
    pub e_m: f64,
    pub q_q: f64,
    pub p_o: f64,
    pub reset_cost: f64,
}

/// # Safety
/// `budget` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qme_meter_budget(epsilon: f64, w: f64, budget: *mut QmeMeterBudget) -> QmeStatus {
    guard(|| {
        let slot = out(budget, "budget")?;
        let b = meter_budget(epsilon, w)?;
        *slot = QmeMeterBudget {
            omega_m: b.omega_m,
            w_m: b.w_m,
            e_m: b.e_m,
            q_q: b.q_q,
            p_o: b.p_o,
            reset_cost: b.reset_cost,
        };
        Ok(())
    })
}

/// Optimal `epsilon` of the gradual limit and its efficiency.
///
/// # Safety
/// Both pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qme_find_epsilon_star(epsilon: *mut f64, efficiency: *mut f64) -> QmeStatus {
    guard(|| {
        let (e, eta) = find_epsilon_star()?;
        *out(epsilon, "epsilon")? = e;
        *out(efficiency, "efficiency")? = eta;
        Ok(())
    })
}

/// # Safety
/// Both pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qme_find_max_work_hard_window(epsilon: *mut f64, work: *mut f64) -> QmeStatus {
    guard(|| {
        let (e, w) = find_max_work_hard_window()?;
        *out(epsilon, "epsilon")? = e;
        *out(work, "work")? = w;
        Ok(())
    })
}

/// Ratio `w / epsilon` maximizing the small-window efficiency.
///
/// # Safety
/// Both pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qme_find_zeno_zeta(zeta: *mut f64, efficiency: *mut f64) -> QmeStatus {
    guard(|| {
        let z = find_zeno_zeta()?;
        *out(zeta, "zeta")? = z.zeta;
        *out(efficiency, "efficiency")? = z.eta;
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmeScenarioKind {
    RbElevator = 0,
    NeutronMirror = 1,
    ElectronBattery = 2,
}

/// Parameter overrides; NaN leaves the default in place.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmeOverrides {
    pub mass: f64,
    pub field: f64,
    pub voltage: f64,
    pub gap: f64,
}

/// SI values. `gap` and `voltage` are NaN outside the battery.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmeScenario {
    pub kind: QmeScenarioKind,
    pub mass: f64,
    pub force: f64,
    pub x0: f64,
    pub energy_scale: f64,
    pub t_star: f64,
    pub gap: f64,
    pub voltage: f64,
}

/// # Safety
/// `overrides` must be null or readable; `result` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qme_scenario(
    kind: QmeScenarioKind,
    overrides: *const QmeOverrides,
    result: *mut QmeScenario,
) -> QmeStatus {
    guard(|| {
        let pick = |x: f64| if x.is_nan() { None } else { Some(x) };
        let o = match overrides.as_ref() {
            Some(o) => Overrides { mass: pick(o.mass), field: pick(o.field), voltage: pick(o.voltage), gap: pick(o.gap) },
            None => Overrides::default(),
        };
        let core_kind = match kind {
            QmeScenarioKind::RbElevator => ScenarioKind::RbElevator,
            QmeScenarioKind::NeutronMirror => ScenarioKind::NeutronMirror,
            QmeScenarioKind::ElectronBattery => ScenarioKind::ElectronBattery,
        };
        let slot = out(result, "result")?;
        let s = scenario(core_kind, o)?;
        *slot = QmeScenario {
            kind,
            mass: s.mass,
            force: s.force,
            x0: s.x0,
            energy_scale: s.energy_scale,
            t_star: s.t_star,
            gap: s.gap.unwrap_or(f64::NAN),
            voltage: s.voltage.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}
