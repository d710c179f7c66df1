//! The three-stroke feedback cycle and its stochastic bookkeeping.
//!
//! Each cycle starts in the ground state of the current wall position:
//! measure, advance the wall by `epsilon` on outcome `o`, then relax to the
//! ground state. Relaxation is an ideal reset, so cycles are independent and
//! all per-outcome energies can be computed once, with the wall at the
//! origin (everything is translation covariant).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::measurement::{kraus_pair, measure_ground_state, KrausFamily, Outcome};
use crate::{Error, Result};

/// Reference coefficient of the small-window no-stop ascent estimate.
pub const ASCENT_COEFFICIENT: f64 = 0.327;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EngineParams {
    pub epsilon: f64,
    pub w: f64,
    pub family: KrausFamily,
    /// Cycle duration after outcome `i`.
    pub tau_i: f64,
    /// Cycle duration after outcome `o`.
    pub tau_o: f64,
    /// Demon memory temperature, in units of `hbar^2 / (2 m x0^2 k_B)`.
    pub t_demon: f64,
}

impl EngineParams {
    /// Durations default to `epsilon` (1 when `epsilon = 0`), demon at zero
    /// temperature.
    pub fn new(epsilon: f64, w: f64, family: KrausFamily) -> Self {
        let tau = if epsilon > 0.0 { epsilon } else { 1.0 };
        EngineParams {
            epsilon,
            w,
            family,
            tau_i: tau,
            tau_o: tau,
            t_demon: 0.0,
        }
    }

    pub fn with_durations(mut self, tau_i: f64, tau_o: f64) -> Self {
        self.tau_i = tau_i;
        self.tau_o = tau_o;
        self
    }

    pub fn with_demon_temperature(mut self, t_demon: f64) -> Self {
        self.t_demon = t_demon;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tau_i > 0.0 && self.tau_o > 0.0) {
            return Err(Error::Config(format!(
                "cycle durations must be positive (tau_i = {}, tau_o = {})",
                self.tau_i, self.tau_o
            )));
        }
        if !(self.t_demon >= 0.0) {
            return Err(Error::Config(format!("demon temperature must be >= 0, got {}", self.t_demon)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleRecord {
    pub index: u64,
    pub outcome: Outcome,
    pub wall_before: f64,
    pub wall_after: f64,
    pub work: f64,
    pub quantum_heat_drawn: f64,
    pub heat_dumped: f64,
    /// Landauer cost of the outcome memory, in units of `k_B T_D`.
    pub erasure_cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Totals {
    pub work: f64,
    pub heat: f64,
    pub dumped: f64,
    pub wall_position: f64,
    pub elapsed_time: f64,
    pub successes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub seed: u64,
    pub stream: u64,
    pub params: EngineParams,
    pub records: Vec<CycleRecord>,
    pub totals: Totals,
}

/// Per-outcome energetics of one measurement on the ground state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleStatistics {
    pub p_i: f64,
    pub p_o: f64,
    pub e_ground: f64,
    /// Energy of the post-measurement state; infinite for the hard window,
    /// zero-weighted when the outcome is impossible.
    pub e_i: f64,
    pub e_o: f64,
    pub work: f64,
    pub heat: f64,
}

/// Engine with its measurement statistics precomputed.
#[derive(Debug, Clone)]
pub struct Engine {
    params: EngineParams,
    stats: CycleStatistics,
    dumped_i: f64,
    dumped_o: f64,
    erasure: f64,
}

impl Engine {
    pub fn new(params: EngineParams) -> Result<Self> {
        params.validate()?;
        let k = kraus_pair(params.family, params.epsilon, params.w)?;
        let report = measure_ground_state(&k)?;
        let e_ground = report.e_initial;
        let stats = CycleStatistics {
            p_i: report.p_i,
            p_o: report.p_o,
            e_ground,
            e_i: report.e_i.unwrap_or(e_ground),
            e_o: report.e_o.unwrap_or(e_ground + params.epsilon),
            work: report.work,
            heat: report.heat,
        };
        Ok(Engine {
            params,
            dumped_i: stats.e_i - e_ground,
            // the new ground state sits epsilon higher
            dumped_o: stats.e_o - (e_ground + params.epsilon),
            erasure: erasure_cost(stats.p_i.clamp(0.0, 1.0), stats.p_o.clamp(0.0, 1.0))?,
            stats,
        })
    }

    pub fn params(&self) -> &EngineParams {
        &self.params
    }

    pub fn statistics(&self) -> &CycleStatistics {
        &self.stats
    }

    /// One measure / feedback / relax cycle starting with the wall after
    /// `successes` advances.
    pub fn run_cycle(&self, index: u64, successes: u64, rng: &mut impl Rng) -> CycleRecord {
        let outcome = if rng.random::<f64>() < self.stats.p_o {
            Outcome::Outside
        } else {
            Outcome::Inside
        };
        let eps = self.params.epsilon;
        let wall_before = eps * successes as f64;
        let (wall_after, work, heat_dumped) = match outcome {
            Outcome::Outside => (eps * (successes + 1) as f64, eps, self.dumped_o),
            Outcome::Inside => (wall_before, 0.0, self.dumped_i),
        };
        CycleRecord {
            index,
            outcome,
            wall_before,
            wall_after,
            work,
            quantum_heat_drawn: work + heat_dumped,
            heat_dumped,
            erasure_cost: self.erasure,
        }
    }

    /// `n_cycles` cycles drawn from ChaCha8 stream `stream` of `seed`.
    pub fn run_stream(&self, n_cycles: u64, seed: u64, stream: u64) -> Result<Trajectory> {
        if n_cycles == 0 {
            return Err(Error::Config("a trajectory needs at least one cycle".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut records = Vec::with_capacity(n_cycles as usize);
        let mut successes = 0;
        for index in 0..n_cycles {
            let record = self.run_cycle(index, successes, &mut rng);
            if record.outcome == Outcome::Outside {
                successes += 1;
            }
            records.push(record);
        }
        let mut totals = Totals {
            work: 0.0,
            heat: 0.0,
            dumped: 0.0,
            wall_position: 0.0,
            elapsed_time: 0.0,
            successes,
        };
        for r in &records {
            totals.work += r.work;
            totals.heat += r.quantum_heat_drawn;
            totals.dumped += r.heat_dumped;
            totals.elapsed_time += match r.outcome {
                Outcome::Outside => self.params.tau_o,
                Outcome::Inside => self.params.tau_i,
            };
        }
        totals.wall_position = records.last().map_or(0.0, |r| r.wall_after);
        Ok(Trajectory {
            seed,
            stream,
            params: self.params,
            records,
            totals,
        })
    }

    /// `(power, mean_velocity)` from the analytic outcome probabilities.
    pub fn average_power(&self) -> (f64, f64) {
        let p = &self.stats;
        let eps = self.params.epsilon;
        if p.p_o == 0.0 {
            return (0.0, 0.0);
        }
        let tau = p.p_o * self.params.tau_o + p.p_i * self.params.tau_i;
        // unit force: power and velocity coincide in these units
        (eps * p.p_o / tau, p.p_o * eps / tau)
    }
}

pub fn run_cycle(params: &EngineParams, rng: &mut impl Rng) -> Result<CycleRecord> {
    Ok(Engine::new(*params)?.run_cycle(0, 0, rng))
}

/// Deterministic in `seed`; uses stream 0.
pub fn run_trajectory(params: &EngineParams, n_cycles: u64, seed: u64) -> Result<Trajectory> {
    Engine::new(*params)?.run_stream(n_cycles, seed, 0)
}

/// Independent trajectories on streams `0..n_trajectories`, run in parallel
/// and returned in stream order.
pub fn run_ensemble(params: &EngineParams, n_trajectories: u64, n_cycles: u64, seed: u64) -> Result<Vec<Trajectory>> {
    let engine = Engine::new(*params)?;
    (0..n_trajectories)
        .into_par_iter()
        .map(|stream| engine.run_stream(n_cycles, seed, stream))
        .collect()
}

pub fn average_power(params: &EngineParams) -> Result<(f64, f64)> {
    Ok(Engine::new(*params)?.average_power())
}

/// `-(p_i ln p_i + p_o ln p_o)` with `0 ln 0 = 0`, in units of `k_B T_D`.
pub fn erasure_cost(p_i: f64, p_o: f64) -> Result<f64> {
    let valid = |p: f64| (0.0..=1.0).contains(&p);
    if !valid(p_i) || !valid(p_o) || (p_i + p_o - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("({p_i}, {p_o}) is not a probability distribution")));
    }
    let term = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    Ok(term(p_i) + term(p_o))
}

/// Mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    fn from_samples(samples: impl Iterator<Item = f64> + Clone) -> Self {
        let n = samples.clone().count() as f64;
        let mean = samples.clone().sum::<f64>() / n;
        let var = if n > 1.0 {
            samples.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Estimate { mean, std_error: (var / n).sqrt() }
    }

    /// `|mean - target|` in standard errors; zero-variance samples compare
    /// exactly.
    pub fn sigmas_from(&self, target: f64) -> f64 {
        let gap = (self.mean - target).abs();
        if self.std_error > 0.0 {
            gap / self.std_error
        } else if gap <= 1e-12 * target.abs().max(1.0) {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectorySummary {
    pub n_cycles: u64,
    pub seed: u64,
    pub success_rate: Estimate,
    pub work: Estimate,
    pub heat_drawn: Estimate,
    pub heat_dumped: Estimate,
    pub analytic: CycleStatistics,
    pub totals: Totals,
    /// Per cycle, units of `k_B T_D`.
    pub erasure_cost: f64,
    /// `t_demon * erasure_cost`, in energy units.
    pub erasure_energy: f64,
    pub power: f64,
    pub mean_velocity: f64,
    pub empirical_power: f64,
    /// Largest `|drawn - work - dumped|` over the records.
    pub energy_balance_residual: f64,
}

pub fn summarize(engine: &Engine, trajectory: &Trajectory) -> TrajectorySummary {
    let records = &trajectory.records;
    let success = records.iter().map(|r| if r.outcome == Outcome::Outside { 1.0 } else { 0.0 });
    let residual = records
        .iter()
        .map(|r| (r.quantum_heat_drawn - r.work - r.heat_dumped).abs())
        .filter(|x| !x.is_nan())
        .fold(0.0, f64::max);
    let (power, mean_velocity) = engine.average_power();
    let erasure = engine.erasure;
    TrajectorySummary {
        n_cycles: records.len() as u64,
        seed: trajectory.seed,
        success_rate: Estimate::from_samples(success),
        work: Estimate::from_samples(records.iter().map(|r| r.work)),
        heat_drawn: Estimate::from_samples(records.iter().map(|r| r.quantum_heat_drawn)),
        heat_dumped: Estimate::from_samples(records.iter().map(|r| r.heat_dumped)),
        analytic: engine.stats,
        totals: trajectory.totals,
        erasure_cost: erasure,
        erasure_energy: erasure * engine.params.t_demon,
        power,
        mean_velocity,
        empirical_power: trajectory.totals.work / trajectory.totals.elapsed_time,
        energy_balance_residual: residual,
    }
}

/// `(p_o^N, exp[-(0.327 / N^2) (N eps)^3])`: probability of `N` consecutive
/// successes and the reference small-window estimate with `L = N eps`.
/// `w = 0` selects the hard window.
pub fn ascent_success_probability(epsilon: f64, w: f64, n_floors: u32) -> Result<(f64, f64)> {
    if n_floors == 0 {
        return Err(Error::Domain("need at least one floor".into()));
    }
    let family = if w == 0.0 { KrausFamily::HardWindow } else { KrausFamily::SineRamp };
    let report = measure_ground_state(&kraus_pair(family, epsilon, w)?)?;
    let n = n_floors as f64;
    let height = n * epsilon;
    Ok((
        report.p_o.powf(n),
        (-(ASCENT_COEFFICIENT / (n * n)) * height.powi(3)).exp(),
    ))
}

/// Fits `p_i = c eps^3 + c2 eps^5` for the sine ramp with `w = zeta eps`
/// (hard window for `zeta = 0`) over small windows and returns `c`.
/// The no-stop probability over `N` floors of a building of height `L` is
/// then `exp(-(c / N^2) (L/x0)^3)` as `N -> inf`.
pub fn failure_coefficient(zeta: f64) -> Result<f64> {
    let samples = [0.01, 0.02, 0.04];
    let mut rows = Vec::with_capacity(samples.len());
    for eps in samples {
        let family = if zeta == 0.0 { KrausFamily::HardWindow } else { KrausFamily::SineRamp };
        let report = measure_ground_state(&kraus_pair(family, eps, zeta * eps)?)?;
        rows.push((eps * eps, report.p_i / eps.powi(3)));
    }
    // least squares line in eps^2
    let n = rows.len() as f64;
    let sx: f64 = rows.iter().map(|r| r.0).sum();
    let sy: f64 = rows.iter().map(|r| r.1).sum();
    let sxx: f64 = rows.iter().map(|r| r.0 * r.0).sum();
    let sxy: f64 = rows.iter().map(|r| r.0 * r.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Ok((sy - slope * sx) / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::kraus_sine_ramp;
    use std::f64::consts::PI;

    const EPS_STAR: f64 = 1.100_389;

    #[test]
    fn erasure_values() {
        assert!((erasure_cost(0.5, 0.5).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(erasure_cost(1.0, 0.0).unwrap(), 0.0);
        let direct = -(0.941f64 * 0.941f64.ln() + 0.059 * 0.059f64.ln());
        assert!((erasure_cost(0.941, 0.059).unwrap() - direct).abs() < 1e-15);
        assert!((direct - 0.224).abs() < 1e-3);
        assert!(erasure_cost(0.7, 0.7).is_err());
        assert!(erasure_cost(-0.1, 1.1).is_err());
    }

    #[test]
    fn zero_window_never_does_work() {
        let params = EngineParams::new(0.0, 0.5, KrausFamily::SineRamp);
        let t = run_trajectory(&params, 10_000, 3).unwrap();
        assert!(t.records.iter().all(|r| r.work == 0.0 && r.wall_after == 0.0));
        let engine = Engine::new(params).unwrap();
        let empirical = t.totals.successes as f64 / 10_000.0;
        let p = engine.statistics().p_o;
        assert!((empirical - p).abs() < 4.0 * (p * (1.0 - p) / 1e4).sqrt());
    }

    #[test]
    fn ledger_closes_per_record() {
        let params = EngineParams::new(0.5, 0.5, KrausFamily::SineRamp);
        let t = run_trajectory(&params, 50_000, 11).unwrap();
        for r in &t.records {
            assert_eq!(r.quantum_heat_drawn, r.work + r.heat_dumped);
            let step = r.wall_after - r.wall_before;
            assert!(step == 0.0 || (step - 0.5).abs() < 1e-9);
        }
        let sum: f64 = t.records.iter().map(|r| r.work).sum();
        assert_eq!(sum, t.totals.work);
        assert!((t.totals.wall_position - 0.5 * t.totals.successes as f64).abs() < 1e-9);
    }

    #[test]
    fn deterministic_in_seed_and_streams_differ() {
        let params = EngineParams::new(EPS_STAR, 5.0, KrausFamily::SineRamp);
        let a = run_trajectory(&params, 2_000, 42).unwrap();
        let b = run_trajectory(&params, 2_000, 42).unwrap();
        assert_eq!(a, b);
        let ens = run_ensemble(&params, 3, 2_000, 42).unwrap();
        assert_eq!(ens[0].records, a.records);
        assert_ne!(ens[1].records, ens[2].records);
    }

    #[test]
    fn ensemble_means_match_analytics() {
        for (eps, w) in [(0.5, 0.5), (2.0, 1.0)] {
            let params = EngineParams::new(eps, w, KrausFamily::SineRamp);
            let engine = Engine::new(params).unwrap();
            let t = engine.run_stream(200_000, 7, 0).unwrap();
            let s = summarize(&engine, &t);
            assert!(s.success_rate.sigmas_from(s.analytic.p_o) < 3.0);
            assert!(s.work.sigmas_from(s.analytic.work) < 3.0);
            assert!(s.heat_drawn.sigmas_from(s.analytic.heat) < 3.0);
            assert_eq!(s.energy_balance_residual, 0.0);
        }
    }

    #[test]
    fn power_identities() {
        let params = EngineParams::new(1.0, 2.0, KrausFamily::SineRamp).with_durations(0.3, 0.9);
        let (power, velocity) = average_power(&params).unwrap();
        assert_eq!(power - velocity * 1.0, 0.0);
        let engine = Engine::new(params).unwrap();
        let p = engine.statistics();
        assert!((power - p.work / (p.p_o * 0.9 + p.p_i * 0.3)).abs() < 1e-15);
        // unreachable window
        let far = EngineParams::new(60.0, 1.0, KrausFamily::SineRamp);
        assert_eq!(average_power(&far).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn zeno_velocity_stays_finite() {
        let mut velocities = Vec::new();
        for eps in [0.1, 0.03, 0.01] {
            let params = EngineParams::new(eps, 3f64.sqrt() * eps, KrausFamily::SineRamp);
            velocities.push(average_power(&params).unwrap().1);
        }
        // durations equal epsilon, so v -> p_o -> 1
        assert!(velocities.iter().all(|v| (v - 1.0).abs() < 0.05));
        assert!((velocities[2] - 1.0).abs() < (velocities[0] - 1.0).abs());
    }

    #[test]
    fn rejects_bad_params() {
        let p = EngineParams::new(1.0, 1.0, KrausFamily::SineRamp).with_durations(0.0, 1.0);
        assert!(matches!(Engine::new(p), Err(Error::Config(_))));
        let p = EngineParams::new(1.0, 1.0, KrausFamily::SineRamp);
        assert!(run_trajectory(&p, 0, 0).is_err());
    }

    #[test]
    fn erasure_small_against_work_for_cold_demon() {
        let params = EngineParams::new(EPS_STAR, 5.0, KrausFamily::SineRamp).with_demon_temperature(0.01);
        let engine = Engine::new(params).unwrap();
        let t = engine.run_stream(1000, 1, 0).unwrap();
        let s = summarize(&engine, &t);
        assert!(s.erasure_cost <= 2f64.ln());
        assert!(s.erasure_energy < 0.1 * s.analytic.work);
    }

    #[test]
    fn ascent_probabilities() {
        let (exact, estimate) = ascent_success_probability(40.0, 0.0, 1).unwrap();
        assert!(exact < 1e-12 && estimate < 1e-12);
        // L = 10, N = 100
        let (_, estimate) = ascent_success_probability(0.1, 3f64.sqrt() * 0.1, 100).unwrap();
        assert!((estimate - (-0.0327f64).exp()).abs() < 1e-12);
        assert!((estimate - 0.968).abs() < 1e-3);
        assert!(ascent_success_probability(0.1, 0.1, 0).is_err());
    }

    /// `p_i / eps^3` as `eps -> 0` from `phi_1(u) ~ u`: `1/3` from the window
    /// plus `zeta int_0^1 cos^2(pi t / 2) (1 + zeta t)^2 dt` from the ramp.
    fn analytic_failure_coefficient(zeta: f64) -> f64 {
        let pi2 = PI * PI;
        1.0 / 3.0 + zeta * (0.5 + 2.0 * zeta * (0.25 - 1.0 / pi2) + zeta * zeta * (1.0 / 6.0 - 1.0 / pi2))
    }

    #[test]
    fn failure_coefficient_matches_small_window_analysis() {
        for zeta in [0.0, 1.0 / 3f64.sqrt(), 3f64.sqrt()] {
            let fitted = failure_coefficient(zeta).unwrap();
            let expected = analytic_failure_coefficient(zeta);
            assert!(((fitted - expected) / expected).abs() < 1e-3, "zeta={zeta}: {fitted} vs {expected}");
        }
    }

    #[test]
    fn exact_ascent_approaches_fitted_estimate() {
        let zeta = 3f64.sqrt();
        let c = failure_coefficient(zeta).unwrap();
        let height: f64 = 4.0;
        let mut last_gap = f64::INFINITY;
        for n in [20u32, 40, 80] {
            let eps = height / n as f64;
            let (exact, _) = ascent_success_probability(eps, zeta * eps, n).unwrap();
            let fitted = (-(c / (n as f64).powi(2)) * height.powi(3)).exp();
            let gap = ((exact - fitted) / fitted).abs();
            assert!(gap < last_gap);
            last_gap = gap;
        }
        assert!(last_gap < 0.01);
    }

    #[test]
    fn hard_window_engine_carries_infinite_heat() {
        let params = EngineParams::new(1.18, 0.0, KrausFamily::HardWindow);
        let engine = Engine::new(params).unwrap();
        assert!(engine.statistics().heat.is_infinite());
        let t = engine.run_stream(1000, 5, 0).unwrap();
        assert!((t.totals.work / 1000.0 - 0.8).abs() < 0.1);
        let record = run_cycle(&params, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(record.heat_dumped.is_infinite());
        let _ = kraus_sine_ramp;
    }
}
