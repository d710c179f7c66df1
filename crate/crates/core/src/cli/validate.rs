//! Invariant checks over the standard parameter grids.

use std::fmt;

use serde::Serialize;

use crate::engine::{erasure_cost, EngineParams, Engine, summarize};
use crate::measurement::{kraus_pair, measure, measure_ground_state, quantum_heat_closed_form, KrausFamily, Outcome};
use crate::meter::meter_budget;
use crate::trap::{eigenstate, TrapSpec};
use crate::Result;

const EPS_GRID: [f64; 5] = [0.0, 0.3, 1.1, 2.0, 3.0];
const W_GRID: [f64; 4] = [0.05, 0.5, 5.0, 17.0];
const FAMILIES: [KrausFamily; 3] = [KrausFamily::SineRamp, KrausFamily::SmoothC2, KrausFamily::HardWindow];
const COMPLETENESS_POINTS: usize = 10_000;

/// Deliberate defects for exercising the failure path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Perturbs `M_i` by 1e-9 before the completeness sum.
    Completeness,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Worst deviation seen, in the check's own measure.
    pub worst: f64,
    pub limit: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<4} {:<28} worst {:>10.3e}  limit {:>9.1e}  {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.worst,
                c.limit,
                c.detail
            )?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        writeln!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

/// Keeps the largest value, treating NaN as a failure.
fn worst(acc: f64, x: f64) -> f64 {
    if x.is_nan() || acc.is_nan() {
        f64::NAN
    } else {
        acc.max(x)
    }
}

fn check(name: &'static str, worst: f64, limit: f64, detail: String) -> Check {
    Check { name, passed: worst <= limit, worst, limit, detail }
}

fn grid() -> impl Iterator<Item = (f64, f64)> {
    EPS_GRID.into_iter().flat_map(|e| W_GRID.into_iter().map(move |w| (e, w)))
}

fn completeness(fault: Option<Fault>) -> Result<Check> {
    let offset = if fault == Some(Fault::Completeness) { 1e-9 } else { 0.0 };
    let mut dev: f64 = 0.0;
    for family in FAMILIES {
        for (eps, w) in grid() {
            let k = kraus_pair(family, eps, w)?;
            let span = eps + w + 2.0;
            for j in 0..COMPLETENESS_POINTS {
                let u = span * j as f64 / (COMPLETENESS_POINTS - 1) as f64;
                let m_i = k.m_i(u) + offset;
                dev = worst(dev, (m_i * m_i + k.m_o(u).powi(2) - 1.0).abs());
            }
        }
    }
    Ok(check(
        "completeness",
        dev,
        1e-12,
        format!("max |m_i^2 + m_o^2 - 1| over {COMPLETENESS_POINTS} points x 3 families x 20 windows"),
    ))
}

pub fn run_validation(fault: Option<Fault>) -> Result<ValidationReport> {
    let mut checks = vec![completeness(fault)?];

    let mut prob: f64 = 0.0;
    let mut eta_excess: f64 = f64::NEG_INFINITY;
    let mut neg_heat: f64 = f64::NEG_INFINITY;
    let mut entropy_excess: f64 = f64::NEG_INFINITY;
    let mut two_route: f64 = 0.0;
    for family in FAMILIES {
        for (eps, w) in grid() {
            let r = measure_ground_state(&kraus_pair(family, eps, w)?)?;
            prob = worst(prob, (r.p_i + r.p_o - 1.0).abs());
            eta_excess = worst(eta_excess, r.efficiency - 1.0);
            neg_heat = worst(neg_heat, -r.heat);
            let s = erasure_cost(r.p_i.clamp(0.0, 1.0), r.p_o.clamp(0.0, 1.0))?;
            entropy_excess = worst(entropy_excess, s - 2f64.ln());
            if family == KrausFamily::SineRamp {
                let closed = quantum_heat_closed_form(eps, w)?;
                two_route = worst(two_route, ((r.heat - closed) / closed).abs());
            }
        }
    }
    checks.push(check("probability conservation", prob, 1e-10, "max |p_i + p_o - 1|".into()));
    checks.push(check("efficiency bound", eta_excess, 1e-9, "max (eta - 1)".into()));
    checks.push(check("heat non-negative", neg_heat, 0.0, "max (-Q)".into()));
    checks.push(check("erasure bound", entropy_excess, 0.0, "max (S - ln 2)".into()));
    checks.push(check(
        "heat two routes",
        two_route,
        1e-8,
        "max relative |Q(energies) - Q(closed form)|, sine ramp".into(),
    ));

    let mut covariance: f64 = 0.0;
    for u0 in [1.1, -3.0] {
        let spec = TrapSpec::new(u0)?;
        let psi = eigenstate(&spec, 1)?;
        for family in [KrausFamily::SineRamp, KrausFamily::SmoothC2] {
            for (eps, w) in [(0.3, 0.5), (1.1, 5.0)] {
                let k = kraus_pair(family, eps, w)?;
                let base = measure_ground_state(&k)?;
                let moved = measure(&k.anchored_at(u0), &psi, &spec)?;
                for (a, b) in [
                    (base.p_o, moved.p_o),
                    (base.heat, moved.heat),
                    (base.work, moved.work),
                    (base.e_initial + u0, moved.e_initial),
                ] {
                    covariance = worst(covariance, (a - b).abs());
                }
            }
        }
    }
    checks.push(check(
        "translation covariance",
        covariance,
        1e-9,
        "max shift in (p_o, Q, W, E_1 - u_wall) for walls 1.1 and -3".into(),
    ));

    let mut budget: f64 = 0.0;
    for (eps, w) in grid().filter(|p| p.0 > 0.0) {
        budget = worst(budget, meter_budget(eps, w)?.closure_residual().abs());
    }
    checks.push(check("meter budget", budget, 1e-10, "max |Q - W_M - E_M|".into()));

    let engine = Engine::new(EngineParams::new(1.1, 5.0, KrausFamily::SineRamp))?;
    let t = engine.run_stream(10_000, 0, 0)?;
    let s = summarize(&engine, &t);
    let wall_gap = (t.totals.wall_position - 1.1 * t.totals.successes as f64).abs();
    let n_o = t.records.iter().filter(|r| r.outcome == Outcome::Outside).count() as u64;
    checks.push(check(
        "ledger closure",
        worst(s.energy_balance_residual, wall_gap),
        1e-9,
        format!("10^4 cycles, {n_o} advances"),
    ));

    Ok(ValidationReport { checks })
}
