//! Spin-1/2 meter model of the sine-ramp measurement.
//!
//! An impulsive coupling rotates the meter spin by an angle `f(u)` that
//! depends on the particle position, so reading the spin realizes the Kraus
//! pair `(cos f, sin f)`. The meter only ever enters through that pair and
//! through the post-measurement energies.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::measurement::{kraus_sine_ramp, measure_ground_state, Outcome};
use crate::{Error, Result};

/// Rotation angle induced on the meter, `0` below `epsilon`, rising linearly
/// to `pi/2` at `epsilon + w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingProfile {
    epsilon: f64,
    w: f64,
}

pub fn coupling_profile(epsilon: f64, w: f64) -> Result<CouplingProfile> {
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::Contract(format!("coupling ramp width must be positive and finite, got {w}")));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::Domain(format!("epsilon must be >= 0, got {epsilon}")));
    }
    Ok(CouplingProfile { epsilon, w })
}

impl CouplingProfile {
    pub fn angle(&self, u: f64) -> f64 {
        if u <= self.epsilon {
            0.0
        } else if u >= self.epsilon + self.w {
            FRAC_PI_2
        } else {
            FRAC_PI_2 * (u - self.epsilon) / self.w
        }
    }

    /// Amplitude for reading the meter in the state tied to `outcome`.
    pub fn kraus(&self, outcome: Outcome, u: f64) -> f64 {
        let f = self.angle(u);
        match outcome {
            Outcome::Inside if f == FRAC_PI_2 => 0.0,
            Outcome::Inside => f.cos(),
            Outcome::Outside if f == FRAC_PI_2 => 1.0,
            Outcome::Outside => f.sin(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeterBudget {
    /// Meter splitting `E_o - E_i`.
    pub omega_m: f64,
    /// Interaction work `E_i - E_1`.
    pub w_m: f64,
    /// Mean energy released by the meter, `p_o (E_o - E_i)`.
    pub e_m: f64,
    pub q_q: f64,
    pub p_o: f64,
    /// Energy needed to reset the spin after each `o` reading.
    pub reset_cost: f64,
}

impl MeterBudget {
    pub fn closure_residual(&self) -> f64 {
        self.q_q - (self.w_m + self.e_m)
    }

    /// Energy spent resetting the meter over `n_outside` successful cycles.
    pub fn cumulative_reset(&self, n_outside: u64) -> f64 {
        n_outside as f64 * self.reset_cost
    }
}

pub fn meter_budget(epsilon: f64, w: f64) -> Result<MeterBudget> {
    coupling_profile(epsilon, w)?;
    let report = measure_ground_state(&kraus_sine_ramp(epsilon, w)?)?;
    let (Some(e_i), Some(e_o)) = (report.e_i, report.e_o) else {
        return Err(Error::ImpossibleOutcome(if report.e_o.is_none() { 'o' } else { 'i' }));
    };
    let omega_m = e_o - e_i;
    Ok(MeterBudget {
        omega_m,
        w_m: e_i - report.e_initial,
        e_m: report.p_o * omega_m,
        q_q: report.heat,
        p_o: report.p_o,
        reset_cost: omega_m,
    })
}
