//! Physical-unit numbers for concrete realizations of the engine.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::numerics::airy_zero;
use crate::{Error, Result};

/// CODATA 2018.
pub mod constants {
    pub const HBAR: f64 = 1.054_571_817e-34;
    pub const K_B: f64 = 1.380_649e-23;
    pub const E_CHARGE: f64 = 1.602_176_634e-19;
    pub const M_ELECTRON: f64 = 9.109_383_701_5e-31;
    pub const M_NEUTRON: f64 = 1.674_927_498_04e-27;
    pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
    /// Standard gravity.
    pub const G_N: f64 = 9.806_65;
}

use constants::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    RbElevator,
    NeutronMirror,
    ElectronBattery,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::RbElevator => "rb_elevator",
            ScenarioKind::NeutronMirror => "neutron_mirror",
            ScenarioKind::ElectronBattery => "electron_battery",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rb_elevator" => Ok(ScenarioKind::RbElevator),
            "neutron_mirror" => Ok(ScenarioKind::NeutronMirror),
            "electron_battery" => Ok(ScenarioKind::ElectronBattery),
            other => Err(Error::Config(format!(
                "unknown scenario '{other}' (expected rb_elevator, neutron_mirror or electron_battery)"
            ))),
        }
    }
}

/// Optional replacements for the default parameters. `field` is the
/// gravitational acceleration (m/s^2) for the elevator and mirror, and
/// the electric field (V/m) for the battery.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub mass: Option<f64>,
    pub field: Option<f64>,
    pub voltage: Option<f64>,
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalScenario {
    pub kind: ScenarioKind,
    /// kg
    pub mass: f64,
    /// N
    pub force: f64,
    /// m
    pub x0: f64,
    /// J, `hbar^2 / (2 m x0^2)`, equal to `force * x0`.
    pub energy_scale: f64,
    /// K, first excitation gap over `k_B`.
    pub t_star: f64,
    /// m, battery plate separation.
    pub gap: Option<f64>,
    /// V, battery voltage.
    pub voltage: Option<f64>,
}

fn positive(label: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Config(format!("{label} must be positive, got {x}")))
    }
}

pub fn scenario(kind: ScenarioKind, overrides: Overrides) -> Result<PhysicalScenario> {
    let (mass, force, gap, voltage) = match kind {
        ScenarioKind::RbElevator | ScenarioKind::NeutronMirror => {
            if overrides.voltage.is_some() || overrides.gap.is_some() {
                return Err(Error::Config(format!("{kind} takes no voltage or gap")));
            }
            let default_mass = if kind == ScenarioKind::RbElevator { 87.0 * ATOMIC_MASS_UNIT } else { M_NEUTRON };
            let mass = positive("mass", overrides.mass.unwrap_or(default_mass))?;
            let g = positive("field", overrides.field.unwrap_or(G_N))?;
            (mass, mass * g, None, None)
        }
        ScenarioKind::ElectronBattery => {
            let mass = positive("mass", overrides.mass.unwrap_or(M_ELECTRON))?;
            let gap = positive("gap", overrides.gap.unwrap_or(0.01))?;
            let (field, voltage) = match (overrides.field, overrides.voltage) {
                (Some(_), Some(_)) => {
                    return Err(Error::Config("give either a field or a voltage for the battery, not both".into()))
                }
                (Some(field), None) => (positive("field", field)?, field * gap),
                (None, v) => {
                    let v = positive("voltage", v.unwrap_or(1.0))?;
                    (v / gap, v)
                }
            };
            (mass, E_CHARGE * field, Some(gap), Some(voltage))
        }
    };
    let x0 = (HBAR * HBAR / (2.0 * mass * force)).cbrt();
    let energy_scale = HBAR * HBAR / (2.0 * mass * x0 * x0);
    let gap_12 = airy_zero(1)? - airy_zero(2)?;
    Ok(PhysicalScenario {
        kind,
        mass,
        force,
        x0,
        energy_scale,
        t_star: gap_12 * energy_scale / K_B,
        gap,
        voltage,
    })
}

pub fn scenario_by_name(name: &str, overrides: Overrides) -> Result<PhysicalScenario> {
    scenario(name.parse()?, overrides)
}

impl PhysicalScenario {
    pub fn to_joules(&self, tilde_energy: f64) -> f64 {
        tilde_energy * self.energy_scale
    }

    pub fn from_joules(&self, joules: f64) -> f64 {
        joules / self.energy_scale
    }

    /// Energy gained from one successful cycle, `epsilon x0` against the force.
    pub fn work_per_success(&self, epsilon: f64) -> f64 {
        self.to_joules(epsilon)
    }

    /// Energy stored by carrying the particle across the whole battery gap.
    pub fn stored_energy(&self) -> Option<f64> {
        self.gap.map(|l| self.force * l)
    }
}

/// Force times velocity, in watts.
pub fn physical_power(s: &PhysicalScenario, velocity: f64) -> Result<f64> {
    if !(velocity >= 0.0) {
        return Err(Error::Domain(format!("velocity must be >= 0, got {velocity}")));
    }
    Ok(s.force * velocity)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default(kind: ScenarioKind) -> PhysicalScenario {
        scenario(kind, Overrides::default()).unwrap()
    }

    #[test]
    fn energy_scale_is_force_times_length() {
        for kind in [ScenarioKind::RbElevator, ScenarioKind::NeutronMirror, ScenarioKind::ElectronBattery] {
            let s = default(kind);
            assert!(((s.energy_scale - s.force * s.x0) / s.energy_scale).abs() < 1e-12);
            assert!(s.x0 > 0.0 && s.t_star > 0.0);
        }
    }

    #[test]
    fn known_magnitudes() {
        let n = default(ScenarioKind::NeutronMirror);
        assert!((n.x0 - 5.87e-6).abs() < 0.01e-6);
        assert!((n.t_star - 12.2e-9).abs() < 0.1e-9);
        let e = default(ScenarioKind::ElectronBattery);
        assert!((e.x0 - 72.5e-9).abs() < 0.2e-9);
        assert!((e.t_star - 0.147).abs() < 0.002);
        let rb = default(ScenarioKind::RbElevator);
        assert!((rb.x0 - 0.30e-6).abs() < 0.01e-6);
        // 87^(1/3) * 12.2 nK
        assert!((rb.t_star - 54.0e-9).abs() < 0.2e-9);
    }

    #[test]
    fn mass_scaling() {
        let light = scenario(ScenarioKind::RbElevator, Overrides { mass: Some(ATOMIC_MASS_UNIT), ..Default::default() }).unwrap();
        let rb = default(ScenarioKind::RbElevator);
        let ratio: f64 = 87.0;
        assert!((light.x0 / rb.x0 - ratio.powf(2.0 / 3.0)).abs() < 1e-10);
        assert!((rb.t_star / light.t_star - ratio.cbrt()).abs() < 1e-10);
    }

    #[test]
    fn battery_storage_and_power() {
        let e = default(ScenarioKind::ElectronBattery);
        let stored_ev = e.stored_energy().unwrap() / E_CHARGE;
        assert!((stored_ev - 1.0).abs() < 1e-12);
        assert_eq!(physical_power(&e, 0.0).unwrap(), 0.0);
        let rb = default(ScenarioKind::RbElevator);
        let p = physical_power(&rb, 1e-6).unwrap();
        assert!((p - 87.0 * ATOMIC_MASS_UNIT * G_N * 1e-6).abs() < 1e-12 * p);
        assert!(physical_power(&rb, -1.0).is_err());
        let via_field = scenario(ScenarioKind::ElectronBattery, Overrides { field: Some(100.0), ..Default::default() }).unwrap();
        assert!((via_field.x0 - e.x0).abs() < 1e-20);
        assert_eq!(via_field.voltage, Some(1.0));
    }

    #[test]
    fn round_trip_units() {
        let s = default(ScenarioKind::NeutronMirror);
        for w in [0.065, 0.8, 1e-4] {
            assert!(((s.from_joules(s.to_joules(w)) - w) / w).abs() < 1e-12);
        }
    }

    #[test]
    fn names_and_errors() {
        assert!(matches!(scenario_by_name("muon_elevator", Overrides::default()), Err(Error::Config(_))));
        assert_eq!(scenario_by_name("rb_elevator", Overrides::default()).unwrap().kind.name(), "rb_elevator");
        let bad = Overrides { gap: Some(1.0), ..Default::default() };
        assert!(scenario(ScenarioKind::NeutronMirror, bad).is_err());
        let both = Overrides { field: Some(1.0), voltage: Some(1.0), ..Default::default() };
        assert!(scenario(ScenarioKind::ElectronBattery, both).is_err());
    }
}
