//! Bound states of the linear potential `V(u) = u` behind a hard wall.
//!
//! The `n`-th eigenstate with the wall at `c` is
//! `Ai(u - c + a_n) / Ai'(a_n)` for `u > c`, which is already normalized
//! because `int_0^inf Ai(u + a_n)^2 du = Ai'(a_n)^2`. Its energy is
//! `|a_n| + c`.

use std::fmt;
use std::sync::Arc;

use crate::numerics::{airy_ai_pair, airy_zero, integrate, Interval};
use crate::{Error, Result};

/// Absolute tolerance for energy-type integrals.
pub const ENERGY_TOL: f64 = 1e-11;
/// Absolute tolerance for probability-type integrals.
pub const PROBABILITY_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapSpec {
    pub u_wall: f64,
}

impl TrapSpec {
    pub fn new(u_wall: f64) -> Result<Self> {
        if !u_wall.is_finite() {
            return Err(Error::Domain(format!("wall position {u_wall} is not finite")));
        }
        Ok(TrapSpec { u_wall })
    }
}

impl Default for TrapSpec {
    fn default() -> Self {
        TrapSpec { u_wall: 0.0 }
    }
}

/// A real multiplier applied pointwise to a wave profile.
pub trait Multiplier: fmt::Debug + Send + Sync {
    /// `(m(u), m'(u))`.
    fn value_and_slope(&self, u: f64) -> (f64, f64);

    /// Points where `m` is not smooth.
    fn breakpoints(&self) -> Vec<f64>;
}

#[derive(Debug, Clone)]
enum Shape {
    Eigen { zero: f64, inv_slope: f64 },
    Filtered {
        base: Arc<WaveProfile>,
        filter: Arc<dyn Multiplier>,
        scale: f64,
    },
}

/// A real wavefunction on `u >= u_wall`, zero at and behind the wall.
#[derive(Debug, Clone)]
pub struct WaveProfile {
    u_wall: f64,
    shape: Shape,
    breakpoints: Vec<f64>,
    normalized: bool,
}

impl WaveProfile {
    /// `scale * m(u) * base(u)`. The caller states whether the result is
    /// normalized; [`WaveProfile::normalize`] does it by quadrature.
    pub fn filtered(base: Arc<WaveProfile>, filter: Arc<dyn Multiplier>, scale: f64, normalized: bool) -> Self {
        let mut breakpoints = base.breakpoints.clone();
        breakpoints.extend(filter.breakpoints().into_iter().filter(|&b| b > base.u_wall));
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        WaveProfile {
            u_wall: base.u_wall,
            shape: Shape::Filtered { base, filter, scale },
            breakpoints,
            normalized,
        }
    }

    /// Returns a rescaled copy with unit norm.
    pub fn normalize(&self) -> Result<WaveProfile> {
        let norm2 = self.norm_squared()?;
        if !(norm2 > 0.0) {
            return Err(Error::Contract("cannot normalize a vanishing profile".into()));
        }
        let mut out = self.clone();
        match &mut out.shape {
            Shape::Eigen { inv_slope, .. } => *inv_slope /= norm2.sqrt(),
            Shape::Filtered { scale, .. } => *scale /= norm2.sqrt(),
        }
        out.normalized = true;
        Ok(out)
    }

    pub fn u_wall(&self) -> f64 {
        self.u_wall
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn value(&self, u: f64) -> f64 {
        self.value_and_derivative(u).0
    }

    pub fn derivative(&self, u: f64) -> f64 {
        self.value_and_derivative(u).1
    }

    pub fn value_and_derivative(&self, u: f64) -> (f64, f64) {
        if u <= self.u_wall {
            return (0.0, 0.0);
        }
        match &self.shape {
            Shape::Eigen { zero, inv_slope } => {
                let (ai, aip) = airy_ai_pair((u - self.u_wall) + zero);
                (ai * inv_slope, aip * inv_slope)
            }
            Shape::Filtered { base, filter, scale } => {
                let (psi, dpsi) = base.value_and_derivative(u);
                let (m, dm) = filter.value_and_slope(u);
                (scale * m * psi, scale * (dm * psi + m * dpsi))
            }
        }
    }

    /// `int g(u) dx` over the support, panels split at the profile's
    /// breakpoints plus `extra`.
    pub fn integrate_with(&self, g: impl FnMut(f64) -> f64, extra: &[f64], tol: f64) -> Result<f64> {
        let mut cuts = self.breakpoints.clone();
        cuts.extend_from_slice(extra);
        Ok(integrate(g, Interval::semi_infinite(self.u_wall), &cuts, tol)?.value)
    }

    pub fn norm_squared(&self) -> Result<f64> {
        self.integrate_with(|u| self.value(u).powi(2), &[], PROBABILITY_TOL)
    }

    /// `int (psi')^2 + u psi^2 du` without requiring unit norm.
    pub fn energy_functional(&self) -> Result<f64> {
        self.integrate_with(
            |u| {
                let (v, d) = self.value_and_derivative(u);
                d * d + u * v * v
            },
            &[],
            ENERGY_TOL,
        )
    }
}

/// The `n`-th normalized eigenstate, positive next to the wall.
/// The ground state is nonnegative everywhere.
pub fn eigenstate(spec: &TrapSpec, n: usize) -> Result<WaveProfile> {
    let zero = airy_zero(n)?;
    let slope = airy_ai_pair(zero).1;
    Ok(WaveProfile {
        u_wall: spec.u_wall,
        shape: Shape::Eigen {
            zero,
            inv_slope: 1.0 / slope,
        },
        breakpoints: Vec::new(),
        normalized: true,
    })
}

/// `|a_n| + u_wall`.
pub fn energy(spec: &TrapSpec, n: usize) -> Result<f64> {
    Ok(airy_zero(n)?.abs() + spec.u_wall)
}

/// Mean energy `int (psi')^2 + u psi^2 du` of a normalized state.
///
/// The kinetic term uses the first-derivative form so that profiles with
/// slope discontinuities at breakpoints need no special treatment.
pub fn state_energy(psi: &WaveProfile, spec: &TrapSpec) -> Result<f64> {
    if !psi.is_normalized() {
        return Err(Error::Contract("state_energy needs a normalized profile".into()));
    }
    if psi.u_wall() < spec.u_wall {
        return Err(Error::Contract(format!(
            "profile extends to {} behind the wall at {}",
            psi.u_wall(),
            spec.u_wall
        )));
    }
    psi.energy_functional()
}

/// `<psi|chi>` over the common support.
pub fn overlap(psi: &WaveProfile, chi: &WaveProfile) -> Result<f64> {
    let mut cuts = psi.breakpoints.clone();
    cuts.extend_from_slice(&chi.breakpoints);
    let start = psi.u_wall.max(chi.u_wall);
    Ok(integrate(|u| psi.value(u) * chi.value(u), Interval::semi_infinite(start), &cuts, PROBABILITY_TOL)?.value)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdSpectrum {
    pub eigenvalues: Vec<f64>,
    /// Set when the grid is coarser or shorter than the validated regime.
    pub warning: Option<String>,
}

/// Lowest `k` eigenvalues of the three-point discretization of
/// `-phi'' + u phi` on `[u_wall, u_wall + u_max]` with Dirichlet ends, from
/// Sturm-sequence bisection on the tridiagonal matrix.
pub fn fd_spectrum_oracle(spec: &TrapSpec, grid_points: usize, u_max: f64, k: usize) -> Result<FdSpectrum> {
    if k == 0 || k > grid_points || !(u_max > 0.0) {
        return Err(Error::Domain(format!(
            "need 1 <= k <= grid_points and u_max > 0 (k={k}, grid_points={grid_points}, u_max={u_max})"
        )));
    }
    let warning = if grid_points < 2000 || u_max < 20.0 {
        Some(format!(
            "grid of {grid_points} points over {u_max} x0 is below the validated resolution (2000 points, 20 x0)"
        ))
    } else {
        None
    };
    let h = u_max / (grid_points + 1) as f64;
    let off2 = 1.0 / (h * h * h * h);
    let diag: Vec<f64> = (1..=grid_points)
        .map(|j| 2.0 / (h * h) + spec.u_wall + h * j as f64)
        .collect();

    // number of eigenvalues below x
    let count_below = |x: f64| -> usize {
        let mut count = 0;
        let mut q = diag[0] - x;
        for (j, d) in diag.iter().enumerate() {
            if j > 0 {
                q = d - x - off2 / q;
            }
            if q == 0.0 {
                q = -f64::EPSILON * d.abs().max(1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };

    let lower = spec.u_wall;
    let upper = diag.iter().cloned().fold(f64::MIN, f64::max) + 2.0 / (h * h);
    let mut eigenvalues = Vec::with_capacity(k);
    for index in 1..=k {
        let (mut lo, mut hi) = (eigenvalues.last().copied().unwrap_or(lower), upper);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if count_below(mid) >= index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        eigenvalues.push(0.5 * (lo + hi));
    }
    Ok(FdSpectrum { eigenvalues, warning })
}
