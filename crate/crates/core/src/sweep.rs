//! Parameter scans over `(epsilon, w)` and the optimal operating points.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::failure_coefficient;
use crate::measurement::{efficiency_asymptotic, kraus_hard_window, kraus_pair, measure_ground_state, KrausFamily};
use crate::numerics::try_maximize_scalar;
use crate::{Error, Result};

pub const OPTIMIZER_TOL: f64 = 1e-4;
const EPS_SEARCH: (f64, f64) = (0.2, 3.0);
const ZETA_SEARCH: (f64, f64) = (0.05, 10.0);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub epsilon: f64,
    /// `f64::INFINITY` for the gradual-limit column.
    pub w: f64,
    pub p_o: f64,
    pub work: f64,
    pub heat: f64,
    pub efficiency: f64,
    /// Set when the point could not be evaluated; the values are then NaN.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanTable {
    pub family: KrausFamily,
    pub eps_range: (f64, f64),
    pub w_range: (f64, f64),
    pub eps_values: Vec<f64>,
    pub w_values: Vec<f64>,
    /// Epsilon-major, w-minor.
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    pub fn row(&self, i_eps: usize, i_w: usize) -> &ScanRow {
        &self.rows[i_eps * self.w_values.len() + i_w]
    }

    pub fn failures(&self) -> impl Iterator<Item = &ScanRow> {
        self.rows.iter().filter(|r| r.error.is_some())
    }
}

/// `n` evenly spaced points on `[lo, hi]`; a single point when `lo == hi`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(Error::Config(format!("invalid range [{lo}, {hi}]")));
    }
    if lo == hi {
        return Ok(vec![lo]);
    }
    if n < 2 {
        return Err(Error::Config(format!("a range needs at least 2 points, got {n}")));
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|k| if k == n - 1 { hi } else { lo + step * k as f64 }).collect())
}

/// `(p_o, work, heat, efficiency)` for the ground state. `w = inf` gives the
/// gradual limit, where probabilities and heat vanish but their ratio stays.
pub fn evaluate_point(family: KrausFamily, epsilon: f64, w: f64) -> Result<(f64, f64, f64, f64)> {
    if w == f64::INFINITY {
        if family != KrausFamily::SineRamp {
            return Err(Error::Config("the w = inf column exists only for the sine ramp".into()));
        }
        let eta = if epsilon == 0.0 { 0.0 } else { efficiency_asymptotic(epsilon)? };
        return Ok((0.0, 0.0, 0.0, eta));
    }
    let r = measure_ground_state(&kraus_pair(family, epsilon, w)?)?;
    Ok((r.p_o, r.work, r.heat, r.efficiency))
}

fn scan_row(family: KrausFamily, epsilon: f64, w: f64) -> ScanRow {
    match evaluate_point(family, epsilon, w) {
        Ok((p_o, work, heat, efficiency)) => ScanRow {
            epsilon,
            w,
            p_o,
            work,
            heat,
            efficiency,
            error: None,
        },
        Err(e) => ScanRow {
            epsilon,
            w,
            p_o: f64::NAN,
            work: f64::NAN,
            heat: f64::NAN,
            efficiency: f64::NAN,
            error: Some(e.to_string()),
        },
    }
}

pub fn grid_scan(
    eps_range: (f64, f64),
    w_range: (f64, f64),
    n_eps: usize,
    n_w: usize,
    family: KrausFamily,
) -> Result<ScanTable> {
    grid_scan_with_limit(eps_range, w_range, n_eps, n_w, family, false)
}

/// As [`grid_scan`], optionally appending a `w = inf` column.
pub fn grid_scan_with_limit(
    eps_range: (f64, f64),
    w_range: (f64, f64),
    n_eps: usize,
    n_w: usize,
    family: KrausFamily,
    gradual_column: bool,
) -> Result<ScanTable> {
    if eps_range.0 < 0.0 {
        return Err(Error::Config(format!("epsilon range must be >= 0, got {eps_range:?}")));
    }
    if family != KrausFamily::HardWindow && !(w_range.0 > 0.0) {
        return Err(Error::Config(format!("w range must be positive, got {w_range:?}")));
    }
    let eps_values = linspace(eps_range.0, eps_range.1, n_eps)?;
    let mut w_values = linspace(w_range.0, w_range.1, n_w)?;
    if gradual_column {
        w_values.push(f64::INFINITY);
    }
    let points: Vec<(f64, f64)> = eps_values
        .iter()
        .flat_map(|&e| w_values.iter().map(move |&w| (e, w)))
        .collect();
    let rows = points.par_iter().map(|&(e, w)| scan_row(family, e, w)).collect();
    Ok(ScanTable {
        family,
        eps_range,
        w_range,
        eps_values,
        w_values,
        rows,
    })
}

/// Maximizes the gradual-limit efficiency over `epsilon`.
pub fn find_epsilon_star() -> Result<(f64, f64)> {
    find_epsilon_star_with_tol(OPTIMIZER_TOL)
}

pub fn find_epsilon_star_with_tol(tol: f64) -> Result<(f64, f64)> {
    try_maximize_scalar(efficiency_asymptotic, EPS_SEARCH.0, EPS_SEARCH.1, tol)
}

/// `(epsilon, work)` maximizing `epsilon p_o` for the hard window.
pub fn find_max_work_hard_window() -> Result<(f64, f64)> {
    try_maximize_scalar(hard_window_work, EPS_SEARCH.0, EPS_SEARCH.1, OPTIMIZER_TOL)
}

pub fn hard_window_work(epsilon: f64) -> Result<f64> {
    Ok(measure_ground_state(&kraus_hard_window(epsilon)?)?.work)
}

/// Small-window efficiency with `w = zeta epsilon`.
pub fn zeno_limit_efficiency(zeta: f64) -> f64 {
    1.0 / (FRAC_PI_2 * FRAC_PI_2 * (1.0 / zeta + 1.0 + zeta / 3.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZenoOptimum {
    pub zeta: f64,
    pub eta: f64,
    /// Limit efficiency at the two candidate ratios `sqrt 3` and `1/sqrt 3`.
    pub eta_root3: f64,
    pub eta_inverse_root3: f64,
    /// Computed efficiency at `epsilon = 0.01, w = zeta epsilon`.
    pub eta_finite: f64,
}

pub fn find_zeno_zeta() -> Result<ZenoOptimum> {
    let (zeta, eta) = try_maximize_scalar(
        |z| Ok(zeno_limit_efficiency(z)),
        ZETA_SEARCH.0,
        ZETA_SEARCH.1,
        OPTIMIZER_TOL,
    )?;
    let eps = 0.01;
    let (_, _, _, eta_finite) = evaluate_point(KrausFamily::SineRamp, eps, zeta * eps)?;
    Ok(ZenoOptimum {
        zeta,
        eta,
        eta_root3: zeno_limit_efficiency(3f64.sqrt()),
        eta_inverse_root3: zeno_limit_efficiency(1.0 / 3f64.sqrt()),
        eta_finite,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRow {
    pub w: f64,
    pub efficiency: f64,
    pub work: f64,
    pub p_o: f64,
}

/// Sine-ramp efficiency, work and success rate at fixed `epsilon`.
pub fn efficiency_vs_w_profile(epsilon: f64, w_list: &[f64]) -> Result<Vec<ProfileRow>> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    w_list
        .iter()
        .map(|&w| {
            let (p_o, work, _, efficiency) = evaluate_point(KrausFamily::SineRamp, epsilon, w)?;
            Ok(ProfileRow { w, efficiency, work, p_o })
        })
        .collect()
}

/// Every optimum in one place.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Optima {
    pub eps_star: f64,
    pub eta_max_asymptotic: f64,
    pub eps_max_work: f64,
    pub w_max_work: f64,
    pub max_work: f64,
    pub zeta_opt: f64,
    pub eta_zeno: f64,
    pub eta_zeno_root3: f64,
    pub eta_zeno_inverse_root3: f64,
    pub eta_zeno_finite_eps: f64,
    /// `c` in `p_i ~ c eps^3` at the optimal ratio, at `1/sqrt 3`, and for
    /// the hard window.
    pub failure_coefficient_opt: f64,
    pub failure_coefficient_inverse_root3: f64,
    pub failure_coefficient_hard: f64,
    pub notes: Vec<String>,
}

pub fn optimize_all() -> Result<Optima> {
    let (eps_star, eta_max) = find_epsilon_star()?;
    let (eps_work, max_work) = find_max_work_hard_window()?;
    let zeno = find_zeno_zeta()?;
    let c_opt = failure_coefficient(zeno.zeta)?;
    let c_inv = failure_coefficient(1.0 / 3f64.sqrt())?;
    let c_hard = failure_coefficient(0.0)?;
    let notes = vec![
        format!(
            "zeno ratio: efficiency peaks at zeta = {:.4} (sqrt 3), eta = {:.4}; zeta = 1/sqrt 3 gives eta = {:.4}",
            zeno.zeta, zeno.eta, zeno.eta_inverse_root3
        ),
        format!(
            "ascent coefficient: p_i ~ c eps^3 with c = {c_opt:.4} at zeta = {:.4}, {c_inv:.4} at 1/sqrt 3, {c_hard:.4} for w = 0; none equals 0.327",
            zeno.zeta
        ),
    ];
    Ok(Optima {
        eps_star,
        eta_max_asymptotic: eta_max,
        eps_max_work: eps_work,
        w_max_work: 0.0,
        max_work,
        zeta_opt: zeno.zeta,
        eta_zeno: zeno.eta,
        eta_zeno_root3: zeno.eta_root3,
        eta_zeno_inverse_root3: zeno.eta_inverse_root3,
        eta_zeno_finite_eps: zeno.eta_finite,
        failure_coefficient_opt: c_opt,
        failure_coefficient_inverse_root3: c_inv,
        failure_coefficient_hard: c_hard,
        notes,
    })
}
