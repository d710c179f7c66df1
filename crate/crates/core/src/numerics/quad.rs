//! Globally adaptive Gauss-Kronrod (7/15) quadrature with user breakpoints.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

/// Default length, in units of `x0`, kept from a semi-infinite interval.
pub const DEFAULT_TRUNCATION: f64 = 30.0;

const MAX_SUBDIVISIONS: usize = 4000;
const MAX_TRUNCATION_DOUBLINGS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Upper {
    Finite(f64),
    /// `[lo, inf)` integrated up to `lo + span`.
    Truncated { span: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: Upper,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Domain(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi: Upper::Finite(hi) })
    }

    /// `[lo, inf)`, truncated at `lo + DEFAULT_TRUNCATION`.
    pub fn semi_infinite(lo: f64) -> Self {
        Interval {
            lo,
            hi: Upper::Truncated { span: DEFAULT_TRUNCATION },
        }
    }

    pub fn with_truncation(self, span: f64) -> Self {
        match self.hi {
            Upper::Truncated { .. } => Interval {
                lo: self.lo,
                hi: Upper::Truncated { span },
            },
            Upper::Finite(_) => self,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn is_semi_infinite(&self) -> bool {
        matches!(self.hi, Upper::Truncated { .. })
    }

    /// Upper limit actually used, before any tail extension.
    pub fn effective_hi(&self) -> f64 {
        match self.hi {
            Upper::Finite(hi) => hi,
            Upper::Truncated { span } => self.lo + span,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];
    let mut abs_sum = kronrod.abs();
    let mut fv = [0.0; 15];
    fv[7] = f_center;
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = f1;
        fv[14 - j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }
    let value = kronrod * half;
    if !value.is_finite() {
        return Err(Error::Domain(format!("integrand is not finite on [{a}, {b}]")));
    }
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (1.0f64).min((200.0 * error / res_asc).powf(1.5));
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Panel { a, b, value, error })
}

/// Integrates `f` over `iv`, starting from panels split at every breakpoint
/// inside the interval, and bisecting the panel with the largest error
/// estimate until the summed estimate is below `tol`.
///
/// Semi-infinite intervals stop at `lo + span`; the span is doubled (up to
/// four times) while `|f|` at the cut is not negligible against `tol`.
pub fn integrate(
    mut f: impl FnMut(f64) -> f64,
    iv: Interval,
    breakpoints: &[f64],
    tol: f64,
) -> Result<QuadratureResult> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let lo = iv.lo;
    let mut hi = iv.effective_hi();
    let mut evaluations = 0usize;
    if let Upper::Truncated { mut span } = iv.hi {
        for _ in 0..MAX_TRUNCATION_DOUBLINGS {
            evaluations += 1;
            if f(hi).abs() * span <= 1e-3 * tol {
                break;
            }
            span *= 2.0;
            hi = lo + span;
        }
    }

    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > lo && x < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(lo);
    edges.extend(cuts);
    edges.push(hi);

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_error = 0.0;
    for pair in edges.windows(2) {
        if pair[1] - pair[0] <= 0.0 {
            continue;
        }
        let panel = kronrod15(&mut f, pair[0], pair[1])?;
        evaluations += 15;
        total += panel.value;
        total_error += panel.error;
        heap.push(panel);
    }

    let mut subdivisions = heap.len();
    while total_error > tol {
        if subdivisions >= MAX_SUBDIVISIONS {
            return Err(Error::Quadrature {
                estimate: total,
                abs_error: total_error,
                evaluations,
            });
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // panel cannot be split further in floating point
            return Err(Error::Quadrature {
                estimate: total,
                abs_error: total_error,
                evaluations,
            });
        }
        let left = kronrod15(&mut f, worst.a, mid)?;
        let right = kronrod15(&mut f, mid, worst.b)?;
        evaluations += 30;
        subdivisions += 1;
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if subdivisions % 64 == 0 {
            // resum to keep cancellation drift out of the running totals
            total = heap.iter().map(|p| p.value).sum();
            total_error = heap.iter().map(|p| p.error).sum();
        }
    }
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let abs_error_estimate: f64 = heap.iter().map(|p| p.error).sum();
    Ok(QuadratureResult {
        value,
        abs_error_estimate,
        evaluations,
    })
}
