//! Airy function of the first kind and its derivative for real argument.
//!
//! On `[-9, 9]` values come from local Taylor expansions of `y'' = z y`
//! around tabulated nodes spaced 0.5 apart, so every evaluation expands over
//! at most 0.25. The table is seeded with the exact values at the origin
//! (integrated outward on the oscillatory side) and with the large-argument
//! asymptotic series at `z = 9` (integrated inward, the direction in which
//! `Ai` is dominant). Outside the table the asymptotic series are used
//! directly; at `|z| >= 9` the smallest term is below `1e-16`.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::OnceLock;

use super::roots::newton_bisect;
use crate::{Error, Result};

/// Ai(0) = 1 / (3^{2/3} Gamma(2/3)).
pub(crate) const AI_ZERO: f64 = 0.355_028_053_887_817_239_26;
/// Ai'(0) = -1 / (3^{1/3} Gamma(1/3)).
pub(crate) const AIP_ZERO: f64 = -0.258_819_403_792_806_798_4;

const TABLE_EDGE: f64 = 9.0;
const NODE_SPACING: f64 = 0.5;
const NODE_COUNT: usize = 37;

/// `(z, Ai(z), Ai'(z))` at the table nodes, lowest `z` first.
fn nodes() -> &'static [(f64, f64, f64); NODE_COUNT] {
    static NODES: OnceLock<[(f64, f64, f64); NODE_COUNT]> = OnceLock::new();
    NODES.get_or_init(|| {
        let mut table = [(0.0, 0.0, 0.0); NODE_COUNT];
        let origin = NODE_COUNT / 2;
        table[origin] = (0.0, AI_ZERO, AIP_ZERO);

        let (mut y, mut dy) = (AI_ZERO, AIP_ZERO);
        for j in (0..origin).rev() {
            let z0 = node_position(j + 1);
            (y, dy) = taylor_step(z0, y, dy, -NODE_SPACING);
            table[j] = (node_position(j), y, dy);
        }

        let (mut y, mut dy) = asymptotic_positive(TABLE_EDGE);
        table[NODE_COUNT - 1] = (TABLE_EDGE, y, dy);
        for j in (origin + 1..NODE_COUNT - 1).rev() {
            let z0 = node_position(j + 1);
            (y, dy) = taylor_step(z0, y, dy, -NODE_SPACING);
            table[j] = (node_position(j), y, dy);
        }
        table
    })
}

fn node_position(j: usize) -> f64 {
    -TABLE_EDGE + NODE_SPACING * j as f64
}

/// Advances `(y, y')` of a solution of `y'' = z y` from `z0` to `z0 + h`
/// using the Taylor series about `z0`.
pub(crate) fn taylor_step(z0: f64, y0: f64, dy0: f64, h: f64) -> (f64, f64) {
    if h == 0.0 {
        return (y0, dy0);
    }
    // b_k = a_k h^k with (k+2)(k+1) a_{k+2} = z0 a_k + a_{k-1}
    let h2 = h * h;
    let h3 = h2 * h;
    let mut prev2 = 0.0; // b_{k-1}
    let mut prev1 = y0; // b_k
    let mut cur = dy0 * h; // b_{k+1}
    let mut sum = y0 + cur;
    let mut dsum = cur; // sum of k b_k
    let mut largest = y0.abs().max(cur.abs());
    for k in 0..400usize {
        let kf = k as f64;
        let next = (z0 * h2 * prev1 + h3 * prev2) / ((kf + 2.0) * (kf + 1.0));
        sum += next;
        dsum += (kf + 2.0) * next;
        largest = largest.max(next.abs());
        prev2 = prev1;
        prev1 = cur;
        cur = next;
        if k > 2 && cur.abs() + prev1.abs() + prev2.abs() <= 1e-18 * largest {
            break;
        }
    }
    (sum, dsum / h)
}

/// `u_k` coefficients of the large-argument expansions, `u_0 = 1`.
fn asymptotic_u(k: usize) -> f64 {
    static U: OnceLock<Vec<f64>> = OnceLock::new();
    let table = U.get_or_init(|| {
        let mut u = vec![1.0];
        for k in 1..=40usize {
            let kf = k as f64;
            let factor = (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
                / ((2.0 * kf - 1.0) * 216.0 * kf);
            let last = *u.last().unwrap();
            u.push(last * factor);
        }
        u
    });
    table[k]
}

fn asymptotic_v(k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        let kf = k as f64;
        -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * asymptotic_u(k)
    }
}

/// Sums `sum_k (-1)^k c_k zeta^{-k}` over `k = start, start + step, ...`,
/// stopping at the smallest term.
fn asymptotic_sum(coef: fn(usize) -> f64, zeta: f64, start: usize, step: usize) -> f64 {
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    let mut k = start;
    while k <= 40 {
        let sign = if (k / step).is_multiple_of(2) { 1.0 } else { -1.0 };
        let term = sign * coef(k) * zeta.powi(-(k as i32));
        if term.abs() >= last {
            break;
        }
        sum += term;
        last = term.abs();
        if last < 1e-17 * sum.abs() {
            break;
        }
        k += step;
    }
    sum
}

fn asymptotic_positive(z: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    let decay = (-zeta).exp();
    if decay == 0.0 {
        return (0.0, 0.0);
    }
    let quarter = z.powf(0.25);
    let prefactor = decay / (2.0 * PI.sqrt());
    let ai = prefactor / quarter * asymptotic_sum(asymptotic_u, zeta, 0, 1);
    let aip = -prefactor * quarter * asymptotic_sum(asymptotic_v, zeta, 0, 1);
    (ai, aip)
}

fn asymptotic_negative(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let phase = zeta - FRAC_PI_4;
    let (s, c) = phase.sin_cos();
    let quarter = x.powf(0.25);
    let root_pi = PI.sqrt();
    // The alternating sign runs over the index of the even/odd subsequence.
    let u_even = asymptotic_sum(asymptotic_u, zeta, 0, 2);
    let u_odd = asymptotic_sum(asymptotic_u, zeta, 1, 2);
    let v_even = asymptotic_sum(asymptotic_v, zeta, 0, 2);
    let v_odd = asymptotic_sum(asymptotic_v, zeta, 1, 2);
    let ai = (c * u_even + s * u_odd) / (quarter * root_pi);
    let aip = quarter / root_pi * (s * v_even - c * v_odd);
    (ai, aip)
}

/// Returns `(Ai(z), Ai'(z))`. A NaN argument gives NaN results.
pub fn airy_ai_pair(z: f64) -> (f64, f64) {
    if z.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    if z > TABLE_EDGE {
        return asymptotic_positive(z);
    }
    if z < -TABLE_EDGE {
        return asymptotic_negative(-z);
    }
    let j = ((z + TABLE_EDGE) / NODE_SPACING).round() as usize;
    let (z0, y0, dy0) = nodes()[j.min(NODE_COUNT - 1)];
    taylor_step(z0, y0, dy0, z - z0)
}

fn check_finite(z: f64) -> Result<()> {
    if z.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("Airy function argument {z} is not finite")))
    }
}

pub fn airy_ai(z: f64) -> Result<f64> {
    check_finite(z)?;
    Ok(airy_ai_pair(z).0)
}

pub fn airy_ai_prime(z: f64) -> Result<f64> {
    check_finite(z)?;
    Ok(airy_ai_pair(z).1)
}

/// The `n`-th zero `a_n` of Ai, counting from the one closest to the origin.
pub fn airy_zero(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("Airy zeros are indexed from 1".into()));
    }
    let t = 3.0 * PI * (4.0 * n as f64 - 1.0) / 8.0;
    let seed = -t.powf(2.0 / 3.0);
    newton_bisect(airy_ai_pair, seed - 0.3, seed + 0.3, 1e-15)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Maclaurin series evaluated term by term; accurate for small |z|.
    fn maclaurin(z: f64) -> (f64, f64) {
        let z3 = z * z * z;
        let (mut f, mut g) = (1.0, z);
        let (mut tf, mut tg) = (1.0, z);
        let (mut df, mut dg) = (0.0, 1.0);
        for k in 1..80 {
            let k3 = 3.0 * k as f64;
            tf *= z3 / ((k3 - 1.0) * k3);
            tg *= z3 / (k3 * (k3 + 1.0));
            f += tf;
            g += tg;
            // d/dz of z^{3k} and z^{3k+1}
            if z != 0.0 {
                df += tf * k3 / z;
                dg += tg * (k3 + 1.0) / z;
            }
        }
        (AI_ZERO * f + AIP_ZERO * g, AI_ZERO * df + AIP_ZERO * dg)
    }

    #[test]
    fn origin_values() {
        assert_eq!(airy_ai(0.0).unwrap(), AI_ZERO);
        assert!((airy_ai(0.0).unwrap() - 0.3550280538878172).abs() < 1e-16);
        assert!((airy_ai_prime(0.0).unwrap() + 0.2588194037928068).abs() < 1e-16);
    }

    #[test]
    fn inward_integration_lands_on_origin_values() {
        // Node 0.5 was produced by stepping in from the asymptotic seed at 9.
        let (z0, y, dy) = nodes()[NODE_COUNT / 2 + 1];
        let (y0, dy0) = taylor_step(z0, y, dy, -z0);
        assert!((y0 - AI_ZERO).abs() < 1e-14, "{y0}");
        assert!((dy0 - AIP_ZERO).abs() < 1e-14, "{dy0}");
    }

    #[test]
    fn matches_maclaurin_near_origin() {
        for i in -40..=40 {
            let z = i as f64 * 0.05;
            let (ai, aip) = airy_ai_pair(z);
            let (m, mp) = maclaurin(z);
            assert!((ai - m).abs() <= 1e-13 * m.abs().max(1e-2), "z={z}: {ai} vs {m}");
            assert!((aip - mp).abs() <= 1e-13 * mp.abs().max(1e-2), "z={z}: {aip} vs {mp}");
        }
    }

    #[test]
    fn reference_values() {
        // Abramowitz & Stegun table values.
        let cases = [
            (1.0, 0.135_292_416_312_881_4),
            (-1.0, 0.535_560_883_292_352_1),
            (2.0, 0.034_924_130_423_274_38),
            (5.0, 1.083_444_281_360_744e-4),
            (10.0, 1.104_753_255_289_869e-10),
            (-5.0, 0.350_761_009_024_114_2),
        ];
        for (z, expected) in cases {
            let got = airy_ai(z).unwrap();
            assert!(((got - expected) / expected).abs() < 1e-12, "Ai({z}) = {got}, want {expected}");
        }
    }

    #[test]
    fn asymptotic_branches_join_the_table() {
        for z in [-9.0_f64, -9.25, 9.0, 9.25] {
            // Expand from the outermost nodes past the edge and compare.
            let edge = if z < 0.0 { nodes()[0] } else { nodes()[NODE_COUNT - 1] };
            let (y, dy) = taylor_step(edge.0, edge.1, edge.2, z - edge.0);
            let (ay, ady) = if z < 0.0 {
                asymptotic_negative(-z)
            } else {
                asymptotic_positive(z)
            };
            let envelope = if z < 0.0 { (-z).powf(-0.25) } else { y.abs() };
            assert!((y - ay).abs() < 1e-13 * envelope, "z={z}: {y} vs {ay}");
            let denvelope = if z < 0.0 { (-z).powf(0.25) } else { dy.abs() };
            assert!((dy - ady).abs() < 1e-13 * denvelope, "z={z}: {dy} vs {ady}");
        }
    }

    #[test]
    fn decays_for_large_argument() {
        let mut last = airy_ai(0.0).unwrap();
        for i in 1..=60 {
            let v = airy_ai(i as f64).unwrap();
            assert!(v < last && v >= 0.0);
            last = v;
        }
        assert!(airy_ai(20.5).unwrap() <= 1e-15);
        assert_eq!(airy_ai(1e4).unwrap(), 0.0);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let h = 1e-4;
        for i in -20..=20 {
            let z = i as f64 * 0.5 + 0.13;
            let fd = (airy_ai(z + h).unwrap() - airy_ai(z - h).unwrap()) / (2.0 * h);
            assert!((fd - airy_ai_prime(z).unwrap()).abs() < 1e-7, "z={z}");
        }
    }

    #[test]
    fn satisfies_airy_equation() {
        // Five-point derivative of Ai' against z Ai.
        let h = 1e-3;
        let d = |z: f64| airy_ai_prime(z).unwrap();
        for i in -100..=100 {
            let z = i as f64 * 0.1;
            let second = (-d(z + 2.0 * h) + 8.0 * d(z + h) - 8.0 * d(z - h) + d(z - 2.0 * h)) / (12.0 * h);
            assert!((second - z * airy_ai(z).unwrap()).abs() < 1e-9, "z={z}");
        }
    }

    #[test]
    fn first_zeros() {
        let a1 = airy_zero(1).unwrap();
        let a2 = airy_zero(2).unwrap();
        assert!((a1 + 2.338_107_410_459_767).abs() < 1e-12);
        assert!((a2 + 4.087_949_444_130_971).abs() < 1e-12);
        assert!((airy_ai_prime(a1).unwrap() - 0.701_210_822_720_691_3).abs() < 1e-12);
        assert!(((a1.abs() - a2.abs()).abs() - 1.7498).abs() < 1e-4);
    }

    #[test]
    fn zero_by_bisection_on_series() {
        // Independent route: logical bisection of the Maclaurin evaluation.
        let (mut lo, mut hi) = (-3.0, -2.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if maclaurin(mid).0 > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((airy_zero(1).unwrap() - 0.5 * (lo + hi)).abs() < 1e-12);
    }

    #[test]
    fn zeros_interlace() {
        let mut last = 0.0;
        for n in 1..=10 {
            let a = airy_zero(n).unwrap();
            assert!(a < last);
            assert!(airy_ai(a).unwrap().abs() <= 1e-12, "n={n}");
            last = a;
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(airy_ai(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(airy_ai_prime(f64::INFINITY), Err(Error::Domain(_))));
        assert!(matches!(airy_zero(0), Err(Error::Domain(_))));
    }
}
