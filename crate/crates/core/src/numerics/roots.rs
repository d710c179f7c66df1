use crate::{Error, Result};

const MAX_ITERATIONS: usize = 100;

fn bracket_error(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Error {
    Error::Bracket { lo, hi, f_lo, f_hi }
}

/// Brent's method on a sign-changing bracket.
///
/// Each step takes inverse quadratic interpolation or a secant step when it
/// stays inside the bracket and shrinks it fast enough, and bisects
/// otherwise, so convergence is never slower than bisection.
pub fn find_root(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(bracket_error(lo, hi, fa, fb));
    }
    let (mut c, mut fc) = (b, fb);
    let (mut d, mut e) = (b - a, b - a);
    for _ in 0..MAX_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let bound = (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs());
            if 2.0 * p < bound {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Ok(b)
}

/// Newton iteration safeguarded by bisection. `f` returns the value and the
/// derivative. Steps that leave the current bracket or fail to halve it are
/// replaced by bisection.
pub fn newton_bisect(
    mut f: impl FnMut(f64) -> (f64, f64),
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    let (f_lo, _) = f(lo);
    let (f_hi, _) = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(bracket_error(lo, hi, f_lo, f_hi));
    }
    // orient so that f(neg) < 0 < f(pos)
    let (mut neg, mut pos) = if f_lo < 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = 0.5 * (lo + hi);
    let mut last_step = (hi - lo).abs();
    let mut step = last_step;
    let (mut fx, mut dfx) = f(x);
    for _ in 0..MAX_ITERATIONS {
        let newton_leaves = ((x - pos) * dfx - fx) * ((x - neg) * dfx - fx) > 0.0;
        let newton_slow = (2.0 * fx).abs() > (last_step * dfx).abs();
        last_step = step;
        if newton_leaves || newton_slow {
            step = 0.5 * (pos - neg);
            x = neg + step;
        } else {
            step = fx / dfx;
            x -= step;
        }
        if step.abs() < tol {
            return Ok(x);
        }
        (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            neg = x;
        } else {
            pos = x;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::airy_ai;

    #[test]
    fn identity_root() {
        assert!(find_root(|x| x, -1.0, 1.0, 1e-14).unwrap().abs() < 1e-14);
    }

    #[test]
    fn square_root_of_two() {
        let r = find_root(|x| x * x - 2.0, 1.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        let r = newton_bisect(|x| (x * x - 2.0, 2.0 * x), 1.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn airy_first_zero_from_bracket() {
        let r = find_root(|z| airy_ai(z).unwrap(), -3.0, -2.0, 1e-13).unwrap();
        assert!((r + 2.338_107_410_459_767).abs() < 1e-12);
    }

    #[test]
    fn missing_sign_change() {
        assert!(matches!(
            find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-10),
            Err(Error::Bracket { .. })
        ));
        assert!(matches!(
            newton_bisect(|x| (x * x + 1.0, 2.0 * x), -1.0, 1.0, 1e-10),
            Err(Error::Bracket { .. })
        ));
    }

    #[test]
    fn newton_survives_flat_derivative() {
        // cube root has a vanishing derivative at the seed midpoint region
        let r = newton_bisect(|x| (x.powi(3), 3.0 * x * x), -1.0, 2.0, 1e-12).unwrap();
        assert!(r.abs() < 1e-4);
    }
}
