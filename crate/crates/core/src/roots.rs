//! Scalar bracketing solvers used throughout the crate.

/// Bisection on a bracket `[lo, hi]` where `f(lo)` and `f(hi)` have opposite
/// signs (zero counts as either). Iterates until the midpoint no longer
/// separates the endpoints or the bracket is narrower than `xtol`, so with
/// `xtol = 0` the result is accurate to the last bit.
///
/// Returns `None` if the bracket does not change sign.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Option<f64> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if same_sign(fa, fb) || fa.is_nan() || fb.is_nan() {
        return None;
    }
    // 2100 halvings exhaust the f64 exponent range
    for _ in 0..2100 {
        let mid = a + 0.5 * (b - a);
        if mid <= a || mid >= b || b - a <= xtol {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if same_sign(fm, fa) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    // pick the endpoint with the smaller residual
    let (ra, rb) = (crate::math::abs(f(a)), crate::math::abs(f(b)));
    Some(if ra <= rb { a } else { b })
}

/// Safeguarded Newton iteration on a sign-changing bracket, starting from
/// `x0`. Steps leaving the bracket, or not halving it fast enough, fall back
/// to bisection. `f` returns the value and the derivative.
pub fn newton_bracketed<F: FnMut(f64) -> (f64, f64)>(
    mut f: F,
    lo: f64,
    hi: f64,
    x0: f64,
) -> Option<f64> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let (fa, _) = f(a);
    let (fb, _) = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if same_sign(fa, fb) || fa.is_nan() || fb.is_nan() {
        return None;
    }
    let rising = fb > 0.0;
    let mut x = if x0 > a && x0 < b {
        x0
    } else {
        a + 0.5 * (b - a)
    };
    let mut last = b - a;
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Some(x);
        }
        if (fx > 0.0) == rising {
            b = x;
        } else {
            a = x;
        }
        let newton = x - fx / dfx;
        let next = if newton > a && newton < b && crate::math::abs(newton - x) < 0.5 * last {
            newton
        } else {
            a + 0.5 * (b - a)
        };
        last = crate::math::abs(next - x);
        if next == x || last <= 4.0 * f64::EPSILON * crate::math::abs(x) || next <= a || next >= b {
            return Some(next.clamp(a, b));
        }
        x = next;
    }
    Some(x)
}

#[inline]
fn same_sign(a: f64, b: f64) -> bool {
    (a > 0.0) == (b > 0.0)
}

/// Golden-section search for the maximiser of a unimodal `f` on `[lo, hi]`.
/// Returns `(argmax, max)`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, xtol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > xtol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if c >= d {
            break;
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    // never report a worse point than one already seen
    if fc > fx && fc >= fd {
        (c, fc)
    } else if fd > fx {
        (d, fd)
    } else {
        (x, fx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2_to_last_bit() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 0.0).unwrap();
        assert!((r - core::f64::consts::SQRT_2).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn bisect_rejects_same_sign() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 0.0).is_none());
    }

    #[test]
    fn golden_finds_parabola_vertex() {
        let (x, fx) = golden_max(|x| -(x - 0.3) * (x - 0.3) + 2.0, 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 2.0).abs() < 1e-13);
    }
}
