//! Real spherical harmonics evaluated in Cartesian form.
//!
//! `Y_lm` for `m > 0` uses `cos(mφ)`, for `m < 0` uses `sin(|m|φ)`; both
//! carry the factor `√2` so that the family is orthonormal on `S²`. No
//! Condon–Shortley phase. The azimuthal factor is taken from `(x + iy)^m`
//! so the functions are smooth through the poles.

use crate::math::{sqrt, PI};

/// Highest degree the evaluator supports.
pub const MAX_DEGREE: u32 = 8;
/// Number of `(l, m)` pairs up to [`MAX_DEGREE`].
pub const MAX_TERMS: usize = ((MAX_DEGREE + 1) * (MAX_DEGREE + 1)) as usize;

/// Position of `(l, m)` in the flat table filled by [`eval_all`].
#[inline]
pub fn index(l: u32, m: i32) -> usize {
    (i64::from(l * l + l) + i64::from(m)) as usize
}

fn factorial_ratio(l: u32, m: u32) -> f64 {
    // (l - m)! / (l + m)!
    let mut r = 1.0;
    for k in (l - m + 1)..=(l + m) {
        r /= f64::from(k);
    }
    r
}

/// Evaluate every `Y_lm` with `l ≤ lmax` at the direction of `v` (which need
/// not be normalised). Entries beyond `lmax` are left untouched.
pub fn eval_all(lmax: u32, v: [f64; 3], out: &mut [f64; MAX_TERMS]) {
    debug_assert!(lmax <= MAX_DEGREE);
    let len = crate::math::norm3(v);
    let (x, y, z) = (v[0] / len, v[1] / len, v[2] / len);

    // (x + iy)^m for m = 0..=lmax
    let mut re = [0.0f64; (MAX_DEGREE + 1) as usize];
    let mut im = [0.0f64; (MAX_DEGREE + 1) as usize];
    re[0] = 1.0;
    for m in 1..=lmax as usize {
        re[m] = re[m - 1] * x - im[m - 1] * y;
        im[m] = re[m - 1] * y + im[m - 1] * x;
    }

    let mut q_mm = 1.0; // (2m-1)!!
    for m in 0..=lmax {
        if m > 0 {
            q_mm *= f64::from(2 * m - 1);
        }
        // Q_l^m(z) by the upward recurrence in l
        let mut q_prev = 0.0;
        let mut q = q_mm;
        for l in m..=lmax {
            if l == m + 1 {
                q_prev = q;
                q = z * f64::from(2 * m + 1) * q_mm;
            } else if l > m + 1 {
                let next = (f64::from(2 * l - 1) * z * q - f64::from(l + m - 1) * q_prev)
                    / f64::from(l - m);
                q_prev = q;
                q = next;
            }
            let k = sqrt(f64::from(2 * l + 1) / (4.0 * PI) * factorial_ratio(l, m));
            if m == 0 {
                out[index(l, 0)] = k * q;
            } else {
                let s = core::f64::consts::SQRT_2 * k * q;
                out[index(l, m as i32)] = s * re[m as usize];
                out[index(l, -(m as i32))] = s * im[m as usize];
            }
        }
    }
}

/// Single real spherical harmonic.
pub fn eval(l: u32, m: i32, v: [f64; 3]) -> f64 {
    let mut table = [0.0; MAX_TERMS];
    eval_all(l, v, &mut table);
    table[index(l, m)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::quadrature::SphereGrid;

    #[test]
    fn y20_closed_form() {
        let v = [0.3, -0.4, 0.5];
        let len = (0.09f64 + 0.16 + 0.25).sqrt();
        let z = 0.5 / len;
        let expect = (5.0 / (16.0 * PI)).sqrt() * (3.0 * z * z - 1.0);
        assert!((eval(2, 0, v) - expect).abs() < 1e-14);
    }

    #[test]
    fn y11_and_y1m1_closed_form() {
        let v = [0.6, 0.0, 0.8];
        let k = (3.0 / (4.0 * PI)).sqrt();
        assert!((eval(1, 1, v) - k * 0.6).abs() < 1e-14);
        let w = [0.0, 0.6, 0.8];
        assert!((eval(1, -1, w) - k * 0.6).abs() < 1e-14);
        assert!((eval(1, 0, w) - k * 0.8).abs() < 1e-14);
    }

    #[test]
    fn orthonormal_up_to_degree_six() {
        let grid = SphereGrid::new(16, 32);
        let lmax = 6;
        let terms = ((lmax + 1) * (lmax + 1)) as usize;
        let mut gram = [[0.0f64; 49]; 49];
        let mut table = [0.0; MAX_TERMS];
        for (dir, w) in grid.directions.iter().zip(&grid.weights) {
            eval_all(lmax, *dir, &mut table);
            for i in 0..terms {
                for j in 0..terms {
                    gram[i][j] += w * table[i] * table[j];
                }
            }
        }
        for i in 0..terms {
            for j in 0..terms {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (gram[i][j] - target).abs() < 1e-12,
                    "({i},{j}) = {}",
                    gram[i][j]
                );
            }
        }
    }
}
