//! Rotationally symmetric solutions of `Δu = −n` on `a < |x| < b` in any
//! dimension: the closed form and a second-order finite-difference solve
//! used as ground truth for the rest of the pipeline.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{finite, Error, Result};
use crate::math::{abs, powi};
use crate::model::check_dimension;

/// Discrete radial solution together with the closed-form coefficients
/// `u(r) = −r²/2 + A + B r^(2−n)` of the exact solution on the same shell.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution {
    pub n: u32,
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub coeff_a: f64,
    pub coeff_b: f64,
}

/// Coefficients `(A, B)` of the exact radial solution vanishing at `a` and
/// `b`.
pub fn radial_closed_form(n: u32, a: f64, b: f64) -> Result<(f64, f64)> {
    check_dimension(n)?;
    finite(a, "inner radius")?;
    finite(b, "outer radius")?;
    if a == b {
        return Err(Error::Degenerate("inner and outer radii coincide"));
    }
    if !(a > 0.0 && a < b) {
        return Err(Error::OutOfRange {
            what: "inner radius",
            value: a,
            range: "(0, b)".into(),
        });
    }
    let k = 2 - n as i32;
    let (pa, pb) = (powi(a, k), powi(b, k));
    let coeff_b = 0.5 * (a * a - b * b) / (pa - pb);
    let coeff_a = 0.5 * a * a - coeff_b * pa;
    Ok((coeff_a, coeff_b))
}

/// Finite-difference solve of `u'' + (n−1)/r u' = −n` with `u(a) = u(b) = 0`
/// on `m` uniform intervals, by a direct tridiagonal elimination.
pub fn solve_radial_bvp(n: u32, a: f64, b: f64, m: usize) -> Result<RadialSolution> {
    let (coeff_a, coeff_b) = radial_closed_form(n, a, b)?;
    if m < 16 {
        return Err(Error::OutOfRange {
            what: "node count",
            value: m as f64,
            range: "[16, inf)".into(),
        });
    }
    let h = (b - a) / m as f64;
    let nodes: Vec<f64> = (0..=m).map(|i| a + h * i as f64).collect();
    let nf = f64::from(n);
    let inv_h2 = 1.0 / (h * h);

    // interior unknowns 1..m-1; rows: lower, diag, upper, rhs
    let k = m - 1;
    let mut lower = vec![0.0; k];
    let mut diag = vec![0.0; k];
    let mut upper = vec![0.0; k];
    // Dirichlet zeros at both ends contribute nothing to the right-hand side
    let rhs = vec![-nf; k];
    for row in 0..k {
        let r = nodes[row + 1];
        let drift = (nf - 1.0) / (2.0 * r * h);
        lower[row] = inv_h2 - drift;
        diag[row] = -2.0 * inv_h2;
        upper[row] = inv_h2 + drift;
    }
    let interior = thomas(&lower, &diag, &upper, &rhs)?;

    let mut values = Vec::with_capacity(m + 1);
    values.push(0.0);
    values.extend_from_slice(&interior);
    values.push(0.0);
    Ok(RadialSolution {
        n,
        a,
        b,
        nodes,
        values,
        coeff_a,
        coeff_b,
    })
}

fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let k = diag.len();
    let mut c = vec![0.0; k];
    let mut d = vec![0.0; k];
    let mut pivot = diag[0];
    if pivot == 0.0 {
        return Err(Error::Degenerate("singular tridiagonal system"));
    }
    c[0] = upper[0] / pivot;
    d[0] = rhs[0] / pivot;
    for i in 1..k {
        pivot = diag[i] - lower[i] * c[i - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::Degenerate("singular tridiagonal system"));
        }
        c[i] = upper[i] / pivot;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / pivot;
    }
    let mut x = vec![0.0; k];
    x[k - 1] = d[k - 1];
    for i in (0..k - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    Ok(x)
}

impl RadialSolution {
    pub fn spacing(&self) -> f64 {
        self.nodes[1] - self.nodes[0]
    }

    /// Exact solution on the same shell.
    pub fn exact(&self, r: f64) -> f64 {
        -0.5 * r * r + self.coeff_a + self.coeff_b * powi(r, 2 - self.n as i32)
    }

    pub fn exact_slope(&self, r: f64) -> f64 {
        -r + (2.0 - f64::from(self.n)) * self.coeff_b * powi(r, 1 - self.n as i32)
    }

    /// `u'` at every node: central differences inside, one-sided
    /// second-order differences at the two ends.
    pub fn slopes(&self) -> Vec<f64> {
        let h = self.spacing();
        let u = &self.values;
        let m = u.len() - 1;
        let mut du = Vec::with_capacity(m + 1);
        du.push((-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h));
        for i in 1..m {
            du.push((u[i + 1] - u[i - 1]) / (2.0 * h));
        }
        du.push((3.0 * u[m] - 4.0 * u[m - 1] + u[m - 2]) / (2.0 * h));
        du
    }

    /// `|D_h − D_2h| / 3` for the one-sided slope at the inner or outer end.
    pub fn end_slope_error(&self, outer: bool) -> f64 {
        let h = self.spacing();
        let m = self.values.len() - 1;
        let u = |k: usize| {
            if outer {
                self.values[m - k]
            } else {
                self.values[k]
            }
        };
        let fine = (-3.0 * u(0) + 4.0 * u(1) - u(2)) / (2.0 * h);
        let coarse = (-3.0 * u(0) + 4.0 * u(2) - u(4)) / (4.0 * h);
        abs(fine - coarse) / 3.0
    }

    /// Maximum of the discrete solution refined by the parabola through the
    /// largest node and its neighbours. Returns `(radius, value)`.
    pub fn peak(&self) -> (f64, f64) {
        let u = &self.values;
        let mut best = 1;
        for i in 1..u.len() - 1 {
            if u[i] > u[best] {
                best = i;
            }
        }
        let h = self.spacing();
        let (um, u0, up) = (u[best - 1], u[best], u[best + 1]);
        let curv = um - 2.0 * u0 + up;
        if curv >= 0.0 {
            return (self.nodes[best], u0);
        }
        let shift = 0.5 * (um - up) / curv;
        let shift = shift.clamp(-1.0, 1.0);
        let value = u0 - 0.25 * (um - up) * shift;
        (self.nodes[best] + shift * h, value.max(u0))
    }

    /// Distance between the vertex of [`Self::peak`] and that of the parabola
    /// through the nodes two steps away; bounds the error of the peak radius.
    pub fn peak_error(&self) -> f64 {
        let u = &self.values;
        let h = self.spacing();
        let (radius, _) = self.peak();
        let best = ((radius - self.a) / h).round() as usize;
        if best < 2 || best + 2 >= u.len() {
            return h;
        }
        let (um, u0, up) = (u[best - 2], u[best], u[best + 2]);
        let curv = um - 2.0 * u0 + up;
        if curv >= 0.0 {
            return h;
        }
        let wide = self.nodes[best] + (um - up) / curv * h;
        abs(wide - radius).min(h)
    }

    /// Largest nodal deviation from the closed form.
    pub fn max_error(&self) -> f64 {
        self.nodes
            .iter()
            .zip(&self.values)
            .map(|(&r, &u)| abs(u - self.exact(r)))
            .fold(0.0, f64::max)
    }

    /// Copy of this solution for the domain scaled by `lambda`: radii times
    /// `lambda`, values times `lambda²`.
    pub fn rescaled(&self, lambda: f64) -> Self {
        let l2 = lambda * lambda;
        Self {
            n: self.n,
            a: self.a * lambda,
            b: self.b * lambda,
            nodes: self.nodes.iter().map(|r| r * lambda).collect(),
            values: self.values.iter().map(|u| u * l2).collect(),
            coeff_a: self.coeff_a * l2,
            coeff_b: self.coeff_b * powi(lambda, self.n as i32),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ring_radii, ModelRing};

    #[test]
    fn closed_form_matches_model_coefficients() {
        let (r1, r2) = ring_radii(3, 0.3).unwrap();
        let (a, b) = radial_closed_form(3, r1, r2).unwrap();
        assert!((a - 0.5).abs() < 1e-10);
        assert!((b + 0.027).abs() < 1e-10);
    }

    #[test]
    fn closed_form_serrin_limit() {
        let (a, b) = radial_closed_form(3, 1e-8, 1.0).unwrap();
        assert!((a - 0.5).abs() < 1e-7);
        assert!(b.abs() < 1e-7);
    }

    #[test]
    fn closed_form_residuals() {
        let (a, b) = radial_closed_form(5, 0.4, 0.9).unwrap();
        let u = |r: f64| -0.5 * r * r + a + b * r.powi(-3);
        assert!(u(0.4).abs() < 1e-14);
        assert!(u(0.9).abs() < 1e-14);
    }

    #[test]
    fn closed_form_rejects_degenerate() {
        assert!(matches!(
            radial_closed_form(3, 0.5, 0.5),
            Err(Error::Degenerate(_))
        ));
        assert!(radial_closed_form(3, 0.6, 0.5).is_err());
    }

    #[test]
    fn boundary_values_and_positivity() {
        let s = solve_radial_bvp(7, 0.5, 0.8, 1024).unwrap();
        assert_eq!(s.values[0], 0.0);
        assert_eq!(*s.values.last().unwrap(), 0.0);
        assert!(s.values[1..s.values.len() - 1].iter().all(|&u| u > 0.0));
    }

    #[test]
    fn peak_error_bounds_the_peak_radius_error() {
        let m = ModelRing::new(3, 0.3).unwrap();
        for nodes in [256, 1024] {
            let s = solve_radial_bvp(3, m.r1, m.r2, nodes).unwrap();
            let err = abs(s.peak().0 - 0.3);
            assert!(err <= s.peak_error(), "{err} > {}", s.peak_error());
            assert!(s.peak_error() < s.spacing());
        }
    }

    #[test]
    fn too_few_nodes() {
        assert!(solve_radial_bvp(3, 0.1, 1.0, 8).is_err());
    }

    #[test]
    fn peak_sits_at_core_radius() {
        let m = ModelRing::new(3, 0.3).unwrap();
        let s = solve_radial_bvp(3, m.r1, m.r2, 2048).unwrap();
        let (r, u) = s.peak();
        assert!((r - 0.3).abs() < s.spacing());
        assert!((u - 0.365).abs() < 1e-6);
    }

    #[test]
    fn rescaling_is_exact_for_powers_of_two() {
        let s = solve_radial_bvp(3, 0.2, 0.9, 64).unwrap();
        let big = solve_radial_bvp(3, 0.4, 1.8, 64).unwrap();
        for (x, y) in s.rescaled(2.0).values.iter().zip(&big.values) {
            assert!((x - y).abs() <= 1e-15 * y.abs().max(1.0));
        }
    }
}
