//! Normal derivative of the solved field on a boundary component.

use alloc::vec::Vec;

use super::interp::ExtendedField;
use crate::error::{Error, Result};
use crate::geometry::{Boundary, SurfaceSample, ValidatedDomain};
use crate::math::{abs, add3, scale3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientSample {
    /// `|∂u/∂ν|`, `None` when the stencil left the domain.
    pub raw: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGradient {
    pub samples: Vec<GradientSample>,
    pub flagged: usize,
    pub stencil: NormalStencil,
}

/// Points `t = (first + k)·spacing`, `k < count`, along the inward normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalStencil {
    pub spacing: f64,
    pub first: usize,
    pub count: usize,
}

impl NormalStencil {
    /// Default stencil: `t = 4.5h … 15h`.
    pub fn primary(h: f64) -> Self {
        Self {
            spacing: 1.5 * h,
            first: 3,
            count: 8,
        }
    }

    /// Independent stencil used to estimate the error of [`Self::primary`]:
    /// `t = 4h … 14h`.
    pub fn secondary(h: f64) -> Self {
        Self {
            spacing: 2.0 * h,
            first: 2,
            count: 6,
        }
    }
}

/// Least-squares slope at `t = 0` from values `f(t)` of a solution of
/// `Δu = −3` vanishing on a surface of mean curvature `H`, modelled on the
/// osculating sphere of radius `ρ = 2/H`: `u = −(r² − ρ²)/2 + c₁ρ²(1/ρ − 1/r)
/// + c₂t² + c₃t³` with `r = ρ + σt`. Exact for spheres.
fn sphere_fit(points: &[(f64, f64)], curvature: f64, sigma: f64) -> Option<f64> {
    let h = if abs(curvature) < 1e-3 {
        1e-3f64.copysign(curvature)
    } else {
        curvature
    };
    let rho = 2.0 / h;
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for &(t, f) in points {
        let r = rho + sigma * t;
        let v = f + 0.5 * sigma * t * (2.0 * rho + sigma * t);
        let row = [sigma * t * rho / r, t * t, t * t * t];
        for a in 0..3 {
            atb[a] += row[a] * v;
            for b in 0..3 {
                ata[a][b] += row[a] * row[b];
            }
        }
    }
    let c = solve3(ata, atb)?;
    Some(abs(sigma * (c[0] - rho)))
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Cramer's rule; the normal equations here are 3×3 and well scaled.
fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let d = det3(&a);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut x = [0.0; 3];
    for (c, xc) in x.iter_mut().enumerate() {
        let mut m = a;
        for r in 0..3 {
            m[r][c] = b[r];
        }
        *xc = det3(&m) / d;
    }
    Some(x)
}

/// Normal slopes with [`NormalStencil::primary`].
pub fn boundary_gradient(
    field: &ExtendedField,
    domain: &ValidatedDomain,
    which: Boundary,
    samples: &[SurfaceSample],
) -> Result<BoundaryGradient> {
    boundary_gradient_with(
        field,
        domain,
        which,
        samples,
        NormalStencil::primary(field.grid.h),
    )
}

/// Sample the tricubic interpolant along the inward normal of each sample
/// and fit the local sphere model. Points near the boundary are skipped:
/// their interpolation stencils reach the extrapolated ghost layer.
pub fn boundary_gradient_with(
    field: &ExtendedField,
    domain: &ValidatedDomain,
    which: Boundary,
    samples: &[SurfaceSample],
    stencil: NormalStencil,
) -> Result<BoundaryGradient> {
    let sigma = match which {
        Boundary::Outer => -1.0,
        Boundary::Inner => 1.0,
    };
    let mut out = Vec::with_capacity(samples.len());
    let mut flagged = 0;
    let mut points = Vec::with_capacity(stencil.count);
    for s in samples {
        let nu = scale3(s.normal, sigma);
        points.clear();
        for k in 0..stencil.count {
            let t = stencil.spacing * (stencil.first + k) as f64;
            let p = add3(s.point, scale3(nu, t));
            if !domain.contains(p) {
                break;
            }
            points.push((t, field.tricubic(p)));
        }
        let raw = if points.len() == stencil.count {
            sphere_fit(&points, s.mean_curvature, sigma)
        } else {
            None
        };
        if raw.is_none() {
            flagged += 1;
        }
        out.push(GradientSample { raw });
    }
    if flagged * 100 > samples.len() {
        return Err(Error::TooManyFlagged {
            stage: "sampling boundary gradients",
            flagged,
            total: samples.len(),
        });
    }
    Ok(BoundaryGradient {
        samples: out,
        flagged,
        stencil,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_fit_is_exact_on_shells() {
        // u = −r²/2 + A + B/r on 0.2 < r < 1
        let (a, b) = (0.2f64, 1.0f64);
        let bb = 0.5 * (a * a - b * b) / (1.0 / a - 1.0 / b);
        let aa = 0.5 * a * a - bb / a;
        let u = |r: f64| -0.5 * r * r + aa + bb / r;
        let du = |r: f64| -r - bb / (r * r);
        let inner: Vec<_> = (3..11)
            .map(|k| (0.01 * k as f64, u(a + 0.01 * k as f64)))
            .collect();
        let g = sphere_fit(&inner, 2.0 / a, 1.0).unwrap();
        assert!((g - abs(du(a))).abs() < 1e-9 * g);
        let outer: Vec<_> = (3..11)
            .map(|k| (0.01 * k as f64, u(b - 0.01 * k as f64)))
            .collect();
        let g = sphere_fit(&outer, 2.0 / b, -1.0).unwrap();
        assert!((g - abs(du(b))).abs() < 1e-9 * g);
    }

    #[test]
    fn sphere_fit_handles_flat_boundaries() {
        // u = 3t(1 − t)/2 between two planes a unit apart
        let pts: Vec<_> = (3..11)
            .map(|k| {
                let t = 0.02 * k as f64;
                (t, 1.5 * t * (1.0 - t))
            })
            .collect();
        let g = sphere_fit(&pts, 0.0, 1.0).unwrap();
        assert!((g - 1.5).abs() < 1e-6);
    }
}
