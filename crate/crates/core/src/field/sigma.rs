//! Extraction of the maximum surface `Σ` as a radial graph.

use alloc::vec::Vec;

use super::interp::ExtendedField;
use crate::error::{Error, Result};
use crate::geometry::{
    boundary_quadrature, RadialGraph, SphereGrid, SurfaceSample, ValidatedDomain,
};
use crate::math::{abs, scale3};
use crate::roots::golden_max;

/// `Σ` sampled along rays, with its smoothed radial graph.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSurface {
    /// Per-ray argmax radius.
    pub ray_radius: Vec<f64>,
    /// Per-ray maximum value.
    pub ray_value: Vec<f64>,
    /// Spherical-harmonic fit of `ray_radius`.
    pub graph: RadialGraph,
    /// Quadrature samples of the fitted graph.
    pub samples: Vec<SurfaceSample>,
    /// Largest per-ray maximum.
    pub u_max: f64,
    /// Rays whose maximum sat at a segment end.
    pub flagged: usize,
    /// `max |ray_radius − graph|`.
    pub fit_residual: f64,
    pub fit_degree: u32,
}

/// Compass search for a local maximum of `f` within `radius` of `start`.
fn compass_max<F: Fn([f64; 3]) -> f64>(f: F, start: [f64; 3], step: f64, radius: f64) -> f64 {
    let (mut p, mut v, mut step) = (start, f(start), step);
    while step > 1e-9 * radius {
        let mut moved = false;
        for axis in 0..3 {
            for sign in [-1.0, 1.0] {
                let mut q = p;
                q[axis] += sign * step;
                let d = [q[0] - start[0], q[1] - start[1], q[2] - start[2]];
                if d[0] * d[0] + d[1] * d[1] + d[2] * d[2] > radius * radius {
                    continue;
                }
                let w = f(q);
                if w > v {
                    (p, v, moved) = (q, w, true);
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    v
}

/// Maximise the tricubic interpolant of `u` along each ray of `grid`
/// between the two boundaries, then fit the radii with harmonics of degree
/// `≤ fit_degree`.
pub fn extract_sigma(
    field: &ExtendedField,
    domain: &ValidatedDomain,
    grid: &SphereGrid,
    fit_degree: u32,
) -> Result<SigmaSurface> {
    let h = field.grid.h;
    let spec = domain.spec();
    let mut ray_radius = Vec::with_capacity(grid.len());
    let mut ray_value = Vec::with_capacity(grid.len());
    let mut flagged = 0;
    for dir in &grid.directions {
        let a = spec.inner.radius(*dir);
        let b = spec.outer.radius(*dir);
        // the tricubic stencil of points within 2h of the inner boundary
        // reaches the ghost layer, where a steep near-singular profile
        // overshoots
        let a = a + (2.0 * h).min(0.25 * (b - a));
        let f = |r: f64| field.tricubic(scale3(*dir, r));
        let step = 0.5 * h;
        let steps = ((b - a) / step) as usize;
        let mut best = (0usize, f64::NEG_INFINITY);
        for k in 1..steps {
            let v = f(a + step * k as f64);
            if v > best.1 {
                best = (k, v);
            }
        }
        if best.0 <= 1 || best.0 + 1 >= steps {
            flagged += 1;
        }
        let centre = a + step * best.0 as f64;
        let lo = (centre - step).max(a);
        let hi = (centre + step).min(b);
        let (r, v) = golden_max(f, lo, hi, 1e-10);
        ray_radius.push(r);
        ray_value.push(v);
    }
    if flagged * 100 > grid.len() {
        return Err(Error::TooManyFlagged {
            stage: "locating the maximum along rays",
            flagged,
            total: grid.len(),
        });
    }
    let graph = RadialGraph::fit(grid, &ray_radius, fit_degree)?;
    let fit_residual = grid
        .directions
        .iter()
        .zip(&ray_radius)
        .map(|(d, r)| abs(graph.radius(*d) - r))
        .fold(0.0, f64::max);
    let samples = boundary_quadrature(&graph, grid)?;
    // a maximum attained at isolated points generally falls between rays
    let (best, _) = ray_value
        .iter()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc },
        );
    let start = scale3(grid.directions[best], ray_radius[best]);
    let u_max = compass_max(|p| field.tricubic(p), start, 0.5 * h, 2.0 * h).max(ray_value[best]);
    Ok(SigmaSurface {
        ray_radius,
        ray_value,
        graph,
        samples,
        u_max,
        flagged,
        fit_residual,
        fit_degree,
    })
}
