//! Interpolation of grid fields. Exterior nodes next to the boundary carry
//! ghost values, the linear extrapolation of `u` through the boundary zero
//! along the grid line, so that cells straddling `∂Ω` interpolate a smooth
//! extension of `u` instead of a kink at zero.

use alloc::vec::Vec;

use super::assemble::cut_arm;
use super::{GridSpec, ScalarField3, AXIS_DIRECTIONS};
use crate::geometry::ValidatedDomain;
use crate::math::floor;

/// Grid values including ghosts outside the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

/// Add ghost values at the two exterior layers along each cut grid line.
pub fn extend_with_ghosts(field: &ScalarField3, domain: &ValidatedDomain) -> ExtendedField {
    let grid = field.grid;
    let strides = grid.strides();
    let mut ghosts1: Vec<(usize, f64)> = Vec::new();
    let mut ghosts2: Vec<(usize, f64)> = Vec::new();
    for (node, kind) in field.mask.iter().enumerate() {
        if !kind.in_domain() {
            continue;
        }
        let c = grid.coords(node);
        let x = grid.position(c);
        for d in 0..6 {
            let m = (node as isize + strides[d]) as usize;
            if field.mask[m].in_domain() {
                continue;
            }
            let y = grid.position(grid.coords(m));
            let (_, alpha) = cut_arm(domain, x, y, AXIS_DIRECTIONS[d], grid.h);
            let u = field.values[node];
            ghosts1.push((m, u * (1.0 - 1.0 / alpha)));
            let m2 = m as isize + strides[d];
            if m2 >= 0 && (m2 as usize) < grid.len() && !field.mask[m2 as usize].in_domain() {
                ghosts2.push((m2 as usize, u * (1.0 - 2.0 / alpha)));
            }
        }
    }
    let mut values = field.values.clone();
    // second layer first so that first-layer ghosts take precedence
    for mut list in [ghosts2, ghosts1] {
        list.sort_by_key(|g| g.0);
        for run in list.chunk_by(|a, b| a.0 == b.0) {
            let mean = run.iter().map(|g| g.1).sum::<f64>() / run.len() as f64;
            values[run[0].0] = mean;
        }
    }
    ExtendedField { grid, values }
}

impl ExtendedField {
    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Self {
        Self { grid, values }
    }

    #[inline]
    fn local(&self, p: [f64; 3]) -> ([isize; 3], [f64; 3]) {
        let mut c = [0isize; 3];
        let mut f = [0.0; 3];
        for a in 0..3 {
            let t = (p[a] - self.grid.origin[a]) / self.grid.h;
            let fl = floor(t);
            c[a] = fl as isize;
            f[a] = t - fl;
        }
        (c, f)
    }

    #[inline]
    fn at(&self, i: isize, j: isize, k: isize) -> f64 {
        let d = self.grid.dims;
        if i < 0 || j < 0 || k < 0 || i as usize >= d[0] || j as usize >= d[1] || k as usize >= d[2]
        {
            return 0.0;
        }
        self.values[self.grid.index(i as usize, j as usize, k as usize)]
    }

    pub fn trilinear(&self, p: [f64; 3]) -> f64 {
        let (c, f) = self.local(p);
        let mut s = 0.0;
        for dz in 0..2 {
            let wz = if dz == 0 { 1.0 - f[2] } else { f[2] };
            for dy in 0..2 {
                let wy = if dy == 0 { 1.0 - f[1] } else { f[1] };
                for dx in 0..2 {
                    let wx = if dx == 0 { 1.0 - f[0] } else { f[0] };
                    s += wx * wy * wz * self.at(c[0] + dx, c[1] + dy, c[2] + dz);
                }
            }
        }
        s
    }

    /// Tensor-product cubic Lagrange interpolation on the 4×4×4 nodes
    /// around `p`.
    pub fn tricubic(&self, p: [f64; 3]) -> f64 {
        let (c, f) = self.local(p);
        let w = |t: f64| -> [f64; 4] {
            [
                -t * (t - 1.0) * (t - 2.0) / 6.0,
                (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
                -(t + 1.0) * t * (t - 2.0) / 2.0,
                (t + 1.0) * t * (t - 1.0) / 6.0,
            ]
        };
        let (wx, wy, wz) = (w(f[0]), w(f[1]), w(f[2]));
        let mut s = 0.0;
        for (dz, wzv) in wz.iter().enumerate() {
            for (dy, wyv) in wy.iter().enumerate() {
                let mut row = 0.0;
                for (dx, wxv) in wx.iter().enumerate() {
                    row += wxv
                        * self.at(
                            c[0] + dx as isize - 1,
                            c[1] + dy as isize - 1,
                            c[2] + dz as isize - 1,
                        );
                }
                s += wzv * wyv * row;
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample<F: Fn([f64; 3]) -> f64>(f: F) -> ExtendedField {
        let grid = GridSpec::with_half_width(0.1, 10);
        let values = (0..grid.len())
            .map(|i| f(grid.position(grid.coords(i))))
            .collect();
        ExtendedField::from_values(grid, values)
    }

    #[test]
    fn trilinear_reproduces_multilinear() {
        let f = |p: [f64; 3]| 1.0 + 2.0 * p[0] - p[1] + 0.5 * p[0] * p[1] * p[2];
        let e = sample(f);
        let p = [0.123, -0.377, 0.051];
        assert!((e.trilinear(p) - f(p)).abs() < 1e-13);
    }

    #[test]
    fn tricubic_reproduces_cubics() {
        let f = |p: [f64; 3]| p[0].powi(3) - 2.0 * p[1] * p[1] * p[2] + p[0] * p[1] * p[2] + 0.3;
        let e = sample(f);
        let p = [0.123, -0.377, 0.051];
        assert!((e.tricubic(p) - f(p)).abs() < 1e-13);
    }
}
