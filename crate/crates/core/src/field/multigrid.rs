//! Geometric multigrid V-cycle over the rediscretised level hierarchy,
//! used as a fixed linear preconditioner.

use alloc::vec;
use alloc::vec::Vec;

use super::assemble::{Level, NONE};

const PRE_SWEEPS: usize = 2;
const POST_SWEEPS: usize = 2;
const COARSEST_SWEEPS: usize = 60;

pub(crate) struct Workspace {
    residual: Vec<Vec<f64>>,
    rhs: Vec<Vec<f64>>,
    sol: Vec<Vec<f64>>,
}

impl Workspace {
    pub fn new(levels: &[Level]) -> Self {
        Self {
            residual: levels.iter().map(|l| vec![0.0; l.len()]).collect(),
            rhs: levels.iter().map(|l| vec![0.0; l.len()]).collect(),
            sol: levels.iter().map(|l| vec![0.0; l.len()]).collect(),
        }
    }
}

fn smooth(level: &Level, x: &mut [f64], b: &[f64], sweeps: usize, reverse: bool) {
    for _ in 0..sweeps {
        for c in 0..2 {
            let color = if reverse { 1 - c } else { c };
            for &i in &level.colors[color] {
                let i = i as usize;
                let off = level.off_diagonal_sum(i, x);
                x[i] = (b[i] + off) / level.diag(i);
            }
        }
    }
}

/// Parents of a fine node on the next coarser grid, with trilinear weights.
/// Calls `f(coarse_unknown, weight)` for each parent that is an unknown.
#[inline]
fn for_each_parent<F: FnMut(usize, f64)>(fine: &Level, coarse: &Level, fine_node: usize, mut f: F) {
    let kf = fine.grid.half_width() as isize;
    let kc = coarse.grid.half_width() as isize;
    let c = fine.grid.coords(fine_node);
    let mut lo = [0isize; 3];
    let mut odd = [false; 3];
    for a in 0..3 {
        let rel = c[a] as isize - kf;
        lo[a] = rel.div_euclid(2) + kc;
        odd[a] = rel.rem_euclid(2) == 1;
    }
    let w_axis = |o: bool| if o { 0.5 } else { 1.0 };
    let wx = w_axis(odd[0]);
    let wy = w_axis(odd[1]);
    let wz = w_axis(odd[2]);
    for dz in 0..=(odd[2] as isize) {
        for dy in 0..=(odd[1] as isize) {
            for dx in 0..=(odd[0] as isize) {
                let (i, j, k) = (lo[0] + dx, lo[1] + dy, lo[2] + dz);
                let dims = coarse.grid.dims;
                if i < 0
                    || j < 0
                    || k < 0
                    || i as usize >= dims[0]
                    || j as usize >= dims[1]
                    || k as usize >= dims[2]
                {
                    continue;
                }
                let idx = coarse.grid.index(i as usize, j as usize, k as usize);
                let u = coarse.node_to_unknown[idx];
                if u != NONE {
                    f(u as usize, wx * wy * wz);
                }
            }
        }
    }
}

/// One V-cycle for `A x = b` at `level`, starting from `x`.
fn vcycle(levels: &[Level], l: usize, x: &mut [f64], b: &[f64], ws: &mut Workspace) {
    let level = &levels[l];
    if l + 1 == levels.len() {
        smooth(level, x, b, COARSEST_SWEEPS, false);
        smooth(level, x, b, COARSEST_SWEEPS, true);
        return;
    }
    smooth(level, x, b, PRE_SWEEPS, false);

    let mut r = core::mem::take(&mut ws.residual[l]);
    for i in 0..level.len() {
        r[i] = b[i] - level.row_apply(i, x);
    }
    let coarse = &levels[l + 1];
    let mut bc = core::mem::take(&mut ws.rhs[l + 1]);
    bc.iter_mut().for_each(|v| *v = 0.0);
    // full weighting (transpose of trilinear prolongation over 8) times the
    // factor 4 between the h² scalings of the two levels
    for (i, &node) in level.unknown_node.iter().enumerate() {
        let ri = r[i];
        for_each_parent(level, coarse, node as usize, |p, w| bc[p] += 0.5 * w * ri);
    }
    let mut xc = core::mem::take(&mut ws.sol[l + 1]);
    xc.iter_mut().for_each(|v| *v = 0.0);
    vcycle(levels, l + 1, &mut xc, &bc, ws);
    for (i, &node) in level.unknown_node.iter().enumerate() {
        let mut corr = 0.0;
        for_each_parent(level, coarse, node as usize, |p, w| corr += w * xc[p]);
        x[i] += corr;
    }
    ws.residual[l] = r;
    ws.rhs[l + 1] = bc;
    ws.sol[l + 1] = xc;

    smooth(level, x, b, POST_SWEEPS, true);
}

/// `z = M⁻¹ r` with `M⁻¹` one V-cycle from a zero initial guess.
pub(crate) fn precondition(levels: &[Level], r: &[f64], z: &mut [f64], ws: &mut Workspace) {
    z.iter_mut().for_each(|v| *v = 0.0);
    vcycle(levels, 0, z, r, ws);
}
