//! Embedded-boundary finite-difference solver for `Δu = −3` with zero
//! Dirichlet data on a validated ring domain, and everything read off the
//! solved field: boundary gradients, the maximum surface `Σ`, and level-set
//! measures.
//!
//! Grids are cubic and centred on the origin with a node at the origin, so
//! the grid with spacing `2h` is a subset of the one with spacing `h`.

mod assemble;
mod gradient;
mod interp;
mod levels;
mod multigrid;
mod sigma;
mod solve;

use alloc::vec::Vec;

pub use assemble::{
    assemble_system, assemble_system_with, AssembleOptions, CutArm, IrregularPoissonSystem,
    MIN_GAP_RATIO,
};
pub use gradient::{
    boundary_gradient, boundary_gradient_with, BoundaryGradient, GradientSample, NormalStencil,
};
pub use interp::{extend_with_ghosts, ExtendedField};
pub use levels::{level_set_measures, CellRegions, LevelMeasures};
pub use sigma::{extract_sigma, SigmaSurface};
pub use solve::{solve_poisson, Preconditioner, SolveOptions, SolveReport};

use crate::math::ceil;

/// Dimension of the field pipeline.
pub const DIM: u32 = 3;

/// Cartesian grid: node `(i, j, k)` sits at `origin + h·(i, j, k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    pub origin: [f64; 3],
    pub h: f64,
    pub dims: [usize; 3],
}

impl GridSpec {
    /// Cube `[-K h, K h]³` with the smallest `K` covering `extent` plus two
    /// layers of nodes.
    pub fn centered(h: f64, extent: f64) -> Self {
        let k = ceil(extent / h) as usize + 2;
        Self::with_half_width(h, k)
    }

    pub fn with_half_width(h: f64, k: usize) -> Self {
        let o = -(k as f64) * h;
        Self {
            origin: [o, o, o],
            h,
            dims: [2 * k + 1; 3],
        }
    }

    /// Half width `K` for centred grids.
    pub fn half_width(&self) -> usize {
        (self.dims[0] - 1) / 2
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.dims[1] + j) * self.dims[0] + i
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.dims[0];
        let j = (idx / self.dims[0]) % self.dims[1];
        let k = idx / (self.dims[0] * self.dims[1]);
        [i, j, k]
    }

    #[inline]
    pub fn position(&self, c: [usize; 3]) -> [f64; 3] {
        [
            self.origin[0] + self.h * c[0] as f64,
            self.origin[1] + self.h * c[1] as f64,
            self.origin[2] + self.h * c[2] as f64,
        ]
    }

    /// Linear index offsets of the six axis neighbours, in the order
    /// `-x, +x, -y, +y, -z, +z`.
    pub fn strides(&self) -> [isize; 6] {
        let sx = 1isize;
        let sy = self.dims[0] as isize;
        let sz = (self.dims[0] * self.dims[1]) as isize;
        [-sx, sx, -sy, sy, -sz, sz]
    }
}

/// Unit vectors matching [`GridSpec::strides`].
pub const AXIS_DIRECTIONS: [[f64; 3]; 6] = [
    [-1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0],
    [0.0, -1.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0],
];

/// Classification of a grid node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum NodeKind {
    Exterior,
    Interior,
    /// Inside the domain with at least one stencil arm cut by the boundary.
    BoundaryAdjacent,
}

impl NodeKind {
    pub fn in_domain(self) -> bool {
        self != NodeKind::Exterior
    }
}

/// Grid samples of `u` (zero outside the domain) with the node mask.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField3 {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub mask: Vec<NodeKind>,
}

impl ScalarField3 {
    pub fn max_node(&self) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, (&v, m)) in self.values.iter().zip(&self.mask).enumerate() {
            if m.in_domain() && v > best.1 {
                best = (i, v);
            }
        }
        best
    }

    pub fn min_in_domain(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.mask)
            .filter(|(_, m)| m.in_domain())
            .map(|(v, _)| *v)
            .fold(f64::INFINITY, f64::min)
    }
}
