//! Shortley–Weller discretisation on a hierarchy of nested grids.

use alloc::vec;
use alloc::vec::Vec;

use super::{GridSpec, NodeKind, AXIS_DIRECTIONS};
use crate::error::{Error, Result};
use crate::geometry::{Boundary, ValidatedDomain};
use crate::math::{abs, norm3};

/// Required ratio between the narrowest gap and the grid spacing.
pub const MIN_GAP_RATIO: f64 = 12.0;

pub(crate) const NONE: u32 = u32::MAX;

/// Nodes closer than this many grid spacings to a boundary are treated as
/// lying on it.
const BAND: f64 = 1e-6;

/// Stencil arm of an in-domain node that crosses the boundary at
/// `alpha · h` (`0 < alpha ≤ 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutArm {
    /// Grid index of the in-domain node.
    pub node: usize,
    /// Index into [`super::AXIS_DIRECTIONS`].
    pub dir: u8,
    pub alpha: f64,
    pub boundary: Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct CutRow {
    pub diag: f64,
    pub coef: [f64; 6],
    /// Second neighbours per axis used by enriched rows.
    pub far: [u32; 3],
    pub far_coef: [f64; 3],
}

impl CutRow {
    fn plain(diag: f64, coef: [f64; 6]) -> Self {
        Self {
            diag,
            coef,
            far: [NONE; 3],
            far_coef: [0.0; 3],
        }
    }
}

/// One discretisation level. Rows read
/// `diag·u_i − Σ coef_k u_k = n h²`; interior rows have `diag = 6` and unit
/// coefficients and are not stored.
#[derive(Debug, Clone)]
pub(crate) struct Level {
    pub grid: GridSpec,
    pub node_to_unknown: Vec<u32>,
    pub unknown_node: Vec<u32>,
    pub neighbors: Vec<[u32; 6]>,
    pub row_cut: Vec<u32>,
    pub cut_rows: Vec<CutRow>,
    pub colors: [Vec<u32>; 2],
    pub rhs: f64,
}

impl Level {
    pub fn len(&self) -> usize {
        self.unknown_node.len()
    }

    #[inline]
    pub fn diag(&self, i: usize) -> f64 {
        match self.row_cut[i] {
            NONE => 6.0,
            c => self.cut_rows[c as usize].diag,
        }
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.len() {
            y[i] = self.row_apply(i, x);
        }
    }

    #[inline]
    pub fn row_apply(&self, i: usize, x: &[f64]) -> f64 {
        let nb = &self.neighbors[i];
        match self.row_cut[i] {
            NONE => {
                6.0 * x[i]
                    - x[nb[0] as usize]
                    - x[nb[1] as usize]
                    - x[nb[2] as usize]
                    - x[nb[3] as usize]
                    - x[nb[4] as usize]
                    - x[nb[5] as usize]
            }
            c => {
                let row = &self.cut_rows[c as usize];
                row.diag * x[i] - cut_off_diagonal(row, nb, x)
            }
        }
    }

    /// `Σ coef_k x_k` over existing neighbours.
    #[inline]
    pub fn off_diagonal_sum(&self, i: usize, x: &[f64]) -> f64 {
        let nb = &self.neighbors[i];
        match self.row_cut[i] {
            NONE => {
                x[nb[0] as usize]
                    + x[nb[1] as usize]
                    + x[nb[2] as usize]
                    + x[nb[3] as usize]
                    + x[nb[4] as usize]
                    + x[nb[5] as usize]
            }
            c => cut_off_diagonal(&self.cut_rows[c as usize], nb, x),
        }
    }
}

#[inline]
fn cut_off_diagonal(row: &CutRow, nb: &[u32; 6], x: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..6 {
        if nb[k] != NONE {
            s += row.coef[k] * x[nb[k] as usize];
        }
    }
    for a in 0..3 {
        if row.far[a] != NONE {
            s += row.far_coef[a] * x[row.far[a] as usize];
        }
    }
    s
}

/// The assembled system: the finest level plus its coarsened copies used by
/// the multigrid preconditioner.
#[derive(Debug, Clone)]
pub struct IrregularPoissonSystem {
    /// Shortley–Weller hierarchy for the preconditioner.
    pub(crate) levels: Vec<Level>,
    /// Fine operator when it differs from `levels[0]`.
    pub(crate) enriched: Option<Level>,
    mask: Vec<NodeKind>,
    cut_arms: Vec<CutArm>,
}

impl IrregularPoissonSystem {
    pub fn grid(&self) -> GridSpec {
        self.levels[0].grid
    }

    pub(crate) fn operator(&self) -> &Level {
        self.enriched.as_ref().unwrap_or(&self.levels[0])
    }

    /// Rows using the singular stencils.
    pub fn enriched_rows(&self) -> usize {
        self.enriched.as_ref().map_or(0, |l| {
            l.cut_rows
                .iter()
                .filter(|r| r.far.iter().any(|&f| f != NONE))
                .count()
        })
    }

    pub fn unknowns(&self) -> usize {
        self.levels[0].len()
    }

    pub fn mask(&self) -> &[NodeKind] {
        &self.mask
    }

    pub fn cut_arms(&self) -> &[CutArm] {
        &self.cut_arms
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// Grid indices of the unknowns in solver order.
    pub fn unknown_nodes(&self) -> &[u32] {
        &self.levels[0].unknown_node
    }

    /// `y = A x` on the finest level.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.operator().apply(x, y)
    }

    /// Right-hand side value `n h²` shared by all rows.
    pub fn rhs_value(&self) -> f64 {
        self.levels[0].rhs
    }

    /// Structural M-matrix check on the fine operator: positive diagonal,
    /// non-positive off-diagonals, weak diagonal dominance everywhere and
    /// strict dominance on every boundary-adjacent row. Such a matrix has a
    /// positive diagonal scaling making it positive definite on its
    /// symmetric part's range, and its inverse is entrywise non-negative.
    pub fn is_m_matrix(&self) -> bool {
        let l = self.operator();
        for i in 0..l.len() {
            let d = l.diag(i);
            let (sum, cut) = match l.row_cut[i] {
                NONE => (6.0, false),
                c => {
                    let row = &l.cut_rows[c as usize];
                    if row.coef.iter().any(|&c| !(c > 0.0))
                        || row.far_coef.iter().any(|&c| c != 0.0)
                    {
                        return false;
                    }
                    let s: f64 = (0..6)
                        .filter(|&k| l.neighbors[i][k] != NONE)
                        .map(|k| row.coef[k])
                        .sum();
                    (s, true)
                }
            };
            if !(d > 0.0) || d < sum || (cut && d <= sum) {
                return false;
            }
        }
        true
    }
}

fn in_domain(domain: &ValidatedDomain, x: [f64; 3], h: f64) -> bool {
    let r = norm3(x);
    let margin = 2.0 * h;
    if r < domain.min_inner - margin || r > domain.max_outer + margin {
        return false;
    }
    let band = BAND * h;
    if r > domain.max_inner + margin && r < domain.min_outer - margin {
        return true;
    }
    let spec = domain.spec();
    spec.outer.phi(x) < -band && spec.inner.phi(x) > band
}

pub(crate) fn cut_arm(
    domain: &ValidatedDomain,
    x: [f64; 3],
    y: [f64; 3],
    e: [f64; 3],
    h: f64,
) -> (Boundary, f64) {
    let spec = domain.spec();
    let band = BAND * h;
    let which = if spec.outer.phi(y) >= -band {
        Boundary::Outer
    } else {
        Boundary::Inner
    };
    let s = domain.crossing(which, x, e, h).unwrap_or(h);
    (which, (s / h).clamp(BAND, 1.0))
}

fn build_level(
    domain: &ValidatedDomain,
    grid: GridSpec,
    n: u32,
    singular_radius: f64,
    arms: Option<&mut Vec<CutArm>>,
) -> Level {
    let total = grid.len();
    let h = grid.h;
    let mut node_to_unknown = vec![NONE; total];
    let mut unknown_node = Vec::new();
    let [nx, ny, nz] = grid.dims;
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let x = grid.position([i, j, k]);
                if i > 0
                    && j > 0
                    && k > 0
                    && i + 1 < nx
                    && j + 1 < ny
                    && k + 1 < nz
                    && in_domain(domain, x, h)
                {
                    let idx = grid.index(i, j, k);
                    node_to_unknown[idx] = unknown_node.len() as u32;
                    unknown_node.push(idx as u32);
                }
            }
        }
    }
    let strides = grid.strides();
    let mut neighbors = Vec::with_capacity(unknown_node.len());
    let mut row_cut = Vec::with_capacity(unknown_node.len());
    let mut cut_rows = Vec::new();
    let mut colors = [Vec::new(), Vec::new()];
    let mut arms = arms;
    for (u, &node) in unknown_node.iter().enumerate() {
        let node = node as usize;
        let c = grid.coords(node);
        colors[(c[0] + c[1] + c[2]) % 2].push(u as u32);
        let mut nb = [NONE; 6];
        let mut alpha = [1.0f64; 6];
        let mut any_cut = false;
        let x = grid.position(c);
        for d in 0..6 {
            let m = (node as isize + strides[d]) as usize;
            let t = node_to_unknown[m];
            if t != NONE {
                nb[d] = t;
            } else {
                let y = grid.position(grid.coords(m));
                let (which, a) = cut_arm(domain, x, y, AXIS_DIRECTIONS[d], h);
                alpha[d] = a;
                any_cut = true;
                if let Some(list) = arms.as_deref_mut() {
                    list.push(CutArm {
                        node,
                        dir: d as u8,
                        alpha: a,
                        boundary: which,
                    });
                }
            }
        }
        neighbors.push(nb);
        if singular_radius > 0.0 && norm3(x) < singular_radius {
            let row = enriched_row(&grid, &node_to_unknown, c, x, &nb, &alpha);
            row_cut.push(cut_rows.len() as u32);
            cut_rows.push(row);
        } else if any_cut {
            let mut coef = [0.0; 6];
            for a in 0..3 {
                let (am, ap) = (alpha[2 * a], alpha[2 * a + 1]);
                coef[2 * a] = 2.0 / (am * (am + ap));
                coef[2 * a + 1] = 2.0 / (ap * (am + ap));
            }
            let diag = coef.iter().sum();
            row_cut.push(cut_rows.len() as u32);
            cut_rows.push(CutRow::plain(diag, coef));
        } else {
            row_cut.push(NONE);
        }
    }
    Level {
        grid,
        node_to_unknown,
        unknown_node,
        neighbors,
        row_cut,
        cut_rows,
        colors,
        rhs: f64::from(n) * h * h,
    }
}

/// Assembly switches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssembleOptions {
    /// Rows of nodes with `|x|` below this radius use stencils that are also
    /// exact for `1/|x|` along every grid line. Zero disables them.
    pub singular_radius: f64,
}

impl AssembleOptions {
    /// Enable the singular stencils when the inner boundary is narrower than
    /// two grid spacings of the finest grid `h`.
    pub fn for_resolution(domain: &ValidatedDomain, h: f64) -> Self {
        let singular_radius = if domain.min_inner < SUBGRID_RATIO * h {
            domain.max_inner + SINGULAR_BAND * h
        } else {
            0.0
        };
        Self { singular_radius }
    }
}

/// Inner boundaries narrower than this many grid spacings are sub-grid.
const SUBGRID_RATIO: f64 = 2.0;
/// Width in grid spacings of the shell of singular stencils.
const SINGULAR_BAND: f64 = 16.0;

/// Build the discretisation of `Δu = −3`, `u = 0` on `∂Ω` at spacing `h`.
pub fn assemble_system(domain: &ValidatedDomain, h: f64) -> Result<IrregularPoissonSystem> {
    assemble_system_with(domain, h, AssembleOptions::for_resolution(domain, h))
}

pub fn assemble_system_with(
    domain: &ValidatedDomain,
    h: f64,
    opts: AssembleOptions,
) -> Result<IrregularPoissonSystem> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::OutOfRange {
            what: "grid spacing",
            value: h,
            range: "(0, inf)".into(),
        });
    }
    let ratio = domain.gap() / h;
    if ratio < MIN_GAP_RATIO {
        return Err(Error::Resolution {
            ratio,
            required: MIN_GAP_RATIO,
        });
    }
    let n = super::DIM;
    let fine = GridSpec::centered(h, domain.max_outer);
    let mut arms = Vec::new();
    let first = build_level(domain, fine, n, 0.0, Some(&mut arms));
    if first.len() == 0 {
        return Err(Error::Degenerate("no grid nodes inside the domain"));
    }
    let mut mask = vec![NodeKind::Exterior; fine.len()];
    for (u, &node) in first.unknown_node.iter().enumerate() {
        mask[node as usize] = if first.neighbors[u].iter().all(|&t| t != NONE) {
            NodeKind::Interior
        } else {
            NodeKind::BoundaryAdjacent
        };
    }
    let mut levels = vec![first];
    loop {
        let last = &levels[levels.len() - 1];
        let k = last.grid.half_width();
        if k < 8 || last.len() < 512 {
            break;
        }
        let grid = GridSpec::with_half_width(last.grid.h * 2.0, k.div_ceil(2));
        let level = build_level(domain, grid, n, 0.0, None);
        if level.len() == 0 {
            break;
        }
        levels.push(level);
    }
    let enriched = (opts.singular_radius > 0.0)
        .then(|| build_level(domain, fine, n, opts.singular_radius, None));
    Ok(IrregularPoissonSystem {
        levels,
        enriched,
        mask,
        cut_arms: arms,
    })
}

/// Row whose per-axis second differences are exact on
/// `span{1, s, s², 1/|x + s e|}`, using the second neighbour on the side
/// away from the origin. Axes where that is impossible fall back to the
/// Shortley–Weller weights.
fn enriched_row(
    grid: &GridSpec,
    node_to_unknown: &[u32],
    c: [usize; 3],
    x: [f64; 3],
    nb: &[u32; 6],
    alpha: &[f64; 6],
) -> CutRow {
    let h = grid.h;
    let r = norm3(x);
    let mut row = CutRow::plain(0.0, [0.0; 6]);
    for a in 0..3 {
        let (am, ap) = (alpha[2 * a], alpha[2 * a + 1]);
        let far_node = |sign: isize| -> Option<u32> {
            let ca = c[a] as isize + 2 * sign;
            if ca < 0 || ca as usize >= grid.dims[a] {
                return None;
            }
            let mut cc = c;
            cc[a] = ca as usize;
            let t = node_to_unknown[grid.index(cc[0], cc[1], cc[2])];
            (t != NONE).then_some(t)
        };
        let outward = if x[a] >= 0.0 { 1isize } else { -1 };
        let mut choice = None;
        for sign in [outward, -outward] {
            let side = if sign < 0 { 2 * a } else { 2 * a + 1 };
            if nb[side] != NONE {
                if let Some(t) = far_node(sign) {
                    choice = Some((sign, t));
                    break;
                }
            }
        }
        let weights = choice.and_then(|(sign, t)| {
            let pts = [-am, 0.0, ap, 2.0 * sign as f64];
            let target = h * h * r * (3.0 * x[a] * x[a] - r * r) / (r * r * r * r * r);
            line_weights(
                &pts,
                |s| {
                    let mut y = x;
                    y[a] += s * h;
                    r / norm3(y)
                },
                target,
            )
            .map(|w| (w, t))
        });
        match weights {
            Some((w, t)) if r > 0.0 => {
                row.diag -= w[1];
                row.coef[2 * a] = w[0];
                row.coef[2 * a + 1] = w[2];
                row.far[a] = t;
                row.far_coef[a] = w[3];
            }
            _ => {
                let cm = 2.0 / (am * (am + ap));
                let cp = 2.0 / (ap * (am + ap));
                row.coef[2 * a] = cm;
                row.coef[2 * a + 1] = cp;
                row.diag += cm + cp;
            }
        }
    }
    row
}

/// Weights `w` with `Σ w_k f(s_k) = f''(0)` for `f ∈ {1, s, s², g}` where
/// `g''(0) = g2`.
fn line_weights(s: &[f64; 4], g: impl Fn(f64) -> f64, g2: f64) -> Option<[f64; 4]> {
    // rows: basis functions, columns: points
    let mut m = [[0.0; 5]; 4];
    for k in 0..4 {
        m[0][k] = 1.0;
        m[1][k] = s[k];
        m[2][k] = s[k] * s[k];
        m[3][k] = g(s[k]);
    }
    m[2][4] = 2.0;
    m[3][4] = g2;
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| abs(m[i][col]).total_cmp(&abs(m[j][col])))?;
        if abs(m[piv][col]) < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        for i in 0..4 {
            if i != col {
                let f = m[i][col] / m[col][col];
                for j in col..5 {
                    m[i][j] -= f * m[col][j];
                }
            }
        }
    }
    let w: [f64; 4] = core::array::from_fn(|k| m[k][4] / m[k][k]);
    w.iter().all(|v| v.is_finite()).then_some(w)
}
