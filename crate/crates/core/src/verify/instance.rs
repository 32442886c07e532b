//! Solved instances as seen by the checks: boundary slopes, the maximum
//! surface, interior samples of `|∇u|²` and level-set measures, for either a
//! radial solution in any dimension or a three-dimensional field.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{
    boundary_gradient, boundary_gradient_with, extend_with_ghosts, extract_sigma,
    level_set_measures, BoundaryGradient, CellRegions, ExtendedField, LevelMeasures, NormalStencil,
    ScalarField3, SigmaSurface,
};
use crate::geometry::{boundary_quadrature, Boundary, SphereGrid, SurfaceSample, ValidatedDomain};
use crate::math::{abs, norm3, powi, scale3, unit_sphere_area};
use crate::radial::RadialSolution;

/// One of the two components of `Ω \ Σ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Region {
    /// Between the inner boundary `Γ₁` and `Σ`.
    Inner,
    /// Between `Σ` and the outer boundary `Γ₂`.
    Outer,
}

impl Region {
    pub const BOTH: [Region; 2] = [Region::Inner, Region::Outer];

    pub fn boundary(self) -> Boundary {
        match self {
            Region::Inner => Boundary::Inner,
            Region::Outer => Boundary::Outer,
        }
    }

    /// `+1` when the normal pointing away from the origin leaves the region
    /// through its boundary component (outer region), `−1` otherwise.
    pub fn boundary_sign(self) -> f64 {
        match self {
            Region::Inner => -1.0,
            Region::Outer => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Region::Inner => "inner",
            Region::Outer => "outer",
        }
    }
}

/// A boundary component with its slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    /// Mean curvature is taken with respect to the normal pointing away from
    /// the origin.
    pub samples: Vec<SurfaceSample>,
    /// `|∇u|` per sample.
    pub slope: Vec<f64>,
    /// `∫_Γ |∇u| / (n Vol(N))` for the region `N` bounded by `Γ` and `Σ`;
    /// 1 in exact arithmetic because `∇u` vanishes on `Σ`.
    pub flux_ratio: f64,
    /// Estimated error of a single slope sample.
    pub slope_error: f64,
    /// Samples whose raw stencil failed and carry the mean slope instead.
    pub flagged: usize,
}

impl BoundaryData {
    pub fn area(&self) -> f64 {
        self.samples.iter().map(|s| s.weight).sum()
    }

    pub fn max_slope(&self) -> f64 {
        self.slope.iter().copied().fold(0.0, f64::max)
    }

    pub fn curvature_integral(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.weight * s.mean_curvature)
            .sum()
    }

    pub fn flux(&self) -> f64 {
        self.samples
            .iter()
            .zip(&self.slope)
            .map(|(s, g)| s.weight * g)
            .sum()
    }
}

/// The maximum surface.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaData {
    /// Mean curvature with respect to the normal pointing away from the
    /// origin.
    pub samples: Vec<SurfaceSample>,
    /// Radius of `Σ` along each sampled direction.
    pub radii: Vec<f64>,
    /// Bound on the error of the sampled mean curvatures.
    pub curvature_error: f64,
    /// Bound on the relative error of the area of `Σ`.
    pub area_error: f64,
}

impl SigmaData {
    pub fn area(&self) -> f64 {
        self.samples.iter().map(|s| s.weight).sum()
    }

    pub fn curvature_integral(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.weight * s.mean_curvature)
            .sum()
    }

    pub fn mean_radius(&self) -> f64 {
        let w: f64 = self.samples.iter().map(|s| s.weight).sum();
        self.samples
            .iter()
            .map(|s| s.weight * norm3(s.point))
            .sum::<f64>()
            / w
    }

    /// `max |ρ_Σ − ρ̄| / ρ̄`.
    pub fn sphericity(&self) -> f64 {
        let mean = self.mean_radius();
        self.radii.iter().map(|r| abs(r - mean)).fold(0.0, f64::max) / mean
    }
}

/// `|∇u|²` at an interior sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeSample {
    pub position: [f64; 3],
    pub u: f64,
    pub w: f64,
    /// Estimated error of `w`; `None` when the sample is too close to the
    /// boundary for the estimate, in which case `w` is only fit for
    /// volume integrals.
    pub w_error: Option<f64>,
    /// Quadrature weight.
    pub volume: f64,
}

/// `|∇u|²` at signed distances from `Σ` along one direction, inside one
/// region.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalProfile {
    /// Mean curvature of `Σ` at the foot point, normal pointing out of the
    /// region.
    pub curvature: f64,
    pub distance: Vec<f64>,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
}

/// Data of a solved instance.
pub trait Instance {
    fn dimension(&self) -> u32;
    /// Resolution of the underlying discretisation.
    fn spacing(&self) -> f64;
    fn u_max(&self) -> f64;
    fn sigma(&self) -> &SigmaData;
    fn boundary(&self, region: Region) -> &BoundaryData;
    /// `Vol(N)`.
    fn region_volume(&self, region: Region) -> f64;
    /// Whether `|∇u|` is constant on the boundary component by symmetry.
    fn constant_slope(&self, region: Region) -> bool;
    fn for_each_node(&self, region: Region, f: &mut dyn FnMut(&NodeSample));
    /// Measures of `{u > t} ∩ N` and `{u = t} ∩ N`.
    fn level_measures(&self, region: Region, t: f64) -> LevelMeasures;
    /// A few profiles of `|∇u|²` normal to `Σ` at distances in `[d, 3d]`.
    fn normal_profiles(&self, region: Region, d: f64) -> Vec<NormalProfile>;
}

/// Distances `d, …, 3d` used for normal profiles.
fn profile_distances(d: f64) -> impl Iterator<Item = f64> {
    (0..9).map(move |k| d * (1.0 + 0.25 * k as f64))
}

/// A discrete radial solution in dimension `n`.
#[derive(Debug, Clone)]
pub struct RadialInstance {
    solution: RadialSolution,
    slopes: Vec<f64>,
    peak: (f64, f64),
    peak_index: usize,
    sigma: SigmaData,
    boundaries: [BoundaryData; 2],
}

fn sphere_sample(n: u32, radius: f64, outward_curvature: f64) -> SurfaceSample {
    SurfaceSample {
        point: [radius, 0.0, 0.0],
        direction: [1.0, 0.0, 0.0],
        weight: unit_sphere_area(n) * powi(radius, n as i32 - 1),
        normal: [1.0, 0.0, 0.0],
        mean_curvature: outward_curvature,
    }
}

impl RadialInstance {
    pub fn new(solution: RadialSolution) -> Result<Self> {
        let n = solution.n;
        let m = solution.values.len() - 1;
        let slopes = solution.slopes();
        let peak = solution.peak();
        let peak_index = solution.nodes.iter().position(|&r| r > peak.0).unwrap_or(m);
        if peak_index < 2 || peak_index + 1 > m {
            return Err(Error::Degenerate("maximum at the end of the radial grid"));
        }
        let nf = f64::from(n);
        let peak_error = solution.peak_error();
        let sigma = SigmaData {
            samples: alloc::vec![sphere_sample(n, peak.0, (nf - 1.0) / peak.0)],
            radii: alloc::vec![peak.0],
            curvature_error: (nf - 1.0) * peak_error / (peak.0 * peak.0),
            area_error: (nf - 1.0) * peak_error / peak.0,
        };
        let inner = BoundaryData {
            samples: alloc::vec![sphere_sample(n, solution.a, (nf - 1.0) / solution.a)],
            slope: alloc::vec![abs(slopes[0])],
            flux_ratio: 1.0,
            slope_error: solution.end_slope_error(false),
            flagged: 0,
        };
        let outer = BoundaryData {
            samples: alloc::vec![sphere_sample(n, solution.b, (nf - 1.0) / solution.b)],
            slope: alloc::vec![abs(slopes[m])],
            flux_ratio: 1.0,
            slope_error: solution.end_slope_error(true),
            flagged: 0,
        };
        let mut inst = Self {
            solution,
            slopes,
            peak,
            peak_index,
            sigma,
            boundaries: [inner, outer],
        };
        for (k, region) in Region::BOTH.into_iter().enumerate() {
            let volume = inst.region_volume(region);
            let b = &mut inst.boundaries[k];
            b.flux_ratio = b.flux() / (nf * volume);
        }
        Ok(inst)
    }

    pub fn solution(&self) -> &RadialSolution {
        &self.solution
    }

    fn in_region(&self, region: Region, i: usize) -> bool {
        match region {
            Region::Inner => i < self.peak_index,
            Region::Outer => i >= self.peak_index,
        }
    }

    /// Linear interpolation of the nodal values and slopes.
    fn interpolate(&self, r: f64) -> (f64, f64) {
        let nodes = &self.solution.nodes;
        let h = self.solution.spacing();
        let m = nodes.len() - 1;
        let k = (((r - nodes[0]) / h) as usize).min(m - 1);
        let s = ((r - nodes[k]) / h).clamp(0.0, 1.0);
        let u = &self.solution.values;
        (
            u[k] + s * (u[k + 1] - u[k]),
            self.slopes[k] + s * (self.slopes[k + 1] - self.slopes[k]),
        )
    }
}

impl Instance for RadialInstance {
    fn dimension(&self) -> u32 {
        self.solution.n
    }

    fn spacing(&self) -> f64 {
        self.solution.spacing()
    }

    fn u_max(&self) -> f64 {
        self.peak.1
    }

    fn sigma(&self) -> &SigmaData {
        &self.sigma
    }

    fn boundary(&self, region: Region) -> &BoundaryData {
        match region {
            Region::Inner => &self.boundaries[0],
            Region::Outer => &self.boundaries[1],
        }
    }

    fn region_volume(&self, region: Region) -> f64 {
        let n = self.solution.n;
        let s = powi(self.peak.0, n as i32);
        let edge = match region {
            Region::Inner => powi(self.solution.a, n as i32),
            Region::Outer => powi(self.solution.b, n as i32),
        };
        unit_sphere_area(n) / f64::from(n) * abs(s - edge)
    }

    fn constant_slope(&self, _region: Region) -> bool {
        true
    }

    fn for_each_node(&self, region: Region, f: &mut dyn FnMut(&NodeSample)) {
        let sol = &self.solution;
        let n = sol.n;
        let h = sol.spacing();
        let m = sol.nodes.len() - 1;
        let area = unit_sphere_area(n);
        for i in 0..=m {
            if !self.in_region(region, i) {
                continue;
            }
            let r = sol.nodes[i];
            let du = self.slopes[i];
            let w_error = (i >= 2 && i + 2 <= m).then(|| {
                let d2 = (sol.values[i + 2] - sol.values[i - 2]) / (4.0 * h);
                2.0 * abs(du) * abs(du - d2) / 3.0
            });
            let end = if i == 0 || i == m { 0.5 } else { 1.0 };
            f(&NodeSample {
                position: [r, 0.0, 0.0],
                u: sol.values[i],
                w: du * du,
                w_error,
                volume: end * h * area * powi(r, n as i32 - 1),
            });
        }
    }

    fn level_measures(&self, region: Region, t: f64) -> LevelMeasures {
        let n = self.solution.n;
        let area = unit_sphere_area(n);
        if t >= self.peak.1 {
            return LevelMeasures {
                empty: true,
                ..LevelMeasures::default()
            };
        }
        let u = &self.solution.values;
        let nodes = &self.solution.nodes;
        let m = u.len() - 1;
        // walk from the peak toward the region's boundary to the first
        // node at or below t
        let crossing = match region {
            Region::Inner => (0..self.peak_index)
                .rev()
                .find(|&i| u[i] <= t)
                .map(|i| (i, i + 1)),
            Region::Outer => (self.peak_index..=m)
                .find(|&i| u[i] <= t)
                .map(|i| (i, i - 1)),
        };
        let Some((lo, hi)) = crossing else {
            return LevelMeasures {
                empty: true,
                ..LevelMeasures::default()
            };
        };
        let s = (t - u[lo]) / (u[hi] - u[lo]);
        let rho = nodes[lo] + s * (nodes[hi] - nodes[lo]);
        let (_, du) = self.interpolate(rho);
        let shell = abs(powi(rho, n as i32) - powi(self.peak.0, n as i32));
        let level_area = area * powi(rho, n as i32 - 1);
        LevelMeasures {
            super_volume: area / f64::from(n) * shell,
            level_area,
            flux: level_area * abs(du),
            empty: false,
        }
    }

    fn normal_profiles(&self, region: Region, d: f64) -> Vec<NormalProfile> {
        let sign = region.boundary_sign();
        let n = f64::from(self.solution.n);
        let mut profile = NormalProfile {
            // the normal leaving the region at Σ points toward the origin
            // for the outer region
            curvature: -sign * (n - 1.0) / self.peak.0,
            distance: Vec::new(),
            u: Vec::new(),
            w: Vec::new(),
        };
        for dist in profile_distances(d) {
            let r = self.peak.0 + sign * dist;
            if r <= self.solution.a || r >= self.solution.b {
                continue;
            }
            let (u, du) = self.interpolate(r);
            profile.distance.push(dist);
            profile.u.push(u);
            profile.w.push(du * du);
        }
        alloc::vec![profile]
    }
}

/// Resolution of the sphere grids used on a field instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSampling {
    pub n_theta: usize,
    pub n_phi: usize,
    /// Degree of the spherical-harmonic fit of `Σ`.
    pub sigma_degree: u32,
}

impl Default for FieldSampling {
    fn default() -> Self {
        Self {
            n_theta: 32,
            n_phi: 64,
            sigma_degree: 6,
        }
    }
}

/// A solved three-dimensional field on a ring domain.
#[derive(Debug, Clone)]
pub struct FieldInstance {
    domain: ValidatedDomain,
    field: ScalarField3,
    ext: ExtendedField,
    surface: SigmaSurface,
    sigma: SigmaData,
    boundaries: [BoundaryData; 2],
    volumes: [f64; 2],
    cells: CellRegions,
    /// Region label per grid node, 0 outside the domain.
    nodes: Vec<u8>,
}

/// Slopes with failed stencils replaced by the weighted mean of the rest.
fn fill_slopes(samples: &[SurfaceSample], raw: &BoundaryGradient) -> Vec<f64> {
    let (mut sum, mut wsum) = (0.0, 0.0);
    for (s, g) in samples.iter().zip(&raw.samples) {
        if let Some(v) = g.raw {
            sum += s.weight * v;
            wsum += s.weight;
        }
    }
    let mean = sum / wsum;
    raw.samples.iter().map(|g| g.raw.unwrap_or(mean)).collect()
}

impl FieldInstance {
    pub fn new(
        domain: ValidatedDomain,
        field: ScalarField3,
        sampling: FieldSampling,
    ) -> Result<Self> {
        let grid = SphereGrid::new(sampling.n_theta, sampling.n_phi);
        let ext = extend_with_ghosts(&field, &domain);
        let surface = extract_sigma(&ext, &domain, &grid, sampling.sigma_degree)?;
        let spec = domain.spec();
        let mut volumes = [0.0; 2];
        for (dir, w) in grid.directions.iter().zip(&grid.weights) {
            let sr = surface.graph.radius(*dir);
            let ri = spec.inner.radius(*dir);
            let ro = spec.outer.radius(*dir);
            volumes[0] += w * (sr * sr * sr - ri * ri * ri) / 3.0;
            volumes[1] += w * (ro * ro * ro - sr * sr * sr) / 3.0;
        }
        let mut boundaries = Vec::with_capacity(2);
        for (k, region) in Region::BOTH.into_iter().enumerate() {
            let which = region.boundary();
            let samples = boundary_quadrature(domain.graph(which), &grid)?;
            let raw = boundary_gradient(&ext, &domain, which, &samples)?;
            let other = NormalStencil::secondary(field.grid.h);
            let check = boundary_gradient_with(&ext, &domain, which, &samples, other)?;
            let slope_error = raw
                .samples
                .iter()
                .zip(&check.samples)
                .filter_map(|(a, b)| Some(abs(a.raw? - b.raw?)))
                .fold(0.0, f64::max);
            let slope = fill_slopes(&samples, &raw);
            // on a sphere the exact slope is constant, so any spread is error
            let spread = if spec.inner.is_sphere() && spec.outer.is_sphere() {
                let (sum, wsum) = samples
                    .iter()
                    .zip(&slope)
                    .fold((0.0, 0.0), |(s, w), (p, g)| {
                        (s + p.weight * g, w + p.weight)
                    });
                let mean = sum / wsum;
                slope.iter().map(|g| abs(g - mean)).fold(0.0, f64::max)
            } else {
                0.0
            };
            let slope_error = slope_error.max(spread);
            let mut data = BoundaryData {
                slope,
                samples,
                flux_ratio: 1.0,
                slope_error,
                flagged: raw.flagged,
            };
            data.flux_ratio = data.flux() / (3.0 * volumes[k]);
            boundaries.push(data);
        }
        let outer = boundaries.pop().expect("two boundaries");
        let inner = boundaries.pop().expect("two boundaries");
        let rho = surface.graph.base;
        let l = f64::from(sampling.sigma_degree);
        let sigma = SigmaData {
            samples: surface.samples.clone(),
            radii: surface.ray_radius.clone(),
            curvature_error: l * (l + 1.0) * surface.fit_residual / (rho * rho),
            area_error: 2.0 * surface.fit_residual / rho,
        };
        let cells = CellRegions::split_by(&ext, &surface.graph);
        let g = field.grid;
        let nodes = field
            .mask
            .iter()
            .enumerate()
            .map(|(idx, kind)| {
                if !kind.in_domain() {
                    return 0;
                }
                let x = g.position(g.coords(idx));
                if norm3(x) < surface.graph.radius(x) {
                    Self::label(Region::Inner)
                } else {
                    Self::label(Region::Outer)
                }
            })
            .collect();
        Ok(Self {
            domain,
            field,
            ext,
            surface,
            sigma,
            boundaries: [inner, outer],
            volumes,
            cells,
            nodes,
        })
    }

    pub fn domain(&self) -> &ValidatedDomain {
        &self.domain
    }

    pub fn field(&self) -> &ScalarField3 {
        &self.field
    }

    pub fn sigma_surface(&self) -> &SigmaSurface {
        &self.surface
    }

    fn label(region: Region) -> u8 {
        match region {
            Region::Inner => 1,
            Region::Outer => 2,
        }
    }

    /// Gradient of the tricubic interpolant by central differences.
    fn gradient_at(&self, p: [f64; 3]) -> [f64; 3] {
        let step = 0.25 * self.ext.grid.h;
        core::array::from_fn(|a| {
            let mut lo = p;
            let mut hi = p;
            lo[a] -= step;
            hi[a] += step;
            (self.ext.tricubic(hi) - self.ext.tricubic(lo)) / (2.0 * step)
        })
    }
}

impl Instance for FieldInstance {
    fn dimension(&self) -> u32 {
        crate::field::DIM
    }

    fn spacing(&self) -> f64 {
        self.field.grid.h
    }

    fn u_max(&self) -> f64 {
        self.surface.u_max
    }

    fn sigma(&self) -> &SigmaData {
        &self.sigma
    }

    fn boundary(&self, region: Region) -> &BoundaryData {
        match region {
            Region::Inner => &self.boundaries[0],
            Region::Outer => &self.boundaries[1],
        }
    }

    fn region_volume(&self, region: Region) -> f64 {
        match region {
            Region::Inner => self.volumes[0],
            Region::Outer => self.volumes[1],
        }
    }

    fn constant_slope(&self, _region: Region) -> bool {
        let spec = self.domain.spec();
        spec.inner.is_sphere() && spec.outer.is_sphere()
    }

    fn for_each_node(&self, region: Region, f: &mut dyn FnMut(&NodeSample)) {
        let g = self.field.grid;
        let h = g.h;
        let strides = g.strides();
        let values = &self.ext.values;
        let mask = &self.field.mask;
        let label = Self::label(region);
        for (idx, &node) in self.nodes.iter().enumerate() {
            if node != label {
                continue;
            }
            let x = g.position(g.coords(idx));
            let mut d1 = [0.0; 3];
            let mut d2 = [0.0; 3];
            let mut wide = true;
            for a in 0..3 {
                let (sm, sp) = (strides[2 * a], strides[2 * a + 1]);
                let at = |s: isize| idx as isize + s;
                d1[a] = (values[at(sp) as usize] - values[at(sm) as usize]) / (2.0 * h);
                let (m2, p2) = (at(2 * sm), at(2 * sp));
                let inside =
                    |i: isize| i >= 0 && (i as usize) < mask.len() && mask[i as usize].in_domain();
                if wide
                    && inside(m2)
                    && inside(p2)
                    && mask[at(sm) as usize].in_domain()
                    && mask[at(sp) as usize].in_domain()
                {
                    d2[a] = (values[p2 as usize] - values[m2 as usize]) / (4.0 * h);
                } else {
                    wide = false;
                }
            }
            let grad = norm3(d1);
            let w_error = wide.then(|| {
                let diff = [d1[0] - d2[0], d1[1] - d2[1], d1[2] - d2[2]];
                2.0 * grad * norm3(diff) / 3.0
            });
            f(&NodeSample {
                position: x,
                u: self.field.values[idx],
                w: grad * grad,
                w_error,
                volume: h * h * h,
            });
        }
    }

    fn level_measures(&self, region: Region, t: f64) -> LevelMeasures {
        level_set_measures(&self.ext, t, Some((&self.cells, Self::label(region))))
    }

    fn normal_profiles(&self, region: Region, d: f64) -> Vec<NormalProfile> {
        let sign = region.boundary_sign();
        let samples = &self.sigma.samples;
        let stride = (samples.len() / 64).max(1);
        let mut out = Vec::new();
        for s in samples.iter().step_by(stride) {
            let mut p = NormalProfile {
                curvature: -sign * s.mean_curvature,
                distance: Vec::new(),
                u: Vec::new(),
                w: Vec::new(),
            };
            // the normal of Σ pointing into the region
            let nu = scale3(s.normal, sign);
            for dist in profile_distances(d) {
                let x = [
                    s.point[0] + dist * nu[0],
                    s.point[1] + dist * nu[1],
                    s.point[2] + dist * nu[2],
                ];
                if !self.domain.contains(x) {
                    continue;
                }
                let g = self.gradient_at(x);
                p.distance.push(dist);
                p.u.push(self.ext.tricubic(x));
                p.w.push(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
            }
            out.push(p);
        }
        out
    }
}
