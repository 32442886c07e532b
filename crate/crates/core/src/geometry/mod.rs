//! Star-shaped ring domains in ℝ³ bounded by two radial graphs
//! `ρ(ω) = base · (1 + Σ c_lm Y_lm(ω))`, with the differential geometry the
//! verification needs: implicit functions, ray intersections, mean
//! curvature and surface quadrature.
//!
//! Curvature follows the trace convention: a sphere of radius `ρ` has
//! `H = 2/ρ` with respect to the normal pointing away from the origin.

pub mod harmonics;
pub mod quadrature;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{abs, add3, dot3, norm3, scale3, sqrt};
use harmonics::{MAX_DEGREE, MAX_TERMS};
pub use quadrature::{gauss_legendre, SphereGrid};

/// Highest harmonic degree accepted in a domain description.
pub const DOMAIN_MAX_DEGREE: u32 = 4;

/// One term `c · Y_lm` of a radial graph.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Harmonic {
    pub l: u32,
    pub m: i32,
    pub c: f64,
}

/// `ρ(ω) = base · (1 + Σ c_lm Y_lm(ω))`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RadialGraph {
    pub base: f64,
    pub harmonics: Vec<Harmonic>,
}

impl RadialGraph {
    pub fn sphere(radius: f64) -> Self {
        Self {
            base: radius,
            harmonics: Vec::new(),
        }
    }

    pub fn with_harmonics(base: f64, harmonics: Vec<Harmonic>) -> Self {
        Self { base, harmonics }
    }

    pub fn is_sphere(&self) -> bool {
        self.harmonics.iter().all(|h| h.c == 0.0)
    }

    pub fn degree(&self) -> u32 {
        self.harmonics.iter().map(|h| h.l).max().unwrap_or(0)
    }

    /// Radius in the direction of `v` (any non-zero vector).
    pub fn radius(&self, v: [f64; 3]) -> f64 {
        if self.harmonics.is_empty() {
            return self.base;
        }
        let v = if norm3(v) > 0.0 { v } else { [0.0, 0.0, 1.0] };
        let mut table = [0.0; MAX_TERMS];
        harmonics::eval_all(self.degree(), v, &mut table);
        let mut s = 1.0;
        for h in &self.harmonics {
            s += h.c * table[harmonics::index(h.l, h.m)];
        }
        self.base * s
    }

    /// `φ(x) = |x| − ρ(x/|x|)`: negative inside the enclosed body.
    pub fn phi(&self, x: [f64; 3]) -> f64 {
        norm3(x) - self.radius(x)
    }

    pub fn point(&self, dir: [f64; 3]) -> [f64; 3] {
        scale3(dir, self.radius(dir) / norm3(dir))
    }

    fn check(&self, what: &'static str, max_degree: u32) -> Result<()> {
        if !self.base.is_finite() {
            return Err(Error::NonFinite(what));
        }
        if self.base <= 0.0 {
            return Err(Error::OutOfRange {
                what,
                value: self.base,
                range: "(0, inf)".into(),
            });
        }
        for h in &self.harmonics {
            if !h.c.is_finite() {
                return Err(Error::NonFinite("harmonic coefficient"));
            }
            if h.l > max_degree || h.m.unsigned_abs() > h.l {
                return Err(Error::OutOfRange {
                    what: "harmonic degree",
                    value: f64::from(h.l),
                    range: alloc::format!("l <= {max_degree}, |m| <= l"),
                });
            }
        }
        Ok(())
    }

    /// Least-squares fit of degree `≤ lmax` from samples on a [`SphereGrid`]
    /// (projection with the grid's weights, exact for band-limited data).
    pub fn fit(grid: &SphereGrid, radii: &[f64], lmax: u32) -> Result<Self> {
        if lmax > MAX_DEGREE {
            return Err(Error::OutOfRange {
                what: "fit degree",
                value: f64::from(lmax),
                range: alloc::format!("[0, {MAX_DEGREE}]"),
            });
        }
        let terms = ((lmax + 1) * (lmax + 1)) as usize;
        let mut coeff = [0.0; MAX_TERMS];
        let mut table = [0.0; MAX_TERMS];
        for ((dir, w), r) in grid.directions.iter().zip(&grid.weights).zip(radii) {
            harmonics::eval_all(lmax, *dir, &mut table);
            for k in 0..terms {
                coeff[k] += w * r * table[k];
            }
        }
        let y00 = 0.5 / sqrt(crate::math::PI);
        let base = coeff[0] * y00;
        if !(base > 0.0) {
            return Err(Error::Degenerate(
                "fitted radial graph has non-positive mean radius",
            ));
        }
        let mut list = Vec::new();
        for l in 1..=lmax {
            for m in -(l as i32)..=(l as i32) {
                let c = coeff[harmonics::index(l, m)] / base;
                list.push(Harmonic { l, m, c });
            }
        }
        Ok(Self::with_harmonics(base, list))
    }
}

/// Which boundary component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Boundary {
    Inner,
    Outer,
}

/// Normal direction used for curvature signs: `Outward` points away from
/// the origin, `Inward` toward it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Outward,
    Inward,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::Outward => 1.0,
            Orientation::Inward => -1.0,
        }
    }
}

/// Unvalidated ring description.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RingDomainSpec {
    pub inner: RadialGraph,
    pub outer: RadialGraph,
}

impl RingDomainSpec {
    pub fn annulus(inner: f64, outer: f64) -> Self {
        Self {
            inner: RadialGraph::sphere(inner),
            outer: RadialGraph::sphere(outer),
        }
    }
}

/// A ring domain that passed [`make_domain`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedDomain {
    spec: RingDomainSpec,
    /// `min_ω ρ_outer(ω)` over the validation grid.
    pub min_outer: f64,
    /// `max_ω ρ_inner(ω)` over the validation grid.
    pub max_inner: f64,
    pub max_outer: f64,
    pub min_inner: f64,
}

fn validation_directions() -> Vec<[f64; 3]> {
    let mut dirs = SphereGrid::new(64, 128).directions;
    dirs.extend_from_slice(&[
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
    ]);
    dirs
}

/// Validate a ring description on a dense direction grid.
pub fn make_domain(spec: RingDomainSpec) -> Result<ValidatedDomain> {
    spec.inner.check("inner base radius", DOMAIN_MAX_DEGREE)?;
    spec.outer.check("outer base radius", DOMAIN_MAX_DEGREE)?;
    let mut min_outer = (f64::INFINITY, [0.0; 3]);
    let mut max_inner = (f64::NEG_INFINITY, [0.0; 3]);
    let mut max_outer = f64::NEG_INFINITY;
    let mut min_inner = f64::INFINITY;
    for d in validation_directions() {
        let ri = spec.inner.radius(d);
        let ro = spec.outer.radius(d);
        if !(ri > 0.0) {
            return Err(Error::InvalidDomain {
                reason: "inner radius is not positive",
                direction: d,
            });
        }
        if !(ro > ri) {
            return Err(Error::InvalidDomain {
                reason: "boundaries collide",
                direction: d,
            });
        }
        if ro < min_outer.0 {
            min_outer = (ro, d);
        }
        if ri > max_inner.0 {
            max_inner = (ri, d);
        }
        max_outer = max_outer.max(ro);
        min_inner = min_inner.min(ri);
    }
    if min_outer.0 <= max_inner.0 {
        return Err(Error::InvalidDomain {
            reason: "outer boundary dips below the inner boundary's largest radius",
            direction: min_outer.1,
        });
    }
    Ok(ValidatedDomain {
        spec,
        min_outer: min_outer.0,
        max_inner: max_inner.0,
        max_outer,
        min_inner,
    })
}

impl ValidatedDomain {
    pub fn spec(&self) -> &RingDomainSpec {
        &self.spec
    }

    pub fn graph(&self, which: Boundary) -> &RadialGraph {
        match which {
            Boundary::Inner => &self.spec.inner,
            Boundary::Outer => &self.spec.outer,
        }
    }

    /// Narrowest separation `min ρ_outer − max ρ_inner`.
    pub fn gap(&self) -> f64 {
        self.min_outer - self.max_inner
    }

    /// Implicit function of the ring, negative inside:
    /// `max(φ_outer, −φ_inner)`.
    pub fn phi(&self, x: [f64; 3]) -> f64 {
        let po = self.spec.outer.phi(x);
        let pi = self.spec.inner.phi(x);
        po.max(-pi)
    }

    pub fn contains(&self, x: [f64; 3]) -> bool {
        self.phi(x) < 0.0
    }

    /// Distance `s ∈ (0, max_dist]` along `x + s·e` to the boundary `which`,
    /// assuming `φ_which` changes sign on that segment. Spheres use the
    /// quadratic formula, other graphs an Illinois-accelerated regula falsi.
    pub fn crossing(
        &self,
        which: Boundary,
        x: [f64; 3],
        e: [f64; 3],
        max_dist: f64,
    ) -> Option<f64> {
        let g = self.graph(which);
        if g.is_sphere() {
            return sphere_crossing(g.base, x, e, max_dist);
        }
        let f = |s: f64| g.phi(add3(x, scale3(e, s)));
        illinois(f, 0.0, max_dist, 1e-15 * max_dist.max(1e-300))
    }

    /// Same as [`ValidatedDomain::crossing`] by plain bisection; an
    /// independent route for cross-checks.
    pub fn crossing_bisect(
        &self,
        which: Boundary,
        x: [f64; 3],
        e: [f64; 3],
        max_dist: f64,
    ) -> Option<f64> {
        let g = self.graph(which);
        crate::roots::bisect(
            |s| g.phi(add3(x, scale3(e, s))),
            0.0,
            max_dist,
            1e-15 * max_dist,
        )
    }

    pub fn mean_curvature_at(
        &self,
        which: Boundary,
        dir: [f64; 3],
        orientation: Orientation,
    ) -> Result<f64> {
        mean_curvature_at(self.graph(which), dir, orientation)
    }

    pub fn boundary_quadrature(
        &self,
        which: Boundary,
        n_theta: usize,
        n_phi: usize,
    ) -> Result<Vec<SurfaceSample>> {
        boundary_quadrature(self.graph(which), &SphereGrid::new(n_theta, n_phi))
    }
}

fn sphere_crossing(rho: f64, x: [f64; 3], e: [f64; 3], max_dist: f64) -> Option<f64> {
    // s² + 2 b s + c = 0 with |e| = 1
    let b = dot3(x, e);
    let c = dot3(x, x) - rho * rho;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let sq = sqrt(disc);
    // stable pair of roots
    let q = if b >= 0.0 { -(b + sq) } else { -b + sq };
    let mut roots = [q, if q != 0.0 { c / q } else { 0.0 }];
    roots.sort_by(|a, b| a.total_cmp(b));
    let tol = 1e-12 * max_dist;
    roots
        .into_iter()
        .find(|&s| s >= -tol && s <= max_dist + tol)
        .map(|s| s.clamp(0.0, max_dist))
}

fn illinois<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, xtol: f64) -> Option<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if (fa < 0.0) == (fb < 0.0) {
        return None;
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = f(c);
        if fc == 0.0 || abs(b - a) < xtol {
            return Some(c);
        }
        if (fc < 0.0) == (fb < 0.0) {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if abs(b - a) < xtol {
            return Some(if abs(fa) < abs(fb) { a } else { b });
        }
    }
    Some(if abs(fa) < abs(fb) { a } else { b })
}

/// Normal and curvature of an implicit surface at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplicitGeometry {
    /// `∇φ/|∇φ|`.
    pub normal: [f64; 3],
    pub gradient_norm: f64,
    /// `div(∇φ/|∇φ|)`.
    pub mean_curvature: f64,
}

/// Finite-difference normal and mean curvature of `{φ = 0}` at `x` with
/// step `step`; `fourth_order` selects the five-point stencils, otherwise
/// three-point ones.
pub fn implicit_geometry<F: Fn([f64; 3]) -> f64>(
    phi: F,
    x: [f64; 3],
    step: f64,
    fourth_order: bool,
) -> Result<ImplicitGeometry> {
    let at = |i: usize, a: f64, j: usize, b: f64| {
        let mut y = x;
        y[i] += a * step;
        y[j] += b * step;
        phi(y)
    };
    // first-derivative weights at offsets -2..=2
    let d1: [f64; 5] = if fourth_order {
        [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0]
    } else {
        [0.0, -0.5, 0.0, 0.5, 0.0]
    };
    let d2: [f64; 5] = if fourth_order {
        [
            -1.0 / 12.0,
            16.0 / 12.0,
            -30.0 / 12.0,
            16.0 / 12.0,
            -1.0 / 12.0,
        ]
    } else {
        [0.0, 1.0, -2.0, 1.0, 0.0]
    };
    let offsets = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let f0 = phi(x);
    let mut g = [0.0; 3];
    let mut hess = [[0.0; 3]; 3];
    for i in 0..3 {
        let mut gi = 0.0;
        let mut hii = 0.0;
        for k in 0..5 {
            if d1[k] == 0.0 && d2[k] == 0.0 {
                continue;
            }
            let v = if k == 2 {
                f0
            } else {
                at(i, offsets[k], i, 0.0)
            };
            gi += d1[k] * v;
            hii += d2[k] * v;
        }
        g[i] = gi / step;
        hess[i][i] = hii / (step * step);
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            let mut s = 0.0;
            for a in 0..5 {
                if d1[a] == 0.0 {
                    continue;
                }
                for b in 0..5 {
                    if d1[b] == 0.0 {
                        continue;
                    }
                    s += d1[a] * d1[b] * at(i, offsets[a], j, offsets[b]);
                }
            }
            hess[i][j] = s / (step * step);
            hess[j][i] = hess[i][j];
        }
    }
    let gn = norm3(g);
    if !(gn >= 1e-8) {
        return Err(Error::DegenerateNormal(gn));
    }
    let trace = hess[0][0] + hess[1][1] + hess[2][2];
    let mut ghg = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            ghg += g[i] * hess[i][j] * g[j];
        }
    }
    let mean = (gn * gn * trace - ghg) / (gn * gn * gn);
    Ok(ImplicitGeometry {
        normal: scale3(g, 1.0 / gn),
        gradient_norm: gn,
        mean_curvature: mean,
    })
}

/// Mean curvature of a radial graph at the point above `dir`, fourth-order
/// differences with step `1e−4·ρ`.
pub fn mean_curvature_at(
    graph: &RadialGraph,
    dir: [f64; 3],
    orientation: Orientation,
) -> Result<f64> {
    let p = graph.point(dir);
    let step = 1e-4 * graph.radius(dir);
    let geo = implicit_geometry(|y| graph.phi(y), p, step, true)?;
    Ok(orientation.sign() * geo.mean_curvature)
}

/// Second-order variant with a caller-chosen step, for cross-checks.
pub fn mean_curvature_second_order(
    graph: &RadialGraph,
    dir: [f64; 3],
    orientation: Orientation,
    step: f64,
) -> Result<f64> {
    let p = graph.point(dir);
    let geo = implicit_geometry(|y| graph.phi(y), p, step, false)?;
    Ok(orientation.sign() * geo.mean_curvature)
}

/// A quadrature node on a surface. `normal` points away from the origin
/// and `mean_curvature` is taken with respect to it.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SurfaceSample {
    pub point: [f64; 3],
    pub direction: [f64; 3],
    /// Area weight `ρ² |∇φ| dω`.
    pub weight: f64,
    pub normal: [f64; 3],
    pub mean_curvature: f64,
}

/// Surface samples of a radial graph over the given direction grid.
pub fn boundary_quadrature(graph: &RadialGraph, grid: &SphereGrid) -> Result<Vec<SurfaceSample>> {
    let mut out = Vec::with_capacity(grid.len());
    for (dir, w) in grid.directions.iter().zip(&grid.weights) {
        let rho = graph.radius(*dir);
        let p = scale3(*dir, rho);
        let geo = implicit_geometry(|y| graph.phi(y), p, 1e-4 * rho, true)?;
        out.push(SurfaceSample {
            point: p,
            direction: *dir,
            weight: rho * rho * geo.gradient_norm * w,
            normal: geo.normal,
            mean_curvature: geo.mean_curvature,
        });
    }
    Ok(out)
}

/// `Σ weights`.
pub fn total_area(samples: &[SurfaceSample]) -> f64 {
    samples.iter().map(|s| s.weight).sum()
}

/// Volume between the origin and the graph: `∫ ρ³/3 dω`.
pub fn enclosed_volume(graph: &RadialGraph, grid: &SphereGrid) -> f64 {
    grid.directions
        .iter()
        .zip(&grid.weights)
        .map(|(d, w)| {
            let r = graph.radius(*d);
            w * r * r * r / 3.0
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::PI;

    fn perturbed() -> RadialGraph {
        RadialGraph::with_harmonics(
            0.9718,
            alloc::vec![Harmonic {
                l: 2,
                m: 0,
                c: 0.05
            }],
        )
    }

    #[test]
    fn sphere_curvature_both_orientations() {
        let g = RadialGraph::sphere(0.5);
        let d = [0.3, -0.2, 0.9];
        let h = mean_curvature_at(&g, d, Orientation::Outward).unwrap();
        assert!((h - 4.0).abs() < 1e-6, "{h}");
        let h = mean_curvature_at(&g, d, Orientation::Inward).unwrap();
        assert!((h + 4.0).abs() < 1e-6);
    }

    #[test]
    fn perturbed_curvature_matches_second_order() {
        let g = perturbed();
        let d = [0.0, 0.0, 1.0];
        let h4 = mean_curvature_at(&g, d, Orientation::Outward).unwrap();
        let h2 = mean_curvature_second_order(&g, d, Orientation::Outward, 1e-3).unwrap();
        assert!((h4 - h2).abs() < 1e-4 * h4.abs(), "{h4} {h2}");
    }

    #[test]
    fn sphere_quadrature_area() {
        for r in [1.0, 0.3] {
            let s =
                boundary_quadrature(&RadialGraph::sphere(r), &SphereGrid::new(64, 128)).unwrap();
            let a = total_area(&s);
            assert!((a / (4.0 * PI * r * r) - 1.0).abs() < 1e-8);
            for x in &s {
                assert!((norm3(x.normal) - 1.0).abs() < 1e-12);
                assert!((x.mean_curvature * r - 2.0).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn perturbed_area_self_converges() {
        let g = RadialGraph::with_harmonics(
            1.0,
            alloc::vec![Harmonic {
                l: 2,
                m: 0,
                c: 0.05
            }],
        );
        let a1 = total_area(&boundary_quadrature(&g, &SphereGrid::new(32, 64)).unwrap());
        let a2 = total_area(&boundary_quadrature(&g, &SphereGrid::new(64, 128)).unwrap());
        assert!((a1 - a2).abs() / a2 < 1e-6);
        assert!(a2 > 4.0 * PI);
    }

    #[test]
    fn odd_harmonics_integrate_to_zero() {
        let grid = SphereGrid::new(32, 64);
        let s: f64 = grid
            .directions
            .iter()
            .zip(&grid.weights)
            .map(|(d, w)| w * harmonics::eval(3, 1, *d))
            .sum();
        assert!(s.abs() < 1e-10);
    }

    #[test]
    fn validation() {
        assert!(make_domain(RingDomainSpec::annulus(0.054157, 0.971820)).is_ok());
        let spec = RingDomainSpec {
            inner: RadialGraph::sphere(0.0541588577801),
            outer: perturbed(),
        };
        assert!(make_domain(spec).is_ok());
        let err = make_domain(RingDomainSpec::annulus(0.6, 0.5)).unwrap_err();
        assert!(matches!(err, Error::InvalidDomain { .. }));
        let bad = RingDomainSpec {
            inner: RadialGraph::sphere(0.1),
            outer: RadialGraph::with_harmonics(
                0.9,
                alloc::vec![Harmonic {
                    l: 5,
                    m: 0,
                    c: 0.01
                }],
            ),
        };
        assert!(make_domain(bad).is_err());
    }

    #[test]
    fn crossings_agree() {
        let d = make_domain(RingDomainSpec {
            inner: RadialGraph::sphere(0.2),
            outer: perturbed(),
        })
        .unwrap();
        let h = 1.0 / 96.0;
        let mut count = 0;
        for i in 0..200 {
            let t = i as f64 * 0.031;
            let dir = [t.cos() * 0.6, t.sin() * 0.6, 0.8 * (1.3 * t).cos()];
            let r = d.graph(Boundary::Outer).radius(dir);
            let len = norm3(dir);
            let x = scale3(dir, (r - 0.3 * h) / len);
            for e in [
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
                [-1.0, 0.0, 0.0],
                [0.0, -1.0, 0.0],
                [0.0, 0.0, -1.0],
            ] {
                let end = add3(x, scale3(e, h));
                if d.graph(Boundary::Outer).phi(end) <= 0.0 {
                    continue;
                }
                let a = d.crossing(Boundary::Outer, x, e, h).unwrap();
                let b = d.crossing_bisect(Boundary::Outer, x, e, h).unwrap();
                assert!((a - b).abs() < 1e-10, "{a} {b}");
                count += 1;
            }
        }
        assert!(count > 100);
    }

    #[test]
    fn sphere_crossing_exact() {
        let s = sphere_crossing(0.5, [0.45, 0.1, 0.0], [1.0, 0.0, 0.0], 0.1).unwrap();
        let expect = (0.25f64 - 0.01).sqrt() - 0.45;
        assert!((s - expect).abs() < 1e-15);
        // inner sphere approached from outside
        let s = sphere_crossing(0.2, [-0.25, 0.0, 0.0], [1.0, 0.0, 0.0], 0.1).unwrap();
        assert!((s - 0.05).abs() < 1e-15);
    }

    #[test]
    fn fit_recovers_band_limited_graph() {
        let g = RadialGraph::with_harmonics(
            0.8,
            alloc::vec![
                Harmonic {
                    l: 2,
                    m: 0,
                    c: 0.05
                },
                Harmonic {
                    l: 3,
                    m: -2,
                    c: -0.02
                }
            ],
        );
        let grid = SphereGrid::new(16, 32);
        let radii: Vec<f64> = grid.directions.iter().map(|d| g.radius(*d)).collect();
        let f = RadialGraph::fit(&grid, &radii, 6).unwrap();
        assert!((f.base - 0.8).abs() < 1e-13);
        for d in &grid.directions {
            assert!((f.radius(*d) - g.radius(*d)).abs() < 1e-13);
        }
    }

    #[test]
    fn enclosed_volume_of_sphere() {
        let v = enclosed_volume(&RadialGraph::sphere(0.5), &SphereGrid::new(8, 16));
        assert!((v - 4.0 / 3.0 * PI * 0.125).abs() < 1e-14);
    }
}
