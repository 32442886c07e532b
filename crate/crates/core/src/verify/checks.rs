use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::instance::{Instance, NodeSample, Region};
use super::report::*;
use super::{Analysis, Measured, VerifyOptions, TAU_FLOOR_TOL};
use crate::error::{Error, Result};
use crate::math::{abs, powf, powi, sqrt, unit_sphere_area};
use crate::model::{tau_invert, Branch, ModelRing};

/// Relative slack allowed for `λ²u` above the model maximum.
const NORMALIZATION_SLACK: f64 = 1e-3;
/// Samples within this fraction of the largest slope count as maximal.
const MAX_SLOPE_BAND: f64 = 0.01;
/// Relative tolerance of the boundary self-check.
const SELF_CHECK_TOL: f64 = 1e-6;
/// Tolerance of the flux cross-check of `U(t)`.
const FLUX_TOL: f64 = 0.03;
/// Relative slack of the sign test of the divergence identity.
const IDENTITY_TOL: f64 = 1e-3;
/// Regions with fewer interior samples are reported as unresolved.
const MIN_REGION_SAMPLES: usize = 16;
/// Normalised `ε` levels of the integral identity, as fractions of
/// `(u_R)_max`.
const EPSILON_FRACTIONS: [f64; 3] = [0.5, 0.25, 0.1];

struct Ctx<'a> {
    inst: &'a dyn Instance,
    opts: &'a VerifyOptions,
    n: u32,
    nf: f64,
    u_max: f64,
    measured: Vec<Measured>,
}

impl Ctx<'_> {
    fn push(&mut self, name: String, margin: f64, scale: f64, interpolation: f64) {
        self.measured.push(Measured {
            name,
            margin,
            scale,
            interpolation,
            slope_sensitivity: 0.0,
            applicable: true,
            exact: false,
            note: None,
        });
    }

    fn push_exact(&mut self, name: String, margin: f64, scale: f64) {
        self.measured.push(Measured {
            name,
            margin,
            scale,
            interpolation: 0.0,
            slope_sensitivity: 0.0,
            applicable: true,
            exact: true,
            note: None,
        });
    }

    fn skip(&mut self, name: String, note: &str) {
        self.measured.push(Measured {
            name,
            margin: 0.0,
            scale: 1.0,
            interpolation: 0.0,
            slope_sensitivity: 0.0,
            applicable: false,
            exact: false,
            note: Some(note.to_string()),
        });
    }
}

/// `τ`, branch and expected core radius for both boundary components.
pub fn nwss_report(inst: &dyn Instance) -> Result<NwssReport> {
    let n = inst.dimension();
    let u_max = inst.u_max();
    if !(u_max > 0.0) {
        return Err(Error::Degenerate("non-positive maximum"));
    }
    let component = |region: Region| -> Result<NwssComponent> {
        let max_slope = inst.boundary(region).max_slope();
        let tau = max_slope / sqrt(2.0 * u_max);
        if tau < 1.0 - TAU_FLOOR_TOL {
            return Err(Error::BelowSerrinBound(tau));
        }
        let below_one = tau < 1.0;
        let (expected_radius, branch) = tau_invert(n, tau.max(1.0))?;
        Ok(NwssComponent {
            region,
            max_slope,
            tau,
            branch,
            expected_radius,
            below_one,
        })
    };
    Ok(NwssReport {
        u_max,
        inner: component(Region::Inner)?,
        outer: component(Region::Outer)?,
    })
}

/// Model and scale per region. Regions with `τ ≤ 1 + serrin_tol` are
/// compared against the Serrin ball.
pub fn region_scales(
    n: u32,
    nwss: &NwssReport,
    serrin_tol: f64,
) -> Result<Vec<(RegionScale, ModelRing)>> {
    Region::BOTH
        .into_iter()
        .map(|region| {
            let c = nwss.component(region);
            let serrin = c.tau <= 1.0 + serrin_tol;
            let (core_radius, branch) = if serrin {
                (0.0, Branch::Outer)
            } else {
                (c.expected_radius, c.branch)
            };
            let model = ModelRing::new(n, core_radius)?;
            let lambda =
                super::normalize_solution(n, nwss.u_max, core_radius.min(model_radius_cap(n)))?;
            Ok((
                RegionScale {
                    region,
                    branch,
                    core_radius,
                    lambda,
                    serrin,
                },
                model,
            ))
        })
        .collect()
}

fn model_radius_cap(n: u32) -> f64 {
    crate::model::core_radius_max(n) * (1.0 - 1e-12)
}

fn boundary_radius(model: &ModelRing, branch: Branch) -> f64 {
    match branch {
        Branch::Outer => model.r2,
        Branch::Inner => model.r1,
    }
}

struct RegionPass {
    gradient: GradientCheck,
    /// `W_R` at the boundary radius.
    boundary_w: f64,
    /// Margin and interpolation estimate at the worst sample, if any.
    worst: Option<(f64, f64)>,
    identity: Vec<IntegralIdentity>,
}

/// `λ²W − W_R(Ψ)` over the interior samples of one region, together with
/// the left side of the divergence identity.
pub fn gradient_comparison(
    inst: &dyn Instance,
    region: Region,
    scale: &RegionScale,
    model: &ModelRing,
    c1: f64,
) -> Result<GradientCheck> {
    Ok(region_pass(inst, region, scale, model, c1, false)?.gradient)
}

fn region_pass(
    inst: &dyn Instance,
    region: Region,
    scale: &RegionScale,
    model: &ModelRing,
    c1: f64,
    identity: bool,
) -> Result<RegionPass> {
    let n = model.n as i32;
    let nf = f64::from(model.n);
    let l2 = scale.lambda * scale.lambda;
    let ln = powi(scale.lambda, n);
    let branch = scale.branch;
    let rn = powi(model.core_radius, n);
    let limit = model.u_max * (1.0 + NORMALIZATION_SLACK);
    let w_boundary = model.w_model(boundary_radius(model, branch));
    let levels: Vec<f64> = EPSILON_FRACTIONS
        .iter()
        .map(|f| model.u_max * (1.0 - f))
        .collect();
    let mut lhs = [0.0; EPSILON_FRACTIONS.len()];
    let mut max_violation = f64::NEG_INFINITY;
    let mut location = [0.0; 3];
    let mut worst: Option<(f64, f64, f64)> = None;
    let mut max_rel: f64 = 0.0;
    let mut max_weighted = f64::NEG_INFINITY;
    let mut count = 0usize;
    let mut failure = None;
    inst.for_each_node(region, &mut |s: &NodeSample| {
        if failure.is_some() {
            return;
        }
        let scaled = l2 * s.u;
        if scaled > limit {
            failure = Some(scaled);
            return;
        }
        let psi = model.psi_radius(branch, scaled);
        let w_r = model.w_model(psi);
        let q = l2 * s.w - w_r;
        let pn = powi(psi, n);
        let denom = pn - rn;
        if denom != 0.0 {
            let kernel = nf * powi(psi, 2 * n - 2) / (denom * denom * denom);
            for (acc, &t) in lhs.iter_mut().zip(&levels) {
                if scaled <= t {
                    *acc += kernel * q * ln * s.volume;
                }
            }
        }
        let Some(err) = s.w_error else { return };
        count += 1;
        let e = l2 * err;
        if q > max_violation {
            max_violation = q;
            location = s.position;
        }
        if worst.is_none_or(|(score, _, _)| q - c1 * e > score) {
            worst = Some((q - c1 * e, q, e));
        }
        if w_boundary > 0.0 {
            max_rel = max_rel.max(abs(q) / w_boundary);
        }
        if psi != model.core_radius {
            max_weighted = max_weighted.max(model.beta(psi) * q);
        }
    });
    if let Some(scaled) = failure {
        return Err(Error::Normalization { scaled, limit });
    }
    let identity = if !identity {
        Vec::new()
    } else {
        levels
            .iter()
            .zip(EPSILON_FRACTIONS)
            .zip(lhs)
            .map(|((&t, fraction), lhs)| {
                let volume = inst.level_measures(region, t / l2).super_volume * ln;
                let total = inst.region_volume(region) * ln;
                let psi = model.psi_radius(branch, t);
                let r_b = boundary_radius(model, branch);
                let rhs = nf * volume / (powi(psi, n) - rn) - nf * total / (powi(r_b, n) - rn);
                // both sides vanish on the model; noise is judged against one term
                let slack = IDENTITY_TOL * abs(nf * total / (powi(r_b, n) - rn));
                let sign_consistent = match branch {
                    Branch::Outer => lhs <= slack,
                    Branch::Inner => lhs >= -slack,
                };
                IntegralIdentity {
                    region,
                    epsilon: fraction * model.u_max,
                    lhs,
                    rhs,
                    sign_consistent,
                }
            })
            .collect()
    };
    let finite_or_zero = |v: f64| if v.is_finite() { v } else { 0.0 };
    Ok(RegionPass {
        gradient: GradientCheck {
            region,
            max_violation: finite_or_zero(max_violation),
            location,
            max_relative_deviation: max_rel,
            max_weighted: finite_or_zero(max_weighted),
            samples: count,
        },
        worst: worst.map(|(_, q, e)| (-q, e)),
        boundary_w: w_boundary,
        identity,
    })
}

fn boundary_checks(
    ctx: &mut Ctx,
    region: Region,
    scale: &RegionScale,
    model: &ModelRing,
) -> BoundaryCurvature {
    let b = ctx.inst.boundary(region);
    let name = region.name();
    let lambda = scale.lambda;
    let l2 = lambda * lambda;
    let r_b = boundary_radius(model, scale.branch);
    let w_b = model.w_model(r_b);
    // λ²W ≤ W_R on the boundary holds with equality at the steepest sample
    // by the choice of R
    let excess = l2 * b.max_slope() * b.max_slope() - w_b;
    let tol = if scale.serrin {
        3.0 * ctx.opts.serrin_tol
    } else {
        SELF_CHECK_TOL
    };
    ctx.push_exact(
        format!("boundary_self_check.{name}"),
        tol * w_b - excess,
        l2,
    );

    let max = b.max_slope();
    let sign = region.boundary_sign();
    let bound = match scale.branch {
        Branch::Outer => (ctx.nf - 1.0) / r_b,
        Branch::Inner => -(ctx.nf - 1.0) / r_b,
    };
    // the bound is a consequence of equality at the steepest point only;
    // neighbours within the band may legitimately exceed it
    let steepest = b
        .slope
        .iter()
        .enumerate()
        .fold(0, |k, (i, &g)| if g > b.slope[k] { i } else { k });
    let achieved = sign * b.samples[steepest].mean_curvature / lambda;
    let count = b
        .slope
        .iter()
        .filter(|&&g| g >= (1.0 - MAX_SLOPE_BAND) * max)
        .count();
    ctx.push(
        format!("curvature.boundary.{name}"),
        bound - achieved,
        1.0 / lambda,
        0.0,
    );
    BoundaryCurvature {
        region,
        bound,
        achieved,
        samples: count,
    }
}

fn sandwich(
    ctx: &mut Ctx,
    scales: &[(RegionScale, ModelRing)],
    nwss: &NwssReport,
) -> (Option<Sandwich>, Vec<SigmaRow>) {
    let sigma = ctx.inst.sigma();
    let root = sqrt(ctx.u_max);
    let (inner, outer) = (&scales[0], &scales[1]);
    let applicable =
        inner.0.core_radius > 0.0 && outer.0.core_radius > 0.0 && nwss.outer.tau < sqrt(ctx.nf);
    let rows_plain = || {
        sigma
            .samples
            .iter()
            .map(|s| SigmaRow {
                x: s.point[0],
                y: s.point[1],
                z: s.point[2],
                weight: s.weight,
                mean_curvature: s.mean_curvature,
                scaled_curvature: s.mean_curvature * root,
                lower_margin: None,
                upper_margin: None,
            })
            .collect::<Vec<_>>()
    };
    if !applicable {
        let note = "needs positive expected radii and τ(u,Γ₂) < √n";
        ctx.skip("curvature.sandwich.lower".into(), note);
        ctx.skip("curvature.sandwich.upper".into(), note);
        return (None, rows_plain());
    }
    let lower_bound = outer.1.sandwich_bound();
    let upper_bound = inner.1.sandwich_bound();
    let mut rows = rows_plain();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for row in &mut rows {
        let x = row.scaled_curvature;
        lo = lo.min(x);
        hi = hi.max(x);
        row.lower_margin = Some(x - lower_bound);
        row.upper_margin = Some(upper_bound - x);
    }
    let interp = sigma.curvature_error * root;
    ctx.push(
        "curvature.sandwich.lower".into(),
        lo - lower_bound,
        1.0,
        interp,
    );
    ctx.push(
        "curvature.sandwich.upper".into(),
        upper_bound - hi,
        1.0,
        interp,
    );
    (
        Some(Sandwich {
            lower_bound,
            upper_bound,
            min_scaled_curvature: lo,
            max_scaled_curvature: hi,
        }),
        rows,
    )
}

fn area_checks(
    ctx: &mut Ctx,
    region: Region,
    scale: &RegionScale,
    model: &ModelRing,
) -> RegionAreas {
    let name = region.name();
    let p = ctx.n as i32 - 1;
    let pf = ctx.nf - 1.0;
    let lambda = scale.lambda;
    let lp = powi(lambda, p);
    let lp1 = powi(lambda, p - 1);
    let b = ctx.inst.boundary(region);
    let sigma = ctx.inst.sigma();
    let (a_g, i_g) = (b.area(), b.curvature_integral());
    let (a_s, i_s) = (sigma.area(), sigma.curvature_integral());
    let r = model.core_radius;
    let r_b = boundary_radius(model, scale.branch);
    let sign = region.boundary_sign();
    let boundary_ratio = lp * a_g / powi(r_b, p);

    let sigma_ratio = if r > 0.0 {
        let ratio = lp * a_s / powi(r, p);
        ctx.push(
            format!("area.ratio.{name}"),
            boundary_ratio - ratio,
            lp,
            ratio * sigma.area_error,
        );
        Some(ratio)
    } else {
        ctx.skip(format!("area.ratio.{name}"), "expected core radius is zero");
        None
    };

    // boundary: H with respect to the normal leaving the region
    let i_out = sign * i_g;
    if ctx.inst.constant_slope(region) {
        let margin = match scale.branch {
            Branch::Outer => lp * a_g - r_b * lp1 * i_out / pf,
            Branch::Inner => r_b * lp1 * (-i_out) / pf - lp * a_g,
        };
        ctx.push(
            format!("area.boundary_mean_curvature.{name}"),
            margin,
            lp,
            0.0,
        );
        if region == Region::Outer && scale.branch == Branch::Outer {
            let area = unit_sphere_area(ctx.n);
            let margin = powf(lp * a_g / area, 1.0 / pf) - r_b;
            ctx.push("area.minkowski.outer".into(), margin, lambda, 0.0);
        }
    } else {
        ctx.skip(
            format!("area.boundary_mean_curvature.{name}"),
            "slope not constant on the boundary",
        );
        if region == Region::Outer {
            ctx.skip(
                "area.minkowski.outer".into(),
                "slope not constant on the boundary",
            );
        }
    }

    // Σ: H with respect to the normal entering the region
    if r > 0.0 {
        let i_in = sign * i_s;
        let margin = match scale.branch {
            Branch::Outer => r * lp1 * i_in / pf - lp * a_s,
            Branch::Inner => lp * a_s - r * lp1 * (-i_in) / pf,
        };
        let interp = lp * a_s * sigma.area_error + r * lp1 * a_s * sigma.curvature_error / pf;
        ctx.push(
            format!("area.sigma_mean_curvature.{name}"),
            margin,
            lp,
            interp,
        );
    } else {
        ctx.skip(
            format!("area.sigma_mean_curvature.{name}"),
            "expected core radius is zero",
        );
    }

    RegionAreas {
        region,
        boundary_area: a_g,
        boundary_curvature_integral: i_g,
        sigma_ratio,
        boundary_ratio,
    }
}

fn u_profile(ctx: &mut Ctx, region: Region) -> UProfile {
    let inst = ctx.inst;
    let n = ctx.nf;
    let h = inst.spacing();
    let u_max = ctx.u_max;
    let cap = 0.5 * n * (3.0 * h) * (3.0 * h);
    let levels = ctx.opts.levels.max(2);
    let mut points = Vec::with_capacity(levels);
    for k in 0..levels {
        let t = u_max * k as f64 / levels as f64;
        let gap = u_max - t;
        let excluded = gap < cap;
        let (volume, value) = if excluded {
            (0.0, None)
        } else {
            let v = inst.level_measures(region, t).super_volume;
            (v, Some(n * v / powf(2.0 * n * gap, 0.5 * n)))
        };
        points.push(ProfilePoint {
            t,
            volume,
            value,
            excluded,
        });
    }
    let mut flux_mismatch = Vec::new();
    for fraction in [0.25, 0.5] {
        let t = u_max * fraction;
        if u_max - t < cap {
            continue;
        }
        let m = inst.level_measures(region, t);
        // a level set thinner than the flux stencil is not resolved
        let min_area = 4.0 * core::f64::consts::PI * (3.0 * h) * (3.0 * h);
        if m.super_volume > 0.0 && m.level_area >= min_area {
            flux_mismatch.push(abs(m.flux - n * m.super_volume) / (n * m.super_volume));
        }
    }
    let name = region.name();
    match flux_mismatch.iter().copied().reduce(f64::max) {
        Some(worst) => ctx.push_exact(format!("u_profile.flux.{name}"), FLUX_TOL - worst, 1.0),
        None => ctx.skip(format!("u_profile.flux.{name}"), "no resolved level"),
    }
    let values: Vec<f64> = points.iter().filter_map(|p| p.value).collect();
    let non_increasing = values.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-3));
    UProfile {
        region,
        points,
        flux_mismatch,
        non_increasing,
    }
}

/// Least-squares `y ≈ c₃x³ + c₄x⁴`; returns `c₃`.
fn cubic_coefficient(x: &[f64], y: &[f64]) -> Option<f64> {
    let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        let (p3, p4) = (xi * xi * xi, xi * xi * xi * xi);
        a11 += p3 * p3;
        a12 += p3 * p4;
        a22 += p4 * p4;
        b1 += p3 * yi;
        b2 += p4 * yi;
    }
    let det = a11 * a22 - a12 * a12;
    if x.len() < 4 || abs(det) <= 1e-14 * a11 * a22 {
        return None;
    }
    Some((b1 * a22 - b2 * a12) / det)
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[k]
    } else {
        0.5 * (v[k - 1] + v[k])
    })
}

fn expansion_fit(
    ctx: &Ctx,
    region: Region,
    scale: &RegionScale,
    model: &ModelRing,
) -> ExpansionFit {
    let n = ctx.nf;
    let n2 = n * n;
    let r = model.core_radius;
    let lambda = scale.lambda;
    let l2 = lambda * lambda;
    let sign = match scale.branch {
        Branch::Outer => -1.0,
        Branch::Inner => 1.0,
    };
    let mut empty = ExpansionFit {
        region,
        profiles: 0,
        median_ratio: None,
        sign_agreement: 0.0,
        fitted_w: None,
        fitted_model: None,
        predicted_w: 0.0,
        predicted_model: 0.0,
        directional_pass: false,
    };
    if r <= 0.0 {
        return empty;
    }
    let d = (2.0 * ctx.inst.spacing()).max(0.05 * r / lambda);
    let profiles = ctx.inst.normal_profiles(region, d);
    let mut ratios = Vec::new();
    let mut fitted = Vec::new();
    let mut fitted_model = Vec::new();
    let mut predicted = Vec::new();
    let mut predicted_model = Vec::new();
    let mut agree = 0usize;
    for p in &profiles {
        let h = p.curvature / lambda;
        let x: Vec<f64> = p.distance.iter().map(|d| d * lambda).collect();
        let y: Vec<f64> = x
            .iter()
            .zip(&p.w)
            .map(|(xi, w)| l2 * w - n2 * xi * xi)
            .collect();
        let y_model: Vec<f64> = x
            .iter()
            .zip(&p.u)
            .map(|(xi, u)| model.w_model(model.psi_radius(scale.branch, l2 * u)) - n2 * xi * xi)
            .collect();
        let want = n2 * h;
        let want_model = n2 * (h / 3.0 + sign * (2.0 * n - 2.0) / (3.0 * r));
        if let Some(c3) = cubic_coefficient(&x, &y) {
            if c3.signum() == want.signum() {
                agree += 1;
            }
            if want != 0.0 {
                ratios.push(c3 / want);
            }
            fitted.push(c3);
        }
        if let Some(c3) = cubic_coefficient(&x, &y_model) {
            fitted_model.push(c3);
        }
        predicted.push(want);
        predicted_model.push(want_model);
    }
    let total = fitted.len();
    empty.profiles = total;
    if total == 0 {
        return empty;
    }
    let median_ratio = median(ratios);
    let sign_agreement = agree as f64 / total as f64;
    ExpansionFit {
        region,
        profiles: total,
        median_ratio,
        sign_agreement,
        fitted_w: median(fitted),
        fitted_model: median(fitted_model),
        predicted_w: median(predicted).unwrap_or(0.0),
        predicted_model: median(predicted_model).unwrap_or(0.0),
        directional_pass: sign_agreement >= 0.75
            && median_ratio.is_some_and(|m| (0.75..=1.25).contains(&m)),
    }
}

/// With `full` unset, only the checks that depend on the boundary slopes are
/// evaluated.
pub(super) fn analyze(inst: &dyn Instance, opts: &VerifyOptions, full: bool) -> Result<Analysis> {
    let n = inst.dimension();
    let nwss = nwss_report(inst)?;
    let scales = region_scales(n, &nwss, opts.serrin_tol)?;
    let mut ctx = Ctx {
        inst,
        opts,
        n,
        nf: f64::from(n),
        u_max: nwss.u_max,
        measured: Vec::new(),
    };

    let mut gradient = Vec::new();
    let mut identity = Vec::new();
    let mut boundary = Vec::new();
    let mut regions = Vec::new();
    let mut profiles = Vec::new();
    let mut expansion = Vec::new();
    for (scale, model) in &scales {
        let region = scale.region;
        let pass = region_pass(inst, region, scale, model, opts.c1, full)?;
        let l2 = scale.lambda * scale.lambda;
        let first = ctx.measured.len();
        match pass.worst {
            Some((margin, interp)) => {
                // a Serrin-classified region may differ from the ball by a
                // slope factor up to 1 + serrin_tol
                let slack = if scale.serrin {
                    ((1.0 + opts.serrin_tol) * (1.0 + opts.serrin_tol) - 1.0) * pass.boundary_w
                } else {
                    0.0
                };
                ctx.push(
                    format!("gradient.{}", region.name()),
                    margin,
                    l2,
                    interp + slack,
                )
            }
            None => ctx.skip(format!("gradient.{}", region.name()), "no interior samples"),
        }
        let resolved = pass.gradient.samples >= MIN_REGION_SAMPLES;
        gradient.push(pass.gradient);
        identity.extend(pass.identity);
        boundary.push(boundary_checks(&mut ctx, region, scale, model));
        regions.push(area_checks(&mut ctx, region, scale, model));
        if full {
            profiles.push(u_profile(&mut ctx, region));
            expansion.push(expansion_fit(&ctx, region, scale, model));
        }
        if !resolved {
            for m in &mut ctx.measured[first..] {
                m.applicable = false;
                m.note = Some("region not resolved by the grid".to_string());
            }
        }
    }
    let (sandwich, sigma_rows) = sandwich(&mut ctx, &scales, &nwss);

    let serrin_flag = scales.iter().any(|(s, _)| s.serrin);
    let (r1, r2) = if serrin_flag {
        (0.0, 0.0)
    } else {
        (scales[0].0.core_radius, scales[1].0.core_radius)
    };
    let applicable = nwss.outer.tau < sqrt(ctx.nf);
    if applicable {
        ctx.push("radii_ordering".into(), r2 - r1, 1.0, 0.0);
    } else {
        ctx.skip("radii_ordering".into(), "τ(u,Γ₂) ≥ √n");
    }
    let sigma = inst.sigma();
    let sphericity = sigma.sphericity();
    let deviation = gradient
        .iter()
        .map(|g| g.max_relative_deviation)
        .fold(0.0, f64::max);
    let rigidity_gap = abs(r2 - r1).max(deviation).max(sphericity);
    let areas = AreaReport {
        sigma_area: sigma.area(),
        sigma_curvature_integral: sigma.curvature_integral(),
        regions,
        identity,
    };
    Ok(Analysis {
        n,
        spacing: inst.spacing(),
        nwss,
        scales: scales.iter().map(|(s, _)| *s).collect(),
        gradient,
        curvature: CurvatureReport {
            boundary,
            sandwich,
            sigma_rows,
        },
        areas,
        u_profile: profiles,
        expansion,
        ordering: RadiiOrdering {
            r1,
            r2,
            margin: r2 - r1,
            applicable,
            beyond_budget: false,
            serrin_flag,
            rigidity_gap,
            sphericity,
        },
        measured: ctx.measured,
    })
}
