//! Numerical checks of the comparison results on a solved instance.
//!
//! [`analyze`] evaluates every inequality on one instance; [`combine`]
//! attaches budgets from a fine and an optional coarse analysis and decides
//! pass or fail.

mod checks;
pub mod instance;
pub mod report;

use alloc::string::String;
use alloc::vec::Vec;

pub use checks::{gradient_comparison, nwss_report, region_scales};
pub use instance::{
    BoundaryData, FieldInstance, FieldSampling, Instance, NodeSample, NormalProfile,
    RadialInstance, Region, SigmaData,
};
pub use report::*;

use crate::error::{Error, Result};
use crate::field::LevelMeasures;
use crate::math::sqrt;
use crate::model::{core_radius_max, model_maximum};

/// Constants of the verification pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Number of levels of the `U(t)` profile.
    pub levels: usize,
    /// Weight of the interpolation estimate in budgets.
    pub c1: f64,
    /// Weight of the Richardson estimate in budgets.
    pub c2: f64,
    /// `τ ≤ 1 + serrin_tol` is treated as the Serrin case.
    pub serrin_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            levels: 16,
            c1: 1.0,
            c2: 2.0,
            serrin_tol: 1e-3,
        }
    }
}

/// `τ` below `1 − TAU_FLOOR_TOL` means the instance is inconsistent.
pub const TAU_FLOOR_TOL: f64 = 5e-3;

/// `λ = √((u_R)_max / u_max)`: scaling the domain by `λ` makes the maximum
/// of the solution equal to that of the model with core radius `target_r`.
pub fn normalize_solution(n: u32, u_max: f64, target_r: f64) -> Result<f64> {
    let r_max = core_radius_max(n);
    if !(target_r >= 0.0 && target_r < r_max) {
        return Err(Error::OutOfRange {
            what: "core radius",
            value: target_r,
            range: alloc::format!("[0, {r_max})"),
        });
    }
    if !(u_max > 0.0 && u_max.is_finite()) {
        return Err(Error::OutOfRange {
            what: "maximum",
            value: u_max,
            range: "(0, inf)".into(),
        });
    }
    Ok(sqrt(model_maximum(n, target_r) / u_max))
}

/// A check before budgets are attached.
#[derive(Debug, Clone, PartialEq)]
pub struct Measured {
    pub name: String,
    pub margin: f64,
    /// Factor with `margin = factor · raw margin`.
    pub scale: f64,
    pub interpolation: f64,
    /// Change of the margin when the boundary slopes move by their
    /// estimated error.
    pub slope_sensitivity: f64,
    pub applicable: bool,
    /// Fixed tolerance check; no discretisation budget.
    pub exact: bool,
    pub note: Option<String>,
}

/// Everything measured on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub n: u32,
    pub spacing: f64,
    pub nwss: NwssReport,
    pub scales: Vec<RegionScale>,
    pub gradient: Vec<GradientCheck>,
    pub curvature: CurvatureReport,
    pub areas: AreaReport,
    pub u_profile: Vec<UProfile>,
    pub expansion: Vec<ExpansionFit>,
    pub ordering: RadiiOrdering,
    pub measured: Vec<Measured>,
}

/// Run every check on `inst`. Each margin also gets its sensitivity to
/// shifting the slopes of either boundary by their estimated error.
pub fn analyze(inst: &dyn Instance, opts: &VerifyOptions) -> Result<Analysis> {
    analyze_with(inst, opts, [0.0; 2])
}

/// [`analyze`] with lower bounds on the slope error of the inner and outer
/// boundary.
fn analyze_with(inst: &dyn Instance, opts: &VerifyOptions, floor: [f64; 2]) -> Result<Analysis> {
    let mut analysis = checks::analyze(inst, opts, true)?;
    for (region, floor) in Region::BOTH.into_iter().zip(floor) {
        let error = inst.boundary(region).slope_error.max(floor);
        if !(error > 0.0) {
            continue;
        }
        let mut worst = alloc::vec![0.0f64; analysis.measured.len()];
        for shift in [-error, error] {
            let shifted = SlopeShift::new(inst, region, shift);
            // a shift that leaves the admissible range adds nothing
            let Ok(other) = checks::analyze(&shifted, opts, false) else {
                continue;
            };
            for (m, w) in analysis.measured.iter().zip(&mut worst) {
                if let Some(o) = other
                    .measured
                    .iter()
                    .find(|o| o.name == m.name && o.applicable)
                {
                    *w = w.max(crate::math::abs(o.margin - m.margin));
                }
            }
        }
        for (m, w) in analysis.measured.iter_mut().zip(worst) {
            if m.applicable && !m.exact {
                m.slope_sensitivity += w;
            }
        }
    }
    Ok(analysis)
}

/// `inst` with the slopes of one boundary component shifted.
struct SlopeShift<'a> {
    base: &'a dyn Instance,
    region: Region,
    shifted: BoundaryData,
}

impl<'a> SlopeShift<'a> {
    fn new(base: &'a dyn Instance, region: Region, shift: f64) -> Self {
        let mut shifted = base.boundary(region).clone();
        for g in &mut shifted.slope {
            *g = (*g + shift).max(0.0);
        }
        Self {
            base,
            region,
            shifted,
        }
    }
}

impl Instance for SlopeShift<'_> {
    fn dimension(&self) -> u32 {
        self.base.dimension()
    }
    fn spacing(&self) -> f64 {
        self.base.spacing()
    }
    fn u_max(&self) -> f64 {
        self.base.u_max()
    }
    fn sigma(&self) -> &SigmaData {
        self.base.sigma()
    }
    fn boundary(&self, region: Region) -> &BoundaryData {
        if region == self.region {
            &self.shifted
        } else {
            self.base.boundary(region)
        }
    }
    fn region_volume(&self, region: Region) -> f64 {
        self.base.region_volume(region)
    }
    fn constant_slope(&self, region: Region) -> bool {
        self.base.constant_slope(region)
    }
    fn for_each_node(&self, region: Region, f: &mut dyn FnMut(&NodeSample)) {
        self.base.for_each_node(region, f)
    }
    fn level_measures(&self, region: Region, t: f64) -> LevelMeasures {
        self.base.level_measures(region, t)
    }
    fn normal_profiles(&self, region: Region, d: f64) -> Vec<NormalProfile> {
        self.base.normal_profiles(region, d)
    }
}

/// Attach budgets `c₁·(interp + slope) + c₂·|m_h − m_2h|/3` and statuses.
pub fn combine(
    fine: Analysis,
    coarse: Option<&Analysis>,
    opts: &VerifyOptions,
) -> VerificationReport {
    let mut checks = Vec::with_capacity(fine.measured.len());
    for m in &fine.measured {
        let partner =
            coarse.and_then(|c| c.measured.iter().find(|x| x.name == m.name && x.applicable));
        let richardson = if m.exact {
            None
        } else {
            partner.map(|p| crate::math::abs(m.margin - p.margin) / 3.0)
        };
        let budget = if m.exact {
            0.0
        } else {
            opts.c1 * (m.interpolation + m.slope_sensitivity) + opts.c2 * richardson.unwrap_or(0.0)
        };
        let status = if !m.applicable {
            CheckStatus::NotApplicable
        } else if m.margin >= -budget {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        checks.push(Check {
            name: m.name.clone(),
            status,
            margin: m.margin,
            margin_raw: m.margin / m.scale,
            budget,
            interpolation: m.interpolation,
            slope_sensitivity: m.slope_sensitivity,
            richardson,
            note: m.note.clone(),
        });
    }
    let mut ordering = fine.ordering.clone();
    if let Some(c) = checks.iter().find(|c| c.name == "radii_ordering") {
        ordering.beyond_budget = c.status == CheckStatus::Pass && c.margin > c.budget;
    }
    let passed = checks.iter().all(|c| c.status != CheckStatus::Fail);
    VerificationReport {
        schema: SCHEMA_VERSION,
        n: fine.n,
        spacing: fine.spacing,
        coarse_spacing: coarse.map(|c| c.spacing),
        c1: opts.c1,
        c2: opts.c2,
        nwss: fine.nwss,
        scales: fine.scales,
        gradient: fine.gradient,
        curvature: fine.curvature,
        areas: fine.areas,
        u_profile: fine.u_profile,
        expansion: fine.expansion,
        ordering,
        checks,
        passed,
    }
}

/// Richardson estimate `|g_h − g_2h| / 3` of the slope error, maximised
/// over samples. Both instances must sample their boundaries alike;
/// otherwise only the maxima are compared.
pub fn paired_slope_error(fine: &dyn Instance, coarse: &dyn Instance) -> [f64; 2] {
    Region::BOTH.map(|region| {
        let (f, c) = (fine.boundary(region), coarse.boundary(region));
        if f.slope.len() == c.slope.len() {
            f.slope
                .iter()
                .zip(&c.slope)
                .map(|(a, b)| crate::math::abs(a - b) / 3.0)
                .fold(0.0, f64::max)
        } else {
            crate::math::abs(f.max_slope() - c.max_slope()) / 3.0
        }
    })
}

/// Analyse both instances and [`combine`]. The fine slope error is at least
/// the [`paired_slope_error`]; the coarse analysis only supplies margins.
pub fn verify_pair(
    fine: &dyn Instance,
    coarse: Option<&dyn Instance>,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let c = coarse.map(|c| checks::analyze(c, opts, true)).transpose()?;
    let floor = coarse.map_or([0.0; 2], |c| paired_slope_error(fine, c));
    let f = analyze_with(fine, opts, floor)?;
    Ok(combine(f, c.as_ref(), opts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelRing;
    use crate::radial::solve_radial_bvp;

    fn measured(name: &str, margin: f64, exact: bool) -> Measured {
        Measured {
            name: name.into(),
            margin,
            scale: 2.0,
            interpolation: 1e-3,
            slope_sensitivity: 2e-3,
            applicable: true,
            exact,
            note: None,
        }
    }

    fn radial_analysis() -> Analysis {
        let m = ModelRing::new(3, 0.3).unwrap();
        let s = solve_radial_bvp(3, m.r1, m.r2, 1024).unwrap();
        analyze(&RadialInstance::new(s).unwrap(), &VerifyOptions::default()).unwrap()
    }

    #[test]
    fn budgets_and_statuses() {
        let opts = VerifyOptions::default();
        let mut fine = radial_analysis();
        let mut coarse = fine.clone();
        fine.measured = alloc::vec![
            measured("a", -0.004, false),
            measured("b", -0.004, true),
            measured("c", -0.02, false),
        ];
        let mut skipped = measured("d", -1.0, false);
        skipped.applicable = false;
        fine.measured.push(skipped);
        coarse.measured = alloc::vec![measured("a", -0.007, false), measured("c", -0.02, false)];

        let report = combine(fine, Some(&coarse), &opts);
        let a = report.check("a").unwrap();
        assert_eq!(a.richardson, Some(1e-3));
        assert!((a.budget - (3e-3 + 2e-3)).abs() < 1e-15);
        assert_eq!(a.status, CheckStatus::Pass);
        assert_eq!(a.margin_raw, -0.002);
        let b = report.check("b").unwrap();
        assert_eq!((b.budget, b.status), (0.0, CheckStatus::Fail));
        assert_eq!(report.check("c").unwrap().status, CheckStatus::Fail);
        assert_eq!(
            report.check("d").unwrap().status,
            CheckStatus::NotApplicable
        );
        assert!(!report.passed);
        assert_eq!(report.failures().count(), 2);
    }

    #[test]
    fn radial_instance_passes_with_its_coarse_partner() {
        let m = ModelRing::new(3, 0.3).unwrap();
        let fine = RadialInstance::new(solve_radial_bvp(3, m.r1, m.r2, 2048).unwrap()).unwrap();
        let coarse = RadialInstance::new(solve_radial_bvp(3, m.r1, m.r2, 1024).unwrap()).unwrap();
        let floor = paired_slope_error(&fine, &coarse);
        assert!(floor.iter().all(|&e| (0.0..1e-2).contains(&e)), "{floor:?}");
        let report = verify_pair(&fine, Some(&coarse), &VerifyOptions::default()).unwrap();
        assert!(report.passed, "{:?}", report.failures().collect::<Vec<_>>());
        assert_eq!(report.coarse_spacing, Some(coarse.spacing()));
        assert!(report.ordering.rigidity_gap < 1e-3);
    }

    #[test]
    fn normalisation_matches_the_model_maximum() {
        let lambda = normalize_solution(3, 0.5, 0.3).unwrap();
        assert!((lambda * lambda * 0.5 - model_maximum(3, 0.3)).abs() < 1e-15);
        assert!(normalize_solution(3, 0.5, 0.6).is_err());
        assert!(normalize_solution(3, 0.0, 0.3).is_err());
    }
}
