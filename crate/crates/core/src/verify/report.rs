//! Report types. Every margin is `bound − achieved`, so a check passes when
//! its margin is at least `−budget`.

use alloc::string::String;
use alloc::vec::Vec;

use super::instance::Region;
use crate::model::Branch;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

/// One gating inequality.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    /// Margin after normalisation.
    pub margin: f64,
    /// Margin of the same inequality in the units of the solved instance.
    pub margin_raw: f64,
    pub budget: f64,
    /// Interpolation part of the budget, before the `c₁` factor.
    pub interpolation: f64,
    /// Margin change under the boundary slope error, before the `c₁` factor.
    pub slope_sensitivity: f64,
    /// `|m_h − m_2h| / 3`, before the `c₂` factor, when a coarse run exists.
    pub richardson: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NwssComponent {
    pub region: Region,
    pub max_slope: f64,
    pub tau: f64,
    pub branch: Branch,
    /// `R(u, Γ)` from inverting the model slope.
    pub expected_radius: f64,
    /// `τ < 1` within the accepted tolerance.
    pub below_one: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NwssReport {
    pub u_max: f64,
    pub inner: NwssComponent,
    pub outer: NwssComponent,
}

impl NwssReport {
    pub fn component(&self, region: Region) -> &NwssComponent {
        match region {
            Region::Inner => &self.inner,
            Region::Outer => &self.outer,
        }
    }
}

/// Model a region is compared against, and the scale making the maxima
/// agree.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegionScale {
    pub region: Region,
    pub branch: Branch,
    pub core_radius: f64,
    pub lambda: f64,
    /// The Serrin ball is used because `τ ≤ 1 + tol`.
    pub serrin: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GradientCheck {
    pub region: Region,
    /// `max (λ²W − W_R)` over the checked samples.
    pub max_violation: f64,
    pub location: [f64; 3],
    /// `max |λ²W − W_R| / W_R(r_Γ)`.
    pub max_relative_deviation: f64,
    /// `max β(Ψ)(λ²W − W_R)`.
    pub max_weighted: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundaryCurvature {
    pub region: Region,
    /// Normalised bound on the mean curvature, normal pointing out of the
    /// region.
    pub bound: f64,
    /// Normalised curvature at the sample of largest slope.
    pub achieved: f64,
    /// Samples within 1 % of the largest slope.
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Sandwich {
    /// `(n−1)/R₂ √((u_{R₂})_max)`.
    pub lower_bound: f64,
    /// `(n−1)/R₁ √((u_{R₁})_max)`.
    pub upper_bound: f64,
    /// Range of `H √u_max` over `Σ`.
    pub min_scaled_curvature: f64,
    pub max_scaled_curvature: f64,
}

/// One row of the per-sample curvature table of `Σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SigmaRow {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub weight: f64,
    pub mean_curvature: f64,
    pub scaled_curvature: f64,
    pub lower_margin: Option<f64>,
    pub upper_margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CurvatureReport {
    pub boundary: Vec<BoundaryCurvature>,
    pub sandwich: Option<Sandwich>,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub sigma_rows: Vec<SigmaRow>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegionAreas {
    pub region: Region,
    pub boundary_area: f64,
    /// `∫_Γ H dσ`, normal pointing away from the origin.
    pub boundary_curvature_integral: f64,
    /// Normalised `|Σ|/R^{n−1}`.
    pub sigma_ratio: Option<f64>,
    /// Normalised `|Γ|/r^{n−1}`.
    pub boundary_ratio: f64,
}

/// Both sides of the divergence identity on `N ∩ {u ≤ u_max − ε}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntegralIdentity {
    pub region: Region,
    /// Normalised `ε`.
    pub epsilon: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// The sign the comparison theorem predicts for the left side.
    pub sign_consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AreaReport {
    pub sigma_area: f64,
    /// `∫_Σ H dσ`, normal pointing away from the origin.
    pub sigma_curvature_integral: f64,
    pub regions: Vec<RegionAreas>,
    pub identity: Vec<IntegralIdentity>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProfilePoint {
    pub t: f64,
    pub volume: f64,
    pub value: Option<f64>,
    /// Level too close to `u_max` for the grid.
    pub excluded: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UProfile {
    pub region: Region,
    pub points: Vec<ProfilePoint>,
    /// Relative gap between `∫|∇u|` over the level and `n Vol` at the
    /// cross-check levels.
    pub flux_mismatch: Vec<f64>,
    pub non_increasing: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExpansionFit {
    pub region: Region,
    pub profiles: usize,
    /// Median of fitted over predicted `r³` coefficient of `W`.
    pub median_ratio: Option<f64>,
    /// Fraction of profiles whose fitted coefficient has the predicted sign.
    pub sign_agreement: f64,
    /// Fitted `r³` coefficients of `λ²W` and of `W_R(Ψ)` (medians).
    pub fitted_w: Option<f64>,
    pub fitted_model: Option<f64>,
    pub predicted_w: f64,
    pub predicted_model: f64,
    /// Sign and magnitude within 25 %.
    pub directional_pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RadiiOrdering {
    pub r1: f64,
    pub r2: f64,
    pub margin: f64,
    pub applicable: bool,
    /// `R₂ − R₁` exceeds its budget.
    pub beyond_budget: bool,
    pub serrin_flag: bool,
    pub rigidity_gap: f64,
    pub sphericity: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerificationReport {
    pub schema: u32,
    pub n: u32,
    pub spacing: f64,
    pub coarse_spacing: Option<f64>,
    pub c1: f64,
    pub c2: f64,
    pub nwss: NwssReport,
    pub scales: Vec<RegionScale>,
    pub gradient: Vec<GradientCheck>,
    pub curvature: CurvatureReport,
    pub areas: AreaReport,
    pub u_profile: Vec<UProfile>,
    pub expansion: Vec<ExpansionFit>,
    pub ordering: RadiiOrdering,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}
