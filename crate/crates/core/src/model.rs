//! The rotationally symmetric ring solutions and the quantities derived from
//! them.
//!
//! Up to translation and scaling every radial solution of `Δu = −n` on an
//! annulus is
//!
//! ```text
//! u_R(r) = (1 − r²)/2 − Rⁿ / ((n − 2) r^(n−2)),    r₁(R) < r < r₂(R),
//! ```
//!
//! parameterised by the core radius `R ∈ (0, R_max)`, `R_max = √((n−2)/n)`.
//! `u_R` attains its maximum `(1 − nR²/(n−2))/2` on the sphere `|x| = R`,
//! which splits the annulus into an inner shell (`r₁ < r < R`) and an outer
//! shell (`R < r < r₂`). Everything in this module is `f64` and exact up to
//! rounding; root finding is bisection on brackets fixed by the sign of
//! `f_R` at `R`, except the pseudo-radial inversion, which is evaluated per
//! grid node and uses safeguarded Newton on the same brackets.

use alloc::format;

use crate::error::{finite, Error, Result};
use crate::math::{abs, powi, sqrt};
use crate::roots::{bisect, newton_bracketed};

/// Width of the band below `R_max` where the limit values are returned
/// instead of evaluating the `0/0` forms.
pub const GUARD_BAND: f64 = 1e-6;

/// Which half of the model annulus a region is compared against.
///
/// `Outer` is the shell `R < r < r₂` (slopes `τ < √n`, pseudo-radial function
/// `ψ₊`), `Inner` the shell `r₁ < r < R` (`τ ≥ √n`, `ψ₋`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Branch {
    Outer,
    Inner,
}

impl Branch {
    /// Sign in front of the `s^{3/2}` term of the `W_R` expansion.
    fn expansion_sign(self) -> f64 {
        match self {
            Branch::Outer => -1.0,
            Branch::Inner => 1.0,
        }
    }
}

pub(crate) fn check_dimension(n: u32) -> Result<()> {
    if n < 3 {
        Err(Error::Dimension(n))
    } else {
        Ok(())
    }
}

/// `R_max(n) = √((n−2)/n)`.
pub fn core_radius_max(n: u32) -> f64 {
    let n = f64::from(n);
    sqrt((n - 2.0) / n)
}

/// `(u_R)_max = (1 − nR²/(n−2))/2`.
pub fn model_maximum(n: u32, core_radius: f64) -> f64 {
    let nf = f64::from(n);
    0.5 * (1.0 - nf * core_radius * core_radius / (nf - 2.0))
}

/// `Rⁿ / ((n−2) r^(n−2))`, with the `R = 0` case returning 0 at `r = 0`.
#[inline]
fn singular_term(n: u32, core_radius: f64, r: f64) -> f64 {
    if core_radius == 0.0 {
        return 0.0;
    }
    let k = n as i32;
    powi(core_radius, k) / ((f64::from(n) - 2.0) * powi(r, k - 2))
}

/// `f_R(r) = 1 − r² − 2Rⁿ/((n−2) r^(n−2))`; its two positive zeros are the
/// model radii.
pub fn f_r_eval(n: u32, core_radius: f64, r: f64) -> Result<f64> {
    check_dimension(n)?;
    finite(core_radius, "core radius")?;
    finite(r, "radius")?;
    if core_radius < 0.0 || r <= 0.0 {
        return Err(Error::OutOfRange {
            what: "radius",
            value: if r <= 0.0 { r } else { core_radius },
            range: "(0, inf)".into(),
        });
    }
    Ok(1.0 - r * r - 2.0 * singular_term(n, core_radius, r))
}

fn f_r_unchecked(n: u32, core_radius: f64, r: f64) -> f64 {
    1.0 - r * r - 2.0 * singular_term(n, core_radius, r)
}

fn in_guard_band(n: u32, core_radius: f64) -> bool {
    core_radius > core_radius_max(n) - GUARD_BAND
}

/// The two positive zeros `r₁ < R < r₂` of `f_R`.
pub fn ring_radii(n: u32, core_radius: f64) -> Result<(f64, f64)> {
    check_dimension(n)?;
    finite(core_radius, "core radius")?;
    let r_max = core_radius_max(n);
    if !(core_radius > 0.0 && core_radius < r_max) {
        return Err(Error::OutOfRange {
            what: "core radius",
            value: core_radius,
            range: format!("(0, {r_max})"),
        });
    }
    if in_guard_band(n, core_radius) {
        return Ok((r_max, r_max));
    }
    let f = |r: f64| f_r_unchecked(n, core_radius, r);
    // f increases on (0, R) from −∞; walk down until the sign flips
    let mut lo = 0.5 * core_radius;
    let mut steps = 0;
    while f(lo) >= 0.0 {
        lo *= 0.5;
        steps += 1;
        if steps > 2000 || lo == 0.0 {
            return Err(Error::Degenerate("inner model radius underflows"));
        }
    }
    let r1 = bisect(f, lo, core_radius, 0.0).ok_or(Error::Degenerate("inner radius bracket"))?;
    let r2 = bisect(f, core_radius, 1.0, 0.0).ok_or(Error::Degenerate("outer radius bracket"))?;
    Ok((r1, r2))
}

/// A member of the model family together with its radii.
///
/// `core_radius = 0` is admitted and stands for the Serrin ball
/// `u = (1 − r²)/2` on the unit ball (`r₁ = 0`, `r₂ = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelRing {
    pub n: u32,
    pub core_radius: f64,
    pub r1: f64,
    pub r2: f64,
    pub u_max: f64,
}

/// Result of [`ModelRing::psi`]: the pseudo-radius and its first two
/// derivatives with respect to the level value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiValue {
    pub radius: f64,
    pub rate: f64,
    pub curvature: f64,
    /// Set when the level equals the model maximum, where `ψ̇` is infinite.
    pub at_maximum: bool,
}

impl ModelRing {
    pub fn new(n: u32, core_radius: f64) -> Result<Self> {
        check_dimension(n)?;
        finite(core_radius, "core radius")?;
        if core_radius == 0.0 {
            return Ok(Self::serrin(n));
        }
        let r_max = core_radius_max(n);
        if !(core_radius > 0.0 && core_radius <= r_max) {
            return Err(Error::OutOfRange {
                what: "core radius",
                value: core_radius,
                range: format!("[0, {r_max}]"),
            });
        }
        let (r1, r2) = if core_radius >= r_max {
            (r_max, r_max)
        } else {
            ring_radii(n, core_radius)?
        };
        Ok(Self {
            n,
            core_radius,
            r1,
            r2,
            u_max: model_maximum(n, core_radius).max(0.0),
        })
    }

    /// The `R → 0` limit: `u = (1 − r²)/2` on the unit ball.
    pub fn serrin(n: u32) -> Self {
        Self {
            n,
            core_radius: 0.0,
            r1: 0.0,
            r2: 1.0,
            u_max: 0.5,
        }
    }

    pub fn in_guard_band(&self) -> bool {
        in_guard_band(self.n, self.core_radius)
    }

    fn u_unchecked(&self, r: f64) -> f64 {
        0.5 * (1.0 - r * r) - singular_term(self.n, self.core_radius, r)
    }

    fn du_unchecked(&self, r: f64) -> f64 {
        if self.core_radius == 0.0 {
            return -r;
        }
        r * (powi(self.core_radius / r, self.n as i32) - 1.0)
    }

    /// `u_R(r)` and `u_R'(r)` on `[r₁, r₂]`.
    pub fn u_eval(&self, r: f64) -> Result<(f64, f64)> {
        finite(r, "radius")?;
        let slack = 1e-12 * self.r2;
        if r < self.r1 - slack || r > self.r2 + slack || (r <= 0.0 && self.core_radius > 0.0) {
            return Err(Error::OutOfRange {
                what: "radius",
                value: r,
                range: format!("[{}, {}]", self.r1, self.r2),
            });
        }
        Ok((self.u_unchecked(r), self.du_unchecked(r)))
    }

    /// Normalised wall shear stress of the model on the boundary sphere of
    /// the given branch: `τ₂(R)` for [`Branch::Outer`], `τ₁(R)` for
    /// [`Branch::Inner`].
    pub fn tau(&self, branch: Branch) -> f64 {
        let n = self.n as i32;
        if self.core_radius == 0.0 {
            return match branch {
                Branch::Outer => 1.0,
                Branch::Inner => f64::INFINITY,
            };
        }
        if self.in_guard_band() {
            return sqrt(f64::from(self.n));
        }
        let denom = sqrt(
            1.0 - f64::from(self.n) * self.core_radius * self.core_radius
                / (f64::from(self.n) - 2.0),
        );
        match branch {
            Branch::Outer => self.r2 * (1.0 - powi(self.core_radius / self.r2, n)) / denom,
            Branch::Inner => self.r1 * (powi(self.core_radius / self.r1, n) - 1.0) / denom,
        }
    }

    /// Pseudo-radial function: the radius on the branch's shell where `u_R`
    /// equals `t`, with `ψ̇ = −ψ^(n−1)/(ψⁿ − Rⁿ)` and
    /// `ψ̈ = ψ̇³ (1 + (n−1)Rⁿ/ψⁿ)`.
    pub fn psi(&self, branch: Branch, t: f64) -> Result<PsiValue> {
        finite(t, "level")?;
        if t < 0.0 || t > self.u_max {
            return Err(Error::OutOfRange {
                what: "level",
                value: t,
                range: format!("[0, {}]", self.u_max),
            });
        }
        if self.core_radius == 0.0 && branch == Branch::Inner {
            return Err(Error::Degenerate("the Serrin ball has no inner shell"));
        }
        if t == self.u_max {
            return Ok(PsiValue {
                radius: self.core_radius,
                rate: f64::NEG_INFINITY,
                curvature: f64::NEG_INFINITY,
                at_maximum: true,
            });
        }
        let radius = self.psi_radius(branch, t);
        Ok(self.psi_derivatives(radius))
    }

    /// Radius part of [`Self::psi`] without the argument checks; `t` is
    /// clamped to `[0, u_max]`.
    pub fn psi_radius(&self, branch: Branch, t: f64) -> f64 {
        let t = t.clamp(0.0, self.u_max);
        if t == 0.0 {
            return match branch {
                Branch::Outer => self.r2,
                Branch::Inner => self.r1,
            };
        }
        if t == self.u_max {
            return self.core_radius;
        }
        let (lo, hi) = match branch {
            Branch::Outer => (self.core_radius, self.r2),
            Branch::Inner => (self.r1, self.core_radius),
        };
        // u_R ≈ u_max − n(r − R)²/2 near the core radius
        let offset = sqrt(2.0 * (self.u_max - t) / f64::from(self.n));
        let start = match branch {
            Branch::Outer => self.core_radius + offset,
            Branch::Inner => self.core_radius - offset,
        };
        newton_bracketed(
            |r| (self.u_unchecked(r) - t, self.du_unchecked(r)),
            lo,
            hi,
            start,
        )
        .unwrap_or(self.core_radius)
    }

    fn psi_derivatives(&self, radius: f64) -> PsiValue {
        let n = self.n as i32;
        let rn = powi(self.core_radius, n);
        let pn = powi(radius, n);
        let rate = -powi(radius, n - 1) / (pn - rn);
        let curvature = rate * rate * rate * (1.0 + (f64::from(self.n) - 1.0) * rn / pn);
        PsiValue {
            radius,
            rate,
            curvature,
            at_maximum: false,
        }
    }

    /// `W_R = ((ψⁿ − Rⁿ)/ψ^(n−1))²`, the squared model slope at radius `ψ`.
    pub fn w_model(&self, psi: f64) -> f64 {
        let n = self.n as i32;
        let g = (powi(psi, n) - powi(self.core_radius, n)) / powi(psi, n - 1);
        g * g
    }

    /// Two-term expansion of `W_R` in the gap `s = u_max − u` near the
    /// maximum sphere: `2n s ∓ 4(n−1)√(2n)/(3R) s^{3/2}`.
    pub fn w_expansion(&self, branch: Branch, s: f64) -> f64 {
        let nf = f64::from(self.n);
        let leading = 2.0 * nf * s;
        if self.core_radius == 0.0 {
            return leading;
        }
        let c = 4.0 * (nf - 1.0) * sqrt(2.0 * nf) / (3.0 * self.core_radius);
        leading + branch.expansion_sign() * c * s * sqrt(s)
    }

    /// Weight `β(Ψ) = Ψ^{2(n−1)} / |Rⁿ − Ψⁿ|^{2(n−1)/n}` used by the
    /// weighted comparison function `F_β = β (W − W_R)`.
    pub fn beta(&self, psi: f64) -> f64 {
        let n = self.n as i32;
        let nf = f64::from(self.n);
        let gap = abs(powi(self.core_radius, n) - powi(psi, n));
        powi(psi, 2 * (n - 1)) / crate::math::powf(gap, 2.0 * (nf - 1.0) / nf)
    }

    /// `(n−1)/R · √((u_R)_max)`, the scale-free curvature of the maximum
    /// sphere used in the two-sided mean-curvature bound.
    pub fn sandwich_bound(&self) -> f64 {
        if self.core_radius == 0.0 {
            return f64::INFINITY;
        }
        (f64::from(self.n) - 1.0) / self.core_radius * sqrt(self.u_max)
    }
}

/// Free-function form of [`ModelRing::tau`].
pub fn tau_eval(model: &ModelRing, branch: Branch) -> f64 {
    model.tau(branch)
}

/// Expected core radius for a measured NWSS value: `τ < √n` inverts the
/// outer slope `τ₂`, `τ ≥ √n` the inner slope `τ₁`.
pub fn tau_invert(n: u32, tau: f64) -> Result<(f64, Branch)> {
    check_dimension(n)?;
    finite(tau, "tau")?;
    if tau < 1.0 {
        return Err(Error::BelowSerrinBound(tau));
    }
    let sqrt_n = sqrt(f64::from(n));
    let r_max = core_radius_max(n);
    if abs(tau - sqrt_n) <= GUARD_BAND {
        return Ok((r_max, Branch::Inner));
    }
    if tau == 1.0 {
        return Ok((0.0, Branch::Outer));
    }
    let hi = r_max - GUARD_BAND;
    let tau_at = |r: f64, branch: Branch| -> f64 {
        ModelRing::new(n, r)
            .map(|m| m.tau(branch))
            .unwrap_or(f64::NAN)
    };
    if tau < sqrt_n {
        if tau >= tau_at(hi, Branch::Outer) {
            return Ok((hi, Branch::Outer));
        }
        let r = bisect(|r| tau_at(r, Branch::Outer) - tau, 0.0, hi, 0.0)
            .ok_or(Error::Degenerate("outer slope bracket"))?;
        Ok((r, Branch::Outer))
    } else {
        if tau <= tau_at(hi, Branch::Inner) {
            return Ok((hi, Branch::Inner));
        }
        let mut lo = 0.5 * hi;
        let mut steps = 0;
        while tau_at(lo, Branch::Inner) < tau {
            lo *= 0.5;
            steps += 1;
            if steps > 2000 {
                return Err(Error::Degenerate("inner slope bracket"));
            }
        }
        let r = bisect(|r| tau_at(r, Branch::Inner) - tau, lo, hi, 0.0)
            .ok_or(Error::Degenerate("inner slope bracket"))?;
        Ok((r, Branch::Inner))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_r_values() {
        let (r1, _) = ring_radii(3, 0.3).unwrap();
        assert!(f_r_eval(3, 0.3, r1).unwrap().abs() < 1e-12);
        assert!((f_r_eval(3, 0.3, 0.3).unwrap() - 0.73).abs() < 1e-14);
        let v = f_r_eval(5, 0.2, 0.5).unwrap();
        assert!((v - (1.0 - 0.25 - 2.0 * 0.2f64.powi(5) / (3.0 * 0.125))).abs() < 1e-15);
        assert!((v - 0.748_293_333_333_333_3).abs() < 1e-12);
        assert!(f_r_eval(3, f64::NAN, 0.5).is_err());
        assert!(f_r_eval(2, 0.3, 0.5).is_err());
    }

    #[test]
    fn radii_reject_out_of_range() {
        assert!(ring_radii(3, 0.0).is_err());
        assert!(ring_radii(3, 0.6).is_err());
        assert!(ring_radii(3, -0.1).is_err());
    }

    #[test]
    fn radii_collide_at_guard_band() {
        let r_max = core_radius_max(3);
        let (r1, r2) = ring_radii(3, r_max - 1e-7).unwrap();
        assert_eq!(r1, r_max);
        assert_eq!(r2, r_max);
        assert!((r_max - 0.577_350_269_189_625_8).abs() < 1e-15);
    }

    #[test]
    fn serrin_limit_radii() {
        let (r1, r2) = ring_radii(3, 1e-6).unwrap();
        assert!((1.0 - r2) < 1e-17 + 1e-15);
        assert!(r1 < 1e-17);
        assert!(f_r_eval(3, 1e-6, r1).unwrap().abs() < 1e-12);
    }

    #[test]
    fn u_at_core_radius_is_maximum() {
        let m = ModelRing::new(3, 0.3).unwrap();
        let (u, du) = m.u_eval(0.3).unwrap();
        assert!((u - 0.365).abs() < 1e-15);
        assert_eq!(du, 0.0);
        let (u2, _) = m.u_eval(m.r2).unwrap();
        assert!(u2.abs() < 1e-12);
        let m4 = ModelRing::new(4, 0.25).unwrap();
        assert!((m4.u_eval(0.25).unwrap().0 - 0.4375).abs() < 1e-15);
        assert!(m.u_eval(0.99).is_err());
        assert!(m.u_eval(0.01).is_err());
    }

    #[test]
    fn tau_limits() {
        assert_eq!(ModelRing::serrin(3).tau(Branch::Outer), 1.0);
        let near = ModelRing::new(3, core_radius_max(3) - 5e-7).unwrap();
        assert_eq!(near.tau(Branch::Inner), 3f64.sqrt());
        assert_eq!(near.tau(Branch::Outer), 3f64.sqrt());
    }

    #[test]
    fn tau_invert_special_values() {
        assert_eq!(tau_invert(3, 1.0).unwrap(), (0.0, Branch::Outer));
        let (r, b) = tau_invert(3, 3f64.sqrt()).unwrap();
        assert_eq!(b, Branch::Inner);
        assert!((r - core_radius_max(3)).abs() < 1e-15);
        assert!(matches!(
            tau_invert(3, 0.99),
            Err(Error::BelowSerrinBound(_))
        ));
    }

    #[test]
    fn psi_endpoints() {
        let m = ModelRing::new(3, 0.3).unwrap();
        assert_eq!(m.psi(Branch::Outer, 0.0).unwrap().radius, m.r2);
        let top = m.psi(Branch::Inner, m.u_max).unwrap();
        assert_eq!(top.radius, 0.3);
        assert!(top.at_maximum);
        assert!(m.psi(Branch::Outer, 0.4).is_err());
        assert!(m.psi(Branch::Outer, -1e-3).is_err());
    }

    #[test]
    fn psi_derivatives_match_finite_differences() {
        let m = ModelRing::new(4, 0.35).unwrap();
        for branch in [Branch::Outer, Branch::Inner] {
            let t = 0.2;
            let d = 1e-5;
            let p = m.psi(branch, t).unwrap();
            let pp = m.psi(branch, t + d).unwrap().radius;
            let pm = m.psi(branch, t - d).unwrap().radius;
            let rate_fd = (pp - pm) / (2.0 * d);
            let curv_fd = (pp - 2.0 * p.radius + pm) / (d * d);
            assert!((rate_fd - p.rate).abs() < 1e-6 * p.rate.abs());
            assert!((curv_fd - p.curvature).abs() < 1e-3 * p.curvature.abs());
        }
    }

    #[test]
    fn w_model_edge_values() {
        let m = ModelRing::new(3, 0.3).unwrap();
        assert_eq!(m.w_model(0.3), 0.0);
        assert_eq!(m.w_expansion(Branch::Outer, 0.0), 0.0);
    }
}
