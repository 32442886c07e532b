//! Run configuration: a TOML file with the sections `[problem]`,
//! `[domain]`, `[solver]`, `[verify]` and `[output]`. Unknown keys are
//! rejected. See `configs/README.md` for the grammar.

use std::path::{Path, PathBuf};

use ringlab_core::geometry::{Harmonic, RadialGraph, RingDomainSpec, DOMAIN_MAX_DEGREE};
use ringlab_core::model::{core_radius_max, ring_radii};
use ringlab_core::verify::{FieldSampling, VerifyOptions};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Radial,
    Field,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Radial => "radial",
            Kind::Field => "field",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub domain: DomainConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub n: u32,
}

/// Either `core_radius` (the radii of the ring model `u_R`) or both radii.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub core_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inner_harmonics: Vec<HarmonicConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outer_harmonics: Vec<HarmonicConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicConfig {
    pub l: u32,
    pub m: i32,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Grid cells per unit length; the spacing is `1/grid`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<u32>,
    /// Explicit spacing, instead of `grid`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Also solve at twice the spacing (half the nodes) for the Richardson
    /// part of the budgets.
    #[serde(default = "default_true")]
    pub coarse: bool,
    /// Intervals of the radial solve.
    #[serde(default = "default_nodes")]
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_levels")]
    pub levels: usize,
    #[serde(default = "default_n_theta")]
    pub n_theta: usize,
    #[serde(default = "default_n_phi")]
    pub n_phi: usize,
    #[serde(default = "default_sigma_degree")]
    pub sigma_degree: u32,
    #[serde(default = "default_c1")]
    pub c1: f64,
    #[serde(default = "default_c2")]
    pub c2: f64,
    #[serde(default = "default_serrin_tol")]
    pub serrin_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Run directory; `--out` overrides it, `./runs/<config hash>` is the
    /// fallback.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_tol() -> f64 {
    1e-10
}
fn default_max_iter() -> usize {
    500
}
fn default_true() -> bool {
    true
}
fn default_nodes() -> usize {
    4096
}
fn default_levels() -> usize {
    16
}
fn default_n_theta() -> usize {
    32
}
fn default_n_phi() -> usize {
    64
}
fn default_sigma_degree() -> u32 {
    6
}
fn default_c1() -> f64 {
    1.0
}
fn default_c2() -> f64 {
    2.0
}
fn default_serrin_tol() -> f64 {
    1e-3
}
fn default_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv]
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid: None,
            h: None,
            tol: default_tol(),
            max_iter: default_max_iter(),
            coarse: true,
            nodes: default_nodes(),
        }
    }
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            levels: default_levels(),
            n_theta: default_n_theta(),
            n_phi: default_n_phi(),
            sigma_degree: default_sigma_degree(),
            c1: default_c1(),
            c2: default_c2(),
            serrin_tol: default_serrin_tol(),
        }
    }
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            formats: default_formats(),
        }
    }
}

/// Default spacing when neither `grid` nor `h` is given.
pub const DEFAULT_GRID: u32 = 96;

fn bad(msg: impl Into<String>) -> LabError {
    LabError::Config(msg.into())
}

fn in_range(what: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if v.is_finite() && v > lo && v <= hi {
        Ok(())
    } else {
        Err(bad(format!("{what} = {v} outside ({lo}, {hi}]")))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| LabError::ConfigFile {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            LabError::Config(msg) => bad(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Range checks that do not depend on the kind of run.
    pub fn validate(&self) -> Result<()> {
        let n = self.problem.n;
        if !(3..=64).contains(&n) {
            return Err(bad(format!("problem.n = {n} outside [3, 64]")));
        }
        let d = &self.domain;
        match (d.core_radius, d.inner_radius, d.outer_radius) {
            (Some(r), None, None) => {
                let max = core_radius_max(n);
                if !(r.is_finite() && r > 0.0 && r < max) {
                    return Err(bad(format!(
                        "domain.core_radius = {r} outside (0, {max}) for n = {n}"
                    )));
                }
            }
            (None, Some(a), Some(b)) => {
                in_range("domain.inner_radius", a, 0.0, 1e3)?;
                in_range("domain.outer_radius", b, 0.0, 1e3)?;
                if a >= b {
                    return Err(bad("domain.inner_radius must be below domain.outer_radius"));
                }
            }
            _ => {
                return Err(bad(
                    "domain needs either core_radius or both inner_radius and outer_radius",
                ))
            }
        }
        for h in d.inner_harmonics.iter().chain(&d.outer_harmonics) {
            if h.l == 0 || h.l > DOMAIN_MAX_DEGREE || h.m.unsigned_abs() > h.l {
                return Err(bad(format!(
                    "harmonic (l = {}, m = {}) outside 1 <= l <= {DOMAIN_MAX_DEGREE}, |m| <= l",
                    h.l, h.m
                )));
            }
            if !(h.c.is_finite() && h.c.abs() < 0.5) {
                return Err(bad(format!(
                    "harmonic coefficient {} outside (-0.5, 0.5)",
                    h.c
                )));
            }
        }
        let s = &self.solver;
        if s.grid.is_some() && s.h.is_some() {
            return Err(bad("solver: give grid or h, not both"));
        }
        if let Some(g) = s.grid {
            if !(4..=1024).contains(&g) {
                return Err(bad(format!("solver.grid = {g} outside [4, 1024]")));
            }
        }
        if let Some(h) = s.h {
            in_range("solver.h", h, 0.0, 0.25)?;
        }
        in_range("solver.tol", s.tol, 0.0, 1e-2)?;
        if s.max_iter == 0 {
            return Err(bad("solver.max_iter must be positive"));
        }
        if !(32..=1 << 24).contains(&s.nodes) || !s.nodes.is_multiple_of(2) {
            return Err(bad(format!(
                "solver.nodes = {} must be even and within [32, 2^24]",
                s.nodes
            )));
        }
        let v = &self.verify;
        if !(2..=1024).contains(&v.levels) {
            return Err(bad(format!(
                "verify.levels = {} outside [2, 1024]",
                v.levels
            )));
        }
        if !(4..=512).contains(&v.n_theta) || !(8..=1024).contains(&v.n_phi) {
            return Err(bad(
                "verify.n_theta must be in [4, 512] and verify.n_phi in [8, 1024]",
            ));
        }
        if v.sigma_degree > 8 {
            return Err(bad("verify.sigma_degree must be at most 8"));
        }
        for (what, c) in [("verify.c1", v.c1), ("verify.c2", v.c2)] {
            if !(c.is_finite() && (0.0..=100.0).contains(&c)) {
                return Err(bad(format!("{what} = {c} outside [0, 100]")));
            }
        }
        in_range("verify.serrin_tol", v.serrin_tol, 0.0, 0.1)?;
        if self.output.formats.is_empty() {
            return Err(bad("output.formats must not be empty"));
        }
        Ok(())
    }

    /// Checks specific to one kind of run.
    pub fn validate_for(&self, kind: Kind) -> Result<()> {
        match kind {
            Kind::Field => {
                if self.problem.n != 3 {
                    return Err(bad("field runs need problem.n = 3"));
                }
            }
            Kind::Radial => {
                if !self.domain.inner_harmonics.is_empty()
                    || !self.domain.outer_harmonics.is_empty()
                {
                    return Err(bad("radial runs take no harmonics"));
                }
            }
        }
        Ok(())
    }

    /// Inner and outer base radii.
    pub fn radii(&self) -> Result<(f64, f64)> {
        match (
            self.domain.core_radius,
            self.domain.inner_radius,
            self.domain.outer_radius,
        ) {
            (Some(r), _, _) => Ok(ring_radii(self.problem.n, r)?),
            (None, Some(a), Some(b)) => Ok((a, b)),
            _ => Err(bad("domain radii missing")),
        }
    }

    pub fn domain_spec(&self) -> Result<RingDomainSpec> {
        let (a, b) = self.radii()?;
        let convert = |hs: &[HarmonicConfig]| {
            hs.iter()
                .map(|h| Harmonic {
                    l: h.l,
                    m: h.m,
                    c: h.c,
                })
                .collect()
        };
        Ok(RingDomainSpec {
            inner: RadialGraph::with_harmonics(a, convert(&self.domain.inner_harmonics)),
            outer: RadialGraph::with_harmonics(b, convert(&self.domain.outer_harmonics)),
        })
    }

    pub fn spacing(&self) -> f64 {
        match (self.solver.h, self.solver.grid) {
            (Some(h), _) => h,
            (None, Some(g)) => 1.0 / f64::from(g),
            (None, None) => 1.0 / f64::from(DEFAULT_GRID),
        }
    }

    pub fn verify_options(&self) -> VerifyOptions {
        VerifyOptions {
            levels: self.verify.levels,
            c1: self.verify.c1,
            c2: self.verify.c2,
            serrin_tol: self.verify.serrin_tol,
        }
    }

    pub fn sampling(&self) -> FieldSampling {
        FieldSampling {
            n_theta: self.verify.n_theta,
            n_phi: self.verify.n_phi,
            sigma_degree: self.verify.sigma_degree,
        }
    }

    /// Canonical TOML form, as stored in run directories.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serialises")
    }

    /// `sha256` of the kind and the canonical JSON form, in hex.
    pub fn hash(&self, kind: Kind) -> String {
        let json = serde_json::to_string(self).expect("configuration serialises");
        sha256_hex(format!("{}\n{json}", kind.name()).as_bytes())
    }
}

/// `sha256` of the canonical JSON form of a domain, in hex.
pub fn domain_hash(spec: &RingDomainSpec) -> String {
    sha256_hex(
        serde_json::to_string(spec)
            .expect("domain serialises")
            .as_bytes(),
    )
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[problem]\nn = 3\n[domain]\ncore_radius = 0.3\n";

    #[test]
    fn defaults_fill_optional_sections() {
        let cfg = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.spacing(), 1.0 / 96.0);
        assert_eq!(cfg.verify.levels, 16);
        assert!(cfg.solver.coarse);
        let (a, b) = cfg.radii().unwrap();
        assert!((a - 0.0541589).abs() < 1e-6 && (b - 0.971820).abs() < 1e-6);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::parse(&format!("{MINIMAL}[solver]\ngrdi = 48\n")).unwrap_err();
        assert!(err.to_string().contains("grdi"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn physical_ranges_are_enforced() {
        for bad_cfg in [
            "[problem]\nn = 3\n[domain]\ncore_radius = 0.6\n",
            "[problem]\nn = 2\n[domain]\ncore_radius = 0.3\n",
            "[problem]\nn = 3\n[domain]\ninner_radius = 0.5\nouter_radius = 0.4\n",
            "[problem]\nn = 3\n[domain]\ncore_radius = 0.3\ninner_radius = 0.1\n",
            "[problem]\nn = 3\n[domain]\ncore_radius = 0.3\nouter_harmonics = [{ l = 5, m = 0, c = 0.1 }]\n",
        ] {
            assert!(RunConfig::parse(bad_cfg).is_err(), "{bad_cfg}");
        }
    }

    #[test]
    fn canonical_form_round_trips_and_hash_is_stable() {
        let cfg = RunConfig::parse(
            "[problem]\nn = 3\n[domain]\ncore_radius = 0.3\nouter_harmonics = [{ l = 2, m = 0, c = 0.05 }]\n[solver]\ngrid = 48\n",
        )
        .unwrap();
        let again = RunConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.hash(Kind::Field), again.hash(Kind::Field));
        assert_ne!(cfg.hash(Kind::Field), cfg.hash(Kind::Radial));
    }
}
