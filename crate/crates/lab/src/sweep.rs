//! One solve and verify per parameter value, aggregated into `sweep.csv`.

use std::path::Path;
use std::str::FromStr;

use ringlab_core::verify::{CheckStatus, VerificationReport};
use serde::Serialize;

use crate::config::{HarmonicConfig, Kind, RunConfig};
use crate::error::{LabError, Result};
use crate::io::write_csv;
use crate::pipeline;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Core radius of an annulus.
    R,
    /// Coefficient of `Y_{2,0}` on the outer boundary.
    Epsilon,
    /// Grid spacing, `1/48` or `48` for `h = 1/48`.
    Grid,
}

impl FromStr for SweepParam {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "R" => Ok(SweepParam::R),
            "epsilon" => Ok(SweepParam::Epsilon),
            "grid" => Ok(SweepParam::Grid),
            _ => Err(LabError::Config(format!(
                "unknown sweep parameter {s:?}; expected R, epsilon or grid"
            ))),
        }
    }
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::R => "R",
            SweepParam::Epsilon => "epsilon",
            SweepParam::Grid => "grid",
        }
    }

    /// `base` with the parameter set to `value`.
    pub fn apply(self, base: &RunConfig, value: &str) -> Result<RunConfig> {
        let mut cfg = base.clone();
        match self {
            SweepParam::R => {
                cfg.domain.core_radius = Some(parse_number(value)?);
                cfg.domain.inner_radius = None;
                cfg.domain.outer_radius = None;
            }
            SweepParam::Epsilon => {
                let c = parse_number(value)?;
                let hs = &mut cfg.domain.outer_harmonics;
                hs.retain(|h| (h.l, h.m) != (2, 0));
                if c != 0.0 {
                    hs.push(HarmonicConfig { l: 2, m: 0, c });
                }
            }
            SweepParam::Grid => {
                let (grid, h) = parse_grid(value)?;
                cfg.solver.grid = grid;
                cfg.solver.h = h;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_number(value: &str) -> Result<f64> {
    value
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| LabError::Config(format!("not a number: {value:?}")))
}

/// `1/k` or `k` give `grid = k`; other values are spacings.
fn parse_grid(value: &str) -> Result<(Option<u32>, Option<f64>)> {
    let v = value.trim();
    let k = match v.split_once('/') {
        Some((num, den)) if num.trim() == "1" => den.trim().parse::<u32>().ok(),
        Some(_) => None,
        None => v.parse::<u32>().ok(),
    };
    if let Some(k) = k {
        return Ok((Some(k), None));
    }
    let h = parse_number(v)?;
    Ok((None, Some(h)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: &'static str,
    pub value: String,
    /// `pass`, `fail` or `error`.
    pub status: &'static str,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    /// Largest `λ²W − W_R` over both regions.
    pub max_violation: Option<f64>,
    pub sandwich_lower: Option<f64>,
    pub sandwich_upper: Option<f64>,
    pub rigidity_gap: Option<f64>,
    pub passed: Option<bool>,
    pub error: Option<String>,
}

impl SweepRow {
    fn from_report(param: SweepParam, value: &str, report: &VerificationReport) -> Self {
        let margin = |name: &str| {
            report
                .check(name)
                .filter(|c| c.status != CheckStatus::NotApplicable)
                .map(|c| c.margin)
        };
        Self {
            param: param.name(),
            value: value.to_string(),
            status: if report.passed { "pass" } else { "fail" },
            r1: Some(report.ordering.r1),
            r2: Some(report.ordering.r2),
            max_violation: report
                .gradient
                .iter()
                .map(|g| g.max_violation)
                .reduce(f64::max),
            sandwich_lower: margin("curvature.sandwich.lower"),
            sandwich_upper: margin("curvature.sandwich.upper"),
            rigidity_gap: Some(report.ordering.rigidity_gap),
            passed: Some(report.passed),
            error: None,
        }
    }

    fn from_error(param: SweepParam, value: &str, err: &LabError) -> Self {
        Self {
            param: param.name(),
            value: value.to_string(),
            status: "error",
            r1: None,
            r2: None,
            max_violation: None,
            sandwich_lower: None,
            sandwich_upper: None,
            rigidity_gap: None,
            passed: None,
            error: Some(err.to_string()),
        }
    }
}

/// Run every value; failures are recorded in their row and the sweep goes
/// on. Each run lives in `out/<config hash>`.
pub fn sweep(
    base: &RunConfig,
    kind: Kind,
    param: SweepParam,
    values: &[String],
    out: &Path,
    mut progress: impl FnMut(&SweepRow),
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(values.len());
    for value in values {
        let run = |cfg: RunConfig| -> Result<VerificationReport> {
            let dir = out.join(cfg.hash(kind));
            pipeline::solve(&cfg, kind, &dir)?;
            pipeline::verify(&dir, &dir)
        };
        let row = match param.apply(base, value).and_then(run) {
            Ok(report) => SweepRow::from_report(param, value, &report),
            Err(e) => SweepRow::from_error(param, value, &e),
        };
        progress(&row);
        rows.push(row);
    }
    write_csv(&out.join("sweep.csv"), &rows)?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_values() {
        assert_eq!(parse_grid("1/48").unwrap(), (Some(48), None));
        assert_eq!(parse_grid("96").unwrap(), (Some(96), None));
        assert_eq!(parse_grid("0.02").unwrap(), (None, Some(0.02)));
        assert!(parse_grid("2/48").is_err());
    }

    #[test]
    fn epsilon_replaces_the_y20_coefficient() {
        let base = RunConfig::parse("[problem]\nn = 3\n[domain]\ncore_radius = 0.3\n").unwrap();
        let cfg = SweepParam::Epsilon.apply(&base, "0.05").unwrap();
        assert_eq!(
            cfg.domain.outer_harmonics,
            vec![HarmonicConfig {
                l: 2,
                m: 0,
                c: 0.05
            }]
        );
        let back = SweepParam::Epsilon.apply(&cfg, "0").unwrap();
        assert!(back.domain.outer_harmonics.is_empty());
        assert_eq!(
            SweepParam::R.apply(&base, "0.7").unwrap_err().exit_code(),
            2
        );
    }
}
