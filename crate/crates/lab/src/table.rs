//! Tabulated model quantities.

use ringlab_core::model::{core_radius_max, Branch, ModelRing};
use serde::Serialize;

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelRow {
    #[serde(rename = "R")]
    pub core_radius: f64,
    pub r1: f64,
    pub r2: f64,
    pub umax: f64,
    pub tau1: f64,
    pub tau2: f64,
}

/// Rows at `R_i = lo + i·(hi − lo)/steps`, `i = 0..steps`.
pub fn model_table(n: u32, lo: f64, hi: f64, steps: usize) -> Result<Vec<ModelRow>> {
    if !(3..=64).contains(&n) {
        return Err(LabError::Config(format!("n = {n} outside [3, 64]")));
    }
    let max = core_radius_max(n);
    if !(lo > 0.0 && lo < hi && hi < max) {
        return Err(LabError::Config(format!(
            "R range [{lo}, {hi}] must satisfy 0 < lo < hi < R_max = {max}"
        )));
    }
    if steps == 0 {
        return Err(LabError::Config("steps must be positive".into()));
    }
    let dr = (hi - lo) / steps as f64;
    (0..steps)
        .map(|i| {
            let m = ModelRing::new(n, lo + dr * i as f64)?;
            Ok(ModelRow {
                core_radius: m.core_radius,
                r1: m.r1,
                r2: m.r2,
                umax: m.u_max,
                tau1: m.tau(Branch::Inner),
                tau2: m.tau(Branch::Outer),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_count_and_range_errors() {
        assert_eq!(model_table(3, 0.05, 0.55, 100).unwrap().len(), 100);
        assert_eq!(model_table(3, 0.05, 0.6, 10).unwrap_err().exit_code(), 2);
        assert!(model_table(3, 0.3, 0.2, 10).is_err());
    }
}
