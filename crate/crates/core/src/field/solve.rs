//! Preconditioned BiCGSTAB for the (mildly non-symmetric) Shortley–Weller
//! system.

use alloc::vec;
use alloc::vec::Vec;

use super::assemble::IrregularPoissonSystem;
use super::multigrid::{precondition, Workspace};
use super::ScalarField3;
use crate::error::{Error, Result};
use crate::math::sqrt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Preconditioner {
    /// One geometric multigrid V-cycle.
    Multigrid,
    /// Diagonal scaling.
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Target relative residual `‖b − Ax‖₂ / ‖b‖₂`.
    pub tol: f64,
    pub max_iter: usize,
    pub preconditioner: Preconditioner,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 500,
            preconditioner: Preconditioner::Multigrid,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveReport {
    pub iterations: usize,
    /// Final true relative residual.
    pub residual: f64,
    /// Relative residual after each iteration.
    pub history: Vec<f64>,
    pub unknowns: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    sqrt(dot(a, a))
}

/// Solve the assembled system. Deterministic: fixed operation order.
pub fn solve_poisson(
    system: &IrregularPoissonSystem,
    opts: &SolveOptions,
) -> Result<(ScalarField3, SolveReport)> {
    let levels = &system.levels;
    let fine = system.operator();
    let m = fine.len();
    let b = vec![fine.rhs; m];
    let bnorm = norm(&b);
    let mut ws = Workspace::new(levels);
    let inv_diag: Vec<f64> = (0..m).map(|i| 1.0 / fine.diag(i)).collect();
    let apply_m = |r: &[f64], z: &mut [f64], ws: &mut Workspace| match opts.preconditioner {
        Preconditioner::Multigrid => precondition(levels, r, z, ws),
        Preconditioner::Jacobi => {
            for i in 0..m {
                z[i] = r[i] * inv_diag[i];
            }
        }
    };

    let mut x = vec![0.0; m];
    let mut r = b.clone();
    let r_hat = r.clone();
    let mut p = vec![0.0; m];
    let mut v = vec![0.0; m];
    let mut s = vec![0.0; m];
    let mut t = vec![0.0; m];
    let mut y = vec![0.0; m];
    let mut z = vec![0.0; m];
    let (mut rho, mut alpha, mut omega) = (1.0f64, 1.0f64, 1.0f64);
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=opts.max_iter {
        iterations = it;
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 || !rho_new.is_finite() {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        for i in 0..m {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        apply_m(&p, &mut y, &mut ws);
        fine.apply(&y, &mut v);
        let denom = dot(&r_hat, &v);
        if denom == 0.0 {
            break;
        }
        alpha = rho_new / denom;
        for i in 0..m {
            s[i] = r[i] - alpha * v[i];
        }
        let snorm = norm(&s) / bnorm;
        if snorm <= opts.tol {
            for i in 0..m {
                x[i] += alpha * y[i];
            }
            history.push(snorm);
            converged = true;
            break;
        }
        apply_m(&s, &mut z, &mut ws);
        fine.apply(&z, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for i in 0..m {
            x[i] += alpha * y[i] + omega * z[i];
            r[i] = s[i] - omega * t[i];
        }
        let rn = norm(&r) / bnorm;
        history.push(rn);
        rho = rho_new;
        if rn <= opts.tol {
            converged = true;
            break;
        }
        if omega == 0.0 {
            break;
        }
    }

    // true residual
    fine.apply(&x, &mut t);
    for i in 0..m {
        r[i] = b[i] - t[i];
    }
    let residual = norm(&r) / bnorm;
    if !converged || !(residual <= opts.tol * 10.0) {
        return Err(Error::Convergence {
            iterations,
            residual,
            history,
        });
    }

    let grid = fine.grid;
    let mut values = vec![0.0; grid.len()];
    for (i, &node) in fine.unknown_node.iter().enumerate() {
        values[node as usize] = x[i];
    }
    let field = ScalarField3 {
        grid,
        values,
        mask: system.mask().to_vec(),
    };
    Ok((
        field,
        SolveReport {
            iterations,
            residual,
            history,
            unknowns: m,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::assemble_system;
    use crate::geometry::{make_domain, RingDomainSpec};
    use crate::model::ModelRing;

    #[test]
    fn annulus_matches_closed_form_at_coarse_grid() {
        let m = ModelRing::new(3, 0.3).unwrap();
        let d = make_domain(RingDomainSpec::annulus(m.r1, m.r2)).unwrap();
        let sys = assemble_system(&d, 1.0 / 24.0).unwrap();
        let (f, rep) = solve_poisson(&sys, &SolveOptions::default()).unwrap();
        assert!(rep.residual <= 1e-9);
        let mut err: f64 = 0.0;
        for (idx, &v) in f.values.iter().enumerate() {
            if f.mask[idx].in_domain() {
                let x = f.grid.position(f.grid.coords(idx));
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                err = err.max((v - m.u_eval(r).unwrap().0).abs());
            }
        }
        assert!(err < 2e-2, "{err}");
    }

    #[test]
    fn preconditioners_agree() {
        let d = make_domain(RingDomainSpec::annulus(0.3, 0.9)).unwrap();
        let sys = assemble_system(&d, 1.0 / 20.0).unwrap();
        let (a, ra) = solve_poisson(&sys, &SolveOptions::default()).unwrap();
        let opts = SolveOptions {
            preconditioner: Preconditioner::Jacobi,
            max_iter: 5000,
            ..SolveOptions::default()
        };
        let (b, rb) = solve_poisson(&sys, &opts).unwrap();
        assert!(ra.iterations < rb.iterations);
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-9);
        }
    }
}
