//! Solve and verify runs. A run directory holds
//!
//! - `config.toml`: the canonical configuration,
//! - `metadata.json`: hashes and solver summaries,
//! - `solve.log`: residual history,
//! - `field.{bin,json}` and, with `solver.coarse`, `field_coarse.{bin,json}`,
//! - `profile.csv` for radial runs.
//!
//! `verify` adds `report.json`, `u_profile.csv` and `sigma_curvature.csv`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ringlab_core::field::{
    assemble_system, solve_poisson, Preconditioner, ScalarField3, SolveOptions,
};
use ringlab_core::geometry::{make_domain, ValidatedDomain};
use ringlab_core::radial::{radial_closed_form, solve_radial_bvp, RadialSolution};
use ringlab_core::verify::{
    verify_pair, FieldInstance, Instance, RadialInstance, VerificationReport,
};
use serde::{Deserialize, Serialize};

use crate::checkpoint::{self, CheckpointHeader, RadialLayout};
use crate::config::{domain_hash, Format, Kind, RunConfig};
use crate::error::{LabError, Result};
use crate::io::{write_atomic, write_csv, write_json};

pub const RUN_FORMAT: &str = "ringlab-run";
pub const RUN_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub format: String,
    pub version: u32,
    pub tool_version: String,
    pub kind: Kind,
    pub n: u32,
    pub config_hash: String,
    pub domain_hash: String,
    pub fine: SolveSummary,
    pub coarse: Option<SolveSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSummary {
    pub checkpoint: String,
    /// Grid spacing, or the radial node spacing.
    pub spacing: f64,
    pub unknowns: usize,
    pub iterations: usize,
    /// Final relative residual of the iterative solve.
    pub residual: Option<f64>,
    /// Largest nodal deviation from the closed form (radial runs).
    pub max_error: Option<f64>,
}

#[derive(Debug, Serialize)]
struct ProfileRow {
    r: f64,
    u: f64,
    du: f64,
}

#[derive(Debug, Serialize)]
struct UProfileRow {
    region: &'static str,
    t: f64,
    volume: f64,
    value: Option<f64>,
    excluded: bool,
}

/// Default run directory `./runs/<config-hash>`.
pub fn default_run_dir(cfg: &RunConfig, kind: Kind) -> PathBuf {
    Path::new("runs").join(cfg.hash(kind))
}

fn stem(coarse: bool) -> &'static str {
    if coarse {
        "field_coarse"
    } else {
        "field"
    }
}

/// Solve `cfg` and write a run directory.
pub fn solve(cfg: &RunConfig, kind: Kind, dir: &Path) -> Result<Metadata> {
    cfg.validate_for(kind)?;
    let spec = cfg.domain_spec()?;
    let dhash = domain_hash(&spec);
    let mut log = String::new();
    let (fine, coarse) = match kind {
        Kind::Field => {
            let domain = make_domain(spec)?;
            let fine = solve_field(cfg, &domain, &dhash, dir, false, &mut log)?;
            let coarse = cfg
                .solver
                .coarse
                .then(|| solve_field(cfg, &domain, &dhash, dir, true, &mut log))
                .transpose()?;
            (fine, coarse)
        }
        Kind::Radial => {
            let fine = solve_radial(cfg, &dhash, dir, false, &mut log)?;
            let coarse = cfg
                .solver
                .coarse
                .then(|| solve_radial(cfg, &dhash, dir, true, &mut log))
                .transpose()?;
            (fine, coarse)
        }
    };
    let meta = Metadata {
        format: RUN_FORMAT.into(),
        version: RUN_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        kind,
        n: cfg.problem.n,
        config_hash: cfg.hash(kind),
        domain_hash: dhash,
        fine,
        coarse,
    };
    write_atomic(&dir.join("config.toml"), cfg.to_toml().as_bytes())?;
    write_atomic(&dir.join("solve.log"), log.as_bytes())?;
    write_json(&dir.join("metadata.json"), &meta)?;
    Ok(meta)
}

fn solve_field(
    cfg: &RunConfig,
    domain: &ValidatedDomain,
    dhash: &str,
    dir: &Path,
    coarse: bool,
    log: &mut String,
) -> Result<SolveSummary> {
    let h = cfg.spacing() * if coarse { 2.0 } else { 1.0 };
    let system = assemble_system(domain, h)?;
    let opts = SolveOptions {
        tol: cfg.solver.tol,
        max_iter: cfg.solver.max_iter,
        preconditioner: Preconditioner::Multigrid,
    };
    let (field, report) = solve_poisson(&system, &opts)?;
    let stem = stem(coarse);
    let _ = writeln!(log, "# {stem}: h = {h:e}, {} unknowns", report.unknowns);
    for (i, r) in report.history.iter().enumerate() {
        let _ = writeln!(log, "{stem} {} {r:e}", i + 1);
    }
    let _ = writeln!(log, "{stem} residual {:e}", report.residual);
    let header = CheckpointHeader::field(field.grid, dhash.to_string());
    checkpoint::write(dir, stem, header, &field.values)?;
    Ok(SolveSummary {
        checkpoint: stem.into(),
        spacing: h,
        unknowns: report.unknowns,
        iterations: report.iterations,
        residual: Some(report.residual),
        max_error: None,
    })
}

fn solve_radial(
    cfg: &RunConfig,
    dhash: &str,
    dir: &Path,
    coarse: bool,
    log: &mut String,
) -> Result<SolveSummary> {
    let (a, b) = cfg.radii()?;
    let n = cfg.problem.n;
    let m = if coarse {
        cfg.solver.nodes / 2
    } else {
        cfg.solver.nodes
    };
    let sol = solve_radial_bvp(n, a, b, m)?;
    let max_error = sol
        .nodes
        .iter()
        .zip(&sol.values)
        .map(|(&r, &u)| (u - sol.exact(r)).abs())
        .fold(0.0, f64::max);
    let stem = stem(coarse);
    let _ = writeln!(
        log,
        "# {stem}: {m} intervals on [{a:e}, {b:e}], direct solve"
    );
    let _ = writeln!(log, "{stem} max_error {max_error:e}");
    let layout = RadialLayout {
        n,
        a,
        b,
        intervals: m,
    };
    checkpoint::write(
        dir,
        stem,
        CheckpointHeader::radial(layout, dhash.to_string()),
        &sol.values,
    )?;
    if !coarse {
        let rows: Vec<ProfileRow> = sol
            .nodes
            .iter()
            .zip(&sol.values)
            .zip(sol.slopes())
            .map(|((&r, &u), du)| ProfileRow { r, u, du })
            .collect();
        write_csv(&dir.join("profile.csv"), &rows)?;
    }
    Ok(SolveSummary {
        checkpoint: stem.into(),
        spacing: sol.spacing(),
        unknowns: m - 1,
        iterations: 0,
        residual: None,
        max_error: Some(max_error),
    })
}

/// A run directory read back and checked for consistency.
pub struct LoadedRun {
    pub dir: PathBuf,
    pub config: RunConfig,
    pub metadata: Metadata,
}

pub fn load_run(dir: &Path) -> Result<LoadedRun> {
    let meta_path = dir.join("metadata.json");
    let text = std::fs::read_to_string(&meta_path)
        .map_err(|e| LabError::corrupt(&meta_path, e.to_string()))?;
    let metadata: Metadata = serde_json::from_str(&text)
        .map_err(|e| LabError::corrupt(&meta_path, format!("schema mismatch: {e}")))?;
    if metadata.format != RUN_FORMAT || metadata.version != RUN_VERSION {
        return Err(LabError::corrupt(
            &meta_path,
            format!(
                "schema mismatch: expected {RUN_FORMAT} version {RUN_VERSION}, found {} version {}",
                metadata.format, metadata.version
            ),
        ));
    }
    let cfg_path = dir.join("config.toml");
    let text = std::fs::read_to_string(&cfg_path)
        .map_err(|e| LabError::corrupt(&cfg_path, e.to_string()))?;
    let config =
        RunConfig::parse(&text).map_err(|e| LabError::corrupt(&cfg_path, e.to_string()))?;
    if config.hash(metadata.kind) != metadata.config_hash {
        return Err(LabError::corrupt(&cfg_path, "configuration hash mismatch"));
    }
    let spec = config
        .domain_spec()
        .map_err(|e| LabError::corrupt(&cfg_path, e.to_string()))?;
    if domain_hash(&spec) != metadata.domain_hash {
        return Err(LabError::corrupt(&cfg_path, "domain hash mismatch"));
    }
    Ok(LoadedRun {
        dir: dir.to_path_buf(),
        config,
        metadata,
    })
}

fn check_header(
    dir: &Path,
    summary: &SolveSummary,
    header: &CheckpointHeader,
    run: &LoadedRun,
) -> Result<()> {
    let path = dir.join(format!("{}.json", summary.checkpoint));
    if header.kind != run.metadata.kind {
        return Err(LabError::corrupt(
            path,
            "checkpoint kind differs from the run",
        ));
    }
    if header.domain_hash != run.metadata.domain_hash {
        return Err(LabError::corrupt(path, "checkpoint domain hash mismatch"));
    }
    Ok(())
}

fn load_field(
    run: &LoadedRun,
    domain: &ValidatedDomain,
    summary: &SolveSummary,
) -> Result<FieldInstance> {
    let (header, values) = checkpoint::read(&run.dir, &summary.checkpoint)?;
    check_header(&run.dir, summary, &header, run)?;
    let system = assemble_system(domain, summary.spacing)?;
    if header.grid != Some(system.grid()) {
        return Err(LabError::corrupt(
            run.dir.join(format!("{}.json", summary.checkpoint)),
            "grid does not match the configuration",
        ));
    }
    let field = ScalarField3 {
        grid: system.grid(),
        values,
        mask: system.mask().to_vec(),
    };
    Ok(FieldInstance::new(
        domain.clone(),
        field,
        run.config.sampling(),
    )?)
}

fn load_radial(run: &LoadedRun, summary: &SolveSummary) -> Result<RadialInstance> {
    let (header, values) = checkpoint::read(&run.dir, &summary.checkpoint)?;
    check_header(&run.dir, summary, &header, run)?;
    let path = run.dir.join(format!("{}.json", summary.checkpoint));
    let layout = header
        .radial
        .ok_or_else(|| LabError::corrupt(&path, "missing radial layout"))?;
    let (a, b) = run.config.radii()?;
    if layout.n != run.config.problem.n || layout.a != a || layout.b != b {
        return Err(LabError::corrupt(
            path,
            "radial layout does not match the configuration",
        ));
    }
    let m = layout.intervals;
    let h = (b - a) / m as f64;
    let (coeff_a, coeff_b) = radial_closed_form(layout.n, a, b)?;
    let sol = RadialSolution {
        n: layout.n,
        a,
        b,
        nodes: (0..=m).map(|i| a + h * i as f64).collect(),
        values,
        coeff_a,
        coeff_b,
    };
    Ok(RadialInstance::new(sol)?)
}

/// Verify a solved run; write the report files into `out`.
pub fn verify(run_dir: &Path, out: &Path) -> Result<VerificationReport> {
    let run = load_run(run_dir)?;
    let opts = run.config.verify_options();
    let meta = &run.metadata;
    let report = match meta.kind {
        Kind::Field => {
            let domain = make_domain(run.config.domain_spec()?)?;
            let fine = load_field(&run, &domain, &meta.fine)?;
            let coarse = meta
                .coarse
                .as_ref()
                .map(|c| load_field(&run, &domain, c))
                .transpose()?;
            verify_pair(&fine, coarse.as_ref().map(|c| c as &dyn Instance), &opts)?
        }
        Kind::Radial => {
            let fine = load_radial(&run, &meta.fine)?;
            let coarse = meta
                .coarse
                .as_ref()
                .map(|c| load_radial(&run, c))
                .transpose()?;
            verify_pair(&fine, coarse.as_ref().map(|c| c as &dyn Instance), &opts)?
        }
    };
    write_report(&report, &run.config.output.formats, out)?;
    Ok(report)
}

pub fn write_report(report: &VerificationReport, formats: &[Format], out: &Path) -> Result<()> {
    if formats.contains(&Format::Json) {
        write_json(&out.join("report.json"), report)?;
    }
    if formats.contains(&Format::Csv) {
        let rows: Vec<UProfileRow> = report
            .u_profile
            .iter()
            .flat_map(|p| {
                p.points.iter().map(|q| UProfileRow {
                    region: p.region.name(),
                    t: q.t,
                    volume: q.volume,
                    value: q.value,
                    excluded: q.excluded,
                })
            })
            .collect();
        write_csv(&out.join("u_profile.csv"), &rows)?;
        write_csv(
            &out.join("sigma_curvature.csv"),
            &report.curvature.sigma_rows,
        )?;
    }
    Ok(())
}
