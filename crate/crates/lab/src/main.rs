use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ringlab::config::Kind;
use ringlab::error::{LabError, Result};
use ringlab::io::{csv_bytes, write_csv};
use ringlab::pipeline;
use ringlab::sweep::{sweep, SweepParam};
use ringlab::table::model_table;
use ringlab::RunConfig;
use ringlab_core::verify::{CheckStatus, VerificationReport};

#[derive(Parser)]
#[command(
    name = "ringlab",
    version,
    about = "Ring-model comparison runs for the torsion problem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Model quantities over a range of core radii.
    Model {
        #[command(subcommand)]
        command: ModelCommand,
    },
    /// Solve a configuration into a run directory.
    Solve {
        #[command(subcommand)]
        command: SolveCommand,
    },
    /// Check a solved run and write its report.
    Verify {
        #[arg(long)]
        run: PathBuf,
        /// Report directory; defaults to the run directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve and verify once per parameter value.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// R, epsilon or grid.
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        #[arg(long, value_enum, default_value = "field")]
        kind: KindArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ModelCommand {
    /// CSV of R, r1, r2, umax, tau1, tau2.
    Table {
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long)]
        r_lo: f64,
        #[arg(long)]
        r_hi: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SolveCommand {
    /// Finite differences on a radial profile.
    Radial(SolveArgs),
    /// Embedded-boundary Poisson solve on a 3-D grid.
    Field(SolveArgs),
}

#[derive(clap::Args)]
struct SolveArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Radial,
    Field,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Radial => Kind::Radial,
            KindArg::Field => Kind::Field,
        }
    }
}

fn run_dir(cfg: &RunConfig, kind: Kind, out: Option<PathBuf>) -> PathBuf {
    out.or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| pipeline::default_run_dir(cfg, kind))
}

fn summarize(report: &VerificationReport) {
    let count = |s| report.checks.iter().filter(|c| c.status == s).count();
    for c in report.failures() {
        println!(
            "FAIL {}: margin {:.3e}, budget {:.3e}",
            c.name, c.margin, c.budget
        );
    }
    println!(
        "R1 = {:.6}, R2 = {:.6}, rigidity gap = {:.3e}",
        report.ordering.r1, report.ordering.r2, report.ordering.rigidity_gap
    );
    println!(
        "{}: {} pass, {} fail, {} not applicable",
        if report.passed { "passed" } else { "FAILED" },
        count(CheckStatus::Pass),
        count(CheckStatus::Fail),
        count(CheckStatus::NotApplicable),
    );
}

fn solve(args: SolveArgs, kind: Kind) -> Result<bool> {
    let cfg = RunConfig::load(&args.config)?;
    let dir = run_dir(&cfg, kind, args.out);
    let meta = pipeline::solve(&cfg, kind, &dir)?;
    println!("{}", dir.display());
    eprintln!(
        "solved {} unknowns, {} iterations",
        meta.fine.unknowns, meta.fine.iterations
    );
    Ok(true)
}

fn verify(run: &Path, out: Option<PathBuf>) -> Result<bool> {
    let out = out.unwrap_or_else(|| run.to_path_buf());
    let report = pipeline::verify(run, &out)?;
    summarize(&report);
    Ok(report.passed)
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Model {
            command:
                ModelCommand::Table {
                    n,
                    r_lo,
                    r_hi,
                    steps,
                    out,
                },
        } => {
            let rows = model_table(n, r_lo, r_hi, steps)?;
            match out {
                Some(path) => write_csv(&path, &rows)?,
                None => {
                    use std::io::Write;
                    std::io::stdout()
                        .write_all(&csv_bytes(&rows))
                        .map_err(|source| LabError::Write {
                            path: "<stdout>".into(),
                            source,
                        })?
                }
            }
            Ok(true)
        }
        Command::Solve {
            command: SolveCommand::Radial(args),
        } => solve(args, Kind::Radial),
        Command::Solve {
            command: SolveCommand::Field(args),
        } => solve(args, Kind::Field),
        Command::Verify { run, out } => verify(&run, out),
        Command::Sweep {
            config,
            param,
            values,
            kind,
            out,
        } => {
            let param: SweepParam = param.parse()?;
            let base = RunConfig::load(&config)?;
            let kind = Kind::from(kind);
            let out = out.unwrap_or_else(|| {
                let tag = format!("{}:{}", param.name(), values.join(","));
                Path::new("runs").join(format!(
                    "sweep-{}",
                    &ringlab::config::sha256_hex(format!("{}\n{tag}", base.hash(kind)).as_bytes())
                        [..16]
                ))
            });
            let rows = sweep(&base, kind, param, &values, &out, |row| {
                eprintln!(
                    "{} = {}: {}{}",
                    row.param,
                    row.value,
                    row.status,
                    row.error
                        .as_deref()
                        .map(|e| format!(" ({e})"))
                        .unwrap_or_default()
                )
            })?;
            println!("{}", out.join("sweep.csv").display());
            Ok(rows.iter().all(|r| r.passed == Some(true)))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
