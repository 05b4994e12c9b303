use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value as Json;

use sliceop::formats::OperatorSource;
use sliceop::scan::{emit_sector_scan, ScanGrid};
use sliceop::tasks::ScanParams;
use sliceop::{fixtures, run_plans, write_artifacts, CliError, JobConfig, TaskCtx, TaskPlan};

/// Verification suites for slice-regular operator calculus.
///
/// Exit status: 0 when every check passes, 1 on input errors, 2 when a
/// check fails. Set SLICEOP_THREADS to bound the worker pool.
#[derive(Debug, Parser)]
#[command(name = "sliceop", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Args)]
struct Common {
    /// Job file (JSON); flags below override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the tolerance of tasks that take one.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output directory for report.json, report.csv and tables.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Operator JSON file or built-in name (remark58, neg_identity, sectorial, stable).
    #[arg(long, global = true)]
    operator: Option<String>,
    /// Task parameters as JSON, or @file.
    #[arg(long, global = true)]
    params: Option<String>,
    /// Record per-task wall times in the report.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Spherical spectrum components and right eigenpairs.
    Spectrum(Common),
    /// Resolvent identities and membership on sampled points.
    Resolvent(Common),
    /// Contour-integral semigroup against the exponential series.
    Semigroup(Common),
    /// Laplace transform of the semigroup against resolvent powers.
    Laplace(Common),
    /// Noncommutative semigroup law.
    Law(Common),
    /// Sectorial resolvent estimate.
    Probe(Common),
    /// Every built-in check on bundled fixtures.
    Suite(Common),
    /// Sector scan CSV (to stdout without --out).
    Scan(Common),
    /// Run the tasks listed in --config.
    Run(Common),
}

fn load_params(arg: &Option<String>) -> Result<Json, CliError> {
    match arg.as_deref() {
        None => Ok(Json::Null),
        Some(s) => {
            let text = match s.strip_prefix('@') {
                Some(path) => std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?,
                None => s.to_string(),
            };
            Ok(serde_json::from_str(&text)?)
        }
    }
}

fn operator_arg(s: &str) -> OperatorSource {
    if Path::new(s).exists() || fixtures::builtin_operator(s).is_none() {
        OperatorSource::File { file: s.into() }
    } else {
        OperatorSource::Builtin(s.to_string())
    }
}

fn job(task: Option<&str>, c: &Common) -> Result<(JobConfig, Option<PathBuf>), CliError> {
    let (mut job, base) = match &c.config {
        Some(p) => (JobConfig::from_file(p)?, p.parent().map(Path::to_path_buf)),
        None => (JobConfig::default(), None),
    };
    if let Some(t) = task {
        job.task = Some(t.to_string());
        job.tasks = None;
    }
    let params = load_params(&c.params)?;
    if !params.is_null() {
        job.params = params;
    } else if task.is_some() && c.config.is_some() && job.task.as_deref() != task {
        job.params = Json::Null;
    }
    if let Some(op) = &c.operator {
        job.operator = Some(operator_arg(op));
    }
    job.seed = c.seed.or(job.seed);
    job.tol = c.tol.or(job.tol);
    job.out = c.out.clone().or(job.out);
    Ok((job, base))
}

fn scan(c: &Common) -> Result<i32, CliError> {
    let (job, base) = job(Some("scan"), c)?;
    let a = job.operator(base.as_deref())?.ok_or_else(|| CliError::input("scan needs --operator"))?;
    if job.out.is_some() {
        return execute(&job, base.as_deref(), c.timings);
    }
    let p: ScanParams = match TaskPlan::parse("scan", &job.params)? {
        TaskPlan::Scan(p) => p,
        _ => unreachable!(),
    };
    let grid = ScanGrid {
        radii: p.radii,
        angles: p.angles,
        delta: p.delta,
        axes: sliceop_core::algebra::sample_imaginary_sphere(a.n(), job.seed.unwrap_or(0), p.axes.max(1))?,
    };
    let stdout = std::io::stdout();
    emit_sector_scan(&a, p.omega, &grid, &mut stdout.lock()).map_err(|e| CliError::io("<stdout>", e))?;
    Ok(0)
}

fn execute(job: &JobConfig, base: Option<&Path>, timings: bool) -> Result<i32, CliError> {
    let plans = job.plans()?;
    let op = job.operator(base)?;
    let ctx = TaskCtx { seed: job.seed.unwrap_or(0), tol: job.tol };
    let out = run_plans(&plans, op.as_ref(), &ctx, timings)?;
    for r in &out.report.records {
        let verdict = match r.kind {
            sliceop_core::semigroup::CheckKind::Diagnostic => "info",
            _ if r.pass => "PASS",
            _ => "FAIL",
        };
        println!("{verdict:4} {:32} {:>12.3e} (tol {:.1e})", r.id, r.residual, r.tol);
    }
    if let Some(dir) = &job.out {
        for p in write_artifacts(dir, &out)? {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(out.exit_code())
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    let (task, c) = match &cli.cmd {
        Cmd::Spectrum(c) => ("spectrum", c),
        Cmd::Resolvent(c) => ("resolvent", c),
        Cmd::Semigroup(c) => ("semigroup", c),
        Cmd::Laplace(c) => ("laplace", c),
        Cmd::Law(c) => ("law", c),
        Cmd::Probe(c) => ("probe", c),
        Cmd::Suite(c) => ("suite", c),
        Cmd::Scan(c) => return scan(c),
        Cmd::Run(c) => {
            if c.config.is_none() {
                return Err(CliError::input("run needs --config"));
            }
            let (job, base) = job(None, c)?;
            return execute(&job, base.as_deref(), c.timings);
        }
    };
    let (job, base) = job(Some(task), c)?;
    execute(&job, base.as_deref(), c.timings)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
