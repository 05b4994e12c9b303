//! Job files, parallel task execution and artifact output.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Deserialize;
use serde_json::Value as Json;

use sliceop_core::semigroup::{CheckRecord, SemigroupReport};
use sliceop_core::RightLinearOperator;

use crate::error::CliError;
use crate::formats::{report_csv, report_json, write_atomic, OperatorSource, Table};
use crate::tasks::{TaskCtx, TaskOutput, TaskPlan};

/// Thread count override for the task pool.
pub const THREADS_ENV: &str = "SLICEOP_THREADS";

/// A task by name, optionally with its own parameters.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum TaskSpec {
    Name(String),
    Full {
        name: String,
        #[serde(default)]
        params: Json,
    },
}

/// A job file.
///
/// `task` + `params` name a single task; `tasks` lists several. `n` and `m`,
/// when present, must match the operator.
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default)]
    pub n: Option<u8>,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub operator: Option<OperatorSource>,
    #[serde(default)]
    pub task: Option<String>,
    #[serde(default)]
    pub tasks: Option<Vec<TaskSpec>>,
    #[serde(default)]
    pub params: Json,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl JobConfig {
    pub fn parse(json: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    /// Validated task list; fails on unknown names, bad parameters or an
    /// empty list.
    pub fn plans(&self) -> Result<Vec<TaskPlan>, CliError> {
        let mut specs: Vec<(String, Json)> = Vec::new();
        if let Some(t) = &self.task {
            specs.push((t.clone(), self.params.clone()));
        } else if !self.params.is_null() {
            return Err(CliError::input("params given without a task"));
        }
        for s in self.tasks.iter().flatten() {
            specs.push(match s {
                TaskSpec::Name(n) => (n.clone(), Json::Null),
                TaskSpec::Full { name, params } => (name.clone(), params.clone()),
            });
        }
        if specs.is_empty() {
            return Err(CliError::input("the job lists no tasks"));
        }
        specs.iter().map(|(n, p)| TaskPlan::parse(n, p)).collect()
    }

    /// Loads the operator (relative files resolve against `base`) and checks
    /// `n`, `m`.
    pub fn operator(&self, base: Option<&Path>) -> Result<Option<RightLinearOperator>, CliError> {
        let Some(src) = &self.operator else { return Ok(None) };
        let a = src.load(base)?;
        if self.n.is_some_and(|n| n != a.n()) || self.m.is_some_and(|m| m != a.m()) {
            return Err(CliError::input(format!("operator is {}x{} over R_{}, job declares otherwise", a.m(), a.m(), a.n())));
        }
        Ok(Some(a))
    }
}

/// Merged result of a run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunOutput {
    pub report: SemigroupReport,
    pub tables: Vec<(String, Table)>,
}

impl RunOutput {
    pub fn exit_code(&self) -> i32 {
        if self.report.all_pass() {
            0
        } else {
            2
        }
    }
}

fn thread_count() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.parse().ok().filter(|&k: &usize| k > 0)
}

fn run_one(plan: &TaskPlan, op: Option<&RightLinearOperator>, ctx: &TaskCtx, timings: bool) -> Result<TaskOutput, CliError> {
    let start = Instant::now();
    let mut out = match plan.run(op, ctx) {
        Ok(o) => o,
        // Numerical failures are check failures, not input errors.
        Err(CliError::Core(e)) => {
            let mut report = SemigroupReport::new();
            report.push(CheckRecord::check(&format!("{}.error", plan.name()), "task completed", e.to_string(), f64::INFINITY, 0.0));
            TaskOutput { report, tables: vec![] }
        }
        Err(e) => return Err(e),
    };
    if timings {
        let dt = start.elapsed().as_secs_f64();
        for r in &mut out.report.records {
            r.wall_time_s = dt;
        }
    }
    Ok(out)
}

/// Runs `plans` concurrently and merges their reports, sorted by check id.
/// Wall times are recorded only when `timings` is set, so that artifacts
/// stay reproducible by default.
pub fn run_plans(
    plans: &[TaskPlan],
    op: Option<&RightLinearOperator>,
    ctx: &TaskCtx,
    timings: bool,
) -> Result<RunOutput, CliError> {
    if plans.is_empty() {
        return Err(CliError::input("no tasks to run"));
    }
    if op.is_none() {
        if let Some(p) = plans.iter().find(|p| p.needs_operator()) {
            return Err(CliError::input(format!("task {} needs an operator", p.name())));
        }
    }
    let work = || plans.par_iter().map(|p| run_one(p, op, ctx, timings)).collect::<Vec<_>>();
    let results = match thread_count() {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError::input(format!("{THREADS_ENV}: {e}")))?
            .install(work),
        None => work(),
    };
    let mut out = RunOutput::default();
    for r in results {
        let r = r?;
        out.report.extend(r.report);
        out.tables.extend(r.tables);
    }
    out.report.sort();
    out.tables.sort_by(|a, b| a.0.cmp(&b.0));
    out.tables.dedup_by(|a, b| a.0 == b.0);
    Ok(out)
}

/// Writes `report.json`, `report.csv` and every table into `dir`.
pub fn write_artifacts(dir: &Path, out: &RunOutput) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    let mut put = |name: &str, text: String| -> Result<(), CliError> {
        let p = dir.join(name);
        write_atomic(&p, &text)?;
        written.push(p);
        Ok(())
    };
    put("report.json", report_json(&out.report))?;
    put("report.csv", report_csv(&out.report))?;
    for (name, t) in &out.tables {
        put(name, t.to_csv())?;
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn task_lists_are_validated_before_running() {
        let empty = JobConfig::parse(r#"{"tasks": []}"#).unwrap();
        assert!(matches!(empty.plans(), Err(CliError::Input(_))));
        let unknown = JobConfig::parse(r#"{"tasks": ["algebra", "bogus"]}"#).unwrap();
        assert!(matches!(unknown.plans(), Err(CliError::Input(_))));
        let bad_param = JobConfig::parse(r#"{"task": "law", "params": {"casez": 3}}"#).unwrap();
        assert!(matches!(bad_param.plans(), Err(CliError::Input(_))));
        let ok = JobConfig::parse(r#"{"task": "contour", "params": {"t": [1.0]}, "tasks": [{"name": "algebra"}]}"#).unwrap();
        assert_eq!(ok.plans().unwrap().len(), 2);
        assert!(JobConfig::parse(r#"{"taks": []}"#).is_err());
    }

    #[test]
    fn operator_shape_is_checked() {
        let job = JobConfig::parse(r#"{"n": 3, "operator": "remark58", "task": "spectrum"}"#).unwrap();
        assert!(matches!(job.operator(None), Err(CliError::Input(_))));
        let job = JobConfig::parse(r#"{"n": 2, "m": 2, "operator": "remark58", "task": "spectrum"}"#).unwrap();
        assert_eq!(job.operator(None).unwrap().unwrap().m(), 2);
    }

    #[test]
    fn missing_operator_is_an_input_error() {
        let plans = [TaskPlan::parse("spectrum", &Json::Null).unwrap()];
        let ctx = TaskCtx { seed: 0, tol: None };
        assert!(matches!(run_plans(&plans, None, &ctx, false), Err(CliError::Input(_))));
    }

    #[test]
    fn reports_are_sorted_and_untimed() {
        let plans = [TaskPlan::parse("remark58", &Json::Null).unwrap(), TaskPlan::parse("algebra", &Json::Null).unwrap()];
        let out = run_plans(&plans, None, &TaskCtx { seed: 1, tol: None }, false).unwrap();
        let ids: Vec<&str> = out.report.records.iter().map(|r| r.id.as_str()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
        assert!(out.report.records.iter().all(|r| r.wall_time_s == 0.0));
        assert_eq!(out.exit_code(), 0, "{:#?}", out.report);
    }
}
