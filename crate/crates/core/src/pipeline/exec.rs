use std::fs;
use std::io;
use std::path::{Component, Path, PathBuf};
use std::process::{Command, Stdio};

use serde::Serialize;
use thiserror::Error;
use walkdir::WalkDir;

use super::{plan, Job, Pipeline};

/// Directory under the workdir that receives job artifacts.
pub const ARTIFACTS_DIR: &str = ".forge-artifacts";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    /// Echo every command, run nothing.
    DryRun,
    Local,
}

#[derive(Debug, Clone)]
pub struct ExecuteOptions {
    pub mode: ExecMode,
    pub workdir: PathBuf,
    /// Run the jobs of one stage on separate threads. Results keep plan order.
    pub parallel: bool,
}

#[derive(Debug, Error)]
pub enum ExecError {
    #[error("working directory {} does not exist", .0.display())]
    WorkdirMissing(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum JobStatus {
    Passed,
    Failed,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JobResult {
    pub name: String,
    pub stage: String,
    pub status: JobStatus,
    /// `None` for dry runs, skipped jobs, spawn failures and signals.
    pub exit_code: Option<i32>,
    pub output: String,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Overall {
    Passed,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipelineResult {
    pub overall: Overall,
    pub jobs: Vec<JobResult>,
}

impl PipelineResult {
    pub fn passed(&self) -> bool {
        self.overall == Overall::Passed
    }

    pub fn count(&self, status: JobStatus) -> usize {
        self.jobs.iter().filter(|j| j.status == status).count()
    }
}

/// Runs stages in order; once a stage has a failed job, every job of a
/// later stage is skipped.
pub fn execute(pipeline: &Pipeline, opts: &ExecuteOptions) -> Result<PipelineResult, ExecError> {
    if opts.mode == ExecMode::Local && !opts.workdir.is_dir() {
        return Err(ExecError::WorkdirMissing(opts.workdir.clone()));
    }
    let mut results = Vec::with_capacity(pipeline.jobs.len());
    let mut failed = false;
    for group in plan(pipeline) {
        let jobs: Vec<&Job> = group
            .jobs
            .iter()
            .filter_map(|name| pipeline.job(name))
            .collect();
        if failed {
            results.extend(jobs.iter().map(|job| skipped(job)));
            continue;
        }
        let stage_results: Vec<JobResult> = match opts.mode {
            ExecMode::DryRun => jobs.iter().map(|job| dry_run(job)).collect(),
            ExecMode::Local if opts.parallel && jobs.len() > 1 => std::thread::scope(|s| {
                let handles: Vec<_> = jobs
                    .iter()
                    .map(|job| s.spawn(|| run_local(job, &opts.workdir)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("job thread panicked"))
                    .collect()
            }),
            ExecMode::Local => jobs
                .iter()
                .map(|job| run_local(job, &opts.workdir))
                .collect(),
        };
        failed = stage_results.iter().any(|r| r.status == JobStatus::Failed);
        results.extend(stage_results);
    }
    Ok(PipelineResult {
        overall: if failed {
            Overall::Failed
        } else {
            Overall::Passed
        },
        jobs: results,
    })
}

fn skipped(job: &Job) -> JobResult {
    JobResult {
        name: job.name.clone(),
        stage: job.stage.clone(),
        status: JobStatus::Skipped,
        exit_code: None,
        output: String::new(),
        warnings: Vec::new(),
    }
}

fn dry_run(job: &Job) -> JobResult {
    let output = job.script.iter().map(|l| format!("$ {l}\n")).collect();
    JobResult {
        status: JobStatus::Passed,
        output,
        ..skipped(job)
    }
}

fn shell_quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', r"'\''"))
}

/// One shell session per job so `cd` and variables carry over between
/// lines; the first non-zero line ends the job.
fn job_script(job: &Job) -> String {
    let mut script = String::from("exec 2>&1\n");
    for line in &job.script {
        script.push_str(&format!(
            "printf '%s\\n' {}\n",
            shell_quote(&format!("$ {line}"))
        ));
        script.push_str(line);
        script.push_str(
            "\n__forge_rc=$?; if [ \"$__forge_rc\" -ne 0 ]; then exit \"$__forge_rc\"; fi\n",
        );
    }
    script
}

fn run_local(job: &Job, workdir: &Path) -> JobResult {
    let mut result = skipped(job);
    let spawned = Command::new("sh")
        .arg("-c")
        .arg(job_script(job))
        .current_dir(workdir)
        .env("CI", "true")
        .env("CI_JOB_NAME", &job.name)
        .env("CI_JOB_STAGE", &job.stage)
        .env("CI_PROJECT_DIR", workdir)
        .stdin(Stdio::null())
        .output();
    match spawned {
        Ok(out) => {
            result.output = String::from_utf8_lossy(&out.stdout).into_owned();
            result
                .output
                .push_str(&String::from_utf8_lossy(&out.stderr));
            result.exit_code = out.status.code();
            result.status = if out.status.success() {
                JobStatus::Passed
            } else {
                JobStatus::Failed
            };
        }
        Err(e) => {
            result.output = format!("failed to spawn shell: {e}\n");
            result.status = JobStatus::Failed;
        }
    }
    if result.status == JobStatus::Passed {
        result.warnings = collect_artifacts(job, workdir);
    }
    result
}

fn is_contained(pattern: &str) -> bool {
    let p = Path::new(pattern);
    !p.is_absolute() && p.components().all(|c| !matches!(c, Component::ParentDir))
}

/// Copies artifact matches to `.forge-artifacts/<job>/`. Problems become
/// warnings, never failures.
fn collect_artifacts(job: &Job, workdir: &Path) -> Vec<String> {
    let mut warnings = Vec::new();
    let dest_root = workdir.join(ARTIFACTS_DIR).join(&job.name);
    for pattern in &job.artifacts {
        let trimmed = pattern.trim_end_matches('/');
        if trimmed.is_empty() || !is_contained(trimmed) {
            warnings.push(format!(
                "artifact path `{pattern}` leaves the working directory"
            ));
            continue;
        }
        let full = workdir.join(trimmed);
        let matches: Vec<PathBuf> = match glob::glob(&full.to_string_lossy()) {
            Ok(paths) => paths.filter_map(Result::ok).collect(),
            Err(e) => {
                warnings.push(format!("artifact pattern `{pattern}` is invalid: {e}"));
                continue;
            }
        };
        if matches.is_empty() {
            warnings.push(format!("artifact path `{pattern}` matched nothing"));
            continue;
        }
        for m in matches {
            let Ok(rel) = m.strip_prefix(workdir) else {
                continue;
            };
            if let Err(e) = copy_recursive(&m, &dest_root.join(rel)) {
                warnings.push(format!("copying artifact `{}` failed: {e}", rel.display()));
            }
        }
    }
    warnings
}

fn copy_recursive(src: &Path, dst: &Path) -> io::Result<()> {
    if src.is_file() {
        if let Some(parent) = dst.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::copy(src, dst)?;
        return Ok(());
    }
    for entry in WalkDir::new(src) {
        let entry = entry?;
        let rel = entry
            .path()
            .strip_prefix(src)
            .expect("walkdir stays below src");
        let target = dst.join(rel);
        if entry.file_type().is_dir() {
            fs::create_dir_all(&target)?;
        } else if entry.file_type().is_file() {
            fs::copy(entry.path(), &target)?;
        }
    }
    Ok(())
}
