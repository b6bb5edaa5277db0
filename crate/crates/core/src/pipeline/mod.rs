//! CI pipelines: ordered stages, jobs with shell scripts, and local
//! fail-fast execution.

mod exec;
mod parse;

pub use exec::{
    execute, ExecError, ExecMode, ExecuteOptions, JobResult, JobStatus, PipelineResult,
};
pub use parse::{parse_pipeline, serialize_pipeline};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Job {
    pub name: String,
    pub stage: String,
    pub script: Vec<String>,
    pub artifacts: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Pipeline {
    pub stages: Vec<String>,
    pub jobs: Vec<Job>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: job `{job}` uses undeclared stage `{stage}`")]
    UndeclaredStage {
        line: usize,
        job: String,
        stage: String,
    },
    #[error("line {line}: duplicate job `{job}`")]
    DuplicateJob { line: usize, job: String },
    #[error("line {line}: duplicate stage `{stage}`")]
    DuplicateStage { line: usize, stage: String },
    #[error("line {line}: job `{job}` has an empty script")]
    EmptyScript { line: usize, job: String },
}

impl PipelineError {
    pub fn code(&self) -> &'static str {
        match self {
            PipelineError::Syntax { .. } => "SYNTAX",
            PipelineError::UndeclaredStage { .. } => "UNDECLARED_STAGE",
            PipelineError::DuplicateJob { .. } => "DUPLICATE_JOB",
            PipelineError::DuplicateStage { .. } => "DUPLICATE_STAGE",
            PipelineError::EmptyScript { .. } => "EMPTY_SCRIPT",
        }
    }

    pub fn line(&self) -> usize {
        match self {
            PipelineError::Syntax { line, .. }
            | PipelineError::UndeclaredStage { line, .. }
            | PipelineError::DuplicateJob { line, .. }
            | PipelineError::DuplicateStage { line, .. }
            | PipelineError::EmptyScript { line, .. } => *line,
        }
    }
}

impl Pipeline {
    /// Checks the model invariants for pipelines built in code. Errors
    /// carry line 0.
    pub fn validate(&self) -> Result<(), PipelineError> {
        for (i, stage) in self.stages.iter().enumerate() {
            if self.stages[..i].contains(stage) {
                return Err(PipelineError::DuplicateStage {
                    line: 0,
                    stage: stage.clone(),
                });
            }
        }
        for (i, job) in self.jobs.iter().enumerate() {
            if self.jobs[..i].iter().any(|j| j.name == job.name) {
                return Err(PipelineError::DuplicateJob {
                    line: 0,
                    job: job.name.clone(),
                });
            }
            if !self.stages.contains(&job.stage) {
                return Err(PipelineError::UndeclaredStage {
                    line: 0,
                    job: job.name.clone(),
                    stage: job.stage.clone(),
                });
            }
            if job.script.is_empty() {
                return Err(PipelineError::EmptyScript {
                    line: 0,
                    job: job.name.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn job(&self, name: &str) -> Option<&Job> {
        self.jobs.iter().find(|j| j.name == name)
    }

    pub fn jobs_in_stage<'a>(&'a self, stage: &'a str) -> impl Iterator<Item = &'a Job> + 'a {
        self.jobs.iter().filter(move |j| j.stage == stage)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StagePlan {
    pub stage: String,
    pub jobs: Vec<String>,
}

/// One group per declared stage, jobs in declaration order.
pub fn plan(pipeline: &Pipeline) -> Vec<StagePlan> {
    pipeline
        .stages
        .iter()
        .map(|stage| StagePlan {
            stage: stage.clone(),
            jobs: pipeline
                .jobs_in_stage(stage)
                .map(|j| j.name.clone())
                .collect(),
        })
        .collect()
}
