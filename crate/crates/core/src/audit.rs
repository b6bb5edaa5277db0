//! Repository audits: a fixed table of presence and content checks, each
//! owned by one catalog practice, evaluated against a [`FileTree`].

use serde::Serialize;
use thiserror::Error;

use crate::catalog;
use crate::pipeline::{parse_pipeline, Pipeline, PipelineError};
use crate::tree::FileTree;

/// The CI configuration whose stages and jobs the content checks inspect.
pub const PIPELINE_CONFIG: &str = ".gitlab-ci.yml";
pub const TRAVIS_CONFIG: &str = ".travis.yml";

/// Stage list every compliant pipeline declares, in order.
pub const REQUIRED_STAGES: [&str; 4] = ["build", "tests", "quality", "deploy"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    File(&'static str),
    /// Satisfied by any one of the files.
    AnyOf(&'static [&'static str]),
    /// Any file below the directory.
    Dir(&'static str),
    /// Any file directly in `dir` with the extension.
    DirExt(&'static str, &'static str),
}

impl Target {
    pub fn matches(&self, tree: &FileTree) -> bool {
        match *self {
            Target::File(p) => tree.contains(p),
            Target::AnyOf(ps) => ps.iter().any(|p| tree.contains(p)),
            Target::Dir(d) => tree.paths().any(|p| p.starts_with_dir(d)),
            Target::DirExt(d, ext) => tree
                .paths()
                .any(|p| p.parent() == Some(d) && p.file_name().ends_with(ext)),
        }
    }

    /// True if deleting `path` from a tree can affect this target.
    pub fn covers(&self, path: &str) -> bool {
        match *self {
            Target::File(p) => p == path,
            Target::AnyOf(ps) => ps.contains(&path),
            Target::Dir(d) => path.strip_prefix(d).is_some_and(|r| r.starts_with('/')),
            Target::DirExt(d, ext) => path
                .rsplit_once('/')
                .is_some_and(|(dir, name)| dir == d && name.ends_with(ext)),
        }
    }

    pub fn display(&self) -> String {
        match *self {
            Target::File(p) => p.to_string(),
            Target::AnyOf(ps) => ps.join(" | "),
            Target::Dir(d) => format!("{d}/"),
            Target::DirExt(d, ext) => format!("{d}/*{ext}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Predicate {
    /// Stages are exactly [`REQUIRED_STAGES`].
    FourStages,
    /// Some job runs in the given stage.
    JobInStage(&'static str),
    /// Some `quality` job's script mentions coverage.
    CoverageJob,
}

impl Predicate {
    fn holds(&self, pipeline: &Pipeline) -> bool {
        match *self {
            Predicate::FourStages => pipeline.stages == REQUIRED_STAGES,
            Predicate::JobInStage(stage) => pipeline.jobs_in_stage(stage).next().is_some(),
            Predicate::CoverageJob => pipeline.jobs_in_stage("quality").any(|j| {
                j.script
                    .iter()
                    .any(|l| l.to_ascii_lowercase().contains("coverage"))
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Presence,
    Content(Predicate),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditCheck {
    pub id: &'static str,
    pub kind: CheckKind,
    pub target: Target,
    pub practice_id: &'static str,
    pub description: &'static str,
}

const fn presence(
    id: &'static str,
    target: Target,
    practice_id: &'static str,
    description: &'static str,
) -> AuditCheck {
    AuditCheck {
        id,
        kind: CheckKind::Presence,
        target,
        practice_id,
        description,
    }
}

const fn content(
    id: &'static str,
    predicate: Predicate,
    practice_id: &'static str,
    description: &'static str,
) -> AuditCheck {
    AuditCheck {
        id,
        kind: CheckKind::Content(predicate),
        target: Target::File(PIPELINE_CONFIG),
        practice_id,
        description,
    }
}

static CHECKS: [AuditCheck; 17] = [
    presence(
        "DOC-README",
        Target::File("README.md"),
        "documentation.big-picture",
        "README with aim, installation notes and dependencies",
    ),
    presence(
        "DOC-CHANGELOG",
        Target::File("CHANGELOG.md"),
        "documentation.big-picture",
        "CHANGELOG with releases, features and known bugs",
    ),
    presence(
        "DOC-CONTRIBUTING",
        Target::File("CONTRIBUTING.md"),
        "documentation.big-picture",
        "contributor guidelines",
    ),
    presence(
        "DOC-CODE-OF-CONDUCT",
        Target::File("CODE_OF_CONDUCT.md"),
        "documentation.big-picture",
        "code of conduct",
    ),
    presence(
        "DOC-TUTORIAL",
        Target::File("TUTORIAL.md"),
        "documentation.big-picture",
        "tutorial for users",
    ),
    presence(
        "DOC-APIREF-CONFIG",
        Target::File("Doxyfile"),
        "documentation.function-reference",
        "function reference generator configuration",
    ),
    presence(
        "LIC-FILE",
        Target::File("LICENSE"),
        "deployment.package-binaries",
        "license text",
    ),
    presence(
        "FMT-CONFIG",
        Target::File(".clang-format"),
        "coding-style.code-formatting-style",
        "formatting rules file",
    ),
    presence(
        "BUILD-TOPLEVEL",
        Target::File("CMakeLists.txt"),
        "automation.build-automation",
        "top-level build configuration",
    ),
    presence(
        "BUILD-BINDINGS",
        Target::DirExt("swig", ".i"),
        "automation.build-automation",
        "bindings interface file",
    ),
    presence(
        "TEST-DIR-PRESENT",
        Target::Dir("test"),
        "testing.unit-test-framework",
        "unit test sources",
    ),
    presence(
        "CI-CONFIG-PRESENT",
        Target::AnyOf(&[PIPELINE_CONFIG, TRAVIS_CONFIG]),
        "project-management.project-management-tool",
        "continuous integration configuration",
    ),
    content(
        "CI-FOUR-STAGES",
        Predicate::FourStages,
        "automation.continuous-integration",
        "pipeline declares the stages build, tests, quality, deploy in order",
    ),
    content(
        "CI-TEST-JOB",
        Predicate::JobInStage("tests"),
        "testing.unit-test-framework",
        "a job in stage `tests`",
    ),
    content(
        "CI-COVERAGE-JOB",
        Predicate::CoverageJob,
        "testing.code-coverage-report",
        "a job in stage `quality` that runs the coverage target",
    ),
    content(
        "CI-DOCS-DEPLOY",
        Predicate::JobInStage("deploy"),
        "deployment.online-documentation",
        "a job in stage `deploy` that publishes the documentation",
    ),
    presence(
        "PKG-RECIPE-STUB",
        Target::File("conda/recipe-stub.yaml"),
        "deployment.package-binaries",
        "binary packaging recipe stub",
    ),
];

pub fn checks() -> &'static [AuditCheck] {
    &CHECKS
}

pub fn check(id: &str) -> Option<&'static AuditCheck> {
    CHECKS.iter().find(|c| c.id == id)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Fail,
    Advisory,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditFinding {
    /// A check id, or a practice id for advisory-only practices.
    pub check: String,
    pub severity: Severity,
    pub message: String,
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub score: f64,
    pub checks_run: usize,
    pub checks_failed: usize,
    pub findings: Vec<AuditFinding>,
}

impl AuditReport {
    pub fn failures(&self) -> impl Iterator<Item = &AuditFinding> {
        self.findings
            .iter()
            .filter(|f| f.severity == Severity::Fail)
    }

    pub fn failed_ids(&self) -> Vec<&str> {
        self.failures().map(|f| f.check.as_str()).collect()
    }

    pub fn is_compliant(&self) -> bool {
        self.checks_failed == 0
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScoreError {
    #[error("score is undefined when no checks ran")]
    NoChecks,
    #[error("{failed} failed checks exceed {run} checks run")]
    TooManyFailures { run: usize, failed: usize },
}

/// `1 - failed/run` with uniform weights.
pub fn score_of(checks_run: usize, checks_failed: usize) -> Result<f64, ScoreError> {
    if checks_run == 0 {
        return Err(ScoreError::NoChecks);
    }
    if checks_failed > checks_run {
        return Err(ScoreError::TooManyFailures {
            run: checks_run,
            failed: checks_failed,
        });
    }
    Ok((checks_run - checks_failed) as f64 / checks_run as f64)
}

pub fn score(report: &AuditReport) -> Result<f64, ScoreError> {
    score_of(report.checks_run, report.checks_failed)
}

enum Outcome {
    Pass,
    Fail(String),
    NotApplicable(String),
}

fn evaluate(
    check: &AuditCheck,
    tree: &FileTree,
    pipeline: &Option<Result<Pipeline, PipelineError>>,
) -> Outcome {
    match check.kind {
        CheckKind::Presence => {
            if check.target.matches(tree) {
                Outcome::Pass
            } else {
                Outcome::Fail(format!("missing {}", check.description))
            }
        }
        CheckKind::Content(predicate) => match pipeline {
            None => Outcome::NotApplicable(format!(
                "{PIPELINE_CONFIG} not present; {} not checked",
                check.description
            )),
            Some(Err(e)) => Outcome::Fail(format!("cannot parse {PIPELINE_CONFIG}: {e}")),
            Some(Ok(p)) if predicate.holds(p) => Outcome::Pass,
            Some(Ok(_)) => Outcome::Fail(format!("expected {}", check.description)),
        },
    }
}

/// Evaluates every check once. Content checks whose file is absent are
/// reported as advisories and count as run but not failed.
pub fn audit(tree: &FileTree) -> AuditReport {
    let pipeline = tree.get(PIPELINE_CONFIG).map(parse_pipeline);
    let mut findings = Vec::new();
    let mut failed = 0;
    for check in &CHECKS {
        let path = check.target.display();
        match evaluate(check, tree, &pipeline) {
            Outcome::Pass => {}
            Outcome::Fail(message) => {
                failed += 1;
                findings.push(AuditFinding {
                    check: check.id.to_string(),
                    severity: Severity::Fail,
                    message,
                    path,
                });
            }
            Outcome::NotApplicable(message) => findings.push(AuditFinding {
                check: check.id.to_string(),
                severity: Severity::Advisory,
                message,
                path,
            }),
        }
    }
    for practice in catalog::catalog().iter().filter(|p| p.is_advisory()) {
        findings.push(AuditFinding {
            check: practice.id.to_string(),
            severity: Severity::Advisory,
            message: format!("{}: not verifiable from the file tree", practice.name),
            path: "-".to_string(),
        });
    }
    let checks_run = CHECKS.len();
    AuditReport {
        score: score_of(checks_run, failed).expect("check table is non-empty"),
        checks_run,
        checks_failed: failed,
        findings,
    }
}
