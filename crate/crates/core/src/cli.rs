//! Command-line front end. Exit codes: 0 success, 1 domain failure (audit
//! findings, failed pipeline), 2 usage or configuration error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::audit::{self, AuditReport, Severity};
use crate::catalog;
use crate::pipeline::{self, ExecMode, ExecuteOptions, JobStatus, PipelineError, PipelineResult};
use crate::rename::{self, RenameSpec};
use crate::scaffold::{self, ConfigInput, GenerateError, Stage};
use crate::tree::{FileTree, LoadMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "skelforge",
    version,
    about = "Scaffold, audit and run the CI pipeline of scientific C++/Python library projects"
)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Create a new project from the skeleton
    New {
        /// Project name: [a-z][a-z0-9_]*, 2 to 64 characters
        #[arg(long)]
        name: String,
        /// One-line description placed under the README title
        #[arg(long, default_value = "")]
        description: String,
        /// MIT, BSD-3-Clause, Apache-2.0 or GPL-3.0
        #[arg(long, default_value = "MIT")]
        license: String,
        /// gitlab, travis or both
        #[arg(long, default_value = "both")]
        ci: String,
        /// Destination directory, empty or absent [default: ./<name>]
        #[arg(long)]
        dest: Option<PathBuf>,
    },
    /// Audit a repository tree against the best-practice checks
    Audit { path: PathBuf },
    /// Replace a project token in paths and file contents, in place
    Rename {
        path: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Plan or run a CI pipeline locally
    Pipeline {
        #[command(subcommand)]
        action: PipelineCommand,
    },
    /// Query the best-practice catalog
    Practices {
        #[command(subcommand)]
        action: PracticesCommand,
    },
    /// Print the checklist of a project lifecycle stage
    Checklist {
        #[arg(value_enum)]
        stage: StageArg,
    },
}

#[derive(Debug, Subcommand)]
enum PipelineCommand {
    /// Show the stages and their jobs in execution order
    Plan { config: PathBuf },
    /// Run the pipeline with fail-fast stage semantics
    Run {
        config: PathBuf,
        /// Working directory for the jobs [default: directory of the config]
        #[arg(long)]
        workdir: Option<PathBuf>,
        /// Echo the commands instead of running them
        #[arg(long)]
        dry_run: bool,
        /// Run the jobs of a stage concurrently
        #[arg(long)]
        parallel: bool,
    },
}

#[derive(Debug, Subcommand)]
enum PracticesCommand {
    /// List practices, optionally of one group
    List {
        #[arg(long)]
        group: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StageArg {
    Setup,
    Implementation,
    Publication,
}

impl From<StageArg> for Stage {
    fn from(s: StageArg) -> Self {
        match s {
            StageArg::Setup => Stage::Setup,
            StageArg::Implementation => Stage::Implementation,
            StageArg::Publication => Stage::Publication,
        }
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    format: Format,
}

// Output errors (closed pipes) are ignored; the exit code still reports
// the command outcome.
macro_rules! say {
    ($w:expr, $($arg:tt)*) => {{ let _ = writeln!($w, $($arg)*); }};
}

impl Io<'_> {
    fn json<T: Serialize>(&mut self, value: &T) {
        match serde_json::to_string_pretty(value) {
            Ok(s) => say!(self.out, "{s}"),
            Err(e) => say!(self.err, "error: cannot serialize output: {e}"),
        }
    }

    fn usage(&mut self, code: &str, message: impl std::fmt::Display) -> i32 {
        say!(self.err, "error[{code}]: {message}");
        EXIT_USAGE
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    say!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    say!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let mut io = Io {
        out,
        err,
        format: cli.format,
    };
    match cli.command {
        Command::New {
            name,
            description,
            license,
            ci,
            dest,
        } => cmd_new(
            &mut io,
            ConfigInput {
                name,
                description,
                license,
                ci,
            },
            dest,
        ),
        Command::Audit { path } => cmd_audit(&mut io, &path),
        Command::Rename { path, from, to } => cmd_rename(&mut io, &path, &from, &to),
        Command::Pipeline { action } => match action {
            PipelineCommand::Plan { config } => cmd_plan(&mut io, &config),
            PipelineCommand::Run {
                config,
                workdir,
                dry_run,
                parallel,
            } => cmd_run(&mut io, &config, workdir, dry_run, parallel),
        },
        Command::Practices {
            action: PracticesCommand::List { group },
        } => cmd_practices(&mut io, group.as_deref()),
        Command::Checklist { stage } => cmd_checklist(&mut io, stage.into()),
    }
}

fn cmd_new(io: &mut Io<'_>, input: ConfigInput, dest: Option<PathBuf>) -> i32 {
    let validated = match scaffold::validate_config(&input) {
        Ok(v) => v,
        Err(errors) => {
            for e in &errors {
                say!(io.err, "error[{}]: {e}", e.code());
            }
            say!(
                io.err,
                "\nUsage: skelforge new --name <id> [--description <text>] [--license <id>] \
                 [--ci gitlab|travis|both] --dest <path>"
            );
            return EXIT_USAGE;
        }
    };
    let dest = dest.unwrap_or_else(|| PathBuf::from(&validated.config.name));
    for a in &validated.advisories {
        say!(io.err, "{a}");
    }
    match scaffold::generate(&validated.config, &dest) {
        Ok(report) => {
            if io.format == Format::Json {
                io.json(&json!({
                    "files_written": report.files_written,
                    "tree_root": report.tree_root,
                    "audit_score": report.audit_score,
                    "checklist_next": report.checklist_next,
                    "next_steps": report.next_steps,
                    "advisories": validated.advisories,
                }));
            } else {
                say!(
                    io.out,
                    "created {} files in {} (audit score {:.2})",
                    report.files_written,
                    report.tree_root.display(),
                    report.audit_score
                );
                say!(io.out, "\nnext steps:");
                for step in &report.next_steps {
                    say!(io.out, "  {step}");
                }
                say!(io.out, "\nsetup checklist:");
                for (i, item) in report.checklist_next.iter().enumerate() {
                    say!(io.out, "  {}. {}", i + 1, item.text);
                }
            }
            EXIT_OK
        }
        Err(e @ GenerateError::SelfAudit { .. }) => {
            if io.format == Format::Json {
                io.json(&json!({ "error": e.to_string(), "code": e.code() }));
            }
            say!(io.err, "error[{}]: {e}", e.code());
            EXIT_FAILED
        }
        Err(e) => io.usage(e.code(), e),
    }
}

fn print_report(io: &mut Io<'_>, report: &AuditReport) {
    if io.format == Format::Json {
        io.json(report);
        return;
    }
    for f in &report.findings {
        let tag = match f.severity {
            Severity::Fail => "FAIL",
            Severity::Advisory => "ADVISORY",
        };
        say!(io.out, "{tag:<9}{:<40}{:<28}{}", f.check, f.path, f.message);
    }
    say!(
        io.out,
        "\nscore {:.4} ({} of {} checks failed)",
        report.score,
        report.checks_failed,
        report.checks_run
    );
}

fn cmd_audit(io: &mut Io<'_>, path: &Path) -> i32 {
    let tree = match FileTree::load(path, LoadMode::Lenient) {
        Ok(t) => t,
        Err(e) => return io.usage("IO", e),
    };
    let report = audit::audit(&tree);
    print_report(io, &report);
    if report.is_compliant() {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

fn cmd_rename(io: &mut Io<'_>, path: &Path, from: &str, to: &str) -> i32 {
    let spec = match RenameSpec::new(from, to) {
        Ok(s) => s,
        Err(e) => return io.usage("INVALID_TOKEN", e),
    };
    match rename::rename_dir(path, &spec) {
        Ok(summary) => {
            if io.format == Format::Json {
                let moved: Vec<_> = summary
                    .paths_moved
                    .iter()
                    .map(|(from, to)| json!({ "from": from, "to": to }))
                    .collect();
                io.json(&json!({
                    "files_scanned": summary.files_scanned,
                    "files_rewritten": summary.files_rewritten,
                    "paths_moved": moved,
                }));
            } else {
                for (from, to) in &summary.paths_moved {
                    say!(io.out, "moved {from} -> {to}");
                }
                say!(
                    io.out,
                    "rewrote {} of {} files, moved {} paths",
                    summary.files_rewritten,
                    summary.files_scanned,
                    summary.paths_moved.len()
                );
            }
            EXIT_OK
        }
        Err(e) => {
            let code = match e {
                rename::RenameError::PathCollision { .. } => "PATH_COLLISION",
                rename::RenameError::InvalidToken(_) => "INVALID_TOKEN",
                _ => "IO",
            };
            io.usage(code, e)
        }
    }
}

fn load_pipeline(io: &mut Io<'_>, config: &Path) -> Result<pipeline::Pipeline, i32> {
    let text = fs::read_to_string(config)
        .map_err(|e| io.usage("IO", format_args!("{}: {e}", config.display())))?;
    pipeline::parse_pipeline(&text)
        .map_err(|e: PipelineError| io.usage(e.code(), format_args!("{}:{e}", config.display())))
}

fn cmd_plan(io: &mut Io<'_>, config: &Path) -> i32 {
    let p = match load_pipeline(io, config) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let groups = pipeline::plan(&p);
    if io.format == Format::Json {
        io.json(&groups);
    } else {
        for g in &groups {
            say!(io.out, "{}: {}", g.stage, g.jobs.join(", "));
        }
    }
    EXIT_OK
}

fn print_result(io: &mut Io<'_>, result: &PipelineResult) {
    if io.format == Format::Json {
        io.json(result);
        return;
    }
    for job in &result.jobs {
        if job.status == JobStatus::Skipped {
            continue;
        }
        say!(io.out, "== {} ({}) ==", job.name, job.stage);
        let _ = io.out.write_all(job.output.as_bytes());
        for w in &job.warnings {
            say!(io.out, "warning: {w}");
        }
    }
    say!(io.out, "");
    for job in &result.jobs {
        let status = match job.status {
            JobStatus::Passed => "passed",
            JobStatus::Failed => "failed",
            JobStatus::Skipped => "skipped",
        };
        let code = job.exit_code.map_or("-".to_string(), |c| c.to_string());
        say!(
            io.out,
            "{:<10}{:<24}{:<8}{code}",
            job.stage,
            job.name,
            status
        );
    }
    say!(
        io.out,
        "\npipeline {}",
        if result.passed() { "passed" } else { "failed" }
    );
}

fn cmd_run(
    io: &mut Io<'_>,
    config: &Path,
    workdir: Option<PathBuf>,
    dry_run: bool,
    parallel: bool,
) -> i32 {
    let p = match load_pipeline(io, config) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let workdir = workdir.unwrap_or_else(|| match config.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => dir.to_path_buf(),
        _ => PathBuf::from("."),
    });
    let opts = ExecuteOptions {
        mode: if dry_run {
            ExecMode::DryRun
        } else {
            ExecMode::Local
        },
        workdir,
        parallel,
    };
    match pipeline::execute(&p, &opts) {
        Ok(result) => {
            print_result(io, &result);
            if result.passed() {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Err(e) => io.usage("WORKDIR", e),
    }
}

fn cmd_practices(io: &mut Io<'_>, group: Option<&str>) -> i32 {
    let practices = catalog::list_practices(group);
    if io.format == Format::Json {
        io.json(&practices);
        return EXIT_OK;
    }
    for p in practices {
        let selected = if p.selected.is_empty() {
            "-".to_string()
        } else {
            p.selected.join(", ")
        };
        let checks = if p.checks.is_empty() {
            "(advisory)".to_string()
        } else {
            p.checks.join(", ")
        };
        say!(
            io.out,
            "{:<20}{:<32}{:<28}{checks}",
            p.group,
            p.name,
            selected
        );
    }
    EXIT_OK
}

fn cmd_checklist(io: &mut Io<'_>, stage: Stage) -> i32 {
    let items = scaffold::stage_checklist(stage);
    if io.format == Format::Json {
        io.json(&json!({ "stage": stage, "items": items }));
    } else {
        for (i, item) in items.iter().enumerate() {
            say!(io.out, "{}. {}  [{}]", i + 1, item.text, item.anchor);
        }
    }
    EXIT_OK
}
