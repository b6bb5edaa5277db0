//! Scaffolding, auditing and CI tooling for scientific C++ libraries with
//! Python bindings.
//!
//! - [`catalog`]: the best-practice table and the checks that verify it.
//! - [`rename`]: token substitution over text, trees and directories.
//! - [`scaffold`]: project instantiation and lifecycle checklists.
//! - [`audit`]: scored audits of a repository tree.
//! - [`pipeline`]: CI config parsing, planning and local execution.
//! - [`cli`]: the `skelforge` command line.

pub mod audit;
pub mod catalog;
pub mod cli;
pub mod payload;
pub mod pipeline;
pub mod rename;
pub mod scaffold;
pub mod tree;

pub use audit::{audit, AuditFinding, AuditReport, Severity};
pub use catalog::{checks_for, list_practices, BestPractice};
pub use pipeline::{parse_pipeline, plan, serialize_pipeline, Job, Pipeline, PipelineError};
pub use rename::{apply_rename, rename_tree, RenameSpec};
pub use scaffold::{generate, validate_config, ConfigInput, ProjectConfig};
pub use tree::{FileTree, RelPath};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/practices.md")]
    mod practices {}
    #[doc = include_str!("../../../book/src/rename.md")]
    mod rename {}
    #[doc = include_str!("../../../book/src/scaffolding.md")]
    mod scaffolding {}
    #[doc = include_str!("../../../book/src/audit.md")]
    mod audit {}
    #[doc = include_str!("../../../book/src/pipelines.md")]
    mod pipelines {}
}
