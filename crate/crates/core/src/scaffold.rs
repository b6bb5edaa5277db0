//! Project instantiation from the embedded skeleton, plus the setup,
//! implementation and publication checklists.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::audit::{self, PIPELINE_CONFIG, TRAVIS_CONFIG};
use crate::payload::{self, TOKEN};
use crate::rename::{is_identifier, rename_tree, RenameError, RenameSpec};
use crate::tree::{FileTree, LoadMode, RelPath, TreeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum License {
    #[serde(rename = "MIT")]
    Mit,
    #[serde(rename = "BSD-3-Clause")]
    Bsd3Clause,
    #[serde(rename = "Apache-2.0")]
    Apache2,
    #[serde(rename = "GPL-3.0")]
    Gpl3,
}

impl License {
    pub const ALL: [License; 4] = [
        License::Mit,
        License::Bsd3Clause,
        License::Apache2,
        License::Gpl3,
    ];

    pub fn id(self) -> &'static str {
        match self {
            License::Mit => "MIT",
            License::Bsd3Clause => "BSD-3-Clause",
            License::Apache2 => "Apache-2.0",
            License::Gpl3 => "GPL-3.0",
        }
    }

    /// Full license text; MIT and BSD name the token as copyright holder.
    pub fn text(self) -> &'static str {
        match self {
            License::Mit => include_str!("../licenses/MIT.txt"),
            License::Bsd3Clause => include_str!("../licenses/BSD-3-Clause.txt"),
            License::Apache2 => include_str!("../licenses/Apache-2.0.txt"),
            License::Gpl3 => include_str!("../licenses/GPL-3.0.txt"),
        }
    }
}

impl FromStr for License {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        License::ALL
            .into_iter()
            .find(|l| l.id() == s)
            .ok_or_else(|| ConfigError::UnknownLicense(s.to_string()))
    }
}

impl fmt::Display for License {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CiProvider {
    Gitlab,
    Travis,
    Both,
}

impl CiProvider {
    pub fn includes_gitlab(self) -> bool {
        matches!(self, CiProvider::Gitlab | CiProvider::Both)
    }

    pub fn includes_travis(self) -> bool {
        matches!(self, CiProvider::Travis | CiProvider::Both)
    }
}

impl FromStr for CiProvider {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gitlab" => Ok(CiProvider::Gitlab),
            "travis" => Ok(CiProvider::Travis),
            "both" => Ok(CiProvider::Both),
            other => Err(ConfigError::UnknownCiProvider(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("invalid project name `{0}`: expected [a-z][a-z0-9_]* with 2 to 64 characters")]
    InvalidName(String),
    #[error("project name `{0}` contains the reserved skeleton name `{TOKEN}`")]
    ReservedName(String),
    #[error("unknown license `{0}` (expected MIT, BSD-3-Clause, Apache-2.0 or GPL-3.0)")]
    UnknownLicense(String),
    #[error("unknown CI provider `{0}` (expected gitlab, travis or both)")]
    UnknownCiProvider(String),
}

impl ConfigError {
    pub fn code(&self) -> &'static str {
        match self {
            ConfigError::InvalidName(_) => "INVALID_NAME",
            ConfigError::ReservedName(_) => "RESERVED_NAME",
            ConfigError::UnknownLicense(_) => "UNKNOWN_LICENSE",
            ConfigError::UnknownCiProvider(_) => "UNKNOWN_CI_PROVIDER",
        }
    }
}

/// Unvalidated user input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigInput {
    pub name: String,
    pub description: String,
    pub license: String,
    pub ci: String,
}

impl ConfigInput {
    pub fn new(name: &str) -> Self {
        ConfigInput {
            name: name.to_string(),
            description: String::new(),
            license: License::Mit.id().to_string(),
            ci: "both".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectConfig {
    pub name: String,
    pub description: String,
    pub license: License,
    pub ci: CiProvider,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedConfig {
    pub config: ProjectConfig,
    /// Warnings that do not block generation.
    pub advisories: Vec<String>,
}

fn check_name(name: &str) -> Result<(), ConfigError> {
    if !(2..=64).contains(&name.len()) || !is_identifier(name) {
        return Err(ConfigError::InvalidName(name.to_string()));
    }
    // Any name containing the token would survive the rename.
    if name.contains(TOKEN) {
        return Err(ConfigError::ReservedName(name.to_string()));
    }
    Ok(())
}

/// Collects every violation instead of stopping at the first one.
pub fn validate_config(input: &ConfigInput) -> Result<ValidatedConfig, Vec<ConfigError>> {
    let mut errors = Vec::new();
    if let Err(e) = check_name(&input.name) {
        errors.push(e);
    }
    let license = input
        .license
        .parse::<License>()
        .map_err(|e| errors.push(e))
        .ok();
    let ci = input
        .ci
        .parse::<CiProvider>()
        .map_err(|e| errors.push(e))
        .ok();
    match (license, ci) {
        (Some(license), Some(ci)) if errors.is_empty() => Ok(ValidatedConfig {
            advisories: vec![format!(
                "WARN: make sure the name `{}` is not already used by another project or \
                 package (for example on conda-forge); registries are not checked",
                input.name
            )],
            config: ProjectConfig {
                name: input.name.clone(),
                description: input.description.clone(),
                license,
                ci,
            },
        }),
        _ => Err(errors),
    }
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("invalid configuration: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidConfig(Vec<ConfigError>),
    #[error("destination {} is not empty", .0.display())]
    DestNotEmpty(PathBuf),
    #[error(transparent)]
    Io(#[from] TreeError),
    #[error(transparent)]
    Rename(#[from] RenameError),
    #[error("generated tree failed its self-audit (score {score}): {}", failed.join(", "))]
    SelfAudit { score: f64, failed: Vec<String> },
}

impl GenerateError {
    pub fn code(&self) -> &'static str {
        match self {
            GenerateError::InvalidConfig(_) => "INVALID_CONFIG",
            GenerateError::DestNotEmpty(_) => "DEST_NOT_EMPTY",
            GenerateError::Io(_) => "IO",
            GenerateError::Rename(_) => "RENAME",
            GenerateError::SelfAudit { .. } => "SELF_AUDIT",
        }
    }
}

/// The line of README.md that carries the project description.
pub const DESCRIPTION_LINE: usize = 3;

fn inject_description(readme: &str, description: &str) -> String {
    let description = description.split_whitespace().collect::<Vec<_>>().join(" ");
    if description.is_empty() {
        return readme.to_string();
    }
    readme
        .split_inclusive('\n')
        .enumerate()
        .map(|(i, line)| {
            if i + 1 == DESCRIPTION_LINE {
                format!("{description}\n")
            } else {
                line.to_string()
            }
        })
        .collect()
}

/// The renamed, filtered project tree for `cfg`, without touching disk.
pub fn instantiate(cfg: &ProjectConfig) -> Result<FileTree, GenerateError> {
    check_name(&cfg.name).map_err(|e| GenerateError::InvalidConfig(vec![e]))?;
    let mut tree = payload::tree();
    tree.insert(
        RelPath::new("LICENSE").expect("static path"),
        cfg.license.text(),
    );
    tree.retain(|path, _| match path.as_str() {
        PIPELINE_CONFIG => cfg.ci.includes_gitlab(),
        TRAVIS_CONFIG => cfg.ci.includes_travis(),
        _ => true,
    });
    let spec = RenameSpec::new(TOKEN, &cfg.name)?;
    let mut tree = rename_tree(&tree, &spec)?;
    if let Some(readme) = tree.get("README.md") {
        let readme = inject_description(readme, &cfg.description);
        tree.insert(RelPath::new("README.md").expect("static path"), readme);
    }
    Ok(tree)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationReport {
    pub files_written: usize,
    pub tree_root: PathBuf,
    pub audit_score: f64,
    pub checklist_next: Vec<ChecklistItem>,
    /// Shell commands to put the new tree under version control.
    pub next_steps: Vec<String>,
}

fn ensure_empty_dest(dest: &Path) -> Result<(), GenerateError> {
    match fs::read_dir(dest) {
        Ok(mut entries) => {
            if entries.next().is_some() {
                Err(GenerateError::DestNotEmpty(dest.to_path_buf()))
            } else {
                Ok(())
            }
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            fs::create_dir_all(dest).map_err(|e| TreeError::io(dest, e).into())
        }
        Err(e) => Err(TreeError::io(dest, e).into()),
    }
}

fn self_audit(tree: &FileTree) -> Result<f64, GenerateError> {
    let report = audit::audit(tree);
    if report.is_compliant() {
        Ok(report.score)
    } else {
        Err(GenerateError::SelfAudit {
            score: report.score,
            failed: report.failed_ids().into_iter().map(String::from).collect(),
        })
    }
}

/// Writes a new project under `dest`, which must be empty or absent.
///
/// The tree is audited before anything is written and again after it has
/// been read back from disk; any failed check aborts with `SelfAudit`.
pub fn generate(cfg: &ProjectConfig, dest: &Path) -> Result<GenerationReport, GenerateError> {
    let tree = instantiate(cfg)?;
    self_audit(&tree)?;
    ensure_empty_dest(dest)?;
    let files_written = tree.write_to(dest)?;
    let on_disk = FileTree::load(dest, LoadMode::Strict)?;
    let audit_score = self_audit(&on_disk)?;
    Ok(GenerationReport {
        files_written,
        tree_root: dest.to_path_buf(),
        audit_score,
        checklist_next: stage_checklist(Stage::Setup).to_vec(),
        next_steps: vec![
            format!("cd {}", dest.display()),
            "git init".to_string(),
            "git add .".to_string(),
            format!(
                "git commit -m \"Create {} from the project skeleton\"",
                cfg.name
            ),
        ],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Setup,
    Implementation,
    Publication,
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "setup" => Ok(Stage::Setup),
            "implementation" => Ok(Stage::Implementation),
            "publication" => Ok(Stage::Publication),
            other => Err(format!(
                "unknown stage `{other}` (expected setup, implementation or publication)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChecklistItem {
    /// Stable identifier, `<stage>.<topic>`.
    pub anchor: &'static str,
    pub text: &'static str,
}

const fn item(anchor: &'static str, text: &'static str) -> ChecklistItem {
    ChecklistItem { anchor, text }
}

static SETUP: [ChecklistItem; 6] = [
    item(
        "setup.name",
        "Choose a meaningful project name, replace the skeleton name with it everywhere, \
         and verify the name is not already taken (e.g. on conda-forge).",
    ),
    item(
        "setup.hosting",
        "Decide where the project is hosted: internal only or publicly available.",
    ),
    item("setup.license", "Agree on the license of the project."),
    item(
        "setup.workflow",
        "Agree on the version control workflow (e.g. GitLab Flow).",
    ),
    item(
        "setup.coding-style",
        "Agree on the coding style and its formatting rules.",
    ),
    item(
        "setup.document",
        "Document the workflow and the coding style as early as possible.",
    ),
];

static IMPLEMENTATION: [ChecklistItem; 4] = [
    item(
        "implementation.docs-first",
        "Write the documentation of new functionality first; it is the contract.",
    ),
    item("implementation.implement", "Implement the functionality."),
    item(
        "implementation.unit-tests",
        "Write unit tests while implementing, including the error handling paths.",
    ),
    item(
        "implementation.build",
        "Adjust the build configuration for new dependencies or additional modules.",
    ),
];

static PUBLICATION: [ChecklistItem; 2] = [
    item(
        "publication.release-early",
        "Distribute and announce the project as soon as it has its first functionality.",
    ),
    item(
        "publication.package",
        "Create a binary packaging recipe, starting from conda/recipe-stub.yaml.",
    ),
];

pub fn stage_checklist(stage: Stage) -> &'static [ChecklistItem] {
    match stage {
        Stage::Setup => &SETUP,
        Stage::Implementation => &IMPLEMENTATION,
        Stage::Publication => &PUBLICATION,
    }
}
