//! The best-practice catalog: seven groups, sixteen practices, their
//! implementation candidates, the selected tools, and the audit checks that
//! verify each practice in a repository tree.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown practice `{0}`")]
pub struct NotFound(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BestPractice {
    pub id: &'static str,
    pub group: &'static str,
    pub name: &'static str,
    pub candidates: &'static [&'static str],
    pub selected: &'static [&'static str],
    pub checks: &'static [&'static str],
}

impl BestPractice {
    /// Practices without checks cannot be verified from a tree.
    pub fn is_advisory(&self) -> bool {
        self.checks.is_empty()
    }
}

/// Group names in table order.
pub const GROUPS: [&str; 7] = [
    "Project management",
    "Coding style",
    "Independence",
    "Automation",
    "Documentation",
    "Testing",
    "Deployment",
];

const fn practice(
    id: &'static str,
    group: &'static str,
    name: &'static str,
    candidates: &'static [&'static str],
    selected: &'static [&'static str],
    checks: &'static [&'static str],
) -> BestPractice {
    BestPractice {
        id,
        group,
        name,
        candidates,
        selected,
        checks,
    }
}

static CATALOG: [BestPractice; 16] = [
    practice(
        "project-management.version-control",
        "Project management",
        "Version control system",
        &["git", "mercurial", "svn"],
        &["git"],
        &[],
    ),
    practice(
        "project-management.project-management-tool",
        "Project management",
        "Project management tool",
        &["GitLab", "GitHub", "Bitbucket", "JIRA"],
        &["GitLab", "GitHub"],
        &["CI-CONFIG-PRESENT"],
    ),
    practice(
        "project-management.workflow",
        "Project management",
        "Workflow",
        &["GitLab Flow", "GitHub Flow", "git flow"],
        &["GitLab Flow"],
        &[],
    ),
    practice(
        "coding-style.code-formatting-style",
        "Coding style",
        "Code formatting style",
        &["Mozilla", "LLVM", "Google", "Chromium"],
        &["Mozilla"],
        &["FMT-CONFIG"],
    ),
    practice(
        "coding-style.code-formatting-tool",
        "Coding style",
        "Code formatting tool",
        &["clang-format"],
        &["clang-format"],
        &[],
    ),
    practice(
        "coding-style.static-code-analysis",
        "Coding style",
        "Static code analysis",
        &["clang-tidy", "cppcheck", "cpplint"],
        &[],
        &[],
    ),
    practice(
        "independence.open-file-formats",
        "Independence",
        "Use open file formats",
        &["JSON", "CSV", "HDF5"],
        &[],
        &[],
    ),
    practice(
        "independence.open-source-libraries",
        "Independence",
        "Use open-source libraries",
        &["Eigen", "FFTW", "GNU Scientific Library"],
        &[],
        &[],
    ),
    practice(
        "automation.continuous-integration",
        "Automation",
        "Continuous integration",
        &["gitlab-ci", "Travis CI", "AppVeyor", "Microsoft Azure"],
        &["gitlab-ci", "Travis CI"],
        &["CI-FOUR-STAGES"],
    ),
    practice(
        "automation.build-automation",
        "Automation",
        "Build automation",
        &["CMake", "GNU make", "Bazel", "Ninja", "MS Build"],
        &["CMake"],
        &["BUILD-TOPLEVEL", "BUILD-BINDINGS"],
    ),
    practice(
        "documentation.function-reference",
        "Documentation",
        "Function reference",
        &["Doxygen", "Sphinx (with Breathe)"],
        &["Doxygen"],
        &["DOC-APIREF-CONFIG"],
    ),
    practice(
        "documentation.big-picture",
        "Documentation",
        "\"Big picture\" documentation",
        &["Markdown", "reStructuredText"],
        &["Markdown"],
        &[
            "DOC-README",
            "DOC-CHANGELOG",
            "DOC-CONTRIBUTING",
            "DOC-CODE-OF-CONDUCT",
            "DOC-TUTORIAL",
        ],
    ),
    practice(
        "testing.unit-test-framework",
        "Testing",
        "Unit test framework",
        &["Catch2", "Google Test", "Boost Test Library"],
        &["Catch2"],
        &["TEST-DIR-PRESENT", "CI-TEST-JOB"],
    ),
    practice(
        "testing.code-coverage-report",
        "Testing",
        "Code coverage report",
        &["gcov", "various commercial tools"],
        &["gcov"],
        &["CI-COVERAGE-JOB"],
    ),
    practice(
        "deployment.package-binaries",
        "Deployment",
        "Package binaries",
        &["conda", "Conan", "Debian apt"],
        &["conda"],
        &["PKG-RECIPE-STUB", "LIC-FILE"],
    ),
    practice(
        "deployment.online-documentation",
        "Deployment",
        "Online documentation",
        &["GitLab Pages", "GitHub Pages", "readthedocs.io"],
        &["GitLab Pages", "GitHub Pages"],
        &["CI-DOCS-DEPLOY"],
    ),
];

pub fn catalog() -> &'static [BestPractice] {
    &CATALOG
}

/// All practices, or those of one group, in table order. Unknown groups
/// yield an empty list.
pub fn list_practices(group: Option<&str>) -> Vec<&'static BestPractice> {
    CATALOG
        .iter()
        .filter(|p| group.is_none_or(|g| p.group == g))
        .collect()
}

pub fn find(practice_id: &str) -> Result<&'static BestPractice, NotFound> {
    CATALOG
        .iter()
        .find(|p| p.id == practice_id)
        .ok_or_else(|| NotFound(practice_id.to_string()))
}

pub fn checks_for(practice_id: &str) -> Result<&'static [&'static str], NotFound> {
    find(practice_id).map(|p| p.checks)
}

/// Owning practice of a check id.
pub fn practice_for_check(check_id: &str) -> Option<&'static BestPractice> {
    CATALOG.iter().find(|p| p.checks.contains(&check_id))
}
