//! The embedded project skeleton, named with the reserved token.

use crate::tree::{FileTree, RelPath};

/// Project name used throughout the skeleton; replaced on instantiation.
pub const TOKEN: &str = "bertha";

macro_rules! payload {
    ($($path:literal),* $(,)?) => {
        &[$(($path, include_str!(concat!("../payload/", $path)))),*]
    };
}

static FILES: &[(&str, &str)] = payload![
    ".clang-format",
    ".gitlab-ci.yml",
    ".travis.yml",
    "CHANGELOG.md",
    "CMakeLists.txt",
    "CODE_OF_CONDUCT.md",
    "CONTRIBUTING.md",
    "Doxyfile",
    "LICENSE",
    "README.md",
    "TUTORIAL.md",
    "conda/recipe-stub.yaml",
    "include/bertha/device.hpp",
    "src/device.cpp",
    "swig/bertha.i",
    "test/test_device.cpp",
];

pub fn files() -> &'static [(&'static str, &'static str)] {
    FILES
}

pub fn tree() -> FileTree {
    FILES
        .iter()
        .map(|(path, content)| {
            (
                RelPath::new(path).expect("payload paths are normalized"),
                content.to_string(),
            )
        })
        .collect()
}
