#![allow(dead_code)]

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;
use skelforge::pipeline::{Job, Pipeline};

const RESERVED_KEYS: &[&str] = &[
    "stages",
    "image",
    "services",
    "before_script",
    "after_script",
    "variables",
    "cache",
    "include",
    "default",
    "workflow",
];

/// Scalars that stress the quoting rules of the serializer.
pub fn scalar() -> impl Strategy<Value = String> {
    prop_oneof![
        4 => "[a-z][a-z0-9 ./_-]{0,12}",
        2 => "\\PC{0,12}",
        1 => any::<String>().prop_map(|s| s.chars().take(10).collect()),
        1 => prop::sample::select(vec![
            "", "true", "No", "~", "1.5", "-3", "- x", "a: b", "x:", "#c", "a #b", " lead",
            "trail ", "\"q\"", "'s'", "[1]", "{k}", "*ref", "&a", "!tag", "|", ">", "%p", "@x",
            "`t`", "\t", "line\nbreak", "back\\slash", "---", "ü: ä",
        ])
        .prop_map(String::from),
    ]
}

fn dedup(items: Vec<String>) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    items
        .into_iter()
        .filter(|s| seen.insert(s.clone()))
        .collect()
}

/// Valid pipelines: unique stages, unique job names, declared stages,
/// non-empty scripts.
pub fn pipeline() -> impl Strategy<Value = Pipeline> {
    prop::collection::vec(scalar(), 1..5)
        .prop_map(dedup)
        .prop_flat_map(|stages| {
            let n = stages.len();
            let job = (
                "[A-Za-z0-9_][A-Za-z0-9_.-]{0,10}",
                0..n,
                prop::collection::vec(scalar(), 1..4),
                prop::collection::vec(scalar(), 0..3),
            );
            (Just(stages), prop::collection::vec(job, 0..6))
        })
        .prop_map(|(stages, raw_jobs)| {
            let mut seen = std::collections::HashSet::new();
            let jobs = raw_jobs
                .into_iter()
                .filter(|(name, ..)| !RESERVED_KEYS.contains(&name.as_str()))
                .filter(|(name, ..)| seen.insert(name.clone()))
                .map(|(name, stage, script, artifacts)| Job {
                    name,
                    stage: stages[stage].clone(),
                    script,
                    artifacts,
                })
                .collect();
            Pipeline { stages, jobs }
        })
}

/// Lowercase, UPPER and Capitalized forms of an identifier.
pub fn variants(token: &str) -> [String; 3] {
    let mut cap = token.to_string();
    cap[..1].make_ascii_uppercase();
    [token.to_string(), token.to_ascii_uppercase(), cap]
}

/// Greedy left-to-right count of non-overlapping occurrences of any case
/// variant, written independently of the library.
pub fn naive_count(text: &str, token: &str) -> usize {
    let vs = variants(token);
    let bytes = text.as_bytes();
    let (mut i, mut n) = (0, 0);
    while i < bytes.len() {
        if vs.iter().any(|v| bytes[i..].starts_with(v.as_bytes())) {
            n += 1;
            i += token.len();
        } else {
            i += 1;
        }
    }
    n
}

/// Case-insensitive substring hits in every path and file under `root`.
pub fn scan_dir(root: &Path, needle: &str) -> Vec<String> {
    let mut hits = Vec::new();
    scan(root, root, &needle.to_lowercase(), &mut hits);
    hits
}

fn scan(root: &Path, dir: &Path, needle: &str, hits: &mut Vec<String>) {
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let rel = path
            .strip_prefix(root)
            .unwrap()
            .to_string_lossy()
            .to_string();
        if rel.to_lowercase().contains(needle) {
            hits.push(format!("path {rel}"));
        }
        if path.is_dir() {
            scan(root, &path, needle, hits);
        } else {
            let content = String::from_utf8_lossy(&fs::read(&path).unwrap()).to_lowercase();
            for (no, line) in content.lines().enumerate() {
                if line.contains(needle) {
                    hits.push(format!("{rel}:{}", no + 1));
                }
            }
        }
    }
}

/// Project names accepted by the generator.
pub fn project_name() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{1,20}".prop_filter("reserved", |n| !n.contains("bertha"))
}

pub fn skelforge(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skelforge"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by a signal")
}

pub fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("not JSON ({e}):\n{}", String::from_utf8_lossy(&out.stdout)))
}

/// Argument vocabulary for fuzzing the command line.
pub const VOCAB: &[&str] = &[
    "new",
    "audit",
    "rename",
    "pipeline",
    "plan",
    "run",
    "practices",
    "list",
    "checklist",
    "setup",
    "implementation",
    "publication",
    "--name",
    "--description",
    "--dest",
    "--from",
    "--to",
    "--format",
    "json",
    "human",
    "--group",
    "Testing",
    "--workdir",
    "--dry-run",
    "--parallel",
    "--license",
    "MIT",
    "GPL-2.0",
    "--ci",
    "gitlab",
    "travis",
    "both",
    "alpha",
    "ab_c",
    "Bad Name!",
    "bertha",
    "proj",
    "ok.yml",
    "bad.yml",
    "broken.yml",
    "missing",
    "-x",
    "--help",
    "--version",
    "",
    "-",
];

/// A generated project `proj` plus passing, failing and malformed
/// pipeline configs.
pub fn prepare(dir: &Path) {
    assert_eq!(code(&skelforge(dir, &["new", "--name", "proj"])), 0);
    fs::write(
        dir.join("ok.yml"),
        "stages:\n  - a\njob:\n  stage: a\n  script:\n    - 'true'\n",
    )
    .unwrap();
    fs::write(
        dir.join("bad.yml"),
        "stages:\n  - a\njob:\n  stage: a\n  script:\n    - exit 3\n",
    )
    .unwrap();
    fs::write(dir.join("broken.yml"), "stages: [a\n").unwrap();
}

pub fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}
