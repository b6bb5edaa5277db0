//! Token renaming over text, file trees and directories on disk.
//!
//! A token is replaced in exactly three case variants: all-lower
//! (`bertha`), capitalized (`Bertha`) and all-upper (`BERTHA`). Matching is
//! plain substring search; there is no word-boundary logic.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::tree::{FileTree, LoadMode, RelPath, TreeError};

#[derive(Debug, Error)]
pub enum RenameError {
    #[error("invalid token `{0}`: expected [a-z][a-z0-9_]*")]
    InvalidToken(String),
    #[error("renaming `{first}` and `{second}` would both produce `{target}`")]
    PathCollision {
        first: String,
        second: String,
        target: String,
    },
    #[error("cannot move `{from}`: `{to}` already exists and is not part of the tree")]
    TargetExists { from: String, to: String },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut bytes = s.bytes();
    matches!(bytes.next(), Some(b'a'..=b'z'))
        && bytes.all(|b| matches!(b, b'a'..=b'z' | b'0'..=b'9' | b'_'))
}

fn capitalize(s: &str) -> String {
    let mut out = s.to_string();
    if let Some(first) = out.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    out
}

/// A validated `old_token -> new_token` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenameSpec {
    old: String,
    new: String,
    /// (old variant, new variant), lower first; duplicates of an old
    /// variant are dropped so the earlier entry wins.
    variants: Vec<(String, String)>,
}

impl RenameSpec {
    pub fn new(old_token: &str, new_token: &str) -> Result<Self, RenameError> {
        for token in [old_token, new_token] {
            if !is_identifier(token) {
                return Err(RenameError::InvalidToken(token.to_string()));
            }
        }
        let candidates = [
            (old_token.to_string(), new_token.to_string()),
            (
                old_token.to_ascii_uppercase(),
                new_token.to_ascii_uppercase(),
            ),
            (capitalize(old_token), capitalize(new_token)),
        ];
        let mut variants: Vec<(String, String)> = Vec::with_capacity(3);
        for (old, new) in candidates {
            if !variants.iter().any(|(o, _)| *o == old) {
                variants.push((old, new));
            }
        }
        Ok(RenameSpec {
            old: old_token.to_string(),
            new: new_token.to_string(),
            variants,
        })
    }

    pub fn old_token(&self) -> &str {
        &self.old
    }

    pub fn new_token(&self) -> &str {
        &self.new
    }

    pub fn is_identity(&self) -> bool {
        self.old == self.new
    }

    fn match_at(&self, haystack: &[u8]) -> Option<&(String, String)> {
        self.variants
            .iter()
            .find(|(old, _)| haystack.starts_with(old.as_bytes()))
    }
}

/// Replaces every case variant of the old token, scanning left to right.
pub fn apply_rename(content: &str, spec: &RenameSpec) -> String {
    if spec.is_identity() {
        return content.to_string();
    }
    let bytes = content.as_bytes();
    let width = spec.old.len();
    let mut out = String::with_capacity(content.len());
    let mut copied = 0;
    let mut i = 0;
    // Tokens are ASCII, so a match can only start on a char boundary.
    while i + width <= bytes.len() {
        match spec.match_at(&bytes[i..]) {
            Some((_, new)) => {
                out.push_str(&content[copied..i]);
                out.push_str(new);
                i += width;
                copied = i;
            }
            None => i += 1,
        }
    }
    out.push_str(&content[copied..]);
    out
}

/// Counts the non-overlapping occurrences [`apply_rename`] would replace.
pub fn count_occurrences(content: &str, spec: &RenameSpec) -> usize {
    let bytes = content.as_bytes();
    let width = spec.old.len();
    let mut count = 0;
    let mut i = 0;
    while i + width <= bytes.len() {
        if spec.match_at(&bytes[i..]).is_some() {
            count += 1;
            i += width;
        } else {
            i += 1;
        }
    }
    count
}

fn rename_path(path: &RelPath, spec: &RenameSpec) -> RelPath {
    let renamed = apply_rename(path.as_str(), spec);
    // Tokens contain neither `/` nor `.`, so normalization is preserved.
    RelPath::new(&renamed).expect("renaming keeps paths normalized")
}

/// Renames every path and every file's content.
pub fn rename_tree(tree: &FileTree, spec: &RenameSpec) -> Result<FileTree, RenameError> {
    let mut out: BTreeMap<RelPath, (RelPath, String)> = BTreeMap::new();
    for (path, content) in tree.iter() {
        let target = rename_path(path, spec);
        if let Some((first, _)) = out.get(&target) {
            return Err(RenameError::PathCollision {
                first: first.to_string(),
                second: path.to_string(),
                target: target.to_string(),
            });
        }
        out.insert(target, (path.clone(), apply_rename(content, spec)));
    }
    Ok(out
        .into_iter()
        .map(|(target, (_, content))| (target, content))
        .collect())
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RenameSummary {
    pub files_scanned: usize,
    pub files_rewritten: usize,
    pub paths_moved: Vec<(String, String)>,
}

/// Renames a working tree on disk in place. `.git` is never touched.
///
/// Nothing is modified unless the whole tree loads as strict UTF-8 text and
/// the renamed paths are collision-free.
pub fn rename_dir(root: &Path, spec: &RenameSpec) -> Result<RenameSummary, RenameError> {
    let tree = FileTree::load(root, LoadMode::Strict)?;
    // Validates collisions before touching the disk.
    rename_tree(&tree, spec)?;

    let mut summary = RenameSummary {
        files_scanned: tree.len(),
        ..Default::default()
    };
    let mut moves = Vec::new();
    let mut rewrites = Vec::new();
    for (path, content) in tree.iter() {
        let target = rename_path(path, spec);
        let new_content = apply_rename(content, spec);
        if target != *path {
            let on_disk = target.to_path(root);
            if on_disk.exists() && !tree.contains(target.as_str()) {
                return Err(RenameError::TargetExists {
                    from: path.to_string(),
                    to: target.to_string(),
                });
            }
            moves.push((path.clone(), target.clone()));
        }
        if new_content != content {
            rewrites.push((target, new_content));
        }
    }

    // Two phases so chains like a -> b, b -> c cannot clobber each other.
    let mut staged: Vec<(PathBuf, &RelPath)> = Vec::with_capacity(moves.len());
    for (i, (from, to)) in moves.iter().enumerate() {
        let src = from.to_path(root);
        let tmp = src.with_file_name(format!(".skelforge-rename-{i}"));
        fs::rename(&src, &tmp).map_err(|e| TreeError::io(&src, e))?;
        staged.push((tmp, to));
    }
    for (tmp, to) in &staged {
        let dst = to.to_path(root);
        if let Some(parent) = dst.parent() {
            fs::create_dir_all(parent).map_err(|e| TreeError::io(parent, e))?;
        }
        fs::rename(tmp, &dst).map_err(|e| TreeError::io(&dst, e))?;
    }
    for (path, content) in &rewrites {
        let dst = path.to_path(root);
        fs::write(&dst, content).map_err(|e| TreeError::io(&dst, e))?;
    }
    for (from, _) in &moves {
        remove_empty_parents(root, from);
    }

    summary.files_rewritten = rewrites.len();
    summary.paths_moved = moves
        .into_iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    Ok(summary)
}

fn remove_empty_parents(root: &Path, path: &RelPath) {
    let mut dir = path.parent();
    while let Some(d) = dir {
        let abs = root.join(d);
        // Fails on non-empty directories, which ends the walk.
        if fs::remove_dir(&abs).is_err() {
            break;
        }
        dir = d.rsplit_once('/').map(|(p, _)| p);
    }
}
