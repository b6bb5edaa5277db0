//! In-memory file trees: normalized relative paths mapped to UTF-8 text.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;
use walkdir::WalkDir;

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("invalid relative path `{path}`: {reason}")]
    InvalidPath { path: String, reason: &'static str },
    #[error("{}: file is not valid UTF-8 text", .0.display())]
    NotUtf8(PathBuf),
    #[error("{}: file uses CRLF line endings", .0.display())]
    CrlfLineEndings(PathBuf),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl TreeError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        TreeError::Io {
            path: path.into(),
            source,
        }
    }
}

/// A normalized, `/`-separated relative path.
///
/// Never empty, never absolute, and free of `.`, `..` and empty segments.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelPath(String);

impl RelPath {
    pub fn new(raw: &str) -> Result<Self, TreeError> {
        let invalid = |reason| TreeError::InvalidPath {
            path: raw.to_string(),
            reason,
        };
        if raw.starts_with('/') {
            return Err(invalid("path is absolute"));
        }
        if raw.contains('\\') {
            return Err(invalid("path contains a backslash"));
        }
        let segments: Vec<&str> = raw
            .split('/')
            .filter(|s| !s.is_empty() && *s != ".")
            .collect();
        if segments.is_empty() {
            return Err(invalid("path is empty"));
        }
        if segments.contains(&"..") {
            return Err(invalid("path contains `..`"));
        }
        Ok(RelPath(segments.join("/")))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn segments(&self) -> impl Iterator<Item = &str> {
        self.0.split('/')
    }

    pub fn file_name(&self) -> &str {
        self.0.rsplit('/').next().unwrap_or(&self.0)
    }

    /// Parent directory, `None` for top-level entries.
    pub fn parent(&self) -> Option<&str> {
        self.0.rsplit_once('/').map(|(dir, _)| dir)
    }

    pub fn starts_with_dir(&self, dir: &str) -> bool {
        self.0
            .strip_prefix(dir)
            .is_some_and(|rest| rest.starts_with('/'))
    }

    pub fn to_path(&self, root: &Path) -> PathBuf {
        self.segments().fold(root.to_path_buf(), |p, s| p.join(s))
    }
}

impl fmt::Display for RelPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for RelPath {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelPath::new(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadMode {
    /// Non-UTF-8 files and CRLF line endings are errors.
    Strict,
    /// Non-UTF-8 files are skipped and CRLF is normalized to LF.
    Lenient,
}

/// Ordered mapping from relative path to text content.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FileTree {
    entries: BTreeMap<RelPath, String>,
}

/// Directory names never loaded from disk.
const SKIPPED_DIRS: &[&str] = &[".git"];

impl FileTree {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or replaces an entry, returning the previous content.
    pub fn insert(&mut self, path: RelPath, content: impl Into<String>) -> Option<String> {
        self.entries.insert(path, content.into())
    }

    pub fn remove(&mut self, path: &str) -> Option<String> {
        let key = RelPath::new(path).ok()?;
        self.entries.remove(&key)
    }

    pub fn get(&self, path: &str) -> Option<&str> {
        let key = RelPath::new(path).ok()?;
        self.entries.get(&key).map(String::as_str)
    }

    pub fn contains(&self, path: &str) -> bool {
        self.get(path).is_some()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn paths(&self) -> impl Iterator<Item = &RelPath> {
        self.entries.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&RelPath, &str)> {
        self.entries.iter().map(|(p, c)| (p, c.as_str()))
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&RelPath, &str) -> bool) {
        self.entries.retain(|p, c| keep(p, c));
    }

    /// Loads every regular file below `root`. Symlinks and `.git` are skipped.
    pub fn load(root: &Path, mode: LoadMode) -> Result<Self, TreeError> {
        let meta = fs::metadata(root).map_err(|e| TreeError::io(root, e))?;
        if !meta.is_dir() {
            return Err(TreeError::io(
                root,
                io::Error::new(io::ErrorKind::InvalidInput, "not a directory"),
            ));
        }
        let mut tree = FileTree::new();
        let walker = WalkDir::new(root)
            .follow_links(false)
            .sort_by_file_name()
            .into_iter()
            .filter_entry(|e| {
                !(e.file_type().is_dir()
                    && e.depth() > 0
                    && SKIPPED_DIRS.iter().any(|d| e.file_name() == *d))
            });
        for entry in walker {
            let entry = entry.map_err(|e| {
                let path = e.path().unwrap_or(root).to_path_buf();
                TreeError::io(path, e.into())
            })?;
            if !entry.file_type().is_file() {
                continue;
            }
            let path = entry.path();
            let rel = path
                .strip_prefix(root)
                .expect("walkdir yields paths below its root");
            let rel = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            let rel = RelPath::new(&rel)?;
            let bytes = fs::read(path).map_err(|e| TreeError::io(path, e))?;
            let text = match String::from_utf8(bytes) {
                Ok(text) => text,
                Err(_) if mode == LoadMode::Lenient => continue,
                Err(_) => return Err(TreeError::NotUtf8(path.to_path_buf())),
            };
            let text = if text.contains("\r\n") {
                match mode {
                    LoadMode::Strict => return Err(TreeError::CrlfLineEndings(path.to_path_buf())),
                    LoadMode::Lenient => text.replace("\r\n", "\n"),
                }
            } else {
                text
            };
            tree.insert(rel, text);
        }
        Ok(tree)
    }

    /// Writes every entry below `root`, creating parent directories.
    pub fn write_to(&self, root: &Path) -> Result<usize, TreeError> {
        for (rel, content) in &self.entries {
            let path = rel.to_path(root);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).map_err(|e| TreeError::io(parent, e))?;
            }
            fs::write(&path, content).map_err(|e| TreeError::io(&path, e))?;
        }
        Ok(self.entries.len())
    }
}

impl FromIterator<(RelPath, String)> for FileTree {
    fn from_iter<I: IntoIterator<Item = (RelPath, String)>>(iter: I) -> Self {
        FileTree {
            entries: iter.into_iter().collect(),
        }
    }
}

impl IntoIterator for FileTree {
    type Item = (RelPath, String);
    type IntoIter = std::collections::btree_map::IntoIter<RelPath, String>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.into_iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_paths() {
        assert_eq!(RelPath::new("a//b/./c").unwrap().as_str(), "a/b/c");
        assert_eq!(RelPath::new("./README.md").unwrap().as_str(), "README.md");
        assert!(RelPath::new("/etc/passwd").is_err());
        assert!(RelPath::new("a/../b").is_err());
        assert!(RelPath::new("").is_err());
        assert!(RelPath::new("./").is_err());
        assert!(RelPath::new("a\\b").is_err());
    }

    #[test]
    fn path_helpers() {
        let p = RelPath::new("include/bertha/device.hpp").unwrap();
        assert_eq!(p.file_name(), "device.hpp");
        assert_eq!(p.parent(), Some("include/bertha"));
        assert!(p.starts_with_dir("include"));
        assert!(!p.starts_with_dir("incl"));
        assert_eq!(RelPath::new("LICENSE").unwrap().parent(), None);
    }

    #[test]
    fn entries_are_lexicographic() {
        let mut t = FileTree::new();
        for p in ["b", "a/z", "a/b", "C"] {
            t.insert(RelPath::new(p).unwrap(), "");
        }
        let order: Vec<_> = t.paths().map(RelPath::as_str).collect();
        assert_eq!(order, ["C", "a/b", "a/z", "b"]);
    }

    #[test]
    fn load_and_write_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = FileTree::new();
        t.insert(RelPath::new("x/y.txt").unwrap(), "hello\n");
        t.insert(RelPath::new("top.md").unwrap(), "# top\n");
        t.write_to(dir.path()).unwrap();
        let loaded = FileTree::load(dir.path(), LoadMode::Strict).unwrap();
        assert_eq!(loaded, t);
    }

    #[test]
    fn strict_load_rejects_binary_and_crlf() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("blob.bin"), [0xff, 0xfe, 0x00]).unwrap();
        assert!(matches!(
            FileTree::load(dir.path(), LoadMode::Strict),
            Err(TreeError::NotUtf8(_))
        ));
        let lenient = FileTree::load(dir.path(), LoadMode::Lenient).unwrap();
        assert!(lenient.is_empty());

        fs::remove_file(dir.path().join("blob.bin")).unwrap();
        fs::write(dir.path().join("dos.txt"), "a\r\nb\r\n").unwrap();
        assert!(matches!(
            FileTree::load(dir.path(), LoadMode::Strict),
            Err(TreeError::CrlfLineEndings(_))
        ));
        let lenient = FileTree::load(dir.path(), LoadMode::Lenient).unwrap();
        assert_eq!(lenient.get("dos.txt"), Some("a\nb\n"));
    }

    #[test]
    fn git_directory_is_skipped() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir(dir.path().join(".git")).unwrap();
        fs::write(dir.path().join(".git/HEAD"), "ref: refs/heads/main\n").unwrap();
        fs::write(dir.path().join("README.md"), "# x\n").unwrap();
        let t = FileTree::load(dir.path(), LoadMode::Strict).unwrap();
        assert_eq!(t.len(), 1);
        assert!(t.contains("README.md"));
    }

    #[test]
    fn load_missing_dir_is_io_error() {
        let err = FileTree::load(Path::new("/definitely/not/here"), LoadMode::Lenient);
        assert!(matches!(err, Err(TreeError::Io { .. })));
    }
}
