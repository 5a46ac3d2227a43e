//! Turns a manifest into analyzable working trees: local paths are used in
//! place, remote URLs are shallow-cloned into a destination directory keyed
//! by repository id. Already-present clones are reused, so reruns are cheap.

use std::path::{Path, PathBuf};
use std::process::Command;

use crate::manifest::ManifestRecord;
use crate::CorpusError;

/// How a repository's working tree came to exist (or failed to).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepoAction {
    /// The manifest pointed at a local directory.
    Local,
    /// A previous run already cloned it.
    Reused,
    /// Cloned in this run.
    Cloned,
    /// No working tree; see `error`.
    Failed,
}

/// One manifest record resolved to a working tree on disk.
#[derive(Debug, Clone)]
pub struct MaterializedRepo {
    pub repo_id: String,
    pub root: PathBuf,
    pub action: RepoAction,
    pub error: Option<String>,
}

impl MaterializedRepo {
    pub fn ok(&self) -> bool {
        self.action != RepoAction::Failed
    }
}

/// Resolves every record to a directory under `dest` (remote) or its own
/// path (local). One repository failing never aborts the rest — the failure
/// is recorded and the run moves on.
pub fn materialize(
    records: &[ManifestRecord],
    manifest_dir: &Path,
    dest: &Path,
) -> Result<Vec<MaterializedRepo>, CorpusError> {
    std::fs::create_dir_all(dest)?;
    let mut out = Vec::with_capacity(records.len());
    for record in records {
        out.push(materialize_one(record, manifest_dir, dest));
    }
    Ok(out)
}

fn materialize_one(record: &ManifestRecord, manifest_dir: &Path, dest: &Path) -> MaterializedRepo {
    if !record.is_url() {
        let root = manifest_dir.join(&record.location);
        return if root.is_dir() {
            MaterializedRepo {
                repo_id: record.repo_id.clone(),
                root,
                action: RepoAction::Local,
                error: None,
            }
        } else {
            MaterializedRepo {
                repo_id: record.repo_id.clone(),
                root,
                action: RepoAction::Failed,
                error: Some("local path is not a directory".into()),
            }
        };
    }

    let root = dest.join(&record.repo_id);
    if root.is_dir() {
        return MaterializedRepo {
            repo_id: record.repo_id.clone(),
            root,
            action: RepoAction::Reused,
            error: None,
        };
    }
    match clone_shallow(&record.location, &root) {
        Ok(()) => MaterializedRepo {
            repo_id: record.repo_id.clone(),
            root,
            action: RepoAction::Cloned,
            error: None,
        },
        Err(message) => MaterializedRepo {
            repo_id: record.repo_id.clone(),
            root,
            action: RepoAction::Failed,
            error: Some(message),
        },
    }
}

fn clone_shallow(url: &str, dest: &Path) -> Result<(), String> {
    let output = Command::new("git")
        .arg("clone")
        .arg("--depth")
        .arg("1")
        .arg("--quiet")
        .arg(url)
        .arg(dest)
        // Never sit waiting for credentials on a private or dead URL.
        .env("GIT_TERMINAL_PROMPT", "0")
        .output()
        .map_err(|e| format!("could not run git: {e}"))?;
    if output.status.success() {
        return Ok(());
    }
    let stderr = String::from_utf8_lossy(&output.stderr);
    let detail = stderr
        .lines()
        .find(|l| !l.trim().is_empty())
        .unwrap_or("git clone failed");
    Err(detail.trim().to_string())
}
