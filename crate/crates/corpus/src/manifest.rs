//! Corpus manifests: newline-delimited records, one repository per line.
//!
//! ```text
//! # repo_id   location                                key=value metadata
//! alpha       repos/alpha                             stars=120 updated=2025-04-01T12:00:00Z
//! bravo       https://github.com/acme/bravo.git       stars=88  source=github:openai
//! ```
//!
//! `location` is either a clone URL or a local path resolved against the
//! manifest file's directory. Metadata keys are `stars` (integer), `updated`
//! (ISO-8601 timestamp), and `source` (free-form provenance tag). Blank
//! lines and `#` comments are skipped.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::CorpusError;

/// One manifest line: a repository and where to get it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub repo_id: String,
    /// Clone URL or local path (relative paths are interpreted against the
    /// manifest's directory).
    pub location: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stars: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub updated: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl ManifestRecord {
    /// True when `location` must be cloned rather than read off disk.
    pub fn is_url(&self) -> bool {
        let l = self.location.as_str();
        l.starts_with("http://")
            || l.starts_with("https://")
            || l.starts_with("ssh://")
            || l.starts_with("file://")
            || l.starts_with("git@")
    }
}

/// Parses a manifest document. Repo ids must be unique; metadata keys must
/// be known; malformed lines are errors, not warnings — a corpus run should
/// never silently drop a repository.
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestRecord>, CorpusError> {
    let mut records = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = idx + 1;
        let mut fields = line.split_whitespace();
        let repo_id = fields.next().expect("non-empty line has a first field");
        let location = fields.next().ok_or_else(|| {
            CorpusError::Manifest(format!(
                "line {lineno}: expected `repo_id location [key=value…]`"
            ))
        })?;
        if !seen.insert(repo_id.to_string()) {
            return Err(CorpusError::Manifest(format!(
                "line {lineno}: duplicate repo id \"{repo_id}\""
            )));
        }
        let mut record = ManifestRecord {
            repo_id: repo_id.to_string(),
            location: location.to_string(),
            stars: None,
            updated: None,
            source: None,
        };
        for meta in fields {
            let (key, value) = meta.split_once('=').ok_or_else(|| {
                CorpusError::Manifest(format!(
                    "line {lineno}: metadata \"{meta}\" is not key=value"
                ))
            })?;
            match key {
                "stars" => {
                    let n = value.parse::<u64>().map_err(|_| {
                        CorpusError::Manifest(format!(
                            "line {lineno}: stars \"{value}\" is not an integer"
                        ))
                    })?;
                    record.stars = Some(n);
                }
                "updated" => record.updated = Some(value.to_string()),
                "source" => record.source = Some(value.to_string()),
                _ => {
                    return Err(CorpusError::Manifest(format!(
                        "line {lineno}: unknown metadata key \"{key}\""
                    )))
                }
            }
        }
        records.push(record);
    }
    Ok(records)
}

/// Renders records back to manifest text (parse∘render is the identity on
/// the record list).
pub fn render_manifest(records: &[ManifestRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&r.repo_id);
        out.push(' ');
        out.push_str(&r.location);
        if let Some(stars) = r.stars {
            out.push_str(&format!(" stars={stars}"));
        }
        if let Some(updated) = &r.updated {
            out.push_str(&format!(" updated={updated}"));
        }
        if let Some(source) = &r.source {
            out.push_str(&format!(" source={source}"));
        }
        out.push('\n');
    }
    out
}

/// Canonical form of a location for overlap detection: URLs are lowercased
/// and stripped of a trailing `/` and `.git`; local paths only of the slash.
pub fn normalize_location(location: &str) -> String {
    let mut l = location.trim_end_matches('/').to_string();
    let is_url = l.starts_with("http://")
        || l.starts_with("https://")
        || l.starts_with("ssh://")
        || l.starts_with("git@");
    if is_url {
        l = l.to_ascii_lowercase();
        if let Some(stripped) = l.strip_suffix(".git") {
            l = stripped.to_string();
        }
    }
    l
}

/// Merges manifests, deduplicating on normalized location. The first
/// occurrence fixes position, id, and location spelling; on conflict the
/// higher star count and the later update timestamp win (ISO-8601 compares
/// lexicographically), and the first non-empty source tag is kept.
pub fn merge_manifests(
    base: Vec<ManifestRecord>,
    extra: Vec<ManifestRecord>,
) -> Vec<ManifestRecord> {
    let mut order: Vec<String> = Vec::new();
    let mut by_loc: BTreeMap<String, ManifestRecord> = BTreeMap::new();
    for record in base.into_iter().chain(extra) {
        let key = normalize_location(&record.location);
        match by_loc.get_mut(&key) {
            None => {
                order.push(key.clone());
                by_loc.insert(key, record);
            }
            Some(existing) => {
                existing.stars = existing.stars.max(record.stars);
                if record.updated > existing.updated {
                    existing.updated = record.updated;
                }
                if existing.source.is_none() {
                    existing.source = record.source;
                }
            }
        }
    }
    order
        .into_iter()
        .map(|key| by_loc.remove(&key).expect("every ordered key was inserted"))
        .collect()
}
