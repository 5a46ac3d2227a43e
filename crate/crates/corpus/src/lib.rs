//! Corpus-study toolkit around the call-site analyzer: manifests of
//! repositories, LLM-dependency verification, whole-corpus prevalence and
//! density statistics, audit sampling with agreement metrics, and GitHub
//! repository acquisition.
//!
//! The pipeline runs in stages, each usable on its own: [`github`] builds a
//! manifest from repository search, [`materialize`] puts the checkouts on
//! disk, [`run`] analyzes every verified repository and aggregates a
//! [`run::CorpusReport`], and [`audit`] draws reviewer samples from that
//! report and scores the returned labels.

pub mod audit;
pub mod deps;
pub mod github;
pub mod manifest;
pub mod materialize;
pub mod run;

pub use audit::{cohen_kappa, parse_labels_csv, precision, sample_for_audit, AuditSample};
pub use deps::{verify_llm_dependency, DependencyEvidence, VerifyResult};
pub use github::{search_repos, SearchOutcome, SearchSpec};
pub use manifest::{merge_manifests, parse_manifest, render_manifest, ManifestRecord};
pub use materialize::{materialize, MaterializedRepo, RepoAction};
pub use run::{render_stats, run_corpus, CorpusConfig, CorpusReport};

use thiserror::Error;

/// Errors across the corpus pipeline. All of them are operational (exit
/// code 2 territory): per-file and per-repo problems inside a run are
/// recorded in the outputs instead of raised.
#[derive(Debug, Error)]
pub enum CorpusError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("labels: {0}")]
    Labels(String),
    #[error("report: {0}")]
    Report(String),
    #[error("search: {0}")]
    Search(String),
    #[error("{0}; supply a GitHub token in LLMLINT_GITHUB_TOKEN")]
    Auth(String),
}
