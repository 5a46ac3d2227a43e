//! File- and tree-level orchestration: read sources, parse, run the
//! detectors, and merge per-file results into one deterministic outcome.

use std::io;
use std::path::Path;

use rayon::prelude::*;

use crate::registry::ProviderRegistry;
use crate::report::Finding;
use crate::rules::{run_rules, RuleConfig};
use crate::source::{parse_file, walk_python_files, FileFailure, SourceFile};

/// Analysis knobs beyond the registry itself.
#[derive(Debug, Clone, Default)]
pub struct AnalysisOptions {
    pub rules: RuleConfig,
}

/// Merged result of analyzing a set of files.
#[derive(Debug, Clone, Default)]
pub struct AnalysisOutcome {
    /// All findings, sorted by (path, line, column, rule, sub-code).
    pub findings: Vec<Finding>,
    /// Files that could not be read or parsed; never fatal to the run.
    pub failures: Vec<FileFailure>,
    /// Files successfully parsed and analyzed.
    pub files_analyzed: usize,
    /// Total countable lines across analyzed (parsed) files.
    pub loc_total: u64,
    /// Matched LLM call sites across analyzed files.
    pub call_sites: usize,
    /// Findings removed by inline suppression comments.
    pub suppressed: usize,
    /// Diagnostics such as malformed suppression comments.
    pub warnings: Vec<String>,
}

impl AnalysisOutcome {
    /// Files attempted: analyzed plus failed.
    pub fn files_scanned(&self) -> usize {
        self.files_analyzed + self.failures.len()
    }

    fn absorb(&mut self, other: AnalysisOutcome) {
        self.findings.extend(other.findings);
        self.failures.extend(other.failures);
        self.files_analyzed += other.files_analyzed;
        self.loc_total += other.loc_total;
        self.call_sites += other.call_sites;
        self.suppressed += other.suppressed;
        self.warnings.extend(other.warnings);
    }

    fn finalize(mut self) -> Self {
        self.findings.sort_by_key(Finding::sort_key);
        self.failures
            .sort_by(|a, b| (&a.path, a.line).cmp(&(&b.path, b.line)));
        self.warnings.sort();
        self
    }
}

/// Analyzes in-memory sources. Files run in parallel; the merge is
/// deterministic regardless of scheduling.
pub fn analyze_sources(
    files: Vec<SourceFile>,
    registry: &ProviderRegistry,
    options: &AnalysisOptions,
) -> AnalysisOutcome {
    let per_file: Vec<AnalysisOutcome> = files
        .into_par_iter()
        .map(|file| analyze_one(file, registry, options))
        .collect();
    let mut merged = AnalysisOutcome::default();
    for outcome in per_file {
        merged.absorb(outcome);
    }
    merged.finalize()
}

/// Analyzes one path: a single file as given, or a directory tree of
/// `.py` files (virtualenvs, caches, and VCS directories skipped).
pub fn analyze_path(
    root: &Path,
    registry: &ProviderRegistry,
    options: &AnalysisOptions,
) -> io::Result<AnalysisOutcome> {
    analyze_paths(std::slice::from_ref(&root.to_path_buf()), registry, options)
}

/// Analyzes several paths and merges the results. Display paths (and thus
/// fingerprints) are the paths as given joined with each file's position in
/// the tree, so runs are comparable when invoked the same way.
pub fn analyze_paths(
    roots: &[std::path::PathBuf],
    registry: &ProviderRegistry,
    options: &AnalysisOptions,
) -> io::Result<AnalysisOutcome> {
    let mut files = Vec::new();
    let mut failures = Vec::new();

    for root in roots {
        if root.is_file() {
            let display = root.to_string_lossy().to_string();
            match SourceFile::read(root, &display) {
                Ok(f) => files.push(f),
                Err(e) => failures.push(e),
            }
        } else if root.is_dir() {
            for rel in walk_python_files(root) {
                let abs = root.join(&rel);
                let display = abs.to_string_lossy().to_string();
                match SourceFile::read(&abs, &display) {
                    Ok(f) => files.push(f),
                    Err(e) => failures.push(e),
                }
            }
        } else {
            return Err(io::Error::new(
                io::ErrorKind::NotFound,
                format!("path does not exist: {}", root.display()),
            ));
        }
    }

    let mut outcome = analyze_sources(files, registry, options);
    outcome.failures.extend(failures);
    Ok(outcome.finalize())
}

fn analyze_one(
    file: SourceFile,
    registry: &ProviderRegistry,
    options: &AnalysisOptions,
) -> AnalysisOutcome {
    let loc = file.loc;
    match parse_file(file) {
        Ok(model) => {
            let rules = run_rules(&model, registry, &options.rules);
            AnalysisOutcome {
                findings: rules.findings,
                failures: Vec::new(),
                files_analyzed: 1,
                loc_total: loc,
                call_sites: rules.call_sites,
                suppressed: rules.suppressed,
                warnings: rules.warnings,
            }
        }
        Err(failure) => AnalysisOutcome {
            failures: vec![failure],
            ..AnalysisOutcome::default()
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::RuleId;
    use crate::source::FailureKind;
    use std::fs;

    const SMELLY: &str = "\
import openai
r = openai.chat.completions.create(model=\"gpt-4o\", messages=[{\"role\": \"user\", \"content\": \"x\"}])
";
    const CLEAN: &str = "\
import openai
r = openai.chat.completions.create(
    model=\"gpt-4o-2024-11-20\",
    messages=[{\"role\": \"system\", \"content\": \"s\"}, {\"role\": \"user\", \"content\": \"x\"}],
    max_tokens=128,
    timeout=15,
    max_retries=2,
    temperature=0.3,
)
";

    fn registry() -> ProviderRegistry {
        ProviderRegistry::builtin()
    }

    #[test]
    fn analyzes_in_memory_sources() {
        let files = vec![
            SourceFile::new("a/smelly.py", SMELLY),
            SourceFile::new("b/clean.py", CLEAN),
        ];
        let outcome = analyze_sources(files, &registry(), &AnalysisOptions::default());
        assert_eq!(outcome.files_analyzed, 2);
        assert!(outcome.failures.is_empty());
        assert!(outcome
            .findings
            .iter()
            .all(|f| f.location.path == "a/smelly.py"));
        assert_eq!(outcome.call_sites, 2);
        assert!(outcome.loc_total > 0);
    }

    #[test]
    fn walks_a_directory_tree() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir_all(dir.path().join("pkg")).unwrap();
        fs::create_dir_all(dir.path().join("venv/lib")).unwrap();
        fs::write(dir.path().join("pkg/app.py"), SMELLY).unwrap();
        fs::write(dir.path().join("clean.py"), CLEAN).unwrap();
        fs::write(dir.path().join("venv/lib/ignored.py"), SMELLY).unwrap();
        fs::write(dir.path().join("notes.txt"), "not python").unwrap();

        let outcome = analyze_path(dir.path(), &registry(), &AnalysisOptions::default()).unwrap();
        assert_eq!(outcome.files_analyzed, 2);
        assert!(!outcome.findings.is_empty());
        assert!(outcome
            .findings
            .iter()
            .all(|f| f.location.path.ends_with("pkg/app.py")));
    }

    #[test]
    fn parse_failure_is_recorded_not_fatal() {
        let files = vec![
            SourceFile::new("bad.py", "def broken(:\n"),
            SourceFile::new("smelly.py", SMELLY),
        ];
        let outcome = analyze_sources(files, &registry(), &AnalysisOptions::default());
        assert_eq!(outcome.files_analyzed, 1);
        assert_eq!(outcome.failures.len(), 1);
        assert_eq!(outcome.failures[0].kind, FailureKind::Parse);
        assert!(!outcome.findings.is_empty());
        // Failed files contribute no countable lines.
        assert_eq!(outcome.loc_total, 2);
    }

    #[test]
    fn missing_root_is_an_operational_error() {
        let err = analyze_path(
            Path::new("/nonexistent/llmlint-test"),
            &registry(),
            &AnalysisOptions::default(),
        )
        .unwrap_err();
        assert_eq!(err.kind(), io::ErrorKind::NotFound);
    }

    #[test]
    fn single_file_path_is_analyzed_as_given() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("one.py");
        fs::write(&file, SMELLY).unwrap();
        let outcome = analyze_path(&file, &registry(), &AnalysisOptions::default()).unwrap();
        assert_eq!(outcome.files_analyzed, 1);
        assert!(outcome.findings[0].location.path.ends_with("one.py"));
    }

    #[test]
    fn outcome_is_deterministic_across_runs() {
        let files = || {
            vec![
                SourceFile::new("a.py", SMELLY),
                SourceFile::new("b.py", CLEAN),
                SourceFile::new("c.py", SMELLY),
            ]
        };
        let a = analyze_sources(files(), &registry(), &AnalysisOptions::default());
        let b = analyze_sources(files(), &registry(), &AnalysisOptions::default());
        assert_eq!(a.findings, b.findings);
        assert_eq!(a.loc_total, b.loc_total);
    }

    #[test]
    fn non_utf8_file_is_an_encoding_failure() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("latin.py");
        fs::write(&file, [0x78, 0x20, 0x3d, 0x20, 0xff, 0xfe]).unwrap();
        let outcome = analyze_path(&file, &registry(), &AnalysisOptions::default()).unwrap();
        assert_eq!(outcome.failures.len(), 1);
        assert_eq!(outcome.failures[0].kind, FailureKind::Encoding);
    }

    #[test]
    fn rule_filter_limits_output() {
        let options = AnalysisOptions {
            rules: RuleConfig {
                enabled: [RuleId::Nmvp].into_iter().collect(),
                ..RuleConfig::default()
            },
        };
        let outcome = analyze_sources(vec![SourceFile::new("a.py", SMELLY)], &registry(), &options);
        assert!(!outcome.findings.is_empty());
        assert!(outcome.findings.iter().all(|f| f.rule == RuleId::Nmvp));
    }
}
