//! Whole-corpus execution: analyze every verified repository under one
//! shared configuration and aggregate per-smell prevalence, density, and
//! co-occurrence in the shape of a per-smell results table.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use llmlint_core::registry::ProviderRegistry;
use llmlint_core::report::REPORT_VERSION;
use llmlint_core::source::{walk_python_files, FileFailure, SourceFile};
use llmlint_core::{analyze_sources, AnalysisOptions, Finding, RuleConfig, RuleId};

use crate::deps::{verify_llm_dependency, DependencyEvidence};
use crate::manifest::ManifestRecord;
use crate::CorpusError;

/// Corpus-run knobs: the shared detector configuration plus denominator
/// policy.
#[derive(Debug, Clone, Default)]
pub struct CorpusConfig {
    pub rules: RuleConfig,
    /// Analyze and count repositories whose dependency files name no LLM
    /// package. Off by default: unverified repositories are recorded but
    /// stay out of every statistic.
    pub include_unverified: bool,
}

/// One repository's slice of a corpus run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepoEntry {
    pub repo_id: String,
    /// Root the repository was analyzed at (as resolved for this run).
    pub root: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stars: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub updated: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    /// A dependency file names a known LLM package.
    pub verified_llm: bool,
    pub evidence: Vec<DependencyEvidence>,
    /// Counted in denominators (verified or `--include-unverified`, and
    /// resolvable on disk). Unincluded repositories are never analyzed.
    pub included: bool,
    /// Why the repository could not be analyzed at all, if it could not be.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed: Option<String>,
    pub files_analyzed: usize,
    pub files_failed: usize,
    pub loc_total: u64,
    pub call_sites: usize,
    pub suppressed: usize,
    /// Finding count per rule code; every rule key is present.
    pub counts: BTreeMap<String, usize>,
    pub findings: Vec<Finding>,
    pub failures: Vec<FileFailure>,
    pub warnings: Vec<String>,
}

/// Aggregates for one smell across the included systems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmellStats {
    pub alert_count: usize,
    pub affected_systems: usize,
    /// `100 · affected / total`, rounded to 2 decimals; absent when no
    /// system is in the denominator.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prevalence_pct: Option<f64>,
    /// Alerts per 1000 analyzed lines, rounded to 2 decimals; absent when
    /// no line was analyzed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density_per_kloc: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportConfig {
    pub rules: Vec<String>,
    pub strict: bool,
    pub nso_mode: String,
    pub umm_split: bool,
    pub include_unverified: bool,
}

/// Co-occurrence matrix over `rules` order; `matrix[i][j]` counts systems
/// where both rules have at least one finding, so the diagonal equals
/// per-rule affected-system counts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Cooccurrence {
    pub rules: Vec<String>,
    pub matrix: Vec<Vec<usize>>,
}

/// The corpus-level result document (JSON on disk, `report_version` 1).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusReport {
    pub report_version: u32,
    pub tool: ToolInfo,
    pub registry_hash: String,
    pub config: ReportConfig,
    /// Systems in the denominators: included and analyzable.
    pub total_systems: usize,
    pub systems_with_any_smell: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overall_prevalence_pct: Option<f64>,
    /// Lines across all analyzed systems (the density denominator).
    pub loc_total: u64,
    pub per_smell: BTreeMap<String, SmellStats>,
    pub cooccurrence: Cooccurrence,
    pub repos: Vec<RepoEntry>,
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Analyzes every repository in the manifest and aggregates the corpus
/// report. Per-repo problems (missing checkout, unparseable files) are
/// recorded on the entry; they never abort the run.
pub fn run_corpus(
    records: &[ManifestRecord],
    manifest_dir: &Path,
    repos_dir: Option<&Path>,
    registry: &ProviderRegistry,
    config: &CorpusConfig,
) -> CorpusReport {
    let mut entries: Vec<RepoEntry> = records
        .par_iter()
        .map(|record| analyze_repo(record, manifest_dir, repos_dir, registry, config))
        .collect();
    entries.sort_by(|a, b| a.repo_id.cmp(&b.repo_id));
    aggregate(entries, registry, config)
}

fn analyze_repo(
    record: &ManifestRecord,
    manifest_dir: &Path,
    repos_dir: Option<&Path>,
    registry: &ProviderRegistry,
    config: &CorpusConfig,
) -> RepoEntry {
    let mut entry = RepoEntry {
        repo_id: record.repo_id.clone(),
        root: String::new(),
        stars: record.stars,
        updated: record.updated.clone(),
        source: record.source.clone(),
        verified_llm: false,
        evidence: Vec::new(),
        included: false,
        failed: None,
        files_analyzed: 0,
        files_failed: 0,
        loc_total: 0,
        call_sites: 0,
        suppressed: 0,
        counts: RuleId::ALL
            .iter()
            .map(|r| (r.code().to_string(), 0))
            .collect(),
        findings: Vec::new(),
        failures: Vec::new(),
        warnings: Vec::new(),
    };

    let root = match resolve_root(record, manifest_dir, repos_dir) {
        Ok(root) => root,
        Err(reason) => {
            entry.failed = Some(reason);
            return entry;
        }
    };
    entry.root = root.to_string_lossy().to_string();

    let verify = verify_llm_dependency(&root);
    entry.verified_llm = verify.verified;
    entry.evidence = verify.evidence;
    entry.warnings.extend(verify.warnings);
    entry.included = verify.verified || config.include_unverified;
    if !entry.included {
        return entry;
    }

    // Findings are keyed by repo-relative display paths so reports and
    // fingerprints do not depend on where the corpus happens to be checked
    // out.
    let mut files = Vec::new();
    for rel in walk_python_files(&root) {
        let display = format!(
            "{}/{}",
            record.repo_id,
            rel.to_string_lossy().replace('\\', "/")
        );
        match SourceFile::read(&root.join(&rel), &display) {
            Ok(f) => files.push(f),
            Err(e) => entry.failures.push(e),
        }
    }
    let options = AnalysisOptions {
        rules: config.rules.clone(),
    };
    let outcome = analyze_sources(files, registry, &options);
    entry.files_analyzed = outcome.files_analyzed;
    entry.loc_total = outcome.loc_total;
    entry.call_sites = outcome.call_sites;
    entry.suppressed = outcome.suppressed;
    entry.warnings.extend(outcome.warnings);
    entry.failures.extend(outcome.failures);
    entry
        .failures
        .sort_by(|a, b| (&a.path, a.line).cmp(&(&b.path, b.line)));
    entry.files_failed = entry.failures.len();
    for f in &outcome.findings {
        *entry
            .counts
            .get_mut(f.rule.code())
            .expect("all rule keys preseeded") += 1;
    }
    entry.findings = outcome.findings;
    entry
}

fn resolve_root(
    record: &ManifestRecord,
    manifest_dir: &Path,
    repos_dir: Option<&Path>,
) -> Result<PathBuf, String> {
    if record.is_url() {
        let Some(dir) = repos_dir else {
            return Err("remote location but no checkout directory given; pass --repos-dir".into());
        };
        let path = dir.join(&record.repo_id);
        if path.is_dir() {
            Ok(path)
        } else {
            Err(format!(
                "checkout {} not found; run `corpus materialize` first",
                path.display()
            ))
        }
    } else {
        let raw = Path::new(&record.location);
        let path = if raw.is_absolute() {
            raw.to_path_buf()
        } else {
            manifest_dir.join(raw)
        };
        if path.is_dir() {
            Ok(path)
        } else {
            Err(format!("local path {} does not exist", path.display()))
        }
    }
}

fn aggregate(
    entries: Vec<RepoEntry>,
    registry: &ProviderRegistry,
    config: &CorpusConfig,
) -> CorpusReport {
    let counted: Vec<&RepoEntry> = entries
        .iter()
        .filter(|e| e.included && e.failed.is_none())
        .collect();
    let total = counted.len();
    let loc_total: u64 = counted.iter().map(|e| e.loc_total).sum();

    let mut per_smell = BTreeMap::new();
    for rule in RuleId::ALL {
        let code = rule.code();
        let alert_count: usize = counted.iter().map(|e| e.counts[code]).sum();
        let affected = counted.iter().filter(|e| e.counts[code] > 0).count();
        per_smell.insert(
            code.to_string(),
            SmellStats {
                alert_count,
                affected_systems: affected,
                prevalence_pct: (total > 0).then(|| round2(100.0 * affected as f64 / total as f64)),
                density_per_kloc: (loc_total > 0)
                    .then(|| round2(1000.0 * alert_count as f64 / loc_total as f64)),
            },
        );
    }

    let codes: Vec<String> = RuleId::ALL.iter().map(|r| r.code().to_string()).collect();
    let matrix: Vec<Vec<usize>> = codes
        .iter()
        .map(|ri| {
            codes
                .iter()
                .map(|rj| {
                    counted
                        .iter()
                        .filter(|e| e.counts[ri.as_str()] > 0 && e.counts[rj.as_str()] > 0)
                        .count()
                })
                .collect()
        })
        .collect();

    let with_any = counted
        .iter()
        .filter(|e| e.counts.values().any(|&c| c > 0))
        .count();

    CorpusReport {
        report_version: REPORT_VERSION,
        tool: ToolInfo {
            name: "llmlint".into(),
            version: llmlint_core::report::TOOL_VERSION.into(),
        },
        registry_hash: registry.content_hash().to_string(),
        config: ReportConfig {
            rules: {
                let mut rules: Vec<String> = config
                    .rules
                    .enabled
                    .iter()
                    .map(|r| r.code().to_string())
                    .collect();
                rules.sort();
                rules
            },
            strict: config.rules.strict,
            nso_mode: config.rules.nso_mode.name().to_string(),
            umm_split: config.rules.umm_split,
            include_unverified: config.include_unverified,
        },
        total_systems: total,
        systems_with_any_smell: with_any,
        overall_prevalence_pct: (total > 0).then(|| round2(100.0 * with_any as f64 / total as f64)),
        loc_total,
        per_smell,
        cooccurrence: Cooccurrence {
            rules: codes,
            matrix,
        },
        repos: entries,
    }
}

/// Serializes a corpus report (stable keys, trailing newline).
pub fn render_corpus_report(report: &CorpusReport) -> String {
    serde_json::to_string_pretty(report).expect("corpus report serialization cannot fail") + "\n"
}

/// Loads a corpus report produced by [`render_corpus_report`].
pub fn parse_corpus_report(text: &str) -> Result<CorpusReport, CorpusError> {
    let report: CorpusReport = serde_json::from_str(text)
        .map_err(|e| CorpusError::Report(format!("not a corpus report: {e}")))?;
    if report.report_version != REPORT_VERSION {
        return Err(CorpusError::Report(format!(
            "report_version {} is not supported (expected {REPORT_VERSION})",
            report.report_version
        )));
    }
    Ok(report)
}

fn fmt_stat(value: Option<f64>, suffix: &str) -> String {
    match value {
        Some(v) => format!("{v:.2}{suffix}"),
        None => "n/a".to_string(),
    }
}

/// Renders the per-smell results table plus the co-occurrence matrix.
pub fn render_stats(report: &CorpusReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<8}{:>8}  {:>10}  {:>11}  {:>13}\n",
        "smell", "alerts", "affected", "prevalence", "density/kloc"
    ));
    let mut total_alerts = 0usize;
    for rule in RuleId::ALL {
        let stats = &report.per_smell[rule.code()];
        total_alerts += stats.alert_count;
        out.push_str(&format!(
            "{:<8}{:>8}  {:>10}  {:>11}  {:>13}\n",
            rule.code(),
            stats.alert_count,
            format!("{}/{}", stats.affected_systems, report.total_systems),
            fmt_stat(stats.prevalence_pct, "%"),
            fmt_stat(stats.density_per_kloc, ""),
        ));
    }
    let overall_density = (report.loc_total > 0)
        .then(|| round2(1000.0 * total_alerts as f64 / report.loc_total as f64));
    out.push_str(&format!(
        "{:<8}{:>8}  {:>10}  {:>11}  {:>13}\n",
        "overall",
        total_alerts,
        format!("{}/{}", report.systems_with_any_smell, report.total_systems),
        fmt_stat(report.overall_prevalence_pct, "%"),
        fmt_stat(overall_density, ""),
    ));

    out.push_str("\nco-occurrence (systems where both smells appear)\n");
    out.push_str(&format!("{:<8}", ""));
    for code in &report.cooccurrence.rules {
        out.push_str(&format!("{code:>6}"));
    }
    out.push('\n');
    for (i, code) in report.cooccurrence.rules.iter().enumerate() {
        out.push_str(&format!("{code:<8}"));
        for cell in &report.cooccurrence.matrix[i] {
            out.push_str(&format!("{cell:>6}"));
        }
        out.push('\n');
    }

    let in_manifest = report.repos.len();
    let unverified = report
        .repos
        .iter()
        .filter(|e| !e.verified_llm && e.failed.is_none())
        .count();
    let failed = report.repos.iter().filter(|e| e.failed.is_some()).count();
    out.push_str(&format!(
        "\nsystems: {} analyzed ({} in manifest, {} unverified, {} failed), {} LOC\n",
        report.total_systems, in_manifest, unverified, failed, report.loc_total
    ));
    out
}
