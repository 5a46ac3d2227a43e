//! The `llmlint` executable: analyze Python trees for LLM call-site smells,
//! run corpus studies, draw and score audit samples, fetch repository
//! manifests from GitHub search, and dump the provider registry.
//!
//! Exit codes: 0 = clean, 1 = findings present (analyze only; corpus and
//! audit outputs are reports, not gates), 2 = operational error or bad
//! usage.

use std::io::{IsTerminal as _, Write as _};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use llmlint_core::registry::ProviderRegistry;
use llmlint_core::report::{exit_code, render_json, render_sarif, render_text, Baseline, RunInfo};
use llmlint_core::rules::NsoMode;
use llmlint_core::{analyze_paths, AnalysisOptions, AnalysisOutcome, RuleConfig, RuleId};

use llmlint_corpus::audit::{
    cohen_kappa, parse_labels_csv, precision, render_kappa, render_precision, render_sample_csv,
    render_sample_summary, sample_for_audit,
};
use llmlint_corpus::github::{search_repos, SearchSpec, DEFAULT_KEYWORDS};
use llmlint_corpus::manifest::{parse_manifest, render_manifest};
use llmlint_corpus::materialize::{materialize, RepoAction};
use llmlint_corpus::run::{
    parse_corpus_report, render_corpus_report, render_stats, run_corpus, CorpusConfig,
};

const TOKEN_ENV: &str = "LLMLINT_GITHUB_TOKEN";

#[derive(Parser)]
#[command(
    name = "llmlint",
    version,
    about = "Detect code smells at LLM API call sites in Python code",
    propagate_version = true
)]
struct Cli {
    /// Worker threads for file and repository analysis (default: logical CPUs).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze files or directories and report findings.
    Analyze(AnalyzeArgs),
    /// Corpus studies over a repository manifest.
    #[command(subcommand)]
    Corpus(CorpusCmd),
    /// Audit sampling and reviewer-label scoring.
    #[command(subcommand)]
    Audit(AuditCmd),
    /// Build a manifest from GitHub repository search.
    Fetch(FetchArgs),
    /// Provider registry inspection.
    #[command(subcommand)]
    Registry(RegistryCmd),
}

/// Detector configuration shared by `analyze` and `corpus run`.
#[derive(Args, Clone)]
struct RuleFlags {
    /// Comma-separated rule codes to enable (UMM,NMVP,NSM,NSO,TNES); default all.
    #[arg(long, value_name = "CODES")]
    rules: Option<String>,
    /// Report absence findings on unresolved/unverifiable call sites at LOW
    /// confidence instead of staying silent.
    #[arg(long)]
    strict: bool,
    /// When NSO fires: only with parse-sink evidence, or at every call site.
    #[arg(long, value_enum, default_value_t = NsoModeArg::Evidence)]
    nso_mode: NsoModeArg,
    /// Report one finding per missing bound (token cap, timeout, retries)
    /// instead of one combined UMM finding.
    #[arg(long)]
    umm_split: bool,
    /// Provider registry overrides (TOML), merged over the built-ins.
    #[arg(long, value_name = "FILE")]
    registry: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum NsoModeArg {
    Evidence,
    All,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Files or directories to analyze.
    #[arg(value_name = "PATH", required = true)]
    paths: Vec<PathBuf>,
    #[command(flatten)]
    rule_flags: RuleFlags,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Baseline file of accepted fingerprints to subtract.
    #[arg(long, value_name = "FILE")]
    baseline: Option<PathBuf>,
    /// Write the surviving findings' fingerprints as a new baseline.
    #[arg(long, value_name = "FILE")]
    write_baseline: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Sarif,
}

#[derive(Subcommand)]
enum CorpusCmd {
    /// Analyze every manifest repository and write the corpus report.
    Run(CorpusRunArgs),
    /// Print the per-smell statistics table from a corpus report.
    Stats(CorpusStatsArgs),
    /// Clone the manifest's remote repositories into a directory.
    Materialize(MaterializeArgs),
}

#[derive(Args)]
struct CorpusRunArgs {
    /// Repository manifest (one `repo_id location [key=value…]` per line).
    #[arg(long, value_name = "FILE")]
    manifest: PathBuf,
    /// Directory holding clones of the manifest's remote repositories.
    #[arg(long, value_name = "DIR")]
    repos_dir: Option<PathBuf>,
    /// Write the corpus report JSON here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Also write one per-repository JSON report into this directory.
    #[arg(long, value_name = "DIR")]
    per_repo_dir: Option<PathBuf>,
    /// Analyze and count repositories without a verified LLM dependency.
    #[arg(long)]
    include_unverified: bool,
    #[command(flatten)]
    rule_flags: RuleFlags,
}

#[derive(Args)]
struct CorpusStatsArgs {
    /// Corpus report JSON produced by `corpus run`.
    #[arg(long, value_name = "FILE")]
    report: PathBuf,
}

#[derive(Args)]
struct MaterializeArgs {
    /// Repository manifest to materialize.
    #[arg(long, value_name = "FILE")]
    manifest: PathBuf,
    /// Destination directory for clones.
    #[arg(long, value_name = "DIR")]
    dest: PathBuf,
}

#[derive(Subcommand)]
enum AuditCmd {
    /// Draw a reviewer sample from a corpus report (CSV to stdout or --out).
    Sample(SampleArgs),
    /// Score resolved reviewer labels: per-rule and mean precision.
    Precision(LabelArgs),
    /// Score dual-reviewer agreement: Cohen's kappa per rule and overall.
    Kappa(LabelArgs),
}

#[derive(Args)]
struct SampleArgs {
    /// Corpus report JSON produced by `corpus run`.
    #[arg(long, value_name = "FILE")]
    report: PathBuf,
    /// RNG seed; the same report, seed, and constraints reproduce the
    /// sample byte for byte.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Minimum findings to draw per smell.
    #[arg(long, value_name = "N", default_value_t = 20)]
    per_smell: usize,
    /// Minimum distinct repositories the draw must span per smell.
    #[arg(long, value_name = "N", default_value_t = 5)]
    min_systems: usize,
    /// Write the sample CSV here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LabelArgs {
    /// Labels CSV: fingerprint,repo,rule[,context],reviewer_a,reviewer_b,resolved.
    #[arg(long, value_name = "FILE")]
    labels: PathBuf,
}

#[derive(Args)]
struct FetchArgs {
    /// Comma-separated search keywords.
    #[arg(long, value_name = "WORDS")]
    keywords: Option<String>,
    /// Minimum star count (search filter `stars:>N`).
    #[arg(long, value_name = "N", default_value_t = 20)]
    min_stars: u64,
    /// Maximum repositories in the merged manifest.
    #[arg(long, value_name = "N", default_value_t = 100)]
    limit: usize,
    /// API root (override for GitHub Enterprise or tests).
    #[arg(long, value_name = "URL", default_value = "https://api.github.com")]
    api_base: String,
    /// Write the manifest here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum RegistryCmd {
    /// Print the effective provider registry as TOML.
    Dump {
        /// Overrides file merged over the built-ins before dumping.
        #[arg(long, value_name = "FILE")]
        registry: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // A failure here means a pool already exists (e.g. in tests); the
        // default pool is fine then.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("llmlint: error: {err:#}");
            2
        }
    };
    std::process::exit(code);
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Corpus(CorpusCmd::Run(args)) => cmd_corpus_run(args),
        Command::Corpus(CorpusCmd::Stats(args)) => cmd_corpus_stats(args),
        Command::Corpus(CorpusCmd::Materialize(args)) => cmd_corpus_materialize(args),
        Command::Audit(AuditCmd::Sample(args)) => cmd_audit_sample(args),
        Command::Audit(AuditCmd::Precision(args)) => cmd_audit_precision(args),
        Command::Audit(AuditCmd::Kappa(args)) => cmd_audit_kappa(args),
        Command::Fetch(args) => cmd_fetch(args),
        Command::Registry(RegistryCmd::Dump { registry }) => cmd_registry_dump(registry),
    }
}

fn load_registry(overrides: Option<&Path>) -> Result<ProviderRegistry> {
    match overrides {
        Some(path) => ProviderRegistry::with_overrides_file(path)
            .with_context(|| format!("loading registry overrides from {}", path.display())),
        None => Ok(ProviderRegistry::builtin()),
    }
}

fn parse_rule_codes(spec: &str) -> Result<std::collections::BTreeSet<RuleId>> {
    let mut set = std::collections::BTreeSet::new();
    for code in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let rule = RuleId::parse(code).with_context(|| {
            format!("unknown rule code \"{code}\" (expected UMM, NMVP, NSM, NSO, or TNES)")
        })?;
        set.insert(rule);
    }
    if set.is_empty() {
        bail!("--rules selected no rules");
    }
    Ok(set)
}

fn rule_config(flags: &RuleFlags) -> Result<RuleConfig> {
    let mut config = RuleConfig::default();
    if let Some(spec) = &flags.rules {
        config.enabled = parse_rule_codes(spec)?;
    }
    config.strict = flags.strict;
    config.nso_mode = match flags.nso_mode {
        NsoModeArg::Evidence => NsoMode::Evidence,
        NsoModeArg::All => NsoMode::All,
    };
    config.umm_split = flags.umm_split;
    Ok(config)
}

fn run_info(outcome: &AnalysisOutcome, config: &RuleConfig, baseline_filtered: usize) -> RunInfo {
    RunInfo {
        files_scanned: outcome.files_scanned(),
        files_failed: outcome.failures.len(),
        loc_total: outcome.loc_total,
        suppressed: outcome.suppressed,
        baseline_filtered,
        rules: config
            .enabled
            .iter()
            .map(|r| r.code().to_string())
            .collect(),
        strict: config.strict,
        nso_mode: config.nso_mode.name().to_string(),
        umm_split: config.umm_split,
    }
}

/// Writes to `--out` when given, stdout otherwise.
fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)
                    .with_context(|| format!("creating {}", parent.display()))?;
            }
            std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            // Piping into `head` must not panic the tool.
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(content.as_bytes());
            Ok(())
        }
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<i32> {
    let registry = load_registry(args.rule_flags.registry.as_deref())?;
    let config = rule_config(&args.rule_flags)?;
    let options = AnalysisOptions {
        rules: config.clone(),
    };

    let mut outcome = analyze_paths(&args.paths, &registry, &options).context("analysis failed")?;

    let mut baseline_filtered = 0;
    if let Some(path) = &args.baseline {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading baseline {}", path.display()))?;
        let baseline = Baseline::parse(&text);
        let (kept, filtered) = baseline.subtract(std::mem::take(&mut outcome.findings));
        outcome.findings = kept;
        baseline_filtered = filtered;
    }
    if let Some(path) = &args.write_baseline {
        let baseline = Baseline::from_findings(&outcome.findings);
        std::fs::write(path, baseline.render())
            .with_context(|| format!("writing baseline {}", path.display()))?;
    }

    let run = run_info(&outcome, &config, baseline_filtered);
    let rendered = match args.format {
        Format::Text => {
            let color = args.out.is_none() && color_enabled();
            render_analyze_text(&outcome, baseline_filtered, color)
        }
        Format::Json => render_json(&outcome.findings, &outcome.failures, &registry, &run),
        Format::Sarif => render_sarif(&outcome.findings, &run),
    };
    emit(args.out.as_deref(), &rendered)?;
    Ok(exit_code(outcome.findings.len(), false))
}

/// ANSI color is used only on a terminal, and `NO_COLOR` (non-empty)
/// disables it there too.
fn color_enabled() -> bool {
    std::io::stdout().is_terminal() && !std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty())
}

const YELLOW: &str = "\x1b[33m";
const RED: &str = "\x1b[31m";
const BOLD: &str = "\x1b[1m";
const RESET: &str = "\x1b[0m";

/// Text report: findings, then warnings/failures, then a one-line summary.
fn render_analyze_text(outcome: &AnalysisOutcome, baseline_filtered: usize, color: bool) -> String {
    let mut out = if color {
        let mut lines = String::new();
        for f in &outcome.findings {
            lines.push_str(&format!(
                "{}:{}:{} {YELLOW}{}{RESET} {}\n",
                f.location.path, f.location.line, f.location.column, f.rule, f.message
            ));
        }
        lines
    } else {
        render_text(&outcome.findings)
    };
    let (warn_tag, fail_tag) = if color {
        (
            format!("{YELLOW}warning{RESET}:"),
            format!("{RED}failed{RESET}:"),
        )
    } else {
        ("warning:".to_string(), "failed:".to_string())
    };
    for warning in &outcome.warnings {
        out.push_str(&format!("{warn_tag} {warning}\n"));
    }
    for failure in &outcome.failures {
        out.push_str(&format!(
            "{fail_tag} {}: {}\n",
            failure.path, failure.message
        ));
    }
    let mut summary = format!(
        "{} finding(s) in {} file(s)",
        outcome.findings.len(),
        outcome.files_scanned()
    );
    if outcome.suppressed > 0 {
        summary.push_str(&format!(", {} suppressed", outcome.suppressed));
    }
    if baseline_filtered > 0 {
        summary.push_str(&format!(", {baseline_filtered} baselined"));
    }
    if !outcome.failures.is_empty() {
        summary.push_str(&format!(", {} failed", outcome.failures.len()));
    }
    if color {
        out.push_str(&format!("{BOLD}{summary}{RESET}"));
    } else {
        out.push_str(&summary);
    }
    out.push('\n');
    out
}

fn read_manifest(path: &Path) -> Result<Vec<llmlint_corpus::ManifestRecord>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading manifest {}", path.display()))?;
    Ok(parse_manifest(&text)?)
}

fn cmd_corpus_run(args: CorpusRunArgs) -> Result<i32> {
    let registry = load_registry(args.rule_flags.registry.as_deref())?;
    let records = read_manifest(&args.manifest)?;
    let manifest_dir = args
        .manifest
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."))
        .to_path_buf();
    let config = CorpusConfig {
        rules: rule_config(&args.rule_flags)?,
        include_unverified: args.include_unverified,
    };
    let report = run_corpus(
        &records,
        &manifest_dir,
        args.repos_dir.as_deref(),
        &registry,
        &config,
    );

    if let Some(dir) = &args.per_repo_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for repo in &report.repos {
            if !repo.included || repo.failed.is_some() {
                continue;
            }
            let run = RunInfo {
                files_scanned: repo.files_analyzed + repo.files_failed,
                files_failed: repo.files_failed,
                loc_total: repo.loc_total,
                suppressed: repo.suppressed,
                baseline_filtered: 0,
                rules: report.config.rules.clone(),
                strict: report.config.strict,
                nso_mode: report.config.nso_mode.clone(),
                umm_split: report.config.umm_split,
            };
            let doc = render_json(&repo.findings, &repo.failures, &registry, &run);
            std::fs::write(dir.join(format!("{}.json", repo.repo_id)), doc)
                .with_context(|| format!("writing per-repo report for {}", repo.repo_id))?;
        }
    }

    emit(args.out.as_deref(), &render_corpus_report(&report))?;
    Ok(0)
}

fn cmd_corpus_stats(args: CorpusStatsArgs) -> Result<i32> {
    let text = std::fs::read_to_string(&args.report)
        .with_context(|| format!("reading report {}", args.report.display()))?;
    let report = parse_corpus_report(&text)?;
    emit(None, &render_stats(&report))?;
    Ok(0)
}

fn cmd_corpus_materialize(args: MaterializeArgs) -> Result<i32> {
    let records = read_manifest(&args.manifest)?;
    let manifest_dir = args
        .manifest
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."))
        .to_path_buf();
    let repos = materialize(&records, &manifest_dir, &args.dest)?;
    let mut failed = 0;
    let mut lines = String::new();
    for repo in &repos {
        let verb = match repo.action {
            RepoAction::Local => "local",
            RepoAction::Reused => "reused",
            RepoAction::Cloned => "cloned",
            RepoAction::Failed => {
                failed += 1;
                "FAILED"
            }
        };
        lines.push_str(&format!("{:<8} {}", verb, repo.repo_id));
        if let Some(error) = &repo.error {
            lines.push_str(&format!(" ({error})"));
        }
        lines.push('\n');
    }
    lines.push_str(&format!("{} repos, {} failed\n", repos.len(), failed));
    emit(None, &lines)?;
    // Failures are recorded per repo; the command itself succeeded.
    Ok(0)
}

fn cmd_audit_sample(args: SampleArgs) -> Result<i32> {
    let text = std::fs::read_to_string(&args.report)
        .with_context(|| format!("reading report {}", args.report.display()))?;
    let report = parse_corpus_report(&text)?;
    let sample = sample_for_audit(&report, args.seed, args.per_smell, args.min_systems);
    emit(args.out.as_deref(), &render_sample_csv(&sample))?;
    // The summary goes to stderr so the CSV on stdout stays machine-clean.
    eprint!("{}", render_sample_summary(&sample));
    Ok(0)
}

fn read_labels(path: &Path) -> Result<Vec<llmlint_corpus::audit::LabelRow>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading labels {}", path.display()))?;
    Ok(parse_labels_csv(&text)?)
}

fn cmd_audit_precision(args: LabelArgs) -> Result<i32> {
    let rows = read_labels(&args.labels)?;
    let report = precision(&rows)?;
    emit(None, &render_precision(&report))?;
    Ok(0)
}

fn cmd_audit_kappa(args: LabelArgs) -> Result<i32> {
    let rows = read_labels(&args.labels)?;
    let report = cohen_kappa(&rows);
    emit(None, &render_kappa(&report))?;
    Ok(0)
}

fn cmd_fetch(args: FetchArgs) -> Result<i32> {
    let token = std::env::var(TOKEN_ENV)
        .ok()
        .filter(|t| !t.is_empty())
        .with_context(|| format!("no GitHub token; set {TOKEN_ENV}"))?;
    let keywords = match &args.keywords {
        Some(spec) => spec
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect(),
        None => DEFAULT_KEYWORDS.iter().map(|s| s.to_string()).collect(),
    };
    let spec = SearchSpec {
        keywords,
        min_stars: args.min_stars,
        limit: args.limit,
        ..SearchSpec::default()
    };
    let outcome = search_repos(&spec, &token, &args.api_base)?;
    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }
    emit(args.out.as_deref(), &render_manifest(&outcome.records))?;
    eprintln!("{} repositories", outcome.records.len());
    Ok(0)
}

fn cmd_registry_dump(overrides: Option<PathBuf>) -> Result<i32> {
    let registry = load_registry(overrides.as_deref())?;
    emit(None, registry.dump_toml())?;
    Ok(0)
}
