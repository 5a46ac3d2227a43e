//! Precision audit: draw a reviewer sample from a corpus report, read the
//! labeled table back, and score per-rule precision and inter-rater
//! agreement.
//!
//! Labels travel as a delimited text table (spreadsheet-friendly) with the
//! columns `fingerprint, repo, rule, reviewer_a, reviewer_b, resolved`;
//! the sample writer adds a read-only `context` column reviewers can keep.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use llmlint_core::RuleId;

use crate::run::CorpusReport;
use crate::CorpusError;

/// One sampled finding for manual review.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleEntry {
    pub fingerprint: String,
    pub repo_id: String,
    pub rule: String,
    /// `path:line snippet` — enough to locate the call without the checkout.
    pub context: String,
}

/// The draw for one rule, in draw order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSample {
    pub rule: String,
    pub entries: Vec<SampleEntry>,
    pub distinct_systems: usize,
    pub pool_size: usize,
    /// Pool exhausted below the entry minimum.
    pub shortfall_entries: bool,
    /// Pool exhausted below the distinct-system minimum.
    pub shortfall_systems: bool,
}

/// A complete audit sample: one [`RuleSample`] per rule, deterministic in
/// `(report, seed, constraints)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditSample {
    pub seed: u64,
    pub per_smell_min: usize,
    pub min_distinct_systems: usize,
    pub per_rule: Vec<RuleSample>,
}

/// Draws the audit sample: per rule, uniform draws without replacement from
/// the finding pool until the sample has at least `per_smell_min` entries
/// spanning at least `min_distinct_systems` repositories, or the pool runs
/// out — in which case the shortfall is flagged, never silently relaxed.
pub fn sample_for_audit(
    report: &CorpusReport,
    seed: u64,
    per_smell_min: usize,
    min_distinct_systems: usize,
) -> AuditSample {
    let per_rule = RuleId::ALL
        .iter()
        .enumerate()
        .map(|(idx, rule)| {
            let mut pool: Vec<SampleEntry> = Vec::new();
            for repo in &report.repos {
                for f in &repo.findings {
                    if f.rule == *rule {
                        pool.push(SampleEntry {
                            fingerprint: f.fingerprint.clone(),
                            repo_id: repo.repo_id.clone(),
                            rule: rule.code().to_string(),
                            context: format!(
                                "{}:{} {}",
                                f.location.path, f.location.line, f.snippet
                            ),
                        });
                    }
                }
            }
            let pool_size = pool.len();
            // One independent, seed-stable stream per rule: a rule's draw
            // sequence does not shift when another rule's pool changes.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(idx as u64);
            let mut entries: Vec<SampleEntry> = Vec::new();
            let mut systems: BTreeSet<String> = BTreeSet::new();
            while !pool.is_empty()
                && !(entries.len() >= per_smell_min && systems.len() >= min_distinct_systems)
            {
                let pick = rng.gen_range(0..pool.len());
                let entry = pool.swap_remove(pick);
                systems.insert(entry.repo_id.clone());
                entries.push(entry);
            }
            RuleSample {
                rule: rule.code().to_string(),
                distinct_systems: systems.len(),
                pool_size,
                shortfall_entries: entries.len() < per_smell_min,
                shortfall_systems: systems.len() < min_distinct_systems,
                entries,
            }
        })
        .collect();
    AuditSample {
        seed,
        per_smell_min,
        min_distinct_systems,
        per_rule,
    }
}

/// The sample as a labeling table: reviewers fill the empty label columns.
pub fn render_sample_csv(sample: &AuditSample) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record([
            "fingerprint",
            "repo",
            "rule",
            "context",
            "reviewer_a",
            "reviewer_b",
            "resolved",
        ])
        .expect("in-memory write cannot fail");
    for rule_sample in &sample.per_rule {
        for entry in &rule_sample.entries {
            writer
                .write_record([
                    entry.fingerprint.as_str(),
                    entry.repo_id.as_str(),
                    entry.rule.as_str(),
                    entry.context.as_str(),
                    "",
                    "",
                    "",
                ])
                .expect("in-memory write cannot fail");
        }
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush cannot fail"))
        .expect("csv output is UTF-8")
}

/// Human summary of the draw, including any shortfalls.
pub fn render_sample_summary(sample: &AuditSample) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "seed {}; target ≥{} findings over ≥{} systems per smell\n",
        sample.seed, sample.per_smell_min, sample.min_distinct_systems
    ));
    for rs in &sample.per_rule {
        let status = if rs.shortfall_entries || rs.shortfall_systems {
            let mut reasons = Vec::new();
            if rs.shortfall_entries {
                reasons.push("entries");
            }
            if rs.shortfall_systems {
                reasons.push("systems");
            }
            format!("SHORTFALL ({})", reasons.join(", "))
        } else {
            "ok".to_string()
        };
        out.push_str(&format!(
            "{:<6} {:>3} drawn of {:>3} in pool, {} systems — {}\n",
            rs.rule,
            rs.entries.len(),
            rs.pool_size,
            rs.distinct_systems,
            status
        ));
    }
    out
}

/// A reviewer verdict on one sampled finding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfLabel {
    Tp,
    Fp,
}

impl TfLabel {
    fn parse(cell: &str) -> Result<Option<TfLabel>, String> {
        match cell.trim().to_ascii_uppercase().as_str() {
            "" => Ok(None),
            "TP" => Ok(Some(TfLabel::Tp)),
            "FP" => Ok(Some(TfLabel::Fp)),
            other => Err(format!("label \"{other}\" is neither TP nor FP")),
        }
    }
}

/// One row of the labeled audit table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelRow {
    pub fingerprint: String,
    pub repo: String,
    pub rule: RuleId,
    pub reviewer_a: Option<TfLabel>,
    pub reviewer_b: Option<TfLabel>,
    pub resolved: Option<TfLabel>,
}

/// Reads a labeled audit table. Unknown columns (like `context`) are
/// ignored; label columns may be absent entirely, which reads as unlabeled.
pub fn parse_labels_csv(text: &str) -> Result<Vec<LabelRow>, CorpusError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CorpusError::Labels(format!("unreadable header: {e}")))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let fingerprint_col = col("fingerprint")
        .ok_or_else(|| CorpusError::Labels("missing column \"fingerprint\"".into()))?;
    let repo_col =
        col("repo").ok_or_else(|| CorpusError::Labels("missing column \"repo\"".into()))?;
    let rule_col =
        col("rule").ok_or_else(|| CorpusError::Labels("missing column \"rule\"".into()))?;
    let reviewer_a_col = col("reviewer_a");
    let reviewer_b_col = col("reviewer_b");
    let resolved_col = col("resolved");

    let mut rows = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let lineno = idx + 2; // header is line 1
        let record = record.map_err(|e| CorpusError::Labels(format!("line {lineno}: {e}")))?;
        let cell = |i: Option<usize>| i.and_then(|i| record.get(i)).unwrap_or("");
        let rule_text = cell(Some(rule_col));
        let rule = RuleId::parse(rule_text).ok_or_else(|| {
            CorpusError::Labels(format!("line {lineno}: unknown rule \"{rule_text}\""))
        })?;
        let label = |i: Option<usize>| {
            TfLabel::parse(cell(i)).map_err(|e| CorpusError::Labels(format!("line {lineno}: {e}")))
        };
        rows.push(LabelRow {
            fingerprint: cell(Some(fingerprint_col)).to_string(),
            repo: cell(Some(repo_col)).to_string(),
            rule,
            reviewer_a: label(reviewer_a_col)?,
            reviewer_b: label(reviewer_b_col)?,
            resolved: label(resolved_col)?,
        });
    }
    Ok(rows)
}

/// Per-rule precision over resolved labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RulePrecision {
    pub tp: usize,
    pub fp: usize,
    /// `100 · tp / (tp + fp)`; absent when the rule has no labeled entries.
    pub pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionReport {
    /// Per rule in table order, every rule present.
    pub per_rule: Vec<(RuleId, RulePrecision)>,
    /// Unweighted mean over rules that have labeled entries.
    pub mean_pct: Option<f64>,
}

/// Computes per-rule and mean precision. Every row must carry a resolved
/// label — an unresolved entry is an audit still in progress, not a zero.
pub fn precision(rows: &[LabelRow]) -> Result<PrecisionReport, CorpusError> {
    let mut tallies: BTreeMap<RuleId, (usize, usize)> = BTreeMap::new();
    for (idx, row) in rows.iter().enumerate() {
        let resolved = row.resolved.ok_or_else(|| {
            CorpusError::Labels(format!(
                "entry {} (fingerprint {}) has no resolved label",
                idx + 1,
                row.fingerprint
            ))
        })?;
        let t = tallies.entry(row.rule).or_insert((0, 0));
        match resolved {
            TfLabel::Tp => t.0 += 1,
            TfLabel::Fp => t.1 += 1,
        }
    }
    let per_rule: Vec<(RuleId, RulePrecision)> = RuleId::ALL
        .iter()
        .map(|rule| {
            let (tp, fp) = tallies.get(rule).copied().unwrap_or((0, 0));
            let pct = (tp + fp > 0).then(|| 100.0 * tp as f64 / (tp + fp) as f64);
            (*rule, RulePrecision { tp, fp, pct })
        })
        .collect();
    let with_data: Vec<f64> = per_rule.iter().filter_map(|(_, p)| p.pct).collect();
    let mean_pct =
        (!with_data.is_empty()).then(|| with_data.iter().sum::<f64>() / with_data.len() as f64);
    Ok(PrecisionReport { per_rule, mean_pct })
}

/// Two-decimal display that never rounds up: the printed mean must not
/// overstate the measured precision it summarizes.
fn trunc2(x: f64) -> f64 {
    (x * 100.0).trunc() / 100.0
}

/// Renders the precision table.
pub fn render_precision(report: &PrecisionReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<6}{:>5}{:>5}  {:>10}\n",
        "rule", "TP", "FP", "precision"
    ));
    for (rule, p) in &report.per_rule {
        let pct = match p.pct {
            Some(v) => format!("{v:.2}%"),
            None => "n/a".to_string(),
        };
        out.push_str(&format!(
            "{:<6}{:>5}{:>5}  {:>10}\n",
            rule.code(),
            p.tp,
            p.fp,
            pct
        ));
    }
    let mean = match report.mean_pct {
        Some(v) => format!("{:.2}%", trunc2(v)),
        None => "n/a".to_string(),
    };
    out.push_str(&format!("{:<6}{:>5}{:>5}  {:>10}\n", "mean", "", "", mean));
    out
}

/// Cohen's κ per rule and pooled, over dual-labeled entries.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaReport {
    pub per_rule: Vec<(RuleId, Option<f64>)>,
    pub overall: Option<f64>,
    pub dual_labeled: usize,
}

/// Chance-corrected agreement over `{TP, FP}` between the two reviewers.
/// Rows missing either reviewer are not used.
pub fn cohen_kappa(rows: &[LabelRow]) -> KappaReport {
    let pairs = |filter: &dyn Fn(&LabelRow) -> bool| -> Vec<(TfLabel, TfLabel)> {
        rows.iter()
            .filter(|r| filter(r))
            .filter_map(|r| Some((r.reviewer_a?, r.reviewer_b?)))
            .collect()
    };
    let all_pairs = pairs(&|_| true);
    let per_rule = RuleId::ALL
        .iter()
        .map(|rule| (*rule, kappa_of(&pairs(&|r: &LabelRow| r.rule == *rule))))
        .collect();
    KappaReport {
        per_rule,
        overall: kappa_of(&all_pairs),
        dual_labeled: all_pairs.len(),
    }
}

/// κ = (p_o − p_e) / (1 − p_e); 1.0 in the degenerate all-same-label case
/// (p_e = 1 forces p_o = 1). Clamped so float error can never leave the
/// theoretical [−1, 1] range.
fn kappa_of(pairs: &[(TfLabel, TfLabel)]) -> Option<f64> {
    if pairs.is_empty() {
        return None;
    }
    let n = pairs.len() as f64;
    let agree = pairs.iter().filter(|(a, b)| a == b).count() as f64;
    let a_tp = pairs.iter().filter(|(a, _)| *a == TfLabel::Tp).count() as f64;
    let b_tp = pairs.iter().filter(|(_, b)| *b == TfLabel::Tp).count() as f64;
    let p_o = agree / n;
    let (pa, pb) = (a_tp / n, b_tp / n);
    let p_e = pa * pb + (1.0 - pa) * (1.0 - pb);
    if (1.0 - p_e).abs() < 1e-12 {
        return Some(1.0);
    }
    Some(((p_o - p_e) / (1.0 - p_e)).clamp(-1.0, 1.0))
}

/// Renders the κ table.
pub fn render_kappa(report: &KappaReport) -> String {
    let fmt = |k: Option<f64>| match k {
        Some(v) => format!("{v:.3}"),
        None => "n/a".to_string(),
    };
    let mut out = String::new();
    out.push_str(&format!("{:<8}{:>8}\n", "rule", "kappa"));
    for (rule, k) in &report.per_rule {
        out.push_str(&format!("{:<8}{:>8}\n", rule.code(), fmt(*k)));
    }
    out.push_str(&format!(
        "{:<8}{:>8}  ({} dual-labeled entries)\n",
        "overall",
        fmt(report.overall),
        report.dual_labeled
    ));
    out
}
