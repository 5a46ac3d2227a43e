//! Finding model and output handling: rule metadata, stable fingerprints,
//! text/JSON/SARIF rendering, inline suppressions, baselines, exit codes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::registry::ProviderRegistry;
use crate::source::{Comment, FileFailure};

/// Current JSON report schema version.
pub const REPORT_VERSION: u32 = 1;

/// Tool version embedded in reports.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// The five detection rules. The codes are the public contract used in
/// suppression comments, CLI filters, and report output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleId {
    #[serde(rename = "UMM")]
    Umm,
    #[serde(rename = "NMVP")]
    Nmvp,
    #[serde(rename = "NSM")]
    Nsm,
    #[serde(rename = "NSO")]
    Nso,
    #[serde(rename = "TNES")]
    Tnes,
}

impl RuleId {
    pub const ALL: [RuleId; 5] = [
        RuleId::Umm,
        RuleId::Nmvp,
        RuleId::Nsm,
        RuleId::Nso,
        RuleId::Tnes,
    ];

    pub fn code(self) -> &'static str {
        match self {
            RuleId::Umm => "UMM",
            RuleId::Nmvp => "NMVP",
            RuleId::Nsm => "NSM",
            RuleId::Nso => "NSO",
            RuleId::Tnes => "TNES",
        }
    }

    pub fn full_name(self) -> &'static str {
        match self {
            RuleId::Umm => "Unbounded Max Metrics",
            RuleId::Nmvp => "No Model Version Pinning",
            RuleId::Nsm => "No System Message",
            RuleId::Nso => "No Structured Output",
            RuleId::Tnes => "Temperature Not Explicitly Set",
        }
    }

    pub fn parse(s: &str) -> Option<RuleId> {
        match s.trim().to_ascii_uppercase().as_str() {
            "UMM" => Some(RuleId::Umm),
            "NMVP" => Some(RuleId::Nmvp),
            "NSM" => Some(RuleId::Nsm),
            "NSO" => Some(RuleId::Nso),
            "TNES" => Some(RuleId::Tnes),
            _ => None,
        }
    }

    /// What goes wrong when the smell is present.
    pub fn problem(self) -> &'static str {
        match self {
            RuleId::Umm => {
                "Leaving token budgets, timeouts, and retries unbounded undermines \
                 robustness and performance: outputs can exceed context limits or \
                 overload downstream parsers, requests can hang indefinitely, and \
                 shifting provider defaults hurt reproducibility."
            }
            RuleId::Nmvp => {
                "Using only a provider alias removes explicit versioning, so model \
                 weights and behavior can change without notice; runs cannot be tied \
                 to a stable model build and reproducibility degrades."
            }
            RuleId::Nsm => {
                "Without a system message the model lacks high-level guidance, which \
                 reduces consistency and adherence to constraints and makes outputs \
                 more generic and harder to control."
            }
            RuleId::Nso => {
                "Without an enforced output schema the system may receive free-form \
                 text where structured fields are expected, breaking parsers and \
                 downstream steps through schema drift, missing fields, and type \
                 mismatches that pass silently."
            }
            RuleId::Tnes => {
                "Relying on an implicit temperature reduces maintainability and \
                 reliability: defaults differ across providers and models and may \
                 change over time, silently altering behavior."
            }
        }
    }

    /// Fix direction carried into report metadata.
    pub fn solution(self) -> &'static str {
        match self {
            RuleId::Umm => {
                "Always bound and adjust the max output tokens, timeout, and max \
                 retries parameters."
            }
            RuleId::Nmvp => {
                "Always specify an immutable model identifier (a dated snapshot or \
                 pinned revision) and record it with other run metadata."
            }
            RuleId::Nsm => {
                "Always include a clear system message that defines roles, goals, \
                 and constraints; keep task specifics in the user message."
            }
            RuleId::Nso => {
                "Enforce structured output at the API boundary by declaring an \
                 output schema, and validate results to handle refusals or errors."
            }
            RuleId::Tnes => {
                "Always specify the temperature explicitly and document it; tune it \
                 to the task instead of relying on provider defaults."
            }
        }
    }

    /// Quality-effect tags attached informationally to report output.
    pub fn effects(self) -> &'static [&'static str] {
        match self {
            RuleId::Umm => &["robustness", "performance", "maintainability"],
            RuleId::Nmvp => &["maintainability", "reliability"],
            RuleId::Nsm => &["maintainability", "reliability"],
            RuleId::Nso => &["robustness", "reliability"],
            RuleId::Tnes => &["maintainability", "reliability"],
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// How firmly the finding's facts were established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    /// Resolved callee match with fully resolved role values.
    High,
    /// Suffix-tier match, or decisive value reached through a named constant.
    Medium,
    /// Strict-mode escalation of an unresolvable fact.
    Low,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Location {
    pub path: String,
    pub line: u32,
    pub column: u32,
}

/// One smell detection at one call site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub rule: RuleId,
    /// Per-metric code for split UMM findings.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[serde(default)]
    pub sub_code: Option<String>,
    pub provider: String,
    pub location: Location,
    /// One sentence naming the smell plus one remediation clause.
    pub message: String,
    /// Role names and resolved values that were inspected.
    pub evidence: Vec<String>,
    pub confidence: Confidence,
    /// Trimmed source line of the call.
    pub snippet: String,
    /// Stable identity: survives reformatting inside the call and line
    /// shifts elsewhere in the file. Identical calls with identical text in
    /// the same file intentionally share a fingerprint.
    pub fingerprint: String,
}

impl Finding {
    /// Report/sort key: (path, line, column, rule, sub_code).
    pub fn sort_key(&self) -> (String, u32, u32, &'static str, String) {
        (
            self.location.path.clone(),
            self.location.line,
            self.location.column,
            self.rule.code(),
            self.sub_code.clone().unwrap_or_default(),
        )
    }
}

/// Computes a finding's stable identity from reformat-invariant inputs.
pub fn fingerprint(
    rule: RuleId,
    sub_code: Option<&str>,
    rel_path: &str,
    callee_path: &str,
    normalized_call_text: &str,
) -> String {
    let payload = format!(
        "llmlint.v1|{}|{}|{}|{}|{}",
        rule.code(),
        sub_code.unwrap_or(""),
        rel_path,
        callee_path,
        normalized_call_text
    );
    let mut hex = crate::registry::hex_sha256(payload.as_bytes());
    hex.truncate(16);
    hex
}

// --- suppressions ---------------------------------------------------------------

/// A parsed `# llmlint: disable=...` comment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Suppression {
    /// Line the comment starts on (1-based).
    pub line: u32,
    /// `None` means all rules.
    pub rules: Option<BTreeSet<RuleId>>,
}

impl Suppression {
    pub fn matches(&self, finding: &Finding) -> bool {
        let line_hit = finding.location.line == self.line || finding.location.line == self.line + 1;
        if !line_hit {
            return false;
        }
        match &self.rules {
            None => true,
            Some(set) => set.contains(&finding.rule),
        }
    }
}

/// Extracts suppressions from a file's comments. Comments that carry the
/// `llmlint:` marker but do not parse produce a warning and are ignored.
pub fn parse_suppressions(comments: &[Comment]) -> (Vec<Suppression>, Vec<String>) {
    let mut suppressions = Vec::new();
    let mut warnings = Vec::new();
    for c in comments {
        let text = c.text.trim();
        let Some(rest) = text.strip_prefix("llmlint:") else {
            continue;
        };
        let rest = rest.trim();
        let Some(list) = rest.strip_prefix("disable=") else {
            warnings.push(format!(
                "line {}: malformed suppression comment (expected `llmlint: disable=<RULE[,RULE...]|all>`); ignored",
                c.line
            ));
            continue;
        };
        let list = list.trim();
        if list.eq_ignore_ascii_case("all") {
            suppressions.push(Suppression {
                line: c.line,
                rules: None,
            });
            continue;
        }
        let mut rules = BTreeSet::new();
        let mut ok = !list.is_empty();
        for part in list.split(',') {
            match RuleId::parse(part) {
                Some(r) => {
                    rules.insert(r);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            suppressions.push(Suppression {
                line: c.line,
                rules: Some(rules),
            });
        } else {
            warnings.push(format!(
                "line {}: unknown rule in suppression comment `{}`; ignored",
                c.line, text
            ));
        }
    }
    (suppressions, warnings)
}

/// Removes suppressed findings; returns (kept, suppressed_count).
pub fn apply_suppressions(
    findings: Vec<Finding>,
    suppressions: &[Suppression],
) -> (Vec<Finding>, usize) {
    let before = findings.len();
    let kept: Vec<Finding> = findings
        .into_iter()
        .filter(|f| !suppressions.iter().any(|s| s.matches(f)))
        .collect();
    let suppressed = before - kept.len();
    (kept, suppressed)
}

// --- baseline ---------------------------------------------------------------------

/// A set of accepted pre-existing finding fingerprints.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Baseline {
    pub fingerprints: BTreeSet<String>,
}

impl Baseline {
    /// Parses the newline-delimited fingerprint format. Blank lines and
    /// `#` comment lines are tolerated.
    pub fn parse(text: &str) -> Baseline {
        let fingerprints = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect();
        Baseline { fingerprints }
    }

    pub fn from_findings(findings: &[Finding]) -> Baseline {
        Baseline {
            fingerprints: findings.iter().map(|f| f.fingerprint.clone()).collect(),
        }
    }

    /// Renders the on-disk format: sorted, newline-delimited, trailing newline.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for fp in &self.fingerprints {
            out.push_str(fp);
            out.push('\n');
        }
        out
    }

    /// Drops findings whose fingerprint is accepted. Unknown fingerprints in
    /// the baseline are ignored harmlessly; subtraction is idempotent.
    pub fn subtract(&self, findings: Vec<Finding>) -> (Vec<Finding>, usize) {
        let before = findings.len();
        let kept: Vec<Finding> = findings
            .into_iter()
            .filter(|f| !self.fingerprints.contains(&f.fingerprint))
            .collect();
        let filtered = before - kept.len();
        (kept, filtered)
    }
}

// --- rendering ----------------------------------------------------------------------

/// Run-level context carried into JSON/SARIF reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunInfo {
    pub files_scanned: usize,
    pub files_failed: usize,
    pub loc_total: u64,
    pub suppressed: usize,
    pub baseline_filtered: usize,
    /// Enabled rule codes, sorted.
    pub rules: Vec<String>,
    pub strict: bool,
    pub nso_mode: String,
    pub umm_split: bool,
}

/// `path:line:col RULE message`, one line per finding.
pub fn render_text(findings: &[Finding]) -> String {
    let mut out = String::new();
    for f in findings {
        out.push_str(&format!(
            "{}:{}:{} {} {}\n",
            f.location.path, f.location.line, f.location.column, f.rule, f.message
        ));
    }
    out
}

/// Stable-keyed JSON document: run metadata plus the findings array.
/// Round-trips losslessly through [`parse_json_findings`].
pub fn render_json(
    findings: &[Finding],
    failures: &[FileFailure],
    registry: &ProviderRegistry,
    run: &RunInfo,
) -> String {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for rule in RuleId::ALL {
        counts.insert(rule.code(), 0);
    }
    for f in findings {
        *counts.entry(f.rule.code()).or_insert(0) += 1;
    }
    let doc = json!({
        "report_version": REPORT_VERSION,
        "tool": { "name": "llmlint", "version": TOOL_VERSION },
        "registry_hash": registry.content_hash(),
        "config": {
            "rules": run.rules,
            "strict": run.strict,
            "nso_mode": run.nso_mode,
            "umm_split": run.umm_split,
        },
        "summary": {
            "files_scanned": run.files_scanned,
            "files_failed": run.files_failed,
            "loc_total": run.loc_total,
            "findings": findings.len(),
            "suppressed": run.suppressed,
            "baseline_filtered": run.baseline_filtered,
            "counts_by_rule": counts,
        },
        "failures": failures.iter().map(|f| json!({
            "path": f.path,
            "kind": f.kind,
            "line": f.line,
            "column": f.column,
            "message": f.message,
        })).collect::<Vec<_>>(),
        "findings": findings,
    });
    serde_json::to_string_pretty(&doc).expect("report serialization cannot fail") + "\n"
}

/// Reconstructs the findings array from a JSON report document.
pub fn parse_json_findings(text: &str) -> Result<Vec<Finding>, serde_json::Error> {
    let doc: Value = serde_json::from_str(text)?;
    serde_json::from_value(doc["findings"].clone())
}

/// Valid SARIF 2.1.0: one reportingDescriptor per rule carrying the
/// problem/solution text and quality-effect tags; one result per finding.
pub fn render_sarif(findings: &[Finding], run: &RunInfo) -> String {
    let rules: Vec<Value> = RuleId::ALL
        .iter()
        .map(|r| {
            json!({
                "id": r.code(),
                "name": r.full_name().replace(' ', ""),
                "shortDescription": { "text": r.full_name() },
                "fullDescription": { "text": r.problem() },
                "help": { "text": r.solution() },
                "helpUri": "https://example.invalid/llmlint/rules",
                "defaultConfiguration": { "level": "warning" },
                "properties": { "tags": r.effects() }
            })
        })
        .collect();
    let rule_index: BTreeMap<&str, usize> = RuleId::ALL
        .iter()
        .enumerate()
        .map(|(i, r)| (r.code(), i))
        .collect();

    let results: Vec<Value> = findings
        .iter()
        .map(|f| {
            let mut properties = serde_json::Map::new();
            properties.insert("provider".into(), json!(f.provider));
            properties.insert("confidence".into(), json!(f.confidence));
            properties.insert("evidence".into(), json!(f.evidence));
            if let Some(sub) = &f.sub_code {
                properties.insert("subCode".into(), json!(sub));
            }
            json!({
                "ruleId": f.rule.code(),
                "ruleIndex": rule_index[f.rule.code()],
                "level": "warning",
                "message": { "text": f.message },
                "locations": [{
                    "physicalLocation": {
                        "artifactLocation": { "uri": f.location.path },
                        "region": {
                            "startLine": f.location.line,
                            "startColumn": f.location.column,
                            "snippet": { "text": f.snippet }
                        }
                    }
                }],
                "partialFingerprints": { "llmlint/v1": f.fingerprint },
                "properties": Value::Object(properties)
            })
        })
        .collect();

    let doc = json!({
        "$schema": "https://json.schemastore.org/sarif-2.1.0.json",
        "version": "2.1.0",
        "runs": [{
            "tool": {
                "driver": {
                    "name": "llmlint",
                    "version": TOOL_VERSION,
                    "informationUri": "https://example.invalid/llmlint",
                    "rules": rules
                }
            },
            "columnKind": "unicodeCodePoints",
            "properties": {
                "filesScanned": run.files_scanned,
                "filesFailed": run.files_failed,
                "suppressed": run.suppressed
            },
            "results": results
        }]
    });
    serde_json::to_string_pretty(&doc).expect("report serialization cannot fail") + "\n"
}

/// 0 = clean, 1 = findings present, 2 = operational error. Per-file parse
/// failures are not operational errors and never raise the code above 1.
pub fn exit_code(finding_count: usize, operational_error: bool) -> i32 {
    if operational_error {
        2
    } else if finding_count > 0 {
        1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_finding(rule: RuleId, line: u32) -> Finding {
        Finding {
            rule,
            sub_code: None,
            provider: "openai".to_string(),
            location: Location {
                path: "app/main.py".to_string(),
                line,
                column: 5,
            },
            message: "test message; fix it.".to_string(),
            evidence: vec!["temperature: absent".to_string()],
            confidence: Confidence::High,
            snippet: "client.chat.completions.create(...)".to_string(),
            fingerprint: fingerprint(
                rule,
                None,
                "app/main.py",
                "openai.OpenAI().chat.completions.create",
                "create(model=\"gpt-4o\")",
            ),
        }
    }

    #[test]
    fn fingerprint_ignores_whitespace_and_lines() {
        let a = fingerprint(
            RuleId::Tnes,
            None,
            "a.py",
            "c",
            "create(model=\"x\",messages=[])",
        );
        let b = fingerprint(
            RuleId::Tnes,
            None,
            "a.py",
            "c",
            "create(model=\"x\",messages=[])",
        );
        assert_eq!(a, b);
        assert_eq!(a.len(), 16);
        let c = fingerprint(
            RuleId::Umm,
            None,
            "a.py",
            "c",
            "create(model=\"x\",messages=[])",
        );
        assert_ne!(a, c);
    }

    #[test]
    fn suppression_parses_single_rule() {
        let comments = vec![Comment {
            line: 4,
            text: " llmlint: disable=TNES".to_string(),
        }];
        let (sups, warnings) = parse_suppressions(&comments);
        assert!(warnings.is_empty());
        assert_eq!(sups.len(), 1);
        assert_eq!(
            sups[0].rules,
            Some([RuleId::Tnes].into_iter().collect::<BTreeSet<_>>())
        );
    }

    #[test]
    fn suppression_parses_list_and_all() {
        let comments = vec![
            Comment {
                line: 1,
                text: " llmlint: disable=UMM,NSO".to_string(),
            },
            Comment {
                line: 9,
                text: " llmlint: disable=all".to_string(),
            },
        ];
        let (sups, warnings) = parse_suppressions(&comments);
        assert!(warnings.is_empty());
        assert_eq!(sups[0].rules.as_ref().unwrap().len(), 2);
        assert_eq!(sups[1].rules, None);
    }

    #[test]
    fn malformed_suppression_warns_and_is_ignored() {
        let comments = vec![
            Comment {
                line: 2,
                text: " llmlint: disable=BOGUS".to_string(),
            },
            Comment {
                line: 3,
                text: " llmlint: enable=TNES".to_string(),
            },
            Comment {
                line: 4,
                text: " just a comment".to_string(),
            },
        ];
        let (sups, warnings) = parse_suppressions(&comments);
        assert!(sups.is_empty());
        assert_eq!(warnings.len(), 2);
    }

    #[test]
    fn suppression_covers_same_and_next_line() {
        let sup = Suppression {
            line: 10,
            rules: Some([RuleId::Tnes].into_iter().collect()),
        };
        assert!(sup.matches(&sample_finding(RuleId::Tnes, 10)));
        assert!(sup.matches(&sample_finding(RuleId::Tnes, 11)));
        assert!(!sup.matches(&sample_finding(RuleId::Tnes, 12)));
        assert!(!sup.matches(&sample_finding(RuleId::Nsm, 10)));
    }

    #[test]
    fn apply_suppressions_counts_removals() {
        let sup = Suppression {
            line: 10,
            rules: None,
        };
        let findings = vec![
            sample_finding(RuleId::Tnes, 10),
            sample_finding(RuleId::Umm, 11),
            sample_finding(RuleId::Nsm, 20),
        ];
        let (kept, suppressed) = apply_suppressions(findings, &[sup]);
        assert_eq!(kept.len(), 1);
        assert_eq!(suppressed, 2);
        assert_eq!(kept[0].rule, RuleId::Nsm);
    }

    #[test]
    fn baseline_round_trip_and_idempotence() {
        let findings = vec![
            sample_finding(RuleId::Tnes, 10),
            sample_finding(RuleId::Umm, 11),
        ];
        let baseline = Baseline::from_findings(&findings[..1]);
        let text = baseline.render();
        let reparsed = Baseline::parse(&text);
        assert_eq!(baseline, reparsed);

        let (once, n1) = reparsed.subtract(findings.clone());
        assert_eq!(n1, 1);
        let (twice, n2) = reparsed.subtract(once.clone());
        assert_eq!(n2, 0);
        assert_eq!(once, twice);
    }

    #[test]
    fn baseline_ignores_unknown_fingerprints() {
        let baseline = Baseline::parse("deadbeefdeadbeef\n");
        let findings = vec![sample_finding(RuleId::Tnes, 10)];
        let (kept, n) = baseline.subtract(findings);
        assert_eq!(n, 0);
        assert_eq!(kept.len(), 1);
    }

    #[test]
    fn text_format_is_path_line_col_rule_message() {
        let text = render_text(&[sample_finding(RuleId::Tnes, 10)]);
        assert_eq!(text, "app/main.py:10:5 TNES test message; fix it.\n");
    }

    #[test]
    fn json_report_round_trips_findings() {
        let registry = ProviderRegistry::builtin();
        let run = RunInfo {
            files_scanned: 1,
            files_failed: 0,
            loc_total: 10,
            suppressed: 0,
            baseline_filtered: 0,
            rules: RuleId::ALL.iter().map(|r| r.code().to_string()).collect(),
            strict: false,
            nso_mode: "evidence".to_string(),
            umm_split: false,
        };
        let mut finding = sample_finding(RuleId::Nmvp, 3);
        finding.sub_code = Some("MISSING_TIMEOUT".to_string());
        finding.confidence = Confidence::Medium;
        let original = vec![finding, sample_finding(RuleId::Nso, 8)];
        let text = render_json(&original, &[], &registry, &run);
        let reparsed = parse_json_findings(&text).expect("round trip");
        assert_eq!(original, reparsed);
    }

    #[test]
    fn json_report_has_metadata_when_empty() {
        let registry = ProviderRegistry::builtin();
        let run = RunInfo {
            files_scanned: 0,
            files_failed: 0,
            loc_total: 0,
            suppressed: 0,
            baseline_filtered: 0,
            rules: vec![],
            strict: false,
            nso_mode: "evidence".to_string(),
            umm_split: false,
        };
        let text = render_json(&[], &[], &registry, &run);
        let doc: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["report_version"], 1);
        assert_eq!(doc["findings"].as_array().unwrap().len(), 0);
        assert_eq!(doc["tool"]["name"], "llmlint");
        assert!(doc["registry_hash"].as_str().unwrap().len() == 64);
    }

    #[test]
    fn sarif_has_descriptor_per_rule_and_results() {
        let run = RunInfo {
            files_scanned: 1,
            files_failed: 0,
            loc_total: 10,
            suppressed: 0,
            baseline_filtered: 0,
            rules: vec![],
            strict: false,
            nso_mode: "evidence".to_string(),
            umm_split: false,
        };
        let text = render_sarif(&[sample_finding(RuleId::Nmvp, 3)], &run);
        let doc: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["version"], "2.1.0");
        let rules = doc["runs"][0]["tool"]["driver"]["rules"]
            .as_array()
            .unwrap();
        assert_eq!(rules.len(), 5);
        let results = doc["runs"][0]["results"].as_array().unwrap();
        assert_eq!(results.len(), 1);
        assert_eq!(results[0]["ruleId"], "NMVP");
        assert_eq!(results[0]["level"], "warning");
        assert_eq!(
            results[0]["locations"][0]["physicalLocation"]["region"]["startLine"],
            3
        );
    }

    #[test]
    fn rendering_is_deterministic() {
        let registry = ProviderRegistry::builtin();
        let run = RunInfo {
            files_scanned: 1,
            files_failed: 0,
            loc_total: 1,
            suppressed: 0,
            baseline_filtered: 0,
            rules: vec!["TNES".to_string()],
            strict: false,
            nso_mode: "evidence".to_string(),
            umm_split: false,
        };
        let findings = vec![sample_finding(RuleId::Tnes, 1)];
        assert_eq!(
            render_json(&findings, &[], &registry, &run),
            render_json(&findings, &[], &registry, &run)
        );
        assert_eq!(render_sarif(&findings, &run), render_sarif(&findings, &run));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(0, false), 0);
        assert_eq!(exit_code(3, false), 1);
        assert_eq!(exit_code(0, true), 2);
        assert_eq!(exit_code(3, true), 2);
    }
}
