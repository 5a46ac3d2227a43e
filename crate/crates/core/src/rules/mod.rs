//! The five smell detectors and their shared configuration.
//!
//! Each detector is a pure function over a normalized call site. The shared
//! precision policy: with default settings, nothing unresolvable ever
//! produces a finding — `**` expansions, dynamic values, and invisible
//! client configuration all suppress rather than guess. Strict mode
//! escalates those suppressed cases to LOW-confidence findings.

mod nmvp;
mod nsm;
mod nso;
mod tnes;
mod umm;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::callsite::{find_call_sites, CallSite, MatchTier, RoleValue};
use crate::registry::{Provider, ProviderRegistry, Role};
use crate::report::{
    apply_suppressions, fingerprint, parse_suppressions, Confidence, Finding, Location, RuleId,
};
use crate::source::SemanticModel;

/// When the no-structured-output rule fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NsoMode {
    /// Only when the result demonstrably flows into a parse sink.
    Evidence,
    /// At every call site lacking structured output.
    All,
}

impl NsoMode {
    pub fn name(self) -> &'static str {
        match self {
            NsoMode::Evidence => "evidence",
            NsoMode::All => "all",
        }
    }

    pub fn parse(s: &str) -> Option<NsoMode> {
        match s.trim().to_ascii_lowercase().as_str() {
            "evidence" => Some(NsoMode::Evidence),
            "all" => Some(NsoMode::All),
            _ => None,
        }
    }
}

/// Detector configuration.
#[derive(Debug, Clone)]
pub struct RuleConfig {
    pub enabled: BTreeSet<RuleId>,
    /// Escalate unresolvable facts to LOW-confidence findings.
    pub strict: bool,
    pub nso_mode: NsoMode,
    /// One finding per missing bound metric instead of one combined finding.
    pub umm_split: bool,
}

impl Default for RuleConfig {
    fn default() -> Self {
        RuleConfig {
            enabled: RuleId::ALL.into_iter().collect(),
            strict: false,
            nso_mode: NsoMode::Evidence,
            umm_split: false,
        }
    }
}

/// Result of running all enabled detectors over one file.
#[derive(Debug, Clone, Default)]
pub struct RuleOutcome {
    /// Post-suppression findings, sorted by (path, line, column, rule).
    pub findings: Vec<Finding>,
    pub suppressed: usize,
    /// Diagnostics, e.g. malformed suppression comments.
    pub warnings: Vec<String>,
    /// Matched LLM call sites before any rule ran.
    pub call_sites: usize,
}

/// Runs every enabled detector over every matched call site in the file,
/// applies inline suppressions, and sorts the survivors.
pub fn run_rules(
    model: &SemanticModel,
    registry: &ProviderRegistry,
    config: &RuleConfig,
) -> RuleOutcome {
    let sites = find_call_sites(model, registry);
    let call_sites = sites.len();

    let mut findings = Vec::new();
    for site in &sites {
        let Some(provider) = registry.provider(&site.provider_id) else {
            continue;
        };
        let ctx = RuleCtx {
            site,
            provider,
            config,
            path: &model.file.path,
        };
        for rule in RuleId::ALL {
            if !config.enabled.contains(&rule) {
                continue;
            }
            let mut batch = match rule {
                RuleId::Umm => umm::detect(&ctx),
                RuleId::Nmvp => nmvp::detect(&ctx),
                RuleId::Nsm => nsm::detect(&ctx),
                RuleId::Nso => nso::detect(&ctx),
                RuleId::Tnes => tnes::detect(&ctx),
            };
            findings.append(&mut batch);
        }
    }

    let (suppressions, raw_warnings) = parse_suppressions(&model.comments);
    let warnings = raw_warnings
        .into_iter()
        .map(|w| format!("{}: {}", model.file.path, w))
        .collect();
    let (mut kept, suppressed) = apply_suppressions(findings, &suppressions);
    kept.sort_by_key(Finding::sort_key);

    RuleOutcome {
        findings: kept,
        suppressed,
        warnings,
        call_sites,
    }
}

/// Everything a detector needs about one call site.
pub(crate) struct RuleCtx<'a> {
    pub site: &'a CallSite,
    pub provider: &'a Provider,
    pub config: &'a RuleConfig,
    pub path: &'a str,
}

impl RuleCtx<'_> {
    /// Confidence of a firmly-established finding at this site.
    pub(crate) fn base_confidence(&self, via_const_ref: bool) -> Confidence {
        if self.site.tier == MatchTier::Suffix || via_const_ref {
            Confidence::Medium
        } else {
            Confidence::High
        }
    }

    /// Builds a finding anchored at this call site.
    pub(crate) fn finding(
        &self,
        rule: RuleId,
        sub_code: Option<&str>,
        message: String,
        evidence: Vec<String>,
        confidence: Confidence,
    ) -> Finding {
        Finding {
            rule,
            sub_code: sub_code.map(str::to_string),
            provider: self.site.provider_id.clone(),
            location: Location {
                path: self.path.to_string(),
                line: self.site.line,
                column: self.site.column,
            },
            message,
            evidence,
            confidence,
            snippet: self.site.snippet.clone(),
            fingerprint: fingerprint(
                rule,
                sub_code,
                self.path,
                &self.site.matched_path,
                &self.site.normalized_text,
            ),
        }
    }

    /// Human-readable statement of what a role resolved to.
    pub(crate) fn role_evidence(&self, role: Role) -> String {
        let name = role.name();
        match self.site.role_value(role) {
            None => format!("{name}: not applicable to this provider"),
            Some(RoleValue::Literal(v)) => format!("{name}={v}{}", self.layer_tag(role)),
            Some(RoleValue::ConstRef { name: c, value }) => {
                format!("{name}={value} via constant {c}{}", self.layer_tag(role))
            }
            Some(RoleValue::Dynamic) => {
                format!("{name}: set to a dynamic value{}", self.layer_tag(role))
            }
            Some(RoleValue::Absent) => format!("{name}: absent on all visible layers"),
            Some(RoleValue::Spread) => {
                format!("{name}: possibly supplied through ** expansion")
            }
        }
    }

    fn layer_tag(&self, role: Role) -> String {
        match self.site.role(role).and_then(|r| r.layer) {
            Some(layer) => format!(
                " ({})",
                match layer {
                    crate::callsite::LayerKind::Call => "request call",
                    crate::callsite::LayerKind::Options => "options chain",
                    crate::callsite::LayerKind::Constructor => "client constructor",
                }
            ),
            None => String::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::{parse_file, SourceFile};

    pub(crate) fn run_on(src: &str, config: &RuleConfig) -> RuleOutcome {
        let registry = ProviderRegistry::builtin();
        let model = parse_file(SourceFile::new("t.py", src)).expect("parse");
        run_rules(&model, &registry, config)
    }

    pub(crate) fn findings_on(src: &str) -> Vec<Finding> {
        run_on(src, &RuleConfig::default()).findings
    }

    pub(crate) fn strict_findings_on(src: &str) -> Vec<Finding> {
        let config = RuleConfig {
            strict: true,
            ..RuleConfig::default()
        };
        run_on(src, &config).findings
    }

    #[test]
    fn empty_file_has_no_findings() {
        assert!(findings_on("").is_empty());
    }

    #[test]
    fn non_llm_code_has_no_findings() {
        let src = "import requests\nr = requests.get(\"https://example.com\", timeout=5)\n";
        assert!(findings_on(src).is_empty());
    }

    #[test]
    fn findings_are_sorted_by_position_then_rule() {
        let src = "\
import openai
a = openai.chat.completions.create(model=\"gpt-4o\", messages=[{\"role\": \"user\", \"content\": \"x\"}])
";
        let findings = findings_on(src);
        assert!(findings.len() >= 2);
        let mut sorted = findings.clone();
        sorted.sort_by_key(Finding::sort_key);
        assert_eq!(findings, sorted);
    }

    #[test]
    fn disabled_rules_do_not_run() {
        let src = "import openai\na = openai.chat.completions.create(model=\"gpt-4o\", messages=[{\"role\": \"user\", \"content\": \"x\"}])\n";
        let config = RuleConfig {
            enabled: [RuleId::Tnes].into_iter().collect(),
            ..RuleConfig::default()
        };
        let outcome = run_on(src, &config);
        assert!(!outcome.findings.is_empty());
        assert!(outcome.findings.iter().all(|f| f.rule == RuleId::Tnes));
    }

    #[test]
    fn suppression_comment_removes_matching_finding() {
        let src = "\
import openai
# llmlint: disable=TNES
a = openai.chat.completions.create(model=\"gpt-4o-2024-11-20\", messages=[{\"role\": \"system\", \"content\": \"s\"}, {\"role\": \"user\", \"content\": \"x\"}], max_tokens=100, timeout=10)
";
        // Note: max_retries is absent → UMM remains; TNES is suppressed.
        let outcome = run_on(src, &RuleConfig::default());
        assert!(outcome.findings.iter().all(|f| f.rule != RuleId::Tnes));
        assert_eq!(outcome.suppressed, 1);
    }

    #[test]
    fn suppress_all_clears_the_line() {
        let src = "\
import openai
a = openai.chat.completions.create(model=\"gpt-4o\", messages=[{\"role\": \"user\", \"content\": \"x\"}])  # llmlint: disable=all
";
        let outcome = run_on(src, &RuleConfig::default());
        assert!(outcome.findings.is_empty());
        assert!(outcome.suppressed >= 2);
    }

    #[test]
    fn malformed_suppression_warns_and_keeps_findings() {
        let src = "\
import openai
# llmlint: disable=NOPE
a = openai.chat.completions.create(model=\"gpt-4o\", messages=[{\"role\": \"user\", \"content\": \"x\"}])
";
        let outcome = run_on(src, &RuleConfig::default());
        assert_eq!(outcome.warnings.len(), 1);
        assert!(outcome.warnings[0].contains("t.py"));
        assert!(!outcome.findings.is_empty());
    }

    #[test]
    fn red_listing_file_yields_one_finding_per_rule() {
        // Each call saturates the other four smells so exactly the five
        // intended findings appear (one per rule, combined UMM).
        let src = "\
import json
import openai

resp = openai.chat.completions.create(
    model=\"gpt-4o\",
    messages=[{\"role\": \"user\", \"content\": \"Summarize this.\"}],
)
data = json.loads(resp.choices[0].message.content)
";
        let findings = findings_on(src);
        let codes: Vec<&str> = findings.iter().map(|f| f.rule.code()).collect();
        assert_eq!(codes, vec!["NMVP", "NSM", "NSO", "TNES", "UMM"]);
    }

    #[test]
    fn green_listing_file_is_clean() {
        let src = "\
import openai

resp = openai.chat.completions.create(
    model=\"gpt-4o-2024-11-20\",
    messages=[
        {\"role\": \"system\", \"content\": \"You are a precise summarizer.\"},
        {\"role\": \"user\", \"content\": \"Summarize this.\"},
    ],
    max_tokens=256,
    timeout=20,
    max_retries=3,
    temperature=0.2,
    response_format={\"type\": \"json_schema\", \"json_schema\": {\"name\": \"s\", \"schema\": {}}},
)
print(resp.choices[0].message.content)
";
        assert!(findings_on(src).is_empty());
    }

    #[test]
    fn default_mode_never_fires_on_unresolvable_facts() {
        // Everything is hidden behind ** expansion / dynamic values.
        let src = "\
import openai

def run(params, msgs):
    return openai.chat.completions.create(model=params[\"model\"], messages=msgs, **params)
";
        assert!(findings_on(src).is_empty());
    }
}
