//! Unbounded max metrics: output token cap, timeout, and max retries must
//! all be explicitly bounded somewhere on the call, options, or client layer.

use crate::callsite::RoleValue;
use crate::registry::Role;
use crate::report::{Confidence, Finding, RuleId};

use super::RuleCtx;

const METRICS: [(Role, &str, &str); 3] = [
    (
        Role::OutputTokenCap,
        "MISSING_TOKEN_CAP",
        "output token cap",
    ),
    (Role::Timeout, "MISSING_TIMEOUT", "timeout"),
    (Role::MaxRetries, "MISSING_RETRIES", "max retries"),
];

struct Missing {
    sub_code: &'static str,
    label: &'static str,
    /// Firmly absent (vs. a strict-mode escalation of an unresolvable fact).
    firm: bool,
}

pub(crate) fn detect(ctx: &RuleCtx) -> Vec<Finding> {
    let mut missing: Vec<Missing> = Vec::new();
    let mut evidence: Vec<String> = Vec::new();

    for (role, sub_code, label) in METRICS {
        if !ctx.provider.role_applies(role) {
            continue;
        }
        evidence.push(ctx.role_evidence(role));
        match ctx.site.role_value(role) {
            Some(RoleValue::Absent) => {
                if ctx.site.client_unresolved {
                    // The metric could live on the invisible client layer.
                    if ctx.config.strict {
                        missing.push(Missing {
                            sub_code,
                            label,
                            firm: false,
                        });
                    }
                } else {
                    missing.push(Missing {
                        sub_code,
                        label,
                        firm: true,
                    });
                }
            }
            // Possibly bounded; only strict mode flags the uncertainty.
            Some(RoleValue::Spread) | Some(RoleValue::Dynamic) if ctx.config.strict => {
                missing.push(Missing {
                    sub_code,
                    label,
                    firm: false,
                });
            }
            _ => {}
        }
    }

    if missing.is_empty() {
        return Vec::new();
    }

    if ctx.config.umm_split {
        missing
            .iter()
            .map(|m| {
                let confidence = if m.firm {
                    ctx.base_confidence(false)
                } else {
                    Confidence::Low
                };
                let message = match m.sub_code {
                    "MISSING_TOKEN_CAP" => {
                        "No output token cap is set for this LLM call; bound the maximum output tokens explicitly.".to_string()
                    }
                    "MISSING_TIMEOUT" => {
                        "No timeout is set for this LLM call; set an explicit request timeout.".to_string()
                    }
                    _ => {
                        "No retry limit is set for this LLM call; set an explicit maximum retry count.".to_string()
                    }
                };
                ctx.finding(
                    RuleId::Umm,
                    Some(m.sub_code),
                    message,
                    evidence.clone(),
                    confidence,
                )
            })
            .collect()
    } else {
        let labels: Vec<&str> = missing.iter().map(|m| m.label).collect();
        let confidence = if missing.iter().any(|m| m.firm) {
            ctx.base_confidence(false)
        } else {
            Confidence::Low
        };
        let message = format!(
            "Unbounded max metrics on this LLM call (missing: {}); set an explicit bound for each.",
            labels.join(", ")
        );
        vec![ctx.finding(RuleId::Umm, None, message, evidence, confidence)]
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{findings_on, run_on, strict_findings_on};
    use super::super::RuleConfig;
    use crate::report::{Confidence, RuleId};

    fn umm_only(src: &str) -> Vec<crate::report::Finding> {
        findings_on(src)
            .into_iter()
            .filter(|f| f.rule == RuleId::Umm)
            .collect()
    }

    #[test]
    fn bare_create_misses_all_three_metrics() {
        let src = "\
from openai import OpenAI
client = OpenAI()
r = client.chat.completions.create(model=\"gpt-4o-2024-11-20\", messages=[{\"role\": \"system\", \"content\": \"s\"}], temperature=0.0)
";
        let umm = umm_only(src);
        assert_eq!(umm.len(), 1);
        assert!(umm[0].message.contains("output token cap"));
        assert!(umm[0].message.contains("timeout"));
        assert!(umm[0].message.contains("max retries"));
        assert_eq!(umm[0].confidence, Confidence::High);
        assert_eq!(umm[0].sub_code, None);
    }

    #[test]
    fn bounded_call_is_clean() {
        let src = "\
from openai import OpenAI
client = OpenAI(timeout=20, max_retries=3)
r = client.chat.completions.create(model=\"gpt-4o-2024-11-20\", messages=[{\"role\": \"system\", \"content\": \"s\"}], max_tokens=256, temperature=0.0)
";
        assert!(umm_only(src).is_empty());
    }

    #[test]
    fn with_options_bounds_count() {
        let src = "\
from openai import OpenAI
client = OpenAI().with_options(timeout=20, max_retries=3)
r = client.chat.completions.create(model=\"gpt-4o-2024-11-20\", messages=[{\"role\": \"system\", \"content\": \"s\"}], max_tokens=256, temperature=0.0)
";
        assert!(umm_only(src).is_empty());
    }

    #[test]
    fn split_mode_emits_one_finding_per_metric() {
        let src = "\
from openai import OpenAI
client = OpenAI(timeout=20)
r = client.chat.completions.create(model=\"gpt-4o-2024-11-20\", messages=[{\"role\": \"system\", \"content\": \"s\"}], temperature=0.0)
";
        let config = RuleConfig {
            umm_split: true,
            ..RuleConfig::default()
        };
        let umm: Vec<_> = run_on(src, &config)
            .findings
            .into_iter()
            .filter(|f| f.rule == RuleId::Umm)
            .collect();
        assert_eq!(umm.len(), 2);
        let subs: Vec<&str> = umm.iter().filter_map(|f| f.sub_code.as_deref()).collect();
        assert!(subs.contains(&"MISSING_TOKEN_CAP"));
        assert!(subs.contains(&"MISSING_RETRIES"));
        // Distinct sub-codes give distinct fingerprints.
        assert_ne!(umm[0].fingerprint, umm[1].fingerprint);
    }

    #[test]
    fn unresolved_client_suppresses_client_side_metrics() {
        // Token cap is satisfied at the call; timeout/retries cannot be
        // proven absent because the client came from elsewhere.
        let src = "\
from app.clients import client
r = client.chat.completions.create(model=\"gpt-4o-2024-11-20\", messages=[{\"role\": \"system\", \"content\": \"s\"}], max_tokens=100, temperature=0.0)
";
        assert!(umm_only(src).is_empty());
    }

    #[test]
    fn strict_mode_flags_unresolved_client_metrics_low() {
        let src = "\
from app.clients import client
r = client.chat.completions.create(model=\"gpt-4o-2024-11-20\", messages=[{\"role\": \"system\", \"content\": \"s\"}], max_tokens=100, temperature=0.0)
";
        let umm: Vec<_> = strict_findings_on(src)
            .into_iter()
            .filter(|f| f.rule == RuleId::Umm)
            .collect();
        assert_eq!(umm.len(), 1);
        assert_eq!(umm[0].confidence, Confidence::Low);
        assert!(umm[0].message.contains("timeout"));
        assert!(umm[0].message.contains("max retries"));
        assert!(!umm[0].message.contains("output token cap"));
    }

    #[test]
    fn spread_kwargs_suppress_by_default() {
        let src = "\
from openai import OpenAI
client = OpenAI()
extra = {\"timeout\": 20}
r = client.chat.completions.create(model=\"gpt-4o-2024-11-20\", messages=[{\"role\": \"system\", \"content\": \"s\"}], temperature=0.0, **extra)
";
        assert!(umm_only(src).is_empty());
    }

    #[test]
    fn provider_without_a_metric_role_skips_it() {
        // This provider has no retry parameter; only cap and timeout count.
        let src = "\
import google.generativeai as genai
m = genai.GenerativeModel(\"gemini-1.5-flash-002\", system_instruction=\"s\")
r = m.generate_content(\"hi\", generation_config={\"temperature\": 0.1})
";
        let umm = umm_only(src);
        assert_eq!(umm.len(), 1);
        assert!(umm[0].message.contains("output token cap"));
        assert!(umm[0].message.contains("timeout"));
        assert!(!umm[0].message.contains("retries"));
    }
}
