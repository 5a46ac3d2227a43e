//! Temperature not explicitly set: sampling temperature must be stated on
//! some visible layer unless the model family rejects the parameter.

use crate::callsite::RoleValue;
use crate::registry::Role;
use crate::report::{Confidence, Finding, RuleId};

use super::RuleCtx;

pub(crate) fn detect(ctx: &RuleCtx) -> Vec<Finding> {
    if !ctx.provider.role_applies(Role::Temperature) {
        return Vec::new();
    }

    // Reasoning-style models reject an explicit temperature; omitting it
    // there is correct, not a smell.
    if let Some(name) = ctx
        .site
        .role_value(Role::Model)
        .and_then(RoleValue::literal)
        .and_then(|l| l.as_str())
    {
        if ctx.provider.is_temperature_exempt(name) {
            return Vec::new();
        }
    }

    let message = "Temperature is not explicitly set for this LLM call; specify the temperature and document the choice.".to_string();
    let evidence = vec![
        ctx.role_evidence(Role::Temperature),
        ctx.role_evidence(Role::Model),
    ];

    match ctx.site.role_value(Role::Temperature) {
        Some(RoleValue::Absent) => {
            if ctx.site.client_unresolved {
                // The client layer could set it where we cannot see.
                if ctx.config.strict {
                    vec![ctx.finding(RuleId::Tnes, None, message, evidence, Confidence::Low)]
                } else {
                    Vec::new()
                }
            } else {
                vec![ctx.finding(
                    RuleId::Tnes,
                    None,
                    message,
                    evidence,
                    ctx.base_confidence(false),
                )]
            }
        }
        Some(RoleValue::Spread) => {
            if ctx.config.strict {
                vec![ctx.finding(RuleId::Tnes, None, message, evidence, Confidence::Low)]
            } else {
                Vec::new()
            }
        }
        // Explicitly set, even if the value is not statically known.
        _ => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{findings_on, strict_findings_on};
    use crate::report::{Confidence, RuleId};

    fn tnes_only(src: &str) -> Vec<crate::report::Finding> {
        findings_on(src)
            .into_iter()
            .filter(|f| f.rule == RuleId::Tnes)
            .collect()
    }

    #[test]
    fn missing_temperature_is_flagged() {
        let src = "import openai\nr = openai.chat.completions.create(model=\"gpt-4o-2024-11-20\", messages=[{\"role\": \"system\", \"content\": \"s\"}], max_tokens=100, timeout=10, max_retries=2)\n";
        let f = tnes_only(src);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].confidence, Confidence::High);
    }

    #[test]
    fn explicit_temperature_is_clean() {
        let src = "import openai\nr = openai.chat.completions.create(model=\"gpt-4o-2024-11-20\", messages=[{\"role\": \"system\", \"content\": \"s\"}], max_tokens=100, timeout=10, max_retries=2, temperature=1.0)\n";
        assert!(tnes_only(src).is_empty());
    }

    #[test]
    fn zero_temperature_is_clean() {
        let src = "import openai\nr = openai.chat.completions.create(model=\"gpt-4o-2024-11-20\", messages=[{\"role\": \"system\", \"content\": \"s\"}], max_tokens=100, timeout=10, max_retries=2, temperature=0)\n";
        assert!(tnes_only(src).is_empty());
    }

    #[test]
    fn reasoning_model_is_exempt() {
        let src = "import openai\nr = openai.chat.completions.create(model=\"o1-mini\", messages=[{\"role\": \"system\", \"content\": \"s\"}], max_tokens=100, timeout=10, max_retries=2)\n";
        assert!(tnes_only(src).is_empty());
    }

    #[test]
    fn constructor_temperature_counts() {
        let src = "from langchain_openai import ChatOpenAI\nllm = ChatOpenAI(model=\"gpt-4o-2024-11-20\", temperature=0.0, timeout=10, max_retries=2, max_tokens=100)\nr = llm.invoke([(\"system\", \"s\"), (\"user\", \"hi\")])\n";
        assert!(tnes_only(src).is_empty());
    }

    #[test]
    fn nested_options_temperature_counts() {
        let src = "import ollama\nr = ollama.chat(model=\"llama3.1@sha256:365c0bd3c000\", messages=[{\"role\": \"system\", \"content\": \"s\"}], options={\"num_predict\": 100, \"temperature\": 0.2}, format=\"json\")\n";
        assert!(tnes_only(src).is_empty());
    }

    #[test]
    fn dynamic_temperature_counts_as_set() {
        let src = "import openai\nr = openai.chat.completions.create(model=\"gpt-4o-2024-11-20\", messages=[{\"role\": \"system\", \"content\": \"s\"}], max_tokens=100, timeout=10, max_retries=2, temperature=cfg.temp)\n";
        assert!(tnes_only(src).is_empty());
    }

    #[test]
    fn spread_is_silent_by_default_low_in_strict() {
        let src = "import openai\nkw = {\"temperature\": 0.1}\nr = openai.chat.completions.create(model=\"gpt-4o-2024-11-20\", messages=[{\"role\": \"system\", \"content\": \"s\"}], max_tokens=100, timeout=10, max_retries=2, **kw)\n";
        assert!(tnes_only(src).is_empty());
        let strict: Vec<_> = strict_findings_on(src)
            .into_iter()
            .filter(|f| f.rule == RuleId::Tnes)
            .collect();
        assert_eq!(strict.len(), 1);
        assert_eq!(strict[0].confidence, Confidence::Low);
    }

    #[test]
    fn unresolved_client_suppresses_absence() {
        let src = "from app.clients import client\nr = client.chat.completions.create(model=\"gpt-4o-2024-11-20\", messages=[{\"role\": \"system\", \"content\": \"s\"}], max_tokens=100, timeout=10, max_retries=2)\n";
        assert!(tnes_only(src).is_empty());
    }
}
