//! No system message: the request must include high-level guidance, either
//! as a system/developer role in the message list or through the provider's
//! dedicated system-text parameter.

use crate::callsite::MessagesState;
use crate::registry::Role;
use crate::report::{Confidence, Finding, RuleId};

use super::RuleCtx;

pub(crate) fn detect(ctx: &RuleCtx) -> Vec<Finding> {
    if !ctx.provider.role_applies(Role::Messages) && !ctx.provider.role_applies(Role::SystemText) {
        return Vec::new();
    }

    let message = "No system message is provided to this LLM call; include a clear system message defining role, goals, and constraints.".to_string();
    let mut evidence = vec![ctx.site.messages.note.clone()];
    if ctx.provider.role_applies(Role::SystemText) {
        evidence.push(ctx.role_evidence(Role::SystemText));
    }

    match ctx.site.messages.state {
        MessagesState::HasSystem => Vec::new(),
        MessagesState::NoSystem => {
            if ctx.site.client_unresolved {
                // System guidance could live on the invisible client layer
                // (e.g. a constructor-level system instruction).
                if ctx.config.strict {
                    vec![ctx.finding(RuleId::Nsm, None, message, evidence, Confidence::Low)]
                } else {
                    Vec::new()
                }
            } else {
                vec![ctx.finding(
                    RuleId::Nsm,
                    None,
                    message,
                    evidence,
                    ctx.base_confidence(false),
                )]
            }
        }
        MessagesState::Unresolved => {
            if ctx.config.strict {
                vec![ctx.finding(RuleId::Nsm, None, message, evidence, Confidence::Low)]
            } else {
                Vec::new()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{findings_on, strict_findings_on};
    use crate::report::{Confidence, RuleId};

    fn nsm_only(src: &str) -> Vec<crate::report::Finding> {
        findings_on(src)
            .into_iter()
            .filter(|f| f.rule == RuleId::Nsm)
            .collect()
    }

    #[test]
    fn user_only_messages_are_flagged() {
        let src = "import openai\nr = openai.chat.completions.create(model=\"gpt-4o-2024-11-20\", messages=[{\"role\": \"user\", \"content\": \"hi\"}], max_tokens=100, timeout=10, max_retries=2, temperature=0.0)\n";
        let f = nsm_only(src);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].confidence, Confidence::High);
    }

    #[test]
    fn system_role_element_is_clean() {
        let src = "import openai\nr = openai.chat.completions.create(model=\"gpt-4o-2024-11-20\", messages=[{\"role\": \"system\", \"content\": \"be brief\"}, {\"role\": \"user\", \"content\": \"hi\"}], max_tokens=100, timeout=10, max_retries=2, temperature=0.0)\n";
        assert!(nsm_only(src).is_empty());
    }

    #[test]
    fn developer_role_counts_as_system() {
        let src = "import openai\nr = openai.chat.completions.create(model=\"gpt-4o-2024-11-20\", messages=[{\"role\": \"developer\", \"content\": \"be brief\"}, {\"role\": \"user\", \"content\": \"hi\"}], max_tokens=100, timeout=10, max_retries=2, temperature=0.0)\n";
        assert!(nsm_only(src).is_empty());
    }

    #[test]
    fn dedicated_system_parameter_is_clean() {
        let src = "import anthropic\nclient = anthropic.Anthropic(timeout=10, max_retries=2)\nr = client.messages.create(model=\"claude-3-5-sonnet-20241022\", max_tokens=100, system=\"You are terse.\", messages=[{\"role\": \"user\", \"content\": \"hi\"}], temperature=0.0)\n";
        assert!(nsm_only(src).is_empty());
    }

    #[test]
    fn plain_string_prompt_is_flagged_when_client_is_visible() {
        let src = "import google.generativeai as genai\nm = genai.GenerativeModel(\"gemini-1.5-flash-002\")\nr = m.generate_content(\"summarize this\", generation_config={\"temperature\": 0.0, \"max_output_tokens\": 100})\n";
        let f = nsm_only(src);
        assert_eq!(f.len(), 1);
    }

    #[test]
    fn constructor_system_instruction_is_clean() {
        let src = "import google.generativeai as genai\nm = genai.GenerativeModel(\"gemini-1.5-flash-002\", system_instruction=\"be brief\")\nr = m.generate_content(\"summarize this\", generation_config={\"temperature\": 0.0, \"max_output_tokens\": 100})\n";
        assert!(nsm_only(src).is_empty());
    }

    #[test]
    fn unresolvable_messages_are_silent_by_default_low_in_strict() {
        let src = "import openai\ndef run(msgs):\n    return openai.chat.completions.create(model=\"gpt-4o-2024-11-20\", messages=msgs, max_tokens=100, timeout=10, max_retries=2, temperature=0.0)\n";
        assert!(nsm_only(src).is_empty());
        let strict: Vec<_> = strict_findings_on(src)
            .into_iter()
            .filter(|f| f.rule == RuleId::Nsm)
            .collect();
        assert_eq!(strict.len(), 1);
        assert_eq!(strict[0].confidence, Confidence::Low);
    }

    #[test]
    fn unresolved_client_suppresses_no_system_verdict() {
        // The plain-string prompt has no system text, but the model object
        // came from elsewhere and could carry a system instruction.
        let src = "from app.llm import model\nr = model.generate_content(\"summarize this\", generation_config={\"temperature\": 0.0, \"max_output_tokens\": 100})\n";
        assert!(nsm_only(src).is_empty());
    }

    #[test]
    fn spread_kwargs_silence_the_absence_verdict() {
        let src = "import anthropic\nclient = anthropic.Anthropic(timeout=10, max_retries=2)\nr = client.messages.create(model=\"claude-3-5-sonnet-20241022\", max_tokens=100, messages=[{\"role\": \"user\", \"content\": \"hi\"}], temperature=0.0, **extras)\n";
        assert!(nsm_only(src).is_empty());
        let strict: Vec<_> = strict_findings_on(src)
            .into_iter()
            .filter(|f| f.rule == RuleId::Nsm)
            .collect();
        assert_eq!(strict.len(), 1);
        assert_eq!(strict[0].confidence, Confidence::Low);
    }

    #[test]
    fn empty_system_string_does_not_count() {
        let src = "import anthropic\nclient = anthropic.Anthropic(timeout=10, max_retries=2)\nr = client.messages.create(model=\"claude-3-5-sonnet-20241022\", max_tokens=100, system=\"\", messages=[{\"role\": \"user\", \"content\": \"hi\"}], temperature=0.0)\n";
        let f = nsm_only(src);
        assert_eq!(f.len(), 1);
    }
}
