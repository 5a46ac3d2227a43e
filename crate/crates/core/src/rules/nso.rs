//! No structured output: when model output is consumed as data, the call
//! should declare an output schema at the API boundary instead of parsing
//! free-form text.

use crate::callsite::{CallSite, RoleValue};
use crate::registry::{Provider, Role};
use crate::report::{Confidence, Finding, RuleId};

use super::{NsoMode, RuleCtx};

pub(crate) fn detect(ctx: &RuleCtx) -> Vec<Finding> {
    let has_forms = ctx.provider.role_applies(Role::StructuredOutput)
        || !ctx.provider.structured_output_callees.is_empty();
    if !has_forms {
        return Vec::new();
    }

    if structured_output_present(ctx.site, ctx.provider) {
        return Vec::new();
    }

    let sinks = &ctx.site.consumption.sinks;
    let fire = match ctx.config.nso_mode {
        NsoMode::Evidence => !sinks.is_empty(),
        NsoMode::All => true,
    };
    if !fire {
        return Vec::new();
    }

    let mut evidence = Vec::new();
    if ctx.provider.role_applies(Role::StructuredOutput) {
        evidence.push(ctx.role_evidence(Role::StructuredOutput));
    }
    if !ctx.provider.structured_output_callees.is_empty() {
        evidence.push(format!(
            "callee is not a structured variant ({})",
            ctx.provider.structured_output_callees.join(", ")
        ));
    }
    for sink in sinks {
        evidence.push(format!(
            "result flows into {} at line {}",
            sink.callee, sink.line
        ));
    }
    if sinks.is_empty() {
        evidence.push("counting mode: all call sites".to_string());
    }

    let hint = remediation_hint(ctx.provider);
    let message = if sinks.is_empty() {
        format!(
            "No structured output is enforced on this LLM call; declare an output schema at the API boundary ({hint})."
        )
    } else {
        format!(
            "Model output is parsed as structured data, but no output schema is enforced on the call; declare structured output at the API boundary ({hint})."
        )
    };

    if ctx.site.client_unresolved {
        // A structured-output binding could exist on the invisible client
        // chain (e.g. a schema bound when the client was configured).
        if ctx.config.strict {
            vec![ctx.finding(RuleId::Nso, None, message, evidence, Confidence::Low)]
        } else {
            Vec::new()
        }
    } else {
        vec![ctx.finding(
            RuleId::Nso,
            None,
            message,
            evidence,
            ctx.base_confidence(false),
        )]
    }
}

/// Any structured-output form counts: the role parameter set in any visible
/// layer (even unverifiably), or a structured-variant callee in the chain.
fn structured_output_present(site: &CallSite, provider: &Provider) -> bool {
    match site.role_value(Role::StructuredOutput) {
        Some(RoleValue::Absent) | None => {}
        // Literal, const-ref, dynamic, or possibly-spread all count as
        // present: only proven absence is a smell.
        Some(_) => return true,
    }
    provider
        .structured_output_callees
        .iter()
        .any(|c| path_uses_callee(&site.matched_path, c) || path_uses_callee(&site.raw_callee, c))
}

fn path_uses_callee(path: &str, callee: &str) -> bool {
    path.ends_with(&format!(".{callee}")) || path.contains(&format!(".{callee}("))
}

/// Names the provider's first structured-output parameter for the message.
fn remediation_hint(provider: &Provider) -> String {
    for path in provider.role_paths(Role::StructuredOutput) {
        if let crate::registry::ParamPath::Keyword(segs) = path {
            return format!("e.g. {}=...", segs.join("."));
        }
    }
    if let Some(callee) = provider.structured_output_callees.first() {
        return format!("e.g. the {callee} variant");
    }
    "declare an output schema".to_string()
}
