//! No model version pinning: the model identifier must be an immutable
//! snapshot, either by its own naming (dated snapshots, digests) or through
//! an explicit revision parameter, depending on the provider.

use crate::callsite::RoleValue;
use crate::registry::{PinClass, PinningStyle, Role};
use crate::report::{Confidence, Finding, RuleId};

use super::RuleCtx;

pub(crate) fn detect(ctx: &RuleCtx) -> Vec<Finding> {
    if !ctx.provider.role_applies(Role::Model) {
        return Vec::new();
    }
    let role = ctx.site.role_value(Role::Model);
    let (literal, via_const) = match role {
        Some(RoleValue::Literal(v)) => (Some(v), false),
        Some(RoleValue::ConstRef { value, .. }) => (Some(value), true),
        _ => (None, false),
    };

    let Some(literal) = literal else {
        // Dynamic, spread, or absent model identifiers make no claim.
        if ctx.config.strict && matches!(role, Some(RoleValue::Dynamic) | Some(RoleValue::Spread)) {
            return vec![ctx.finding(
                RuleId::Nmvp,
                None,
                "Model identifier is not statically resolvable and may be a moving alias; pin an immutable model version or snapshot identifier.".to_string(),
                vec![ctx.role_evidence(Role::Model)],
                Confidence::Low,
            )];
        }
        return Vec::new();
    };
    let Some(name) = literal.as_str() else {
        return Vec::new();
    };
    let name = name.to_string();

    match ctx.provider.pinning.style {
        PinningStyle::Patterns => match ctx.provider.pinning.classify(&name) {
            PinClass::Moving => vec![ctx.finding(
                RuleId::Nmvp,
                None,
                format!(
                    "Model alias \"{name}\" is a moving reference whose behavior can change without notice; pin an immutable model version or snapshot identifier."
                ),
                vec![
                    ctx.role_evidence(Role::Model),
                    "identifier matches a moving-alias pattern".to_string(),
                ],
                ctx.base_confidence(via_const),
            )],
            PinClass::Pinned => Vec::new(),
            PinClass::Unknown => {
                if ctx.config.strict {
                    vec![ctx.finding(
                        RuleId::Nmvp,
                        None,
                        format!(
                            "Model identifier \"{name}\" is not a recognized pinned snapshot; pin an immutable model version or snapshot identifier."
                        ),
                        vec![
                            ctx.role_evidence(Role::Model),
                            "identifier matches neither pinned nor moving patterns".to_string(),
                        ],
                        Confidence::Low,
                    )]
                } else {
                    Vec::new()
                }
            }
        },
        PinningStyle::RevisionKwarg => {
            match ctx.site.role_value(Role::ModelRevision) {
                Some(RoleValue::Absent) => {
                    if ctx.site.client_unresolved {
                        if ctx.config.strict {
                            vec![revision_finding(ctx, &name, Confidence::Low)]
                        } else {
                            Vec::new()
                        }
                    } else {
                        vec![revision_finding(ctx, &name, ctx.base_confidence(via_const))]
                    }
                }
                Some(RoleValue::Spread) => {
                    if ctx.config.strict {
                        vec![revision_finding(ctx, &name, Confidence::Low)]
                    } else {
                        Vec::new()
                    }
                }
                // Revision present in any form pins the snapshot.
                _ => Vec::new(),
            }
        }
    }
}

fn revision_finding(ctx: &RuleCtx, name: &str, confidence: Confidence) -> Finding {
    ctx.finding(
        RuleId::Nmvp,
        None,
        format!(
            "Model \"{name}\" is loaded without a pinned revision; pass an explicit revision (commit hash or tag) to pin the snapshot."
        ),
        vec![
            ctx.role_evidence(Role::Model),
            ctx.role_evidence(Role::ModelRevision),
        ],
        confidence,
    )
}
