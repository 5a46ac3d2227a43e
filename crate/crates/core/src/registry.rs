//! Provider registry: which qualified call paths are LLM inference calls,
//! which constructor calls configure clients, and which parameters carry
//! each configuration role.
//!
//! The registry is pure data (TOML). Built-in signatures are embedded at
//! compile time and can be replaced or extended per provider id from a user
//! file, so supporting a new SDK is a data change, not a code change.

use std::collections::BTreeMap;
use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

const DEFAULT_REGISTRY_TOML: &str = include_str!("default_registry.toml");

pub const REGISTRY_SCHEMA_VERSION: u64 = 1;

/// Configuration roles a call-site parameter can play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Model,
    Messages,
    SystemText,
    OutputTokenCap,
    Timeout,
    MaxRetries,
    Temperature,
    StructuredOutput,
    ModelRevision,
}

impl Role {
    pub const ALL: [Role; 9] = [
        Role::Model,
        Role::Messages,
        Role::SystemText,
        Role::OutputTokenCap,
        Role::Timeout,
        Role::MaxRetries,
        Role::Temperature,
        Role::StructuredOutput,
        Role::ModelRevision,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Role::Model => "model",
            Role::Messages => "messages",
            Role::SystemText => "system_text",
            Role::OutputTokenCap => "output_token_cap",
            Role::Timeout => "timeout",
            Role::MaxRetries => "max_retries",
            Role::Temperature => "temperature",
            Role::StructuredOutput => "structured_output",
            Role::ModelRevision => "model_revision",
        }
    }

    fn parse(s: &str) -> Option<Role> {
        Role::ALL.iter().copied().find(|r| r.name() == s)
    }
}

/// One parameter location a role can be found at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamPath {
    /// `@N`: positional argument N of a client constructor.
    CtorPositional(usize),
    /// `call@N`: positional argument N of the request call itself.
    CallPositional(usize),
    /// Dotted keyword path: `timeout` or `generation_config.temperature`.
    Keyword(Vec<String>),
}

impl ParamPath {
    fn parse(raw: &str) -> Result<ParamPath, String> {
        if let Some(n) = raw.strip_prefix("call@") {
            return n
                .parse::<usize>()
                .map(ParamPath::CallPositional)
                .map_err(|_| format!("bad positional index in \"{raw}\""));
        }
        if let Some(n) = raw.strip_prefix('@') {
            return n
                .parse::<usize>()
                .map(ParamPath::CtorPositional)
                .map_err(|_| format!("bad positional index in \"{raw}\""));
        }
        let segments: Vec<String> = raw.split('.').map(str::to_string).collect();
        if segments.iter().any(String::is_empty) {
            return Err(format!("empty segment in parameter path \"{raw}\""));
        }
        Ok(ParamPath::Keyword(segments))
    }
}

/// How a provider's model identifiers are pinned to immutable versions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PinningStyle {
    /// The identifier itself is classified by pattern lists.
    Patterns,
    /// Pinning happens through a separate revision parameter.
    RevisionKwarg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PinClass {
    Pinned,
    Moving,
    /// Not recognized by either list; no claim is made.
    Unknown,
}

#[derive(Debug)]
pub struct PinPolicy {
    pub style: PinningStyle,
    pinned: Vec<Regex>,
    moving: Vec<Regex>,
}

impl PinPolicy {
    /// Classifies a model identifier. Pinned patterns are consulted first,
    /// so an identifier matching both lists counts as pinned.
    pub fn classify(&self, model: &str) -> PinClass {
        if self.pinned.iter().any(|r| r.is_match(model)) {
            return PinClass::Pinned;
        }
        if self.moving.iter().any(|r| r.is_match(model)) {
            return PinClass::Moving;
        }
        PinClass::Unknown
    }
}

/// A compiled provider signature.
#[derive(Debug)]
pub struct Provider {
    pub id: String,
    pub display_name: String,
    resolved_calls: Vec<Regex>,
    suffix_calls: Vec<String>,
    client_constructors: Vec<Regex>,
    pub option_chain_methods: Vec<String>,
    pub structured_output_callees: Vec<String>,
    temperature_exempt_models: Vec<Regex>,
    pub pinning: PinPolicy,
    roles: BTreeMap<Role, Vec<ParamPath>>,
}

impl Provider {
    pub fn matches_resolved(&self, path: &str) -> bool {
        self.resolved_calls.iter().any(|r| r.is_match(path))
    }

    /// Longest suffix entry matching the raw attribute chain.
    pub fn matches_suffix(&self, raw_chain: &str) -> Option<&str> {
        self.suffix_calls
            .iter()
            .filter(|s| raw_chain.ends_with(s.as_str()))
            .max_by_key(|s| s.len())
            .map(String::as_str)
    }

    pub fn is_client_constructor(&self, path: &str) -> bool {
        self.client_constructors.iter().any(|r| r.is_match(path))
    }

    pub fn role_paths(&self, role: Role) -> &[ParamPath] {
        self.roles.get(&role).map(Vec::as_slice).unwrap_or(&[])
    }

    /// A role with no parameter paths does not apply to this provider and
    /// must not produce findings.
    pub fn role_applies(&self, role: Role) -> bool {
        !self.role_paths(role).is_empty()
    }

    pub fn is_temperature_exempt(&self, model: &str) -> bool {
        self.temperature_exempt_models
            .iter()
            .any(|r| r.is_match(model))
    }

    fn has_inference_patterns(&self) -> bool {
        !self.resolved_calls.is_empty() || !self.suffix_calls.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("cannot read registry file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("registry TOML is malformed: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("unsupported registry schema_version {0} (this build reads version 1)")]
    SchemaVersion(u64),
    #[error("registry format error in provider \"{provider}\": {message}")]
    Format { provider: String, message: String },
}

// --- on-disk document shape -------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RegistryDoc {
    schema_version: u64,
    #[serde(rename = "provider", default)]
    providers: Vec<ProviderDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ProviderDoc {
    id: String,
    #[serde(default)]
    display_name: String,
    #[serde(default)]
    resolved_calls: Vec<String>,
    #[serde(default)]
    suffix_calls: Vec<String>,
    #[serde(default)]
    client_constructors: Vec<String>,
    #[serde(default)]
    option_chain_methods: Vec<String>,
    #[serde(default)]
    structured_output_callees: Vec<String>,
    #[serde(default)]
    temperature_exempt_models: Vec<String>,
    #[serde(default)]
    pinning: PinningDoc,
    #[serde(default)]
    roles: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PinningDoc {
    style: String,
    #[serde(default)]
    pinned: Vec<String>,
    #[serde(default)]
    moving: Vec<String>,
}

impl Default for PinningDoc {
    fn default() -> Self {
        PinningDoc {
            style: "patterns".to_string(),
            pinned: Vec::new(),
            moving: Vec::new(),
        }
    }
}

/// The validated, compiled registry plus its canonical serialized form.
#[derive(Debug)]
pub struct ProviderRegistry {
    providers: Vec<Provider>,
    canonical_toml: String,
    content_hash: String,
}

impl ProviderRegistry {
    /// The embedded default signatures.
    pub fn builtin() -> ProviderRegistry {
        ProviderRegistry::compile(builtin_doc()).expect("embedded registry must be valid")
    }

    /// Built-ins with a user overrides file merged on top. Overriding
    /// providers replace built-ins with the same id wholesale; new ids are
    /// appended.
    pub fn with_overrides_file(path: &Path) -> Result<ProviderRegistry, RegistryError> {
        let text = std::fs::read_to_string(path).map_err(|source| RegistryError::Io {
            path: path.display().to_string(),
            source,
        })?;
        ProviderRegistry::with_overrides_toml(&text)
    }

    pub fn with_overrides_toml(text: &str) -> Result<ProviderRegistry, RegistryError> {
        let overrides: RegistryDoc = toml::from_str(text)?;
        if overrides.schema_version != REGISTRY_SCHEMA_VERSION {
            return Err(RegistryError::SchemaVersion(overrides.schema_version));
        }
        let mut doc = builtin_doc();
        for incoming in overrides.providers {
            match doc.providers.iter_mut().find(|p| p.id == incoming.id) {
                Some(slot) => *slot = incoming,
                None => doc.providers.push(incoming),
            }
        }
        ProviderRegistry::compile(doc)
    }

    /// Loads the registry for a run: built-ins, optionally overridden.
    pub fn load(overrides: Option<&Path>) -> Result<ProviderRegistry, RegistryError> {
        match overrides {
            Some(path) => ProviderRegistry::with_overrides_file(path),
            None => Ok(ProviderRegistry::builtin()),
        }
    }

    fn compile(doc: RegistryDoc) -> Result<ProviderRegistry, RegistryError> {
        if doc.schema_version != REGISTRY_SCHEMA_VERSION {
            return Err(RegistryError::SchemaVersion(doc.schema_version));
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut providers = Vec::with_capacity(doc.providers.len());
        for p in &doc.providers {
            if p.id.is_empty() {
                return Err(format_err(&p.id, "provider id must be non-empty"));
            }
            if !seen.insert(p.id.clone()) {
                return Err(format_err(&p.id, "duplicate provider id"));
            }
            providers.push(compile_provider(p)?);
        }
        let canonical_toml =
            toml::to_string_pretty(&doc).expect("registry document serializes to TOML");
        let content_hash = hex_sha256(canonical_toml.as_bytes());
        Ok(ProviderRegistry {
            providers,
            canonical_toml,
            content_hash,
        })
    }

    pub fn providers(&self) -> &[Provider] {
        &self.providers
    }

    pub fn provider(&self, id: &str) -> Option<&Provider> {
        self.providers.iter().find(|p| p.id == id)
    }

    /// Canonical TOML of the effective (merged) registry.
    pub fn dump_toml(&self) -> &str {
        &self.canonical_toml
    }

    /// SHA-256 of the canonical TOML; reports embed it so results can be
    /// traced to the exact signature set that produced them.
    pub fn content_hash(&self) -> &str {
        &self.content_hash
    }
}

fn builtin_doc() -> RegistryDoc {
    toml::from_str(DEFAULT_REGISTRY_TOML).expect("embedded registry TOML parses")
}

fn format_err(provider: &str, message: impl Into<String>) -> RegistryError {
    RegistryError::Format {
        provider: provider.to_string(),
        message: message.into(),
    }
}

fn compile_anchored(
    provider: &str,
    what: &str,
    patterns: &[String],
) -> Result<Vec<Regex>, RegistryError> {
    patterns
        .iter()
        .map(|p| {
            Regex::new(&format!("^(?:{p})$"))
                .map_err(|e| format_err(provider, format!("invalid {what} pattern \"{p}\": {e}")))
        })
        .collect()
}

fn compile_provider(doc: &ProviderDoc) -> Result<Provider, RegistryError> {
    let id = &doc.id;
    let resolved_calls = compile_anchored(id, "resolved_calls", &doc.resolved_calls)?;
    let client_constructors =
        compile_anchored(id, "client_constructors", &doc.client_constructors)?;
    let temperature_exempt_models = compile_anchored(
        id,
        "temperature_exempt_models",
        &doc.temperature_exempt_models,
    )?;

    for s in &doc.suffix_calls {
        if !s.starts_with('.') || s.len() < 2 {
            return Err(format_err(
                id,
                format!("suffix_calls entry \"{s}\" must start with '.' and name at least one attribute"),
            ));
        }
    }

    let style = match doc.pinning.style.as_str() {
        "patterns" => PinningStyle::Patterns,
        "revision_kwarg" => PinningStyle::RevisionKwarg,
        other => {
            return Err(format_err(
                id,
                format!(
                "unknown pinning style \"{other}\" (expected \"patterns\" or \"revision_kwarg\")"
            ),
            ))
        }
    };
    let pinning = PinPolicy {
        style,
        pinned: compile_anchored(id, "pinning.pinned", &doc.pinning.pinned)?,
        moving: compile_anchored(id, "pinning.moving", &doc.pinning.moving)?,
    };

    let mut roles: BTreeMap<Role, Vec<ParamPath>> = BTreeMap::new();
    for (key, raw_paths) in &doc.roles {
        let role =
            Role::parse(key).ok_or_else(|| format_err(id, format!("unknown role \"{key}\"")))?;
        let mut paths = Vec::with_capacity(raw_paths.len());
        for raw in raw_paths {
            paths.push(ParamPath::parse(raw).map_err(|m| format_err(id, m))?);
        }
        roles.insert(role, paths);
    }

    let provider = Provider {
        id: doc.id.clone(),
        display_name: if doc.display_name.is_empty() {
            doc.id.clone()
        } else {
            doc.display_name.clone()
        },
        resolved_calls,
        suffix_calls: doc.suffix_calls.clone(),
        client_constructors,
        option_chain_methods: doc.option_chain_methods.clone(),
        structured_output_callees: doc.structured_output_callees.clone(),
        temperature_exempt_models,
        pinning,
        roles,
    };

    if provider.has_inference_patterns() {
        const REQUIRED: [Role; 5] = [
            Role::Model,
            Role::OutputTokenCap,
            Role::Timeout,
            Role::MaxRetries,
            Role::Temperature,
        ];
        for role in REQUIRED {
            if !provider.roles.contains_key(&role) {
                return Err(format_err(
                    id,
                    format!(
                        "role \"{}\" must be declared (an empty list marks it not applicable)",
                        role.name()
                    ),
                ));
            }
        }
    }
    if provider.pinning.style == PinningStyle::RevisionKwarg
        && !provider.role_applies(Role::ModelRevision)
    {
        return Err(format_err(
            id,
            "pinning style \"revision_kwarg\" requires a non-empty model_revision role",
        ));
    }

    Ok(provider)
}

pub(crate) fn hex_sha256(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}
