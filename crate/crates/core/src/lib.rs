//! Call-site analysis engine for LLM API usage in Python source.
//!
//! The pipeline is: parse Python files into semantic models ([`source`]),
//! match call expressions against a data-driven provider registry
//! ([`registry`]), resolve each matched call into a normalized description
//! of its configuration ([`callsite`]), evaluate smell rules over those
//! descriptions ([`rules`]), and render findings ([`report`]). The
//! [`analyze`] module ties the stages together for whole-directory runs.

pub mod analyze;
pub mod callsite;
pub mod registry;
pub mod report;
pub mod rules;
pub mod source;

pub use analyze::{analyze_path, analyze_paths, analyze_sources, AnalysisOptions, AnalysisOutcome};
pub use report::{Confidence, Finding, Location, RuleId};
pub use rules::{NsoMode, RuleConfig};
