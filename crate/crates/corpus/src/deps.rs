//! LLM-dependency verification: a repository counts as an LLM-integrating
//! system only when a dependency file names a known LLM package. Keyword
//! search alone surfaces tutorials and scrapers; this check is what keeps
//! them out of the prevalence denominators.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// Package names that mark a repository as LLM-integrating. Entries ending
/// in `*` match any distribution whose normalized name starts with the
/// prefix (`langchain*` covers `langchain`, `langchain-openai`, …).
pub const LLM_PACKAGES: &[&str] = &[
    "openai",
    "anthropic",
    "google-generativeai",
    "google-genai",
    "transformers",
    "langchain*",
    "llama-index",
    "litellm",
    "ollama",
    "cohere",
    "mistralai",
    "vllm",
    "groq",
    "together",
];

/// One matched (file, package) pair backing a verification verdict.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DependencyEvidence {
    /// Path of the dependency file, relative to the repository root.
    pub file: String,
    /// Normalized package name that matched the LLM list.
    pub package: String,
}

/// Verification verdict plus everything needed to audit it.
#[derive(Debug, Clone, Default)]
pub struct VerifyResult {
    pub verified: bool,
    pub evidence: Vec<DependencyEvidence>,
    /// Unreadable or unparseable dependency files, skipped.
    pub warnings: Vec<String>,
}

/// Scans a repository's dependency files for LLM packages. Requirements
/// files are found at the root and one directory level down; the other
/// formats are conventionally root-only.
pub fn verify_llm_dependency(root: &Path) -> VerifyResult {
    let mut result = VerifyResult::default();
    for rel in dependency_files(root) {
        let path = root.join(&rel);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => {
                result
                    .warnings
                    .push(format!("{rel}: unreadable ({e}); skipped"));
                continue;
            }
        };
        let names = match file_kind(&rel) {
            DependencyFileKind::Requirements => requirement_names(&text),
            DependencyFileKind::PyprojectToml => match pyproject_names(&text) {
                Ok(names) => names,
                Err(e) => {
                    result.warnings.push(format!("{rel}: {e}; skipped"));
                    continue;
                }
            },
            DependencyFileKind::Pipfile => match pipfile_names(&text) {
                Ok(names) => names,
                Err(e) => {
                    result.warnings.push(format!("{rel}: {e}; skipped"));
                    continue;
                }
            },
            // setup.py / setup.cfg / environment.yml: a line scan that pulls
            // candidate names out of each line and lets the allow-list do
            // the filtering. Immune to the files' surrounding syntax.
            DependencyFileKind::LineScan => line_scan_names(&text),
        };
        for name in names {
            if matches_llm_package(&name) {
                let ev = DependencyEvidence {
                    file: rel.clone(),
                    package: name,
                };
                if !result.evidence.contains(&ev) {
                    result.evidence.push(ev);
                }
            }
        }
    }
    result.evidence.sort();
    result.verified = !result.evidence.is_empty();
    result
}

enum DependencyFileKind {
    Requirements,
    PyprojectToml,
    Pipfile,
    LineScan,
}

fn file_kind(rel: &str) -> DependencyFileKind {
    let name = rel.rsplit('/').next().unwrap_or(rel);
    if name.starts_with("requirements") && name.ends_with(".txt") {
        DependencyFileKind::Requirements
    } else if name == "pyproject.toml" {
        DependencyFileKind::PyprojectToml
    } else if name == "Pipfile" {
        DependencyFileKind::Pipfile
    } else {
        DependencyFileKind::LineScan
    }
}

/// Candidate dependency files, sorted, as root-relative slash paths.
fn dependency_files(root: &Path) -> Vec<String> {
    let mut found = Vec::new();
    for name in [
        "pyproject.toml",
        "setup.py",
        "setup.cfg",
        "environment.yml",
        "Pipfile",
    ] {
        if root.join(name).is_file() {
            found.push(name.to_string());
        }
    }
    collect_requirements(root, "", &mut found);
    if let Ok(entries) = fs::read_dir(root) {
        let mut dirs: Vec<String> = entries
            .flatten()
            .filter(|e| e.path().is_dir())
            .filter_map(|e| e.file_name().into_string().ok())
            .filter(|n| !n.starts_with('.'))
            .collect();
        dirs.sort();
        for dir in dirs {
            collect_requirements(&root.join(&dir), &format!("{dir}/"), &mut found);
        }
    }
    found.sort();
    found
}

fn collect_requirements(dir: &Path, prefix: &str, found: &mut Vec<String>) {
    let Ok(entries) = fs::read_dir(dir) else {
        return;
    };
    for entry in entries.flatten() {
        let Ok(name) = entry.file_name().into_string() else {
            continue;
        };
        if name.starts_with("requirements") && name.ends_with(".txt") && entry.path().is_file() {
            found.push(format!("{prefix}{name}"));
        }
    }
}

/// PEP 503 name normalization: lowercase, runs of `-_.` collapse to `-`.
fn normalize_name(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut pending_sep = false;
    for c in raw.chars() {
        if c == '-' || c == '_' || c == '.' {
            pending_sep = !out.is_empty();
        } else {
            if pending_sep {
                out.push('-');
                pending_sep = false;
            }
            out.push(c.to_ascii_lowercase());
        }
    }
    out
}

fn matches_llm_package(name: &str) -> bool {
    LLM_PACKAGES
        .iter()
        .any(|entry| match entry.strip_suffix('*') {
            Some(prefix) => {
                let prefix = normalize_name(prefix);
                name == prefix || name.starts_with(&format!("{prefix}-"))
            }
            None => name == normalize_name(entry),
        })
}

/// Leading distribution name of a requirement string, normalized.
/// `openai>=1.0`, `openai[aiohttp] @ https://…`, `openai == 1.2  # pin`
/// all yield `openai`.
fn extract_req_name(spec: &str) -> Option<String> {
    let spec = spec.trim();
    let end = spec
        .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.'))
        .unwrap_or(spec.len());
    let raw = &spec[..end];
    if raw.is_empty() || !raw.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
        return None;
    }
    Some(normalize_name(raw))
}

fn requirement_names(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#') && !l.starts_with('-'))
        .filter_map(extract_req_name)
        .collect()
}

fn pyproject_names(text: &str) -> Result<Vec<String>, String> {
    let doc: toml::Value = text.parse().map_err(|e| format!("invalid TOML ({e})"))?;
    let mut names = Vec::new();
    let project = doc.get("project");
    if let Some(deps) = project
        .and_then(|p| p.get("dependencies"))
        .and_then(|d| d.as_array())
    {
        names.extend(
            deps.iter()
                .filter_map(|v| v.as_str())
                .filter_map(extract_req_name),
        );
    }
    if let Some(groups) = project
        .and_then(|p| p.get("optional-dependencies"))
        .and_then(|d| d.as_table())
    {
        for deps in groups.values().filter_map(|v| v.as_array()) {
            names.extend(
                deps.iter()
                    .filter_map(|v| v.as_str())
                    .filter_map(extract_req_name),
            );
        }
    }
    let poetry = doc.get("tool").and_then(|t| t.get("poetry"));
    let mut poetry_tables = Vec::new();
    poetry_tables.extend(
        poetry
            .and_then(|p| p.get("dependencies"))
            .and_then(|d| d.as_table()),
    );
    poetry_tables.extend(
        poetry
            .and_then(|p| p.get("dev-dependencies"))
            .and_then(|d| d.as_table()),
    );
    if let Some(groups) = poetry
        .and_then(|p| p.get("group"))
        .and_then(|g| g.as_table())
    {
        for group in groups.values() {
            poetry_tables.extend(group.get("dependencies").and_then(|d| d.as_table()));
        }
    }
    for table in poetry_tables {
        names.extend(
            table
                .keys()
                .filter(|k| *k != "python")
                .filter_map(|k| extract_req_name(k)),
        );
    }
    Ok(names)
}

fn pipfile_names(text: &str) -> Result<Vec<String>, String> {
    let doc: toml::Value = text.parse().map_err(|e| format!("invalid TOML ({e})"))?;
    let mut names = Vec::new();
    for section in ["packages", "dev-packages"] {
        if let Some(table) = doc.get(section).and_then(|t| t.as_table()) {
            names.extend(table.keys().filter_map(|k| extract_req_name(k)));
        }
    }
    Ok(names)
}

/// Pulls candidate names out of arbitrary config-ish lines: every quoted
/// string is tried as a requirement, and so is the line itself once list
/// punctuation is stripped (covers `setup.cfg` and `environment.yml` items).
fn line_scan_names(text: &str) -> Vec<String> {
    let mut names = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for (i, chunk) in line.split(['"', '\'']).enumerate() {
            if i % 2 == 1 {
                names.extend(extract_req_name(chunk));
            }
        }
        let bare = line.trim_start_matches(['-', ' ', '\t']);
        names.extend(extract_req_name(bare));
    }
    names
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn repo_with(files: &[(&str, &str)]) -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        for (rel, content) in files {
            let path = dir.path().join(rel);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).unwrap();
            }
            fs::write(path, content).unwrap();
        }
        dir
    }

    #[test]
    fn requirements_txt_names_openai() {
        let repo = repo_with(&[(
            "requirements.txt",
            "requests==2.32.0\nopenai>=1.0  # pinned\n",
        )]);
        let result = verify_llm_dependency(repo.path());
        assert!(result.verified);
        assert_eq!(
            result.evidence,
            vec![DependencyEvidence {
                file: "requirements.txt".into(),
                package: "openai".into()
            }]
        );
    }

    #[test]
    fn no_dependency_files_is_unverified() {
        let repo = repo_with(&[("main.py", "print('hi')\n")]);
        let result = verify_llm_dependency(repo.path());
        assert!(!result.verified);
        assert!(result.evidence.is_empty());
    }

    #[test]
    fn non_llm_pyproject_is_unverified() {
        let repo = repo_with(&[(
            "pyproject.toml",
            "[project]\nname = \"web\"\ndependencies = [\"requests>=2.0\", \"flask\"]\n",
        )]);
        assert!(!verify_llm_dependency(repo.path()).verified);
    }

    #[test]
    fn pyproject_optional_and_poetry_sections_count() {
        let repo = repo_with(&[(
            "pyproject.toml",
            "[project]\nname = \"app\"\ndependencies = [\"requests\"]\n\
             [project.optional-dependencies]\nai = [\"anthropic==0.34\"]\n\
             [tool.poetry.dependencies]\npython = \"^3.11\"\nlangchain_openai = \"^0.2\"\n",
        )]);
        let result = verify_llm_dependency(repo.path());
        let packages: Vec<&str> = result.evidence.iter().map(|e| e.package.as_str()).collect();
        assert_eq!(packages, vec!["anthropic", "langchain-openai"]);
    }

    #[test]
    fn setup_py_line_scan_and_nested_requirements() {
        let repo = repo_with(&[
            (
                "setup.py",
                "setup(\n    install_requires=[\"GOOGLE_GENERATIVEAI>=0.8\"],\n)\n",
            ),
            ("deps/requirements-dev.txt", "pytest\ntransformers\n"),
        ]);
        let result = verify_llm_dependency(repo.path());
        assert!(result.verified);
        assert_eq!(
            result.evidence,
            vec![
                DependencyEvidence {
                    file: "deps/requirements-dev.txt".into(),
                    package: "transformers".into()
                },
                DependencyEvidence {
                    file: "setup.py".into(),
                    package: "google-generativeai".into()
                },
            ]
        );
    }

    #[test]
    fn environment_yml_and_pipfile() {
        let env = repo_with(&[(
            "environment.yml",
            "name: lab\ndependencies:\n  - python=3.11\n  - pip:\n      - litellm==1.40\n",
        )]);
        assert!(verify_llm_dependency(env.path()).verified);

        let pipfile = repo_with(&[("Pipfile", "[packages]\nollama = \"*\"\n")]);
        assert!(verify_llm_dependency(pipfile.path()).verified);
    }

    #[test]
    fn langchain_wildcard_matches_suffixed_distributions() {
        assert!(matches_llm_package("langchain"));
        assert!(matches_llm_package("langchain-anthropic"));
        assert!(!matches_llm_package("langchainx"));
        assert!(!matches_llm_package("not-langchain"));
    }

    #[test]
    fn requirement_name_extraction_handles_specifier_forms() {
        assert_eq!(extract_req_name("openai>=1.0"), Some("openai".into()));
        assert_eq!(
            extract_req_name("openai[aiohttp] @ https://x"),
            Some("openai".into())
        );
        assert_eq!(
            extract_req_name("Llama_Index.Core==0.11"),
            Some("llama-index-core".into())
        );
        assert_eq!(extract_req_name("123bad"), None);
        assert_eq!(extract_req_name(""), None);
    }
}
