//! Repository acquisition via the GitHub repository-search HTTP API:
//! keyword queries filtered by language, star count, and recency, paginated
//! with rate-limit-aware retries, merged into one deduplicated manifest.

use std::time::Duration;

use crate::manifest::{merge_manifests, ManifestRecord};
use crate::CorpusError;

/// Search keywords used when none are given.
pub const DEFAULT_KEYWORDS: &[&str] = &["openai", "llama", "llm", "anthropic"];

/// Attempts per page when the server keeps answering "rate limited".
const MAX_RATE_RETRIES: u32 = 3;
/// Upper bound on one rate-limit sleep; a reset further out than this makes
/// the run give up with a partial manifest instead of stalling.
const RETRY_SLEEP_CAP_SECS: u64 = 60;
/// The search API serves at most 1000 results per query.
const MAX_PAGES_PER_KEYWORD: u32 = 10;

/// One repository search: keywords are queried independently and the
/// results merged.
#[derive(Debug, Clone)]
pub struct SearchSpec {
    pub keywords: Vec<String>,
    pub language: String,
    pub min_stars: u64,
    /// GitHub sort key; `updated` keeps the corpus recent.
    pub sort: String,
    /// Maximum records in the merged manifest.
    pub limit: usize,
}

impl Default for SearchSpec {
    fn default() -> Self {
        SearchSpec {
            keywords: DEFAULT_KEYWORDS.iter().map(|s| s.to_string()).collect(),
            language: "Python".into(),
            min_stars: 20,
            sort: "updated".into(),
            limit: 100,
        }
    }
}

/// Search result: manifest records in API order plus any trouble met on the
/// way (a partial manifest is still a manifest).
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub records: Vec<ManifestRecord>,
    pub warnings: Vec<String>,
}

/// Runs the search. `api_base` is the API root (overridable for tests and
/// GitHub Enterprise); the token is required — unauthenticated search has a
/// rate budget too small to be useful.
pub fn search_repos(
    spec: &SearchSpec,
    token: &str,
    api_base: &str,
) -> Result<SearchOutcome, CorpusError> {
    if spec.limit < 1 {
        return Err(CorpusError::Search("limit must be at least 1".into()));
    }
    if spec.keywords.is_empty() {
        return Err(CorpusError::Search(
            "at least one keyword is required".into(),
        ));
    }
    if token.is_empty() {
        return Err(CorpusError::Auth("no token provided".into()));
    }

    let agent = ureq::AgentBuilder::new()
        .timeout(Duration::from_secs(30))
        .build();
    let base = api_base.trim_end_matches('/');
    let per_page = spec.limit.min(100);

    let mut merged: Vec<ManifestRecord> = Vec::new();
    let mut warnings = Vec::new();
    'keywords: for keyword in &spec.keywords {
        let query = format!(
            "{keyword} language:{} stars:>{}",
            spec.language, spec.min_stars
        );
        for page in 1..=MAX_PAGES_PER_KEYWORD {
            if merged.len() >= spec.limit {
                break 'keywords;
            }
            let items = match fetch_page(&agent, base, token, &query, &spec.sort, per_page, page) {
                Ok(items) => items,
                Err(PageError::RateLimited(detail)) => {
                    warnings.push(format!(
                        "rate limit exhausted while searching \"{keyword}\" (page {page}): {detail}; manifest is partial"
                    ));
                    break 'keywords;
                }
                Err(PageError::Fatal(e)) => return Err(e),
            };
            if items.is_empty() {
                break;
            }
            let records = items
                .iter()
                .filter_map(|item| record_from_item(item, keyword))
                .collect::<Vec<_>>();
            merged = merge_manifests(merged, records);
        }
    }
    merged.truncate(spec.limit);
    Ok(SearchOutcome {
        records: merged,
        warnings,
    })
}

enum PageError {
    /// Retries exhausted; the caller keeps what it has.
    RateLimited(String),
    Fatal(CorpusError),
}

fn fetch_page(
    agent: &ureq::Agent,
    base: &str,
    token: &str,
    query: &str,
    sort: &str,
    per_page: usize,
    page: u32,
) -> Result<Vec<serde_json::Value>, PageError> {
    for attempt in 0..=MAX_RATE_RETRIES {
        let response = agent
            .get(&format!("{base}/search/repositories"))
            .query("q", query)
            .query("sort", sort)
            .query("order", "desc")
            .query("per_page", &per_page.to_string())
            .query("page", &page.to_string())
            .set("Authorization", &format!("Bearer {token}"))
            .set("Accept", "application/vnd.github+json")
            .set("User-Agent", "llmlint-corpus")
            .call();
        match response {
            Ok(resp) => {
                let body: serde_json::Value = resp.into_json().map_err(|e| {
                    PageError::Fatal(CorpusError::Search(format!("invalid response body: {e}")))
                })?;
                let items = body
                    .get("items")
                    .and_then(|i| i.as_array())
                    .cloned()
                    .unwrap_or_default();
                return Ok(items);
            }
            Err(ureq::Error::Status(401, _)) => {
                return Err(PageError::Fatal(CorpusError::Auth(
                    "the API answered HTTP 401 (unauthorized)".into(),
                )));
            }
            Err(ureq::Error::Status(code @ (403 | 429), resp)) => {
                let retry_after = resp
                    .header("retry-after")
                    .and_then(|v| v.parse::<u64>().ok());
                let exhausted = resp.header("x-ratelimit-remaining") == Some("0");
                if retry_after.is_none() && !exhausted {
                    return Err(PageError::Fatal(CorpusError::Auth(format!(
                        "the API answered HTTP {code} (forbidden)"
                    ))));
                }
                if attempt == MAX_RATE_RETRIES {
                    return Err(PageError::RateLimited(format!(
                        "still limited after {MAX_RATE_RETRIES} retries"
                    )));
                }
                let sleep = retry_after.unwrap_or(1).min(RETRY_SLEEP_CAP_SECS);
                std::thread::sleep(Duration::from_secs(sleep));
            }
            Err(ureq::Error::Status(code, _)) => {
                return Err(PageError::Fatal(CorpusError::Search(format!(
                    "the API answered HTTP {code}"
                ))));
            }
            Err(e) => {
                return Err(PageError::Fatal(CorpusError::Search(format!(
                    "transport failure: {e}"
                ))));
            }
        }
    }
    unreachable!("loop returns on every arm")
}

/// Maps one search item to a manifest record; items missing the essential
/// fields are skipped.
fn record_from_item(item: &serde_json::Value, keyword: &str) -> Option<ManifestRecord> {
    let full_name = item.get("full_name")?.as_str()?;
    let clone_url = item.get("clone_url")?.as_str()?;
    Some(ManifestRecord {
        repo_id: full_name.replace('/', "__"),
        location: clone_url.to_string(),
        stars: item.get("stargazers_count").and_then(|v| v.as_u64()),
        updated: item
            .get("updated_at")
            .and_then(|v| v.as_str())
            .map(str::to_string),
        source: Some(format!("github:{keyword}")),
    })
}
