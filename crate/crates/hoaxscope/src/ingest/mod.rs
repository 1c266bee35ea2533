//! MediaWiki acquisition: revision timestamps and plain-text extracts,
//! fetched through one rate-limited queue and cached on disk.

mod cache;

use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use chrono::{SecondsFormat, Utc};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use cache::{Cache, CacheEntry, GcStats};

use crate::error::{Error, Result};
use crate::formats::{format_timestamp, parse_timestamp};

pub const DEFAULT_API_URL: &str = "https://en.wikipedia.org/w/api.php";
pub const DEFAULT_USER_AGENT: &str = concat!("hoaxscope/", env!("CARGO_PKG_VERSION"), " (research client)");

/// Upper bound on continuation pages for one title; guards against a
/// server that never stops returning `continue`.
const MAX_CONTINUATIONS: usize = 10_000;

/// Trims, maps `_` to space, collapses whitespace runs and uppercases the
/// first character, the way MediaWiki canonicalizes titles.
pub fn normalize_title(title: &str) -> String {
    let spaced = title.replace('_', " ");
    let collapsed = spaced.split_whitespace().collect::<Vec<_>>().join(" ");
    let mut chars = collapsed.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WikiPageRef {
    /// Normalized title; never empty.
    pub title: String,
    pub resolved_id: Option<u64>,
}

impl WikiPageRef {
    pub fn new(title: &str) -> Result<Self> {
        let title = normalize_title(title);
        if title.is_empty() {
            return Err(Error::Validation("empty page title".into()));
        }
        Ok(Self {
            title,
            resolved_id: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FetchStatus {
    Ok,
    /// The title is not a valid page name.
    Missing,
    /// The title is valid but no page exists under it.
    Deleted,
    RateLimited,
    NetworkError,
}

impl FetchStatus {
    /// Statuses worth caching: answers from the server, not failures to
    /// get one.
    fn is_definitive(self) -> bool {
        matches!(self, FetchStatus::Ok | FetchStatus::Missing | FetchStatus::Deleted)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FetchKind {
    Revisions,
    Extract,
}

impl FetchKind {
    fn dir_name(self) -> &'static str {
        match self {
            FetchKind::Revisions => "revisions",
            FetchKind::Extract => "extracts",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    /// ISO-8601 UTC instants, oldest first.
    Timestamps(Vec<String>),
    Extract(String),
}

/// Outcome of one fetch. `payload` is present iff `status` is `Ok`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FetchResult {
    pub page: WikiPageRef,
    pub status: FetchStatus,
    pub payload: Option<Payload>,
    /// RFC 3339 UTC instant of the network fetch.
    pub fetched_at: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl FetchResult {
    fn failed(page: WikiPageRef, status: FetchStatus, diagnostic: impl Into<String>) -> Self {
        Self {
            page,
            status,
            payload: None,
            fetched_at: now_rfc3339(),
            diagnostic: Some(diagnostic.into()),
        }
    }

    pub fn timestamps(&self) -> Option<&[String]> {
        match &self.payload {
            Some(Payload::Timestamps(t)) => Some(t),
            _ => None,
        }
    }

    pub fn extract(&self) -> Option<&str> {
        match &self.payload {
            Some(Payload::Extract(t)) => Some(t),
            _ => None,
        }
    }
}

fn now_rfc3339() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClientConfig {
    pub api_url: String,
    pub user_agent: String,
    /// Requests per second; non-positive disables the limit.
    pub rate: f64,
    /// Each wait is stretched by a uniform factor in `[1, 1 + jitter]`.
    pub jitter: f64,
    pub cache_dir: Option<PathBuf>,
    /// Attempts per request when the server answers 429.
    pub max_attempts: u32,
    /// Sleep before retry `n` (0-based) is `backoff_base * 2^n`.
    pub backoff_base: Duration,
    pub timeout: Duration,
}

impl Default for ClientConfig {
    fn default() -> Self {
        Self {
            api_url: DEFAULT_API_URL.into(),
            user_agent: DEFAULT_USER_AGENT.into(),
            rate: 1.0,
            jitter: 0.2,
            cache_dir: None,
            max_attempts: 5,
            backoff_base: Duration::from_secs(1),
            timeout: Duration::from_secs(30),
        }
    }
}

enum RequestFailure {
    RateLimited(String),
    Network(String),
}

impl RequestFailure {
    fn into_result(self, page: WikiPageRef) -> FetchResult {
        match self {
            RequestFailure::RateLimited(m) => FetchResult::failed(page, FetchStatus::RateLimited, m),
            RequestFailure::Network(m) => FetchResult::failed(page, FetchStatus::NetworkError, m),
        }
    }
}

/// A MediaWiki API client. Shareable across threads: requests are
/// serialized through one rate gate, cache reads are lock-free.
pub struct Client {
    config: ClientConfig,
    agent: ureq::Agent,
    next_slot: Mutex<Instant>,
    requests: AtomicU64,
    cache: Option<Cache>,
}

impl Client {
    pub fn new(config: ClientConfig) -> Result<Self> {
        if config.max_attempts == 0 {
            return Err(Error::Usage("max attempts must be at least 1".into()));
        }
        if !(config.jitter >= 0.0 && config.jitter.is_finite()) {
            return Err(Error::Usage("jitter must be a non-negative number".into()));
        }
        let agent_config = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(config.timeout))
            .user_agent(config.user_agent.as_str())
            .build();
        Ok(Self {
            agent: ureq::Agent::new_with_config(agent_config),
            next_slot: Mutex::new(Instant::now()),
            requests: AtomicU64::new(0),
            cache: config.cache_dir.clone().map(Cache::new),
            config,
        })
    }

    pub fn config(&self) -> &ClientConfig {
        &self.config
    }

    /// HTTP requests issued so far, retries included.
    pub fn requests(&self) -> u64 {
        self.requests.load(Ordering::SeqCst)
    }

    pub fn fetch_revision_timestamps(&self, page: &WikiPageRef) -> FetchResult {
        self.cached(FetchKind::Revisions, page, || self.revisions_uncached(page))
    }

    pub fn fetch_extract(&self, page: &WikiPageRef) -> FetchResult {
        self.cached(FetchKind::Extract, page, || self.extract_uncached(page))
    }

    fn cached(&self, kind: FetchKind, page: &WikiPageRef, fetch: impl FnOnce() -> FetchResult) -> FetchResult {
        if let Some(entry) = self.cache.as_ref().and_then(|c| c.get(kind, &page.title)) {
            log::debug!("cache hit: {:?} {}", kind, page.title);
            return entry.result;
        }
        let result = fetch();
        if let Some(cache) = &self.cache {
            if result.status.is_definitive() {
                let entry = CacheEntry {
                    format_version: crate::FORMAT_VERSION,
                    kind,
                    result: result.clone(),
                };
                if let Err(e) = cache.put(&entry) {
                    log::warn!("could not cache {}: {e}", page.title);
                }
            }
        }
        result
    }

    /// Blocks until the next request slot. The lock is held while
    /// sleeping, so waiters queue behind each other.
    fn wait_for_slot(&self) {
        if !(self.config.rate > 0.0 && self.config.rate.is_finite()) {
            return;
        }
        let mut next = self.next_slot.lock().unwrap_or_else(|p| p.into_inner());
        let now = Instant::now();
        if *next > now {
            std::thread::sleep(*next - now);
        }
        let stretch = 1.0 + self.config.jitter * rand::rng().random::<f64>();
        *next = Instant::now() + Duration::from_secs_f64(stretch / self.config.rate);
    }

    fn request(&self, params: &[(String, String)]) -> std::result::Result<Value, RequestFailure> {
        for attempt in 0..self.config.max_attempts {
            self.wait_for_slot();
            self.requests.fetch_add(1, Ordering::SeqCst);
            let mut req = self.agent.get(&self.config.api_url);
            for (k, v) in params {
                req = req.query(k, v);
            }
            let response = req
                .call()
                .map_err(|e| RequestFailure::Network(format!("transport failure: {e}")))?;
            let status = response.status().as_u16();
            if status == 429 {
                if attempt + 1 == self.config.max_attempts {
                    break;
                }
                let delay = self.config.backoff_base.saturating_mul(1 << attempt.min(16));
                log::info!("HTTP 429, retrying in {delay:?}");
                std::thread::sleep(delay);
                continue;
            }
            if !(200..300).contains(&status) {
                return Err(RequestFailure::Network(format!("HTTP status {status}")));
            }
            let body = response
                .into_body()
                .read_to_string()
                .map_err(|e| RequestFailure::Network(format!("reading body: {e}")))?;
            let value: Value = serde_json::from_str(&body)
                .map_err(|e| RequestFailure::Network(format!("malformed response body: {e}")))?;
            if let Some(err) = value.get("error") {
                let code = err.get("code").and_then(Value::as_str).unwrap_or("unknown");
                let info = err.get("info").and_then(Value::as_str).unwrap_or("");
                return Err(RequestFailure::Network(format!("API error {code}: {info}")));
            }
            return Ok(value);
        }
        Err(RequestFailure::RateLimited(format!(
            "still rate limited after {} attempts",
            self.config.max_attempts
        )))
    }

    fn base_params(&self, page: &WikiPageRef, prop: &str) -> Vec<(String, String)> {
        [
            ("action", "query"),
            ("format", "json"),
            ("formatversion", "2"),
            ("redirects", "1"),
            ("prop", prop),
            ("titles", page.title.as_str()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
    }

    fn revisions_uncached(&self, page: &WikiPageRef) -> FetchResult {
        let mut params = self.base_params(page, "revisions");
        for (k, v) in [("rvprop", "timestamp"), ("rvlimit", "max"), ("rvdir", "newer")] {
            params.push((k.into(), v.into()));
        }
        let mut resolved = page.clone();
        let mut stamps = Vec::new();
        for _ in 0..MAX_CONTINUATIONS {
            let value = match self.request(&params) {
                Ok(v) => v,
                Err(f) => return f.into_result(resolved),
            };
            let page_value = match single_page(&value) {
                Ok(PageState::Present(p)) => p,
                Ok(PageState::Absent(status, why)) => return FetchResult::failed(resolved, status, why),
                Err(m) => return FetchResult::failed(resolved, FetchStatus::NetworkError, m),
            };
            resolved.resolved_id = page_value.get("pageid").and_then(Value::as_u64).or(resolved.resolved_id);
            let revisions = page_value.get("revisions").and_then(Value::as_array);
            for rev in revisions.into_iter().flatten() {
                let parsed = rev
                    .get("timestamp")
                    .and_then(Value::as_str)
                    .ok_or_else(|| "revision without timestamp".to_string())
                    .and_then(parse_timestamp);
                match parsed {
                    Ok(t) => stamps.push(t),
                    Err(m) => return FetchResult::failed(resolved, FetchStatus::NetworkError, m),
                }
            }
            match value.get("continue").and_then(Value::as_object) {
                Some(cont) => {
                    for (k, v) in cont {
                        let v = match v {
                            Value::String(s) => s.clone(),
                            other => other.to_string(),
                        };
                        params.retain(|(pk, _)| pk != k);
                        params.push((k.clone(), v));
                    }
                }
                None => {
                    if stamps.is_empty() {
                        return FetchResult::failed(resolved, FetchStatus::NetworkError, "page has no revisions");
                    }
                    stamps.sort();
                    return FetchResult {
                        page: resolved,
                        status: FetchStatus::Ok,
                        payload: Some(Payload::Timestamps(stamps.into_iter().map(format_timestamp).collect())),
                        fetched_at: now_rfc3339(),
                        diagnostic: None,
                    };
                }
            }
        }
        FetchResult::failed(resolved, FetchStatus::NetworkError, "too many continuation pages")
    }

    fn extract_uncached(&self, page: &WikiPageRef) -> FetchResult {
        let mut params = self.base_params(page, "extracts");
        params.push(("explaintext".into(), "1".into()));
        let mut resolved = page.clone();
        let value = match self.request(&params) {
            Ok(v) => v,
            Err(f) => return f.into_result(resolved),
        };
        let page_value = match single_page(&value) {
            Ok(PageState::Present(p)) => p,
            Ok(PageState::Absent(status, why)) => return FetchResult::failed(resolved, status, why),
            Err(m) => return FetchResult::failed(resolved, FetchStatus::NetworkError, m),
        };
        resolved.resolved_id = page_value.get("pageid").and_then(Value::as_u64);
        match page_value.get("extract").and_then(Value::as_str) {
            Some(text) if !text.trim().is_empty() => FetchResult {
                page: resolved,
                status: FetchStatus::Ok,
                payload: Some(Payload::Extract(text.to_string())),
                fetched_at: now_rfc3339(),
                diagnostic: None,
            },
            Some(_) => FetchResult::failed(resolved, FetchStatus::Missing, "page has an empty extract"),
            None => FetchResult::failed(resolved, FetchStatus::NetworkError, "response lacks an extract field"),
        }
    }
}

enum PageState<'a> {
    Present(&'a Value),
    Absent(FetchStatus, String),
}

/// The one page of a single-title `formatversion=2` query.
fn single_page(value: &Value) -> std::result::Result<PageState<'_>, String> {
    let page = value
        .pointer("/query/pages/0")
        .ok_or_else(|| "malformed response: no query.pages[0]".to_string())?;
    let flag = |k: &str| page.get(k).is_some_and(|v| v.as_bool().unwrap_or(true));
    if flag("invalid") {
        let why = page.get("invalidreason").and_then(Value::as_str).unwrap_or("invalid title");
        return Ok(PageState::Absent(FetchStatus::Missing, why.to_string()));
    }
    if flag("missing") {
        return Ok(PageState::Absent(FetchStatus::Deleted, "page does not exist".into()));
    }
    Ok(PageState::Present(page))
}
