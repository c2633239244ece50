//! Generic REST translation backend driven by a declarative JSON config.
//!
//! ```json
//! {
//!   "system_id": "acme-mt",
//!   "url": "https://api.example.com/v2/translate?target={lang}",
//!   "method": "POST",
//!   "headers": {"Authorization": "Bearer ${ACME_KEY}"},
//!   "body_template": {"q": "{texts}", "source": "en", "target": "{lang}"},
//!   "response_path": "translations.*.text",
//!   "rate_per_sec": 10,
//!   "batch_size": 16
//! }
//! ```
//!
//! Placeholders: `{lang}` and `{text}` inside strings of the URL or body, and
//! a body string that is exactly `"{texts}"` becomes the JSON array of the
//! batch. In the URL, `{text}` is percent-encoded. `${VAR}` in header values
//! is read from the environment. `response_path` is a dot path into the
//! response; `*` maps over an array and numeric segments index into one.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{BackendError, ItemResult, SourceItem, TranslatorBackend};
use crate::language::LanguageCode;

fn default_method() -> String {
    "POST".into()
}
fn default_batch() -> usize {
    1
}
fn default_attempts() -> u32 {
    3
}
fn default_backoff() -> u64 {
    250
}
fn default_timeout() -> u64 {
    30
}
fn default_system() -> String {
    "http".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HttpBackendConfig {
    #[serde(default = "default_system")]
    pub system_id: String,
    pub url: String,
    #[serde(default = "default_method")]
    pub method: String,
    #[serde(default)]
    pub headers: BTreeMap<String, String>,
    #[serde(default)]
    pub body_template: Option<Value>,
    pub response_path: String,
    /// Maximum requests per second, retries included. Zero or absent means
    /// unlimited.
    #[serde(default)]
    pub rate_per_sec: f64,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    #[serde(default = "default_attempts")]
    pub max_attempts: u32,
    /// Delay before the first retry; doubles on every further attempt.
    #[serde(default = "default_backoff")]
    pub backoff_ms: u64,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
}

impl HttpBackendConfig {
    pub fn from_file(path: &Path) -> Result<Self, BackendError> {
        let raw = fs::read_to_string(path).map_err(|source| BackendError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&raw)
            .map_err(|e| BackendError::Config(format!("{}: {e}", path.display())))
    }
}

struct RateLimiter {
    interval: Option<Duration>,
    next_slot: Mutex<Instant>,
}

impl RateLimiter {
    fn new(rate_per_sec: f64) -> Self {
        let interval = (rate_per_sec > 0.0).then(|| Duration::from_secs_f64(1.0 / rate_per_sec));
        Self {
            interval,
            next_slot: Mutex::new(Instant::now()),
        }
    }

    /// Blocks until the caller may issue a request.
    fn acquire(&self) {
        let Some(interval) = self.interval else {
            return;
        };
        let wait = {
            let mut next = self.next_slot.lock().expect("rate limiter poisoned");
            let now = Instant::now();
            let slot = (*next).max(now);
            *next = slot + interval;
            slot - now
        };
        if !wait.is_zero() {
            thread::sleep(wait);
        }
    }
}

enum Attempt {
    Done(Vec<ItemResult>),
    Transport(String),
    Status(u16),
}

pub struct HttpBackend {
    config: HttpBackendConfig,
    agent: ureq::Agent,
    limiter: RateLimiter,
    reached: AtomicBool,
}

impl HttpBackend {
    pub fn new(config: HttpBackendConfig) -> Result<Self, BackendError> {
        if config.batch_size == 0 {
            return Err(BackendError::Config("batch_size must be at least 1".into()));
        }
        if config.max_attempts == 0 {
            return Err(BackendError::Config(
                "max_attempts must be at least 1".into(),
            ));
        }
        if !matches!(
            config.method.to_ascii_uppercase().as_str(),
            "GET" | "POST" | "PUT"
        ) {
            return Err(BackendError::Config(format!(
                "unsupported method `{}`",
                config.method
            )));
        }
        if config.batch_size > 1 && !config.response_path.split('.').any(|s| s == "*") {
            return Err(BackendError::Config(
                "batched requests need a `*` segment in response_path".into(),
            ));
        }
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(config.timeout_secs)))
            .build()
            .into();
        Ok(Self {
            limiter: RateLimiter::new(config.rate_per_sec),
            config,
            agent,
            reached: AtomicBool::new(false),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, BackendError> {
        Self::new(HttpBackendConfig::from_file(path)?)
    }

    fn render_url(&self, language: &LanguageCode, items: &[SourceItem<'_>]) -> String {
        let text = items.first().map_or("", |i| i.text);
        self.config
            .url
            .replace("{lang}", language.as_str())
            .replace("{text}", &percent_encode(text))
    }

    fn render_body(&self, language: &LanguageCode, items: &[SourceItem<'_>]) -> Option<Value> {
        self.config
            .body_template
            .as_ref()
            .map(|t| fill_template(t, language.as_str(), items))
    }

    fn attempt(&self, language: &LanguageCode, items: &[SourceItem<'_>]) -> Attempt {
        self.limiter.acquire();
        let url = self.render_url(language, items);
        let body = self.render_body(language, items);
        let method = self.config.method.to_ascii_uppercase();

        let result = if method == "GET" {
            let mut req = self.agent.get(&url);
            for (k, v) in &self.config.headers {
                req = req.header(k.as_str(), expand_env(v).as_str());
            }
            req.call()
        } else {
            let mut req = if method == "PUT" {
                self.agent.put(&url)
            } else {
                self.agent.post(&url)
            };
            for (k, v) in &self.config.headers {
                req = req.header(k.as_str(), expand_env(v).as_str());
            }
            let payload = body.map(|b| b.to_string()).unwrap_or_default();
            req.header("Content-Type", "application/json").send(payload)
        };

        let mut resp = match result {
            Ok(r) => r,
            Err(e) => return Attempt::Transport(e.to_string()),
        };
        self.reached.store(true, Ordering::Relaxed);
        let status = resp.status().as_u16();
        if !(200..300).contains(&status) {
            return Attempt::Status(status);
        }
        let parsed = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| e.to_string())
            .and_then(|s| {
                serde_json::from_str::<Value>(&s).map_err(|e| format!("malformed JSON: {e}"))
            })
            .and_then(|v| extract_path(&v, &self.config.response_path));
        Attempt::Done(match parsed {
            Err(e) => vec![Err(e); items.len()],
            Ok(found) => {
                if found.len() != items.len() {
                    vec![
                        Err(format!(
                            "response has {} translations for {} sentences",
                            found.len(),
                            items.len()
                        ));
                        items.len()
                    ]
                } else {
                    found
                        .into_iter()
                        .map(|v| match v {
                            Value::String(s) => Ok(s),
                            other => Err(format!("expected a string, found {other}")),
                        })
                        .collect()
                }
            }
        })
    }
}

impl TranslatorBackend for HttpBackend {
    fn system_id(&self) -> &str {
        &self.config.system_id
    }

    fn batch_size(&self) -> usize {
        self.config.batch_size
    }

    fn translate_batch(
        &self,
        language: &LanguageCode,
        items: &[SourceItem<'_>],
    ) -> Result<Vec<ItemResult>, BackendError> {
        let mut last = String::new();
        let mut transport_only = true;
        for attempt in 0..self.config.max_attempts {
            if attempt > 0 {
                let delay = self
                    .config
                    .backoff_ms
                    .saturating_mul(1 << (attempt - 1).min(16));
                thread::sleep(Duration::from_millis(delay));
            }
            match self.attempt(language, items) {
                Attempt::Done(results) => return Ok(results),
                Attempt::Status(code) => {
                    transport_only = false;
                    last = format!("HTTP {code}");
                }
                Attempt::Transport(e) => last = e,
            }
        }
        if transport_only && !self.reached.load(Ordering::Relaxed) {
            return Err(BackendError::Unreachable(format!(
                "{}: {last}",
                self.config.url
            )));
        }
        let reason = format!("failed after {} attempts: {last}", self.config.max_attempts);
        Ok(vec![Err(reason); items.len()])
    }
}

fn percent_encode(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for b in s.bytes() {
        if b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.' | b'~') {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

fn expand_env(value: &str) -> String {
    let mut out = String::new();
    let mut rest = value;
    while let Some(start) = rest.find("${") {
        out.push_str(&rest[..start]);
        match rest[start + 2..].find('}') {
            Some(end) => {
                let name = &rest[start + 2..start + 2 + end];
                out.push_str(&std::env::var(name).unwrap_or_default());
                rest = &rest[start + 3 + end..];
            }
            None => {
                out.push_str(&rest[start..]);
                rest = "";
            }
        }
    }
    out.push_str(rest);
    out
}

fn fill_template(template: &Value, lang: &str, items: &[SourceItem<'_>]) -> Value {
    match template {
        Value::String(s) if s == "{texts}" => Value::Array(
            items
                .iter()
                .map(|i| Value::String(i.text.to_string()))
                .collect(),
        ),
        Value::String(s) => {
            let text = items.first().map_or("", |i| i.text);
            Value::String(s.replace("{lang}", lang).replace("{text}", text))
        }
        Value::Array(a) => Value::Array(a.iter().map(|v| fill_template(v, lang, items)).collect()),
        Value::Object(o) => Value::Object(
            o.iter()
                .map(|(k, v)| (k.clone(), fill_template(v, lang, items)))
                .collect(),
        ),
        other => other.clone(),
    }
}

/// Resolves a dot path, expanding `*` over arrays. Returns the leaves in
/// document order.
fn extract_path(root: &Value, path: &str) -> Result<Vec<Value>, String> {
    let mut current = vec![root.clone()];
    for seg in path.split('.').filter(|s| !s.is_empty()) {
        let mut next = Vec::new();
        for v in current {
            match (seg, v) {
                ("*", Value::Array(items)) => next.extend(items),
                ("*", other) => return Err(format!("`*` applied to non-array {other}")),
                (key, Value::Object(mut map)) => match map.remove(key) {
                    Some(child) => next.push(child),
                    None => return Err(format!("missing key `{key}` in response")),
                },
                (idx, Value::Array(mut items)) => {
                    let i: usize = idx
                        .parse()
                        .map_err(|_| format!("cannot index array with `{idx}`"))?;
                    if i >= items.len() {
                        return Err(format!("index {i} out of range in response"));
                    }
                    next.push(items.swap_remove(i));
                }
                (key, other) => return Err(format!("cannot descend into {other} with `{key}`")),
            }
        }
        current = next;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn path_extraction() {
        let v = json!({"data": {"translations": [{"text": "a"}, {"text": "b"}]}});
        assert_eq!(
            extract_path(&v, "data.translations.*.text").unwrap(),
            vec![json!("a"), json!("b")]
        );
        assert_eq!(
            extract_path(&v, "data.translations.1.text").unwrap(),
            vec![json!("b")]
        );
        assert!(extract_path(&v, "data.missing").is_err());
        assert!(extract_path(&v, "data.translations.9").is_err());
    }

    #[test]
    fn template_filling() {
        let items = [
            SourceItem {
                id: "1",
                text: "Hi \"there\"",
            },
            SourceItem {
                id: "2",
                text: "Bye",
            },
        ];
        let t = json!({"q": "{texts}", "target": "{lang}", "nested": ["{text}"]});
        let filled = fill_template(&t, "es", &items);
        assert_eq!(
            filled,
            json!({"q": ["Hi \"there\"", "Bye"], "target": "es", "nested": ["Hi \"there\""]})
        );
    }

    #[test]
    fn url_encoding_and_env() {
        assert_eq!(percent_encode("a b/é"), "a%20b%2F%C3%A9");
        std::env::set_var("MTGENDER_TEST_KEY", "s3cret");
        assert_eq!(expand_env("Bearer ${MTGENDER_TEST_KEY}!"), "Bearer s3cret!");
        assert_eq!(expand_env("no ${unterminated"), "no ${unterminated");
    }

    #[test]
    fn config_validation() {
        let base = json!({"url": "http://x", "response_path": "t"});
        let cfg: HttpBackendConfig = serde_json::from_value(base.clone()).unwrap();
        assert_eq!(cfg.max_attempts, 3);
        assert!(HttpBackend::new(cfg.clone()).is_ok());
        let batched = HttpBackendConfig {
            batch_size: 4,
            ..cfg.clone()
        };
        assert!(HttpBackend::new(batched).is_err());
        let bad_method = HttpBackendConfig {
            method: "DELETE".into(),
            ..cfg
        };
        assert!(HttpBackend::new(bad_method).is_err());
    }

    #[test]
    fn limiter_spaces_requests() {
        let lim = RateLimiter::new(50.0);
        let t0 = Instant::now();
        for _ in 0..6 {
            lim.acquire();
        }
        // five intervals of 20ms after the first immediate slot
        assert!(t0.elapsed() >= Duration::from_millis(100));
    }
}
