//! Obtaining target-language translations of the challenge corpus.
//!
//! A [`TranslatorBackend`] answers batches of source sentences. Failures of
//! individual sentences are recorded on their [`TranslationRecord`] and the
//! batch carries on; only a [`BackendError`] aborts the whole run.

mod http;

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::ChallengeInstance;
use crate::language::LanguageCode;

pub use http::{HttpBackend, HttpBackendConfig};

#[derive(Debug, thiserror::Error)]
pub enum BackendError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: line {line}: {message}", path.display())]
    Fixture {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("invalid backend config: {0}")]
    Config(String),
    #[error("backend unreachable: {0}")]
    Unreachable(String),
    #[error("backend does not support language `{0}`")]
    UnsupportedLanguage(LanguageCode),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// One sentence handed to a backend.
#[derive(Debug, Clone, Copy)]
pub struct SourceItem<'a> {
    pub id: &'a str,
    pub text: &'a str,
}

/// Per-item result: the translation or a failure reason.
pub type ItemResult = Result<String, String>;

pub trait TranslatorBackend: Send + Sync {
    fn system_id(&self) -> &str;

    /// Number of sentences the backend prefers per call.
    fn batch_size(&self) -> usize {
        1
    }

    /// Translates `items`, returning exactly one result per item.
    fn translate_batch(
        &self,
        language: &LanguageCode,
        items: &[SourceItem<'_>],
    ) -> Result<Vec<ItemResult>, BackendError>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationRecord {
    pub instance_id: String,
    pub system_id: String,
    pub language: LanguageCode,
    pub source: String,
    /// Empty exactly when `failure` is set.
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl TranslationRecord {
    pub fn is_ok(&self) -> bool {
        self.failure.is_none()
    }
}

/// Translates every instance, preserving input order.
///
/// `jobs` bounds the number of concurrent backend calls.
pub fn translate_corpus(
    instances: &[ChallengeInstance],
    backend: &dyn TranslatorBackend,
    language: &LanguageCode,
    jobs: usize,
) -> Result<Vec<TranslationRecord>, BackendError> {
    let batch = backend.batch_size().max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| BackendError::Pool(e.to_string()))?;

    let results: Vec<Vec<ItemResult>> = pool.install(|| {
        instances
            .par_chunks(batch)
            .map(|chunk| {
                let items: Vec<SourceItem<'_>> = chunk
                    .iter()
                    .map(|i| SourceItem {
                        id: &i.id,
                        text: &i.sentence,
                    })
                    .collect();
                let out = backend.translate_batch(language, &items)?;
                if out.len() != items.len() {
                    return Err(BackendError::Config(format!(
                        "backend returned {} results for {} sentences",
                        out.len(),
                        items.len()
                    )));
                }
                Ok(out)
            })
            .collect::<Result<_, BackendError>>()
    })?;

    let system_id = backend.system_id().to_string();
    let records: Vec<TranslationRecord> = instances
        .iter()
        .zip(results.into_iter().flatten())
        .map(|(inst, res)| {
            let (target, failure) = match res {
                Ok(t) if t.trim().is_empty() => (String::new(), Some("empty translation".into())),
                Ok(t) => (t, None),
                Err(e) => (String::new(), Some(e)),
            };
            TranslationRecord {
                instance_id: inst.id.clone(),
                system_id: system_id.clone(),
                language: language.clone(),
                source: inst.sentence.clone(),
                target,
                failure,
            }
        })
        .collect();
    let failed = records.iter().filter(|r| !r.is_ok()).count();
    if failed > 0 {
        log::warn!(
            "{failed} of {} sentences failed to translate",
            records.len()
        );
    }
    Ok(records)
}

fn sanitize_cell(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

/// Serializes records as `instance_id<TAB>target` lines, the same format the
/// file backend reads. Failed translations get an empty target and the
/// failure reason in a third column.
pub fn to_translations_tsv(records: &[TranslationRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&sanitize_cell(&r.instance_id));
        out.push('\t');
        out.push_str(&sanitize_cell(&r.target));
        if let Some(f) = &r.failure {
            out.push('\t');
            out.push_str(&sanitize_cell(f));
        }
        out.push('\n');
    }
    out
}

/// Serves translations stored in an `instance_id<TAB>target` TSV.
///
/// Ids missing from the file fail individually, as do lines with a third
/// `failure` column. A sidecar `<file>.meta.json`,
/// when present, is kept as provenance metadata.
#[derive(Debug, Clone)]
pub struct FileBackend {
    system_id: String,
    targets: HashMap<String, ItemResult>,
    metadata: Option<serde_json::Value>,
}

impl FileBackend {
    /// Loads a fixture; the system id defaults to the file stem.
    pub fn load(path: &Path) -> Result<Self, BackendError> {
        let text = fs::read_to_string(path).map_err(|source| BackendError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let system_id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "fixture".into());
        let mut backend =
            Self::parse(&text, system_id).map_err(|(line, message)| BackendError::Fixture {
                path: path.to_path_buf(),
                line,
                message,
            })?;

        let mut meta_path = path.as_os_str().to_owned();
        meta_path.push(".meta.json");
        let meta_path = PathBuf::from(meta_path);
        if meta_path.exists() {
            let raw = fs::read_to_string(&meta_path).map_err(|source| BackendError::Io {
                path: meta_path.clone(),
                source,
            })?;
            let value = serde_json::from_str(&raw).map_err(|e| BackendError::Fixture {
                path: meta_path.clone(),
                line: e.line(),
                message: e.to_string(),
            })?;
            backend.metadata = Some(value);
        }
        Ok(backend)
    }

    /// Parses fixture text. CRLF line endings are accepted.
    pub fn parse(text: &str, system_id: impl Into<String>) -> Result<Self, (usize, String)> {
        let mut targets = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let mut cols = line.splitn(3, '\t');
            let id = cols.next().unwrap_or_default();
            let target = cols
                .next()
                .ok_or_else(|| (i + 1, "expected `instance_id<TAB>target`".to_string()))?;
            let result = match cols.next() {
                Some(failure) => Err(failure.to_string()),
                None => Ok(target.to_string()),
            };
            if targets.insert(id.to_string(), result).is_some() {
                return Err((i + 1, format!("duplicate id `{id}`")));
            }
        }
        Ok(Self {
            system_id: system_id.into(),
            targets,
            metadata: None,
        })
    }

    pub fn with_system_id(mut self, system_id: impl Into<String>) -> Self {
        self.system_id = system_id.into();
        self
    }

    pub fn metadata(&self) -> Option<&serde_json::Value> {
        self.metadata.as_ref()
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// The stored translation; `None` for unknown ids and failed lines.
    pub fn get(&self, id: &str) -> Option<&str> {
        self.targets.get(id).and_then(|r| r.as_deref().ok())
    }
}

impl TranslatorBackend for FileBackend {
    fn system_id(&self) -> &str {
        &self.system_id
    }

    fn translate_batch(
        &self,
        _language: &LanguageCode,
        items: &[SourceItem<'_>],
    ) -> Result<Vec<ItemResult>, BackendError> {
        Ok(items
            .iter()
            .map(|item| {
                self.targets
                    .get(item.id)
                    .cloned()
                    .unwrap_or_else(|| Err(format!("no translation for `{}` in fixture", item.id)))
            })
            .collect())
    }
}
