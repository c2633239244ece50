use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use unicode_normalization::UnicodeNormalization;

use super::PredictedGender;
use crate::language::LanguageCode;

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("no lexicon support for language `{0}`")]
    Unsupported(LanguageCode),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LexiconEntry {
    pub gender: PredictedGender,
    /// The profession has a single grammatical gender in this language.
    pub fixed_gender: bool,
}

/// Surface form → gender for one language. Keys are NFC-normalized and
/// case-folded.
#[derive(Debug, Clone, PartialEq)]
pub struct GenderLexicon {
    language: LanguageCode,
    entries: HashMap<String, LexiconEntry>,
}

fn bundled_text(language: &LanguageCode) -> Option<&'static str> {
    Some(match language {
        LanguageCode::Es => include_str!("../../data/v1/lexicons/es.tsv"),
        LanguageCode::Fr => include_str!("../../data/v1/lexicons/fr.tsv"),
        LanguageCode::It => include_str!("../../data/v1/lexicons/it.tsv"),
        LanguageCode::Ru => include_str!("../../data/v1/lexicons/ru.tsv"),
        LanguageCode::Uk => include_str!("../../data/v1/lexicons/uk.tsv"),
        LanguageCode::He => include_str!("../../data/v1/lexicons/he.tsv"),
        LanguageCode::Ar => include_str!("../../data/v1/lexicons/ar.tsv"),
        LanguageCode::De => include_str!("../../data/v1/lexicons/de.tsv"),
        LanguageCode::Other(_) => return None,
    })
}

impl GenderLexicon {
    pub fn empty(language: LanguageCode) -> Self {
        Self {
            language,
            entries: HashMap::new(),
        }
    }

    /// The base lexicon shipped for a built-in language.
    pub fn bundled(language: &LanguageCode) -> Result<Self, LexiconError> {
        let text =
            bundled_text(language).ok_or_else(|| LexiconError::Unsupported(language.clone()))?;
        let mut lex = Self::empty(language.clone());
        lex.merge_tsv(text)?;
        Ok(lex)
    }

    /// Bundled base lexicon overlaid with the entries of `path`.
    pub fn load(language: &LanguageCode, path: &Path) -> Result<Self, LexiconError> {
        let text = fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut lex = Self::bundled(language)?;
        lex.merge_tsv(&text)?;
        Ok(lex)
    }

    /// Adds `surface<TAB>gender[<TAB>fixed_gender]` lines; later entries win.
    /// Blank lines and `#` comments are skipped.
    pub fn merge_tsv(&mut self, text: &str) -> Result<(), LexiconError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| LexiconError::Line {
                line: i + 1,
                message,
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if !(2..=3).contains(&cols.len()) {
                return Err(err(
                    "expected `surface<TAB>gender[<TAB>fixed_gender]`".into()
                ));
            }
            let gender = match cols[1].trim() {
                "masculine" => PredictedGender::Masculine,
                "feminine" => PredictedGender::Feminine,
                "neutral" => PredictedGender::Neutral,
                other => {
                    return Err(err(format!(
                        "invalid gender `{other}` (expected masculine, feminine or neutral)"
                    )))
                }
            };
            let fixed_gender = match cols.get(2).map(|s| s.trim()) {
                None | Some("") => false,
                Some("fixed_gender") => true,
                Some(other) => return Err(err(format!("unknown flag `{other}`"))),
            };
            let surface = cols[0].trim();
            if surface.is_empty() {
                return Err(err("empty surface form".into()));
            }
            self.insert(
                surface,
                LexiconEntry {
                    gender,
                    fixed_gender,
                },
            );
        }
        Ok(())
    }

    pub fn insert(&mut self, surface: &str, entry: LexiconEntry) {
        debug_assert!(entry.gender != PredictedGender::Unknown);
        let key = self.key(surface);
        self.entries.insert(key, entry);
    }

    fn key(&self, surface: &str) -> String {
        let nfc: String = surface.nfc().collect();
        self.language.fold_case(&nfc)
    }

    pub fn language(&self) -> &LanguageCode {
        &self.language
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Exact lookup after normalization.
    pub fn get(&self, surface: &str) -> Option<LexiconEntry> {
        self.entries.get(&self.key(surface)).copied()
    }

    pub fn contains(&self, surface: &str) -> bool {
        self.get(surface).is_some()
    }
}
