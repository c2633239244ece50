//! Reading grammatical gender off an aligned target-language entity.
//!
//! Evidence comes in three kinds, checked in precedence order: a lexicon
//! entry for the entity word, a determiner in front of it (or inside the
//! entity span), and the word ending. The first kind that yields a
//! decisive verdict wins; conflicting verdicts at that level give
//! [`PredictedGender::Unknown`]. Weak evidence (French `-e`) is recorded but
//! never decides.

mod lexicon;
mod rules;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::language::LanguageCode;

pub use lexicon::{GenderLexicon, LexiconEntry, LexiconError};

/// Tokens before the entity that are searched for a determiner.
pub const DETERMINER_WINDOW: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredictedGender {
    Masculine,
    Feminine,
    Neutral,
    Unknown,
}

impl PredictedGender {
    pub fn as_str(self) -> &'static str {
        match self {
            PredictedGender::Masculine => "masculine",
            PredictedGender::Feminine => "feminine",
            PredictedGender::Neutral => "neutral",
            PredictedGender::Unknown => "unknown",
        }
    }
}

impl std::fmt::Display for PredictedGender {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Evidence kinds in decreasing precedence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvidenceKind {
    Lexicon,
    Determiner,
    Suffix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenderEvidence {
    pub kind: EvidenceKind,
    /// Index of the target token the evidence was read from.
    pub token_index: usize,
    pub token: String,
    pub verdict: PredictedGender,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub weak: bool,
}

impl GenderEvidence {
    fn decisive(&self) -> bool {
        !self.weak && self.verdict != PredictedGender::Unknown
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenderCall {
    pub verdict: PredictedGender,
    pub evidence: Vec<GenderEvidence>,
    pub language: LanguageCode,
    /// The verdict came from a lexicon entry marked as a single-gender
    /// profession.
    pub fixed_gender: bool,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MorphologyError {
    #[error("no morphology rules for language `{0}`")]
    UnsupportedLanguage(LanguageCode),
    #[error("lexicon is for `{lexicon}` but extraction asked for `{requested}`")]
    LexiconMismatch {
        lexicon: LanguageCode,
        requested: LanguageCode,
    },
    #[error("entity span is empty")]
    EmptyEntity,
    #[error("entity token {index} out of range for {len} tokens")]
    OutOfRange { index: usize, len: usize },
}

/// Bundled lexicon for `language` overlaid with the user file at `path`.
pub fn load_lexicon(
    language: &LanguageCode,
    path: &std::path::Path,
) -> Result<GenderLexicon, LexiconError> {
    GenderLexicon::load(language, path)
}

/// Determines the gender of the entity rendered by `tokens[entity]`.
///
/// `tokens` keep their original case; German determiners use it to find the
/// noun they govern.
pub fn extract_gender(
    language: &LanguageCode,
    tokens: &[String],
    entity: &[usize],
    lexicon: &GenderLexicon,
) -> Result<GenderCall, MorphologyError> {
    if !language.is_builtin() {
        return Err(MorphologyError::UnsupportedLanguage(language.clone()));
    }
    if lexicon.language() != language {
        return Err(MorphologyError::LexiconMismatch {
            lexicon: lexicon.language().clone(),
            requested: language.clone(),
        });
    }
    let span: BTreeSet<usize> = entity.iter().copied().collect();
    let Some(&first) = span.first() else {
        return Err(MorphologyError::EmptyEntity);
    };
    if let Some(&last) = span.last() {
        if last >= tokens.len() {
            return Err(MorphologyError::OutOfRange {
                index: last,
                len: tokens.len(),
            });
        }
    }

    let mut evidence = Vec::new();
    let mut fixed = Vec::new();
    let mut nouns = Vec::new();

    for &k in &span {
        let tok = &tokens[k];
        if let Some(g) = rules::determiner(language, tok) {
            evidence.push(determiner_evidence(language, tokens, k, g));
            continue;
        }
        if let Some((prefix, _)) = rules::split_elision(language, tok) {
            if let Some(g) = rules::determiner(language, prefix) {
                evidence.push(GenderEvidence {
                    kind: EvidenceKind::Determiner,
                    token_index: k,
                    token: tok.clone(),
                    verdict: g,
                    weak: false,
                });
            }
        }
        nouns.push(k);
    }

    if !evidence.iter().any(|e| e.kind == EvidenceKind::Determiner) {
        let nearest = (first.saturating_sub(DETERMINER_WINDOW)..first)
            .rev()
            .find_map(|k| rules::determiner(language, &tokens[k]).map(|g| (k, g)));
        if let Some((k, g)) = nearest {
            evidence.push(determiner_evidence(language, tokens, k, g));
        }
    }

    for &k in &nouns {
        let tok = &tokens[k];
        let hit = rules::lookup_forms(language, tok)
            .into_iter()
            .find_map(|f| lexicon.get(&f));
        if let Some(entry) = hit {
            evidence.push(GenderEvidence {
                kind: EvidenceKind::Lexicon,
                token_index: k,
                token: tok.clone(),
                verdict: entry.gender,
                weak: false,
            });
            fixed.push(entry.fixed_gender);
        }
        if let Some(s) = rules::suffix(language, tok, lexicon) {
            evidence.push(GenderEvidence {
                kind: EvidenceKind::Suffix,
                token_index: k,
                token: tok.clone(),
                verdict: s.verdict,
                weak: s.weak,
            });
        }
    }

    evidence.sort_by_key(|e| (e.kind, e.token_index));
    let (verdict, decided_by) = resolve(&evidence);
    let fixed_gender = decided_by == Some(EvidenceKind::Lexicon) && fixed.iter().any(|&f| f);
    Ok(GenderCall {
        verdict,
        evidence,
        language: language.clone(),
        fixed_gender,
    })
}

fn determiner_evidence(
    language: &LanguageCode,
    tokens: &[String],
    k: usize,
    gender: PredictedGender,
) -> GenderEvidence {
    let verdict = if *language == LanguageCode::De {
        let noun = tokens
            .iter()
            .skip(k + 1)
            .take(DETERMINER_WINDOW + 1)
            .find(|t| t.chars().next().is_some_and(char::is_uppercase));
        rules::german_determiner(gender, noun.map(String::as_str))
    } else {
        gender
    };
    GenderEvidence {
        kind: EvidenceKind::Determiner,
        token_index: k,
        token: tokens[k].clone(),
        verdict,
        weak: false,
    }
}

/// Applies precedence to sorted evidence.
fn resolve(evidence: &[GenderEvidence]) -> (PredictedGender, Option<EvidenceKind>) {
    for kind in [
        EvidenceKind::Lexicon,
        EvidenceKind::Determiner,
        EvidenceKind::Suffix,
    ] {
        let verdicts: BTreeSet<PredictedGender> = evidence
            .iter()
            .filter(|e| e.kind == kind && e.decisive())
            .map(|e| e.verdict)
            .collect();
        match verdicts.len() {
            0 => continue,
            1 => return (*verdicts.first().expect("one verdict"), Some(kind)),
            _ => return (PredictedGender::Unknown, Some(kind)),
        }
    }
    (PredictedGender::Unknown, None)
}
