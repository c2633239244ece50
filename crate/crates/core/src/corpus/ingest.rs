//! Converters from the upstream dataset releases into [`ChallengeInstance`]s.
//!
//! * WinoBias ships one file per (stereotype, type, split), one sentence per
//!   line, with the entity and its pronoun in brackets:
//!   `1 [The developer] argued with the designer because [she] did not like the design.`
//!   The stereotype comes from the file (pro/anti); the gender from the
//!   bracketed pronoun.
//! * WinoGender ships `all_sentences.tsv` with a `sentid<TAB>sentence` header.
//!   The id encodes `occupation.participant.answer.gender.txt`; `answer` 0
//!   marks the occupation as the referent and 1 the participant. Stereotypes
//!   for gendered rows come from an occupation majority list.

use std::collections::HashMap;

use super::{ChallengeInstance, CorpusError, Gender, SourceDataset, Stereotype};
use crate::text::tokenize_english;

const BUNDLED_OCCUPATIONS: &str = include_str!("../../data/v1/occupations.tsv");

/// Occupation → majority gender.
#[derive(Debug, Clone, Default)]
pub struct OccupationStereotypes {
    majority: HashMap<String, Gender>,
}

impl OccupationStereotypes {
    pub fn bundled() -> Self {
        Self::from_tsv(BUNDLED_OCCUPATIONS).expect("bundled occupation list is valid")
    }

    pub fn from_tsv(text: &str) -> Result<Self, CorpusError> {
        let mut majority = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| CorpusError::Line {
                line: i + 1,
                message,
            };
            let (occ, g) = line
                .split_once('\t')
                .ok_or_else(|| err("expected `occupation<TAB>gender`".into()))?;
            let g: Gender = g.trim().parse().map_err(err)?;
            if g == Gender::Neutral {
                return Err(err("majority gender must be male or female".into()));
            }
            majority.insert(occ.trim().to_lowercase(), g);
        }
        Ok(Self { majority })
    }

    pub fn majority(&self, occupation: &str) -> Option<Gender> {
        self.majority.get(&occupation.to_lowercase()).copied()
    }

    /// Pro when gold matches the majority, anti when it does not, neutral
    /// for gold-neutral entities or occupations missing from the list.
    pub fn label(&self, occupation: &str, gold: Gender) -> Stereotype {
        match (gold, self.majority(occupation)) {
            (Gender::Neutral, _) | (_, None) => Stereotype::Neutral,
            (g, Some(m)) if g == m => Stereotype::Pro,
            _ => Stereotype::Anti,
        }
    }
}

fn pronoun_gender(word: &str) -> Option<Gender> {
    match word.to_lowercase().as_str() {
        "he" | "him" | "his" | "himself" => Some(Gender::Male),
        "she" | "her" | "hers" | "herself" => Some(Gender::Female),
        "they" | "them" | "their" | "theirs" | "themselves" | "themself" => Some(Gender::Neutral),
        _ => None,
    }
}

/// Index of the token starting at byte `offset`, if any.
fn token_at(sentence: &str, offset: usize) -> Option<usize> {
    tokenize_english(sentence)
        .iter()
        .position(|t| t.start == offset)
}

/// Converts one WinoBias file. `id_prefix` should identify the file, e.g.
/// `wb-pro-type1-test`; line numbers complete the id.
pub fn ingest_winobias(
    text: &str,
    stereotype: Stereotype,
    id_prefix: &str,
) -> Result<Vec<ChallengeInstance>, CorpusError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let raw = raw.trim_end_matches('\r').trim();
        if raw.is_empty() {
            continue;
        }
        let err = |message: String| CorpusError::Line {
            line: line_no,
            message,
        };
        // drop the leading sentence number
        let body = match raw.split_once(char::is_whitespace) {
            Some((num, rest)) if num.chars().all(|c| c.is_ascii_digit()) => rest.trim_start(),
            _ => raw,
        };

        let mut sentence = String::with_capacity(body.len());
        let mut spans: Vec<(usize, usize)> = Vec::new();
        let mut open = None;
        for c in body.chars() {
            match c {
                '[' => open = Some(sentence.len()),
                ']' => {
                    let start = open.take().ok_or_else(|| err("unbalanced `]`".into()))?;
                    spans.push((start, sentence.len()));
                }
                _ => sentence.push(c),
            }
        }
        if open.is_some() {
            return Err(err("unbalanced `[`".into()));
        }

        let mut entity = None;
        let mut gender = None;
        for &(s, e) in &spans {
            let inner = sentence[s..e].trim();
            match pronoun_gender(inner) {
                Some(g) => gender = gender.or(Some(g)),
                None => entity = entity.or(Some((s, e))),
            }
        }
        let (s, e) = entity.ok_or_else(|| err("no bracketed entity".into()))?;
        let gold = match gender {
            Some(Gender::Neutral) | None => {
                return Err(err("no bracketed gendered pronoun".into()));
            }
            Some(g) => g,
        };
        let span = sentence[s..e].trim_end();
        let head_rel = span.rfind(char::is_whitespace).map_or(0, |k| k + 1);
        let head_offset = s + head_rel;
        let entity_index = token_at(&sentence, head_offset)
            .ok_or_else(|| err("entity head does not start a token".into()))?;
        let entity_phrase = tokenize_english(&sentence)[entity_index].text.to_string();

        let inst = ChallengeInstance {
            id: format!("{id_prefix}-{line_no}"),
            sentence,
            entity_index,
            entity_phrase,
            gold_gender: gold,
            stereotype,
            source_dataset: SourceDataset::WinoBias,
        };
        inst.validate().map_err(err)?;
        out.push(inst);
    }
    Ok(out)
}

/// Converts WinoGender's `all_sentences.tsv`.
pub fn ingest_winogender(
    text: &str,
    stereotypes: &OccupationStereotypes,
    id_prefix: &str,
) -> Result<Vec<ChallengeInstance>, CorpusError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() || (i == 0 && raw.starts_with("sentid")) {
            continue;
        }
        let err = |message: String| CorpusError::Line {
            line: line_no,
            message,
        };
        let (sentid, sentence) = raw
            .split_once('\t')
            .ok_or_else(|| err("expected `sentid<TAB>sentence`".into()))?;
        let stem = sentid.strip_suffix(".txt").unwrap_or(sentid);
        let parts: Vec<&str> = stem.split('.').collect();
        let [occupation, participant, answer, gender] = parts[..] else {
            return Err(err(format!(
                "sentid `{sentid}` is not occupation.participant.answer.gender.txt"
            )));
        };
        let gold: Gender = gender.parse().map_err(err)?;
        let entity = match answer {
            "0" => occupation,
            "1" => participant,
            other => return Err(err(format!("answer must be 0 or 1, found `{other}`"))),
        };
        // multiword roles are matched on their last word
        let head = entity.rsplit(['_', ' ']).next().unwrap_or(entity);
        let sentence = sentence.trim().to_string();
        let tokens = tokenize_english(&sentence);
        let entity_index = tokens
            .iter()
            .position(|t| t.text.eq_ignore_ascii_case(head))
            .ok_or_else(|| err(format!("entity `{head}` not found in sentence")))?;
        let inst = ChallengeInstance {
            id: format!("{id_prefix}-{stem}"),
            entity_phrase: tokens[entity_index].text.to_string(),
            entity_index,
            gold_gender: gold,
            stereotype: stereotypes.label(head, gold),
            source_dataset: SourceDataset::WinoGender,
            sentence,
        };
        inst.validate().map_err(err)?;
        out.push(inst);
    }
    Ok(out)
}
