//! The challenge corpus: WinoGender and WinoBias sentences with one annotated
//! entity each, stored in a native seven-column TSV.
//!
//! ```text
//! id <TAB> source_dataset <TAB> gold_gender <TAB> stereotype <TAB> entity_index <TAB> entity_phrase <TAB> sentence
//! ```
//!
//! `entity_index` addresses the entity head in the token sequence produced by
//! [`crate::text::tokenize_english`].

pub mod ingest;

use std::fmt;
use std::fs;
use std::io;
use std::ops::Add;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::text::tokenize_english;

/// Suffix appended to the id of an adjective-injected instance.
pub const INJECTED_ID_SUFFIX: &str = "+adj";

pub const MALE_ADJECTIVE: &str = "handsome";
pub const FEMALE_ADJECTIVE: &str = "pretty";

const PRONOUNS: &[&str] = &[
    "he",
    "she",
    "his",
    "her",
    "him",
    "they",
    "their",
    "them",
    "hers",
    "himself",
    "herself",
    "theirs",
    "themselves",
    "themself",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Male,
    Female,
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stereotype {
    Pro,
    Anti,
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceDataset {
    WinoGender,
    WinoBias,
}

macro_rules! lowercase_enum {
    ($ty:ident { $($variant:ident => $s:literal),+ $(,)? }) => {
        impl $ty {
            pub const ALL: &'static [$ty] = &[$($ty::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($ty::$variant => $s),+
                }
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($s => Ok($ty::$variant),)+
                    other => Err(format!(
                        "invalid {} `{}` (expected one of: {})",
                        stringify!($ty).to_lowercase(),
                        other,
                        [$($s),+].join(", ")
                    )),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

lowercase_enum!(Gender { Male => "male", Female => "female", Neutral => "neutral" });
lowercase_enum!(Stereotype { Pro => "pro", Anti => "anti", Neutral => "neutral" });
lowercase_enum!(SourceDataset { WinoGender => "winogender", WinoBias => "winobias" });

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("instance `{0}` is already adjective-injected")]
    AlreadyInjected(String),
}

/// One English sentence with its annotated entity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChallengeInstance {
    pub id: String,
    pub sentence: String,
    pub entity_index: usize,
    pub entity_phrase: String,
    pub gold_gender: Gender,
    pub stereotype: Stereotype,
    pub source_dataset: SourceDataset,
}

impl ChallengeInstance {
    /// Checks the per-instance invariants, returning a description of the
    /// first violation.
    pub fn validate(&self) -> Result<(), String> {
        if self.id.is_empty() {
            return Err("empty id".into());
        }
        for (name, field) in [
            ("id", &self.id),
            ("entity_phrase", &self.entity_phrase),
            ("sentence", &self.sentence),
        ] {
            if field.contains(['\t', '\n', '\r']) {
                return Err(format!("{name} contains a tab or line break"));
            }
        }
        let tokens = tokenize_english(&self.sentence);
        let Some(tok) = tokens.get(self.entity_index) else {
            return Err(format!(
                "entity_index {} out of range (sentence has {} tokens)",
                self.entity_index,
                tokens.len()
            ));
        };
        if !tok.text.eq_ignore_ascii_case(&self.entity_phrase)
            && tok.text.to_lowercase() != self.entity_phrase.to_lowercase()
        {
            return Err(format!(
                "token {} is `{}`, expected entity `{}`",
                self.entity_index, tok.text, self.entity_phrase
            ));
        }
        let has_pronoun = tokens
            .iter()
            .any(|t| PRONOUNS.contains(&t.text.to_lowercase().as_str()));
        if !has_pronoun {
            return Err("sentence contains no pronoun".into());
        }
        if self.gold_gender == Gender::Neutral && self.stereotype != Stereotype::Neutral {
            return Err("gold-neutral instance must carry stereotype `neutral`".into());
        }
        Ok(())
    }

    pub fn is_injected(&self) -> bool {
        self.id.ends_with(INJECTED_ID_SUFFIX)
    }

    pub fn to_tsv_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.id,
            self.source_dataset,
            self.gold_gender,
            self.stereotype,
            self.entity_index,
            self.entity_phrase,
            self.sentence
        )
    }

    fn from_tsv_line(line: &str) -> Result<Self, String> {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 7 {
            return Err(format!(
                "expected 7 tab-separated columns, found {}",
                cols.len()
            ));
        }
        let entity_index = cols[4]
            .parse::<usize>()
            .map_err(|_| format!("invalid entity_index `{}`", cols[4]))?;
        let inst = ChallengeInstance {
            id: cols[0].to_string(),
            source_dataset: cols[1].parse()?,
            gold_gender: cols[2].parse()?,
            stereotype: cols[3].parse()?,
            entity_index,
            entity_phrase: cols[5].to_string(),
            sentence: cols[6].to_string(),
        };
        inst.validate()?;
        Ok(inst)
    }
}

/// Input formats accepted by [`load_challenge_set`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorpusFormat {
    #[default]
    NativeTsv,
}

/// Parses native TSV text. Line numbers in errors are 1-based.
pub fn parse_challenge_tsv(text: &str) -> Result<Vec<ChallengeInstance>, CorpusError> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let inst = ChallengeInstance::from_tsv_line(line).map_err(|message| CorpusError::Line {
            line: line_no,
            message,
        })?;
        if !seen.insert(inst.id.clone()) {
            return Err(CorpusError::Line {
                line: line_no,
                message: format!("duplicate id `{}`", inst.id),
            });
        }
        out.push(inst);
    }
    Ok(out)
}

pub fn load_challenge_set(
    path: &Path,
    format: CorpusFormat,
) -> Result<Vec<ChallengeInstance>, CorpusError> {
    match format {
        CorpusFormat::NativeTsv => {
            let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            parse_challenge_tsv(&text)
        }
    }
}

pub fn to_native_tsv(instances: &[ChallengeInstance]) -> String {
    let mut out = String::new();
    for inst in instances {
        out.push_str(&inst.to_tsv_line());
        out.push('\n');
    }
    out
}

pub fn write_challenge_set(
    path: &Path,
    instances: &[ChallengeInstance],
) -> Result<(), CorpusError> {
    fs::write(path, to_native_tsv(instances)).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenderCounts {
    pub male: usize,
    pub female: usize,
    pub neutral: usize,
}

impl GenderCounts {
    pub fn get(&self, g: Gender) -> usize {
        match g {
            Gender::Male => self.male,
            Gender::Female => self.female,
            Gender::Neutral => self.neutral,
        }
    }

    fn bump(&mut self, g: Gender) {
        match g {
            Gender::Male => self.male += 1,
            Gender::Female => self.female += 1,
            Gender::Neutral => self.neutral += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.male + self.female + self.neutral
    }
}

impl Add for GenderCounts {
    type Output = GenderCounts;

    fn add(self, rhs: GenderCounts) -> GenderCounts {
        GenderCounts {
            male: self.male + rhs.male,
            female: self.female + rhs.female,
            neutral: self.neutral + rhs.neutral,
        }
    }
}

/// Instance counts per gold gender and source dataset.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub winogender: GenderCounts,
    pub winobias: GenderCounts,
    pub total: usize,
}

impl CorpusStats {
    pub fn dataset(&self, ds: SourceDataset) -> GenderCounts {
        match ds {
            SourceDataset::WinoGender => self.winogender,
            SourceDataset::WinoBias => self.winobias,
        }
    }

    pub fn count(&self, ds: SourceDataset, g: Gender) -> usize {
        self.dataset(ds).get(g)
    }

    pub fn combined(&self) -> GenderCounts {
        self.winogender + self.winobias
    }
}

impl Add for CorpusStats {
    type Output = CorpusStats;

    fn add(self, rhs: CorpusStats) -> CorpusStats {
        CorpusStats {
            winogender: self.winogender + rhs.winogender,
            winobias: self.winobias + rhs.winobias,
            total: self.total + rhs.total,
        }
    }
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.combined();
        writeln!(
            f,
            "{:<8} {:>10} {:>10} {:>10}",
            "", "WinoGender", "WinoBias", "Combined"
        )?;
        for g in Gender::ALL {
            let name = match g {
                Gender::Male => "Male",
                Gender::Female => "Female",
                Gender::Neutral => "Neutral",
            };
            writeln!(
                f,
                "{:<8} {:>10} {:>10} {:>10}",
                name,
                self.winogender.get(*g),
                self.winobias.get(*g),
                c.get(*g)
            )?;
        }
        write!(
            f,
            "{:<8} {:>10} {:>10} {:>10}",
            "Total",
            self.winogender.total(),
            self.winobias.total(),
            self.total
        )
    }
}

pub fn corpus_stats(instances: &[ChallengeInstance]) -> CorpusStats {
    let mut stats = CorpusStats::default();
    for inst in instances {
        match inst.source_dataset {
            SourceDataset::WinoGender => stats.winogender.bump(inst.gold_gender),
            SourceDataset::WinoBias => stats.winobias.bump(inst.gold_gender),
        }
        stats.total += 1;
    }
    stats
}

/// Prepends "handsome" to gold-male and "pretty" to gold-female entities.
///
/// Gold-neutral instances pass through untouched. Injected ids end with
/// [`INJECTED_ID_SUFFIX`]; a corpus that already contains such an id is
/// rejected.
pub fn inject_adjectives(
    instances: &[ChallengeInstance],
) -> Result<Vec<ChallengeInstance>, CorpusError> {
    if let Some(inst) = instances.iter().find(|i| i.is_injected()) {
        return Err(CorpusError::AlreadyInjected(inst.id.clone()));
    }
    Ok(instances.iter().map(inject_one).collect())
}

fn inject_one(inst: &ChallengeInstance) -> ChallengeInstance {
    let adjective = match inst.gold_gender {
        Gender::Male => MALE_ADJECTIVE,
        Gender::Female => FEMALE_ADJECTIVE,
        Gender::Neutral => return inst.clone(),
    };
    let tokens = tokenize_english(&inst.sentence);
    let tok = tokens[inst.entity_index];
    let mut sentence = String::with_capacity(inst.sentence.len() + adjective.len() + 1);
    sentence.push_str(&inst.sentence[..tok.start]);
    let starts_upper = tok.start == 0 && tok.text.chars().next().is_some_and(char::is_uppercase);
    if starts_upper {
        // keep sentence-initial capitalization on the adjective
        let mut chars = adjective.chars();
        let first = chars.next().expect("non-empty adjective");
        sentence.extend(first.to_uppercase());
        sentence.push_str(chars.as_str());
        sentence.push(' ');
        let mut rest = tok.text.chars();
        let head = rest.next().expect("non-empty token");
        sentence.extend(head.to_lowercase());
        sentence.push_str(&inst.sentence[tok.start + head.len_utf8()..]);
    } else {
        sentence.push_str(adjective);
        sentence.push(' ');
        sentence.push_str(&inst.sentence[tok.start..]);
    }
    ChallengeInstance {
        id: format!("{}{}", inst.id, INJECTED_ID_SUFFIX),
        sentence,
        entity_index: inst.entity_index + 1,
        ..inst.clone()
    }
}
