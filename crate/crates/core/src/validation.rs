//! Human spot-checks of automatic gender predictions.
//!
//! A seeded random sample of scored predictions is exported as a CSV sheet.
//! Annotators fill in the `gender` column, either in a spreadsheet or with
//! [`annotate_interactive`], and [`compute_agreement`] compares their labels
//! with the automatic ones and with each other.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::language::LanguageCode;
use crate::morphology::PredictedGender;
use crate::pipeline::{PredictionRecord, PredictionStatus};
use crate::translate::TranslationRecord;

/// Agreement (percent) at which automatic predictions are considered
/// trustworthy.
pub const AGREEMENT_THRESHOLD: f64 = 85.0;

const CSV_HEADER: [&str; 4] = ["instance_id", "target_sentence", "entity_span", "gender"];

#[derive(Debug, thiserror::Error)]
pub enum ValidationError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{}: row {row}: {message}", path.display())]
    Row {
        path: PathBuf,
        row: usize,
        message: String,
    },
    #[error("asked for {requested} items but only {available} predictions are scorable")]
    SampleTooLarge { requested: usize, available: usize },
    #[error("annotation for unknown instance `{0}`")]
    UnknownInstance(String),
    #[error("no labeled items to compare")]
    NoLabels,
    #[error("{0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationItem {
    pub instance_id: String,
    pub target_sentence: String,
    /// Target token range `[start, end)` covering the entity.
    pub entity_span: (usize, usize),
    pub gender: Option<PredictedGender>,
}

impl AnnotationItem {
    fn span_text(&self) -> String {
        format!("{}:{}", self.entity_span.0, self.entity_span.1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SheetMeta {
    pub system_id: String,
    pub language: LanguageCode,
    pub seed: u64,
    pub population: usize,
    pub sample_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationSheet {
    pub meta: SheetMeta,
    pub items: Vec<AnnotationItem>,
}

/// Draws `n` scorable predictions uniformly without replacement. The same
/// seed always yields the same sample, listed in corpus order.
pub fn sample_for_validation(
    records: &[PredictionRecord],
    translations: &[TranslationRecord],
    n: usize,
    seed: u64,
) -> Result<AnnotationSheet, ValidationError> {
    let targets: HashMap<&str, &str> = translations
        .iter()
        .map(|t| (t.instance_id.as_str(), t.target.as_str()))
        .collect();
    let population: Vec<&PredictionRecord> = records
        .iter()
        .filter(|r| r.status == PredictionStatus::Ok)
        .collect();
    if n > population.len() {
        return Err(ValidationError::SampleTooLarge {
            requested: n,
            available: population.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, population.len(), n).into_vec();
    picked.sort_unstable();

    let mut items = Vec::with_capacity(n);
    for k in picked {
        let r = population[k];
        let sentence = targets.get(r.instance_id.as_str()).ok_or_else(|| {
            ValidationError::Mismatch(format!("no translation for `{}`", r.instance_id))
        })?;
        let start = r.entity_target_indices.iter().copied().min().unwrap_or(0);
        let end = r
            .entity_target_indices
            .iter()
            .copied()
            .max()
            .map_or(0, |e| e + 1);
        items.push(AnnotationItem {
            instance_id: r.instance_id.clone(),
            target_sentence: sentence.to_string(),
            entity_span: (start, end),
            gender: None,
        });
    }
    let first = records.first();
    Ok(AnnotationSheet {
        meta: SheetMeta {
            system_id: first.map(|r| r.system_id.clone()).unwrap_or_default(),
            language: first.map_or(LanguageCode::Es, |r| r.language.clone()),
            seed,
            population: population.len(),
            sample_size: n,
        },
        items,
    })
}

fn label_text(g: Option<PredictedGender>) -> &'static str {
    g.map_or("", PredictedGender::as_str)
}

/// Parses an annotator label; blank means not annotated.
pub fn parse_label(s: &str) -> Result<Option<PredictedGender>, String> {
    Ok(Some(match s.trim().to_lowercase().as_str() {
        "" => return Ok(None),
        "m" | "male" | "masculine" => PredictedGender::Masculine,
        "f" | "female" | "feminine" => PredictedGender::Feminine,
        "n" | "neutral" => PredictedGender::Neutral,
        "u" | "unknown" => PredictedGender::Unknown,
        other => return Err(format!("invalid gender label `{other}`")),
    }))
}

fn meta_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

impl AnnotationSheet {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for it in &self.items {
            w.write_record([
                it.instance_id.as_str(),
                it.target_sentence.as_str(),
                it.span_text().as_str(),
                label_text(it.gender),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }

    /// Writes the CSV and a `<name>.meta.json` next to it.
    pub fn write(&self, path: &Path) -> Result<(), ValidationError> {
        let io = |p: &Path| {
            let p = p.to_path_buf();
            move |source| ValidationError::Io { path: p, source }
        };
        fs::write(path, self.to_csv()).map_err(io(path))?;
        let meta = meta_path(path);
        let json = serde_json::to_string_pretty(&self.meta).expect("meta serializes");
        fs::write(&meta, json + "\n").map_err(io(&meta))?;
        Ok(())
    }

    /// Reads a (possibly annotated) sheet. The metadata file is optional.
    pub fn read(path: &Path) -> Result<Self, ValidationError> {
        let items = read_items(path)?;
        let meta_file = meta_path(path);
        let meta = match fs::read_to_string(&meta_file) {
            Ok(raw) => serde_json::from_str(&raw).map_err(|e| ValidationError::Row {
                path: meta_file.clone(),
                row: e.line(),
                message: e.to_string(),
            })?,
            Err(_) => SheetMeta {
                system_id: String::new(),
                language: LanguageCode::Es,
                seed: 0,
                population: 0,
                sample_size: items.len(),
            },
        };
        Ok(Self { meta, items })
    }

    pub fn labels(&self) -> BTreeMap<String, Option<PredictedGender>> {
        self.items
            .iter()
            .map(|i| (i.instance_id.clone(), i.gender))
            .collect()
    }
}

fn read_items(path: &Path) -> Result<Vec<AnnotationItem>, ValidationError> {
    let csv_err = |source| ValidationError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    let headers = reader.headers().map_err(csv_err)?.clone();
    if headers.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(ValidationError::Row {
            path: path.to_path_buf(),
            row: 1,
            message: format!("expected header `{}`", CSV_HEADER.join(",")),
        });
    }
    let mut items = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let row = i + 2;
        let bad = |message: String| ValidationError::Row {
            path: path.to_path_buf(),
            row,
            message,
        };
        let span = rec[2]
            .split_once(':')
            .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
            .ok_or_else(|| bad(format!("invalid entity_span `{}`", &rec[2])))?;
        items.push(AnnotationItem {
            instance_id: rec[0].to_string(),
            target_sentence: rec[1].to_string(),
            entity_span: span,
            gender: parse_label(&rec[3]).map_err(bad)?,
        });
    }
    Ok(items)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    /// Rows in the largest annotation file.
    pub n: usize,
    /// Labeled items per annotator.
    pub labeled: Vec<usize>,
    /// Blank labels per annotator.
    pub blank: Vec<usize>,
    /// Percent agreement of each annotator with the automatic predictions.
    pub per_annotator: Vec<f64>,
    /// Mean of `per_annotator`.
    pub human_vs_auto: f64,
    /// Percent agreement between the first two annotators on items both
    /// labeled.
    pub inter_annotator: Option<f64>,
    /// Ids where any human label differs from the automatic one or from
    /// another human label.
    pub disagreements: Vec<String>,
}

impl AgreementReport {
    pub fn meets_threshold(&self, threshold: f64) -> bool {
        self.human_vs_auto >= threshold
    }
}

fn percent(hits: usize, total: usize) -> f64 {
    100.0 * hits as f64 / total as f64
}

fn auto_labels<'a>(
    auto: &'a [PredictionRecord],
    annotators: &[BTreeMap<String, Option<PredictedGender>>],
) -> Result<HashMap<&'a str, PredictedGender>, ValidationError> {
    let by_id: HashMap<&str, PredictedGender> = auto
        .iter()
        .map(|r| (r.instance_id.as_str(), r.predicted))
        .collect();
    for labels in annotators {
        if let Some(id) = labels.keys().find(|id| !by_id.contains_key(id.as_str())) {
            return Err(ValidationError::UnknownInstance(id.clone()));
        }
    }
    Ok(by_id)
}

/// Agreement of one or more annotators with the automatic predictions.
/// Blank labels are left out and counted.
pub fn compute_agreement(
    auto: &[PredictionRecord],
    annotators: &[BTreeMap<String, Option<PredictedGender>>],
) -> Result<AgreementReport, ValidationError> {
    if annotators.is_empty() {
        return Err(ValidationError::NoLabels);
    }
    let by_id = auto_labels(auto, annotators)?;
    let mut labeled = Vec::new();
    let mut blank = Vec::new();
    let mut per_annotator = Vec::new();
    for labels in annotators {
        let filled: Vec<(&String, PredictedGender)> = labels
            .iter()
            .filter_map(|(id, g)| g.map(|g| (id, g)))
            .collect();
        if filled.is_empty() {
            return Err(ValidationError::NoLabels);
        }
        let hits = filled
            .iter()
            .filter(|(id, g)| by_id[id.as_str()] == *g)
            .count();
        labeled.push(filled.len());
        blank.push(labels.len() - filled.len());
        per_annotator.push(percent(hits, filled.len()));
    }
    let inter_annotator = match annotators {
        [a, b, ..] => {
            let both: Vec<bool> = a
                .iter()
                .filter_map(|(id, ga)| Some(((*ga)?, b.get(id).copied().flatten()?)))
                .map(|(x, y)| x == y)
                .collect();
            (!both.is_empty()).then(|| percent(both.iter().filter(|&&x| x).count(), both.len()))
        }
        _ => None,
    };
    Ok(AgreementReport {
        n: annotators.iter().map(BTreeMap::len).max().unwrap_or(0),
        labeled,
        blank,
        human_vs_auto: per_annotator.iter().sum::<f64>() / per_annotator.len() as f64,
        per_annotator,
        inter_annotator,
        disagreements: disagreements(auto, annotators)?,
    })
}

/// Ids where the automatic label and the non-blank human labels are not all
/// equal, in id order.
pub fn disagreements(
    auto: &[PredictionRecord],
    annotators: &[BTreeMap<String, Option<PredictedGender>>],
) -> Result<Vec<String>, ValidationError> {
    let by_id = auto_labels(auto, annotators)?;
    let mut ids: Vec<&String> = annotators.iter().flat_map(|a| a.keys()).collect();
    ids.sort();
    ids.dedup();
    Ok(ids
        .into_iter()
        .filter(|id| {
            let auto = by_id[id.as_str()];
            annotators
                .iter()
                .filter_map(|a| a.get(*id).copied().flatten())
                .any(|g| g != auto)
        })
        .cloned()
        .collect())
}

/// Prompts for a label per unlabeled item. Answers are `m`, `f`, `n`, `u`,
/// empty to skip, or `q` to stop early. Returns the number of labels set.
pub fn annotate_interactive<R: BufRead, W: Write>(
    sheet: &mut AnnotationSheet,
    mut input: R,
    mut output: W,
) -> io::Result<usize> {
    let total = sheet.items.len();
    let mut set = 0;
    for (k, item) in sheet.items.iter_mut().enumerate() {
        if item.gender.is_some() {
            continue;
        }
        let tokens = crate::text::target_words(&sheet.meta.language, &item.target_sentence);
        let (s, e) = item.entity_span;
        let shown: Vec<String> = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| match (i == s, i + 1 == e) {
                (true, true) => format!("[{t}]"),
                (true, false) => format!("[{t}"),
                (false, true) => format!("{t}]"),
                _ => t.clone(),
            })
            .collect();
        loop {
            writeln!(output, "\n({}/{total}) {}", k + 1, item.instance_id)?;
            writeln!(output, "  {}", shown.join(" "))?;
            write!(
                output,
                "gender of the bracketed entity [m/f/n/u, enter=skip, q=quit]: "
            )?;
            output.flush()?;
            let mut line = String::new();
            if input.read_line(&mut line)? == 0 || line.trim() == "q" {
                return Ok(set);
            }
            match parse_label(&line) {
                Ok(g) => {
                    if g.is_some() {
                        set += 1;
                    }
                    item.gender = g;
                    break;
                }
                Err(e) => writeln!(output, "  {e}")?,
            }
        }
    }
    Ok(set)
}
