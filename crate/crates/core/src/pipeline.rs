//! End-to-end evaluation of one system on one language.
//!
//! The stages can also run separately: translations and alignments are
//! plain-text artifacts ([`to_translations_tsv`], [`to_pharaoh_lines`]) that
//! later stages read back.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aligner::{
    self, AlignerConfig, AlignerError, Alignment, AlignmentModel, TokenizedPair, TrainingTrace,
};
use crate::corpus::{ChallengeInstance, Gender, SourceDataset, Stereotype};
use crate::language::LanguageCode;
use crate::metrics::{compute_report, EvaluationReport, MetricsError};
use crate::morphology::{
    extract_gender, GenderCall, GenderLexicon, MorphologyError, PredictedGender,
};
use crate::text::target_words;
use crate::translate::{
    to_translations_tsv, translate_corpus, BackendError, TranslationRecord, TranslatorBackend,
};

pub const TRANSLATIONS_FILE: &str = "translations.tsv";
pub const ALIGNMENT_FILE: &str = "alignment.pharaoh";
pub const PREDICTIONS_FILE: &str = "predictions.jsonl";
pub const REPORT_JSON_FILE: &str = "report.json";
pub const REPORT_TEXT_FILE: &str = "report.txt";

/// Source tokens before the entity whose links stand in for an unaligned
/// entity word (its determiner or an adjective).
const ENTITY_FALLBACK: usize = 2;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Aligner(#[from] AlignerError),
    #[error(transparent)]
    Morphology(#[from] MorphologyError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("{0}")]
    Mismatch(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionStatus {
    Ok,
    TranslationFailed,
    AlignmentDropped,
    /// The profession has one grammatical gender in the target language, so
    /// the prediction says nothing about bias.
    FixedGender,
}

impl PredictionStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PredictionStatus::Ok => "ok",
            PredictionStatus::TranslationFailed => "translation_failed",
            PredictionStatus::AlignmentDropped => "alignment_dropped",
            PredictionStatus::FixedGender => "fixed_gender",
        }
    }
}

/// One line of `predictions.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub instance_id: String,
    pub system_id: String,
    pub language: LanguageCode,
    pub source_dataset: SourceDataset,
    pub gold_gender: Gender,
    pub stereotype: Stereotype,
    pub status: PredictionStatus,
    pub predicted: PredictedGender,
    pub entity_source_index: usize,
    pub entity_target_indices: Vec<usize>,
    pub target_entity: String,
    /// Absent when no extraction took place.
    pub evidence: Option<GenderCall>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

pub fn to_jsonl(records: &[PredictionRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

pub fn parse_jsonl(text: &str) -> Result<Vec<PredictionRecord>, PipelineError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| PipelineError::Parse {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

/// Alignment output for a list of translation records.
#[derive(Debug, Clone)]
pub struct AlignmentRun {
    pub model: AlignmentModel,
    pub trace: TrainingTrace,
    /// One entry per translation record; `None` for failed translations.
    pub alignments: Vec<Option<Alignment>>,
}

/// Trains an aligner on `translations` plus the optional extra bitext in
/// `pool`, then aligns every successful translation.
pub fn align_translations(
    translations: &[TranslationRecord],
    pool: &[TranslationRecord],
    config: &AlignerConfig,
) -> Result<AlignmentRun, PipelineError> {
    if let Some(first) = translations.first() {
        if let Some(other) = pool.iter().find(|r| r.language != first.language) {
            return Err(PipelineError::Mismatch(format!(
                "pooled bitext is `{}` but translations are `{}`",
                other.language, first.language
            )));
        }
    }
    let own = aligner::tokenize_pairs(translations);
    let extra = aligner::tokenize_pairs(pool);
    let mut training: Vec<TokenizedPair> = own.pairs.clone();
    training.extend(extra.pairs);
    let (model, trace) = aligner::train_with_trace(&training, config)?;

    let aligned: Vec<Alignment> = own
        .pairs
        .par_iter()
        .map(|p| model.viterbi_align(p))
        .collect();
    let mut aligned = aligned.into_iter();
    let alignments = translations
        .iter()
        .map(|r| {
            if r.is_ok() && !r.target.trim().is_empty() {
                aligned.next()
            } else {
                None
            }
        })
        .collect();
    Ok(AlignmentRun {
        model,
        trace,
        alignments,
    })
}

/// One Pharaoh line per record, empty for records without an alignment.
pub fn to_pharaoh_lines(alignments: &[Option<Alignment>]) -> String {
    let mut out = String::new();
    for a in alignments {
        if let Some(a) = a {
            out.push_str(&a.to_pharaoh());
        }
        out.push('\n');
    }
    out
}

/// Reads alignments written by [`to_pharaoh_lines`] back against the
/// translation records they belong to.
pub fn parse_pharaoh_lines(
    text: &str,
    translations: &[TranslationRecord],
) -> Result<Vec<Option<Alignment>>, PipelineError> {
    let ids: Vec<String> = translations.iter().map(|r| r.instance_id.clone()).collect();
    let parsed = aligner::parse_pharaoh(text, &ids)?;
    Ok(parsed
        .into_iter()
        .zip(translations)
        .map(|(a, r)| r.is_ok().then_some(a))
        .collect())
}

/// Target token indices standing for the entity.
fn entity_targets(alignment: &Alignment, entity_index: usize) -> Vec<usize> {
    let direct = alignment.targets_of(entity_index);
    if !direct.is_empty() {
        return direct;
    }
    (entity_index.saturating_sub(ENTITY_FALLBACK)..entity_index)
        .rev()
        .map(|i| alignment.targets_of(i))
        .find(|t| !t.is_empty())
        .unwrap_or_default()
}

/// Predicts the gender of every entity. The three slices are parallel and
/// must list the same instances in the same order.
pub fn extract_predictions(
    instances: &[ChallengeInstance],
    translations: &[TranslationRecord],
    alignments: &[Option<Alignment>],
    lexicon: &GenderLexicon,
) -> Result<Vec<PredictionRecord>, PipelineError> {
    if instances.len() != translations.len() || instances.len() != alignments.len() {
        return Err(PipelineError::Mismatch(format!(
            "{} instances, {} translations, {} alignments",
            instances.len(),
            translations.len(),
            alignments.len()
        )));
    }
    let mut out = Vec::with_capacity(instances.len());
    for ((inst, tr), al) in instances.iter().zip(translations).zip(alignments) {
        if inst.id != tr.instance_id {
            return Err(PipelineError::Mismatch(format!(
                "instance `{}` paired with translation `{}`",
                inst.id, tr.instance_id
            )));
        }
        let mut rec = PredictionRecord {
            instance_id: inst.id.clone(),
            system_id: tr.system_id.clone(),
            language: tr.language.clone(),
            source_dataset: inst.source_dataset,
            gold_gender: inst.gold_gender,
            stereotype: inst.stereotype,
            status: PredictionStatus::Ok,
            predicted: PredictedGender::Unknown,
            entity_source_index: inst.entity_index,
            entity_target_indices: Vec::new(),
            target_entity: String::new(),
            evidence: None,
            failure: None,
        };
        if !tr.is_ok() {
            rec.status = PredictionStatus::TranslationFailed;
            rec.failure = tr.failure.clone();
            out.push(rec);
            continue;
        }
        let tokens = target_words(&tr.language, &tr.target);
        let targets = al
            .as_ref()
            .map(|a| entity_targets(a, inst.entity_index))
            .unwrap_or_default();
        if targets.is_empty() {
            rec.status = PredictionStatus::AlignmentDropped;
            out.push(rec);
            continue;
        }
        let call = extract_gender(&tr.language, &tokens, &targets, lexicon)?;
        rec.target_entity = targets
            .iter()
            .map(|&k| tokens[k].as_str())
            .collect::<Vec<_>>()
            .join(" ");
        rec.entity_target_indices = targets;
        rec.predicted = call.verdict;
        if call.fixed_gender {
            rec.status = PredictionStatus::FixedGender;
        }
        rec.evidence = Some(call);
        out.push(rec);
    }
    let dropped = out
        .iter()
        .filter(|r| r.status == PredictionStatus::AlignmentDropped)
        .count();
    if dropped > 0 {
        log::warn!("{dropped} entities had no aligned target word");
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub aligner: AlignerConfig,
    /// Concurrent translation requests.
    pub jobs: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            aligner: AlignerConfig::default(),
            jobs: 1,
        }
    }
}

/// Everything produced by a full run.
#[derive(Debug, Clone)]
pub struct EvaluationRun {
    pub translations: Vec<TranslationRecord>,
    pub alignment: AlignmentRun,
    pub predictions: Vec<PredictionRecord>,
    pub report: EvaluationReport,
}

/// Translates, aligns, extracts and scores.
pub fn run_evaluation(
    instances: &[ChallengeInstance],
    backend: &dyn TranslatorBackend,
    language: &LanguageCode,
    lexicon: &GenderLexicon,
    pool: &[TranslationRecord],
    options: &PipelineOptions,
) -> Result<EvaluationRun, PipelineError> {
    let translations = translate_corpus(instances, backend, language, options.jobs)?;
    let alignment = align_translations(&translations, pool, &options.aligner)?;
    let predictions =
        extract_predictions(instances, &translations, &alignment.alignments, lexicon)?;
    let report = compute_report(&predictions)?;
    Ok(EvaluationRun {
        translations,
        alignment,
        predictions,
        report,
    })
}

/// `<root>/<system>/<lang>`.
pub fn artifact_dir(root: &Path, system_id: &str, language: &LanguageCode) -> PathBuf {
    root.join(system_id).join(language.as_str())
}

/// Writes the five run artifacts into `dir`, creating it if needed.
pub fn write_artifacts(dir: &Path, run: &EvaluationRun) -> Result<(), PipelineError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let files = [
        (TRANSLATIONS_FILE, to_translations_tsv(&run.translations)),
        (ALIGNMENT_FILE, to_pharaoh_lines(&run.alignment.alignments)),
        (PREDICTIONS_FILE, to_jsonl(&run.predictions)),
        (REPORT_JSON_FILE, run.report.to_json() + "\n"),
        (REPORT_TEXT_FILE, run.report.to_text()),
    ];
    for (name, content) in files {
        let path = dir.join(name);
        fs::write(&path, content).map_err(io_err(&path))?;
    }
    Ok(())
}
