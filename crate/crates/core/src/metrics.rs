//! Accuracy and F1-gap metrics over gender predictions.
//!
//! Only instances with a male or female gold gender and an `ok` prediction
//! status are scored. An `unknown` prediction counts as an error: it is a
//! false negative for the gold class and a false positive for nothing.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::corpus::{Gender, Stereotype};
use crate::language::LanguageCode;
use crate::morphology::PredictedGender;
use crate::pipeline::{PredictionRecord, PredictionStatus};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("no scorable predictions (need male/female gold with status ok)")]
    NothingToScore,
    #[error("predictions mix {what}: `{a}` and `{b}`")]
    Mixed {
        what: &'static str,
        a: String,
        b: String,
    },
    #[error("cannot compare reports for different {what}: `{a}` vs `{b}`")]
    Incomparable {
        what: &'static str,
        a: String,
        b: String,
    },
}

fn matches_class(gold: Gender, predicted: PredictedGender) -> bool {
    matches!(
        (gold, predicted),
        (Gender::Male, PredictedGender::Masculine) | (Gender::Female, PredictedGender::Feminine)
    )
}

fn class_of(gold: Gender) -> PredictedGender {
    match gold {
        Gender::Male => PredictedGender::Masculine,
        Gender::Female => PredictedGender::Feminine,
        Gender::Neutral => PredictedGender::Neutral,
    }
}

/// Precision, recall and F1 for one class, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ClassScores {
    /// Scores `class` as the positive class over `(gold, predicted)` pairs.
    /// Undefined ratios are 0.
    pub fn compute(pairs: &[(Gender, PredictedGender)], class: Gender) -> Self {
        let target = class_of(class);
        let tp = pairs
            .iter()
            .filter(|&&(g, p)| g == class && p == target)
            .count();
        let fp = pairs
            .iter()
            .filter(|&&(g, p)| g != class && p == target)
            .count();
        let fn_ = pairs
            .iter()
            .filter(|&&(g, p)| g == class && p != target)
            .count();
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self {
            precision,
            recall,
            f1,
            tp,
            fp,
            fn_,
        }
    }
}

/// Scores on the pro- or anti-stereotypical part of the scored population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsetScores {
    pub count: usize,
    /// Percent.
    pub acc: f64,
    /// Mean of the male and female F1 within the subset, in `[0, 1]`.
    pub macro_f1: f64,
}

impl SubsetScores {
    fn compute(pairs: &[(Gender, PredictedGender)]) -> Option<Self> {
        if pairs.is_empty() {
            return None;
        }
        let macro_f1 = (ClassScores::compute(pairs, Gender::Male).f1
            + ClassScores::compute(pairs, Gender::Female).f1)
            / 2.0;
        Some(Self {
            count: pairs.len(),
            acc: accuracy(pairs),
            macro_f1,
        })
    }
}

fn accuracy(pairs: &[(Gender, PredictedGender)]) -> f64 {
    let correct = pairs.iter().filter(|&&(g, p)| matches_class(g, p)).count();
    100.0 * correct as f64 / pairs.len() as f64
}

/// Instance counts; `evaluated` plus the exclusion counts equals `total`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportCounts {
    pub total: usize,
    pub evaluated: usize,
    /// Evaluated instances predicted `unknown` (included in `evaluated`).
    pub unknown: usize,
    pub translation_failed: usize,
    pub alignment_dropped: usize,
    pub fixed_gender: usize,
    pub neutral_gold: usize,
}

impl ReportCounts {
    pub fn excluded(&self) -> usize {
        self.translation_failed + self.alignment_dropped + self.fixed_gender + self.neutral_gold
    }
}

/// Per-(system, language) evaluation summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub system_id: String,
    pub language: LanguageCode,
    /// Percent of evaluated instances translated with the gold gender.
    pub acc: f64,
    /// `100 · (F1 male − F1 female)`.
    pub delta_g: f64,
    /// `100 · (macro-F1 pro − macro-F1 anti)`; absent when either subset is
    /// empty.
    pub delta_s: Option<f64>,
    pub male: ClassScores,
    pub female: ClassScores,
    pub pro: Option<SubsetScores>,
    pub anti: Option<SubsetScores>,
    pub counts: ReportCounts,
}

/// Scores the predictions of one system on one language.
pub fn compute_report(records: &[PredictionRecord]) -> Result<EvaluationReport, MetricsError> {
    let first = records.first().ok_or(MetricsError::NothingToScore)?;
    for r in records {
        if r.system_id != first.system_id {
            return Err(MetricsError::Mixed {
                what: "systems",
                a: first.system_id.clone(),
                b: r.system_id.clone(),
            });
        }
        if r.language != first.language {
            return Err(MetricsError::Mixed {
                what: "languages",
                a: first.language.to_string(),
                b: r.language.to_string(),
            });
        }
    }

    let mut counts = ReportCounts {
        total: records.len(),
        ..ReportCounts::default()
    };
    let mut scored = Vec::new();
    let mut pro = Vec::new();
    let mut anti = Vec::new();
    for r in records {
        if r.gold_gender == Gender::Neutral {
            counts.neutral_gold += 1;
            continue;
        }
        match r.status {
            PredictionStatus::Ok => {}
            PredictionStatus::TranslationFailed => {
                counts.translation_failed += 1;
                continue;
            }
            PredictionStatus::AlignmentDropped => {
                counts.alignment_dropped += 1;
                continue;
            }
            PredictionStatus::FixedGender => {
                counts.fixed_gender += 1;
                continue;
            }
        }
        let pair = (r.gold_gender, r.predicted);
        scored.push(pair);
        match r.stereotype {
            Stereotype::Pro => pro.push(pair),
            Stereotype::Anti => anti.push(pair),
            Stereotype::Neutral => {}
        }
    }
    if scored.is_empty() {
        return Err(MetricsError::NothingToScore);
    }
    counts.evaluated = scored.len();
    counts.unknown = scored
        .iter()
        .filter(|(_, p)| *p == PredictedGender::Unknown)
        .count();

    let male = ClassScores::compute(&scored, Gender::Male);
    let female = ClassScores::compute(&scored, Gender::Female);
    let pro = SubsetScores::compute(&pro);
    let anti = SubsetScores::compute(&anti);
    let delta_s = match (pro, anti) {
        (Some(p), Some(a)) => Some(100.0 * (p.macro_f1 - a.macro_f1)),
        _ => None,
    };
    Ok(EvaluationReport {
        system_id: first.system_id.clone(),
        language: first.language.clone(),
        acc: accuracy(&scored),
        delta_g: 100.0 * (male.f1 - female.f1),
        delta_s,
        male,
        female,
        pro,
        anti,
        counts,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "--".to_string(), |x| format!("{x:.1}"))
}

impl EvaluationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        let c = &self.counts;
        let mut s = String::new();
        let _ = writeln!(s, "system    {}", self.system_id);
        let _ = writeln!(s, "language  {}", self.language);
        let _ = writeln!(s, "total     {}", c.total);
        let _ = writeln!(s, "evaluated {} (unknown {})", c.evaluated, c.unknown);
        for (name, n) in [
            ("translation_failed", c.translation_failed),
            ("alignment_dropped", c.alignment_dropped),
            ("fixed_gender", c.fixed_gender),
            ("neutral_gold", c.neutral_gold),
        ] {
            let _ = writeln!(s, "  excluded {name}: {n}");
        }
        let _ = writeln!(s);
        s.push_str(&format_table(std::slice::from_ref(self)));
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "{:<8}{:>7}{:>7}{:>7}{:>6}{:>6}{:>6}",
            "class", "P", "R", "F1", "tp", "fp", "fn"
        );
        for (name, k) in [("male", &self.male), ("female", &self.female)] {
            let _ = writeln!(
                s,
                "{:<8}{:>7.1}{:>7.1}{:>7.1}{:>6}{:>6}{:>6}",
                name,
                100.0 * k.precision,
                100.0 * k.recall,
                100.0 * k.f1,
                k.tp,
                k.fp,
                k.fn_
            );
        }
        for (name, sub) in [("pro", &self.pro), ("anti", &self.anti)] {
            if let Some(sub) = sub {
                let _ = writeln!(
                    s,
                    "{:<8}Acc {:.1}  macro-F1 {:.1}  n={}",
                    name,
                    sub.acc,
                    100.0 * sub.macro_f1,
                    sub.count
                );
            }
        }
        s
    }
}

/// Language rows by system column groups of `Acc ΔG ΔS`; missing cells are
/// `--`.
pub fn format_table(reports: &[EvaluationReport]) -> String {
    let mut systems: Vec<&str> = Vec::new();
    let mut languages: Vec<&LanguageCode> = Vec::new();
    for r in reports {
        if !systems.contains(&r.system_id.as_str()) {
            systems.push(&r.system_id);
        }
        if !languages.contains(&&r.language) {
            languages.push(&r.language);
        }
    }
    let cell = 7;
    let group = 3 * cell;
    let mut out = format!("{:<6}", "");
    for sys in &systems {
        let _ = write!(out, "{sys:^group$}");
    }
    out.push('\n');
    let _ = write!(out, "{:<6}", "");
    for _ in &systems {
        let _ = write!(out, "{:>cell$}{:>cell$}{:>cell$}", "Acc", "ΔG", "ΔS");
    }
    out.push('\n');
    for lang in languages {
        let _ = write!(out, "{:<6}", lang.as_str().to_uppercase());
        for sys in &systems {
            match reports
                .iter()
                .find(|r| r.system_id == *sys && &r.language == lang)
            {
                Some(r) => {
                    let _ = write!(
                        out,
                        "{:>cell$.1}{:>cell$.1}{:>cell$}",
                        r.acc,
                        r.delta_g,
                        fmt_opt(r.delta_s)
                    );
                }
                None => {
                    let _ = write!(out, "{:>cell$}{:>cell$}{:>cell$}", "--", "--", "--");
                }
            }
        }
        out.push('\n');
    }
    out
}

/// Change from a baseline report to another run of the same system and
/// language (e.g. the adjective-injected corpus).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportDelta {
    pub acc: f64,
    pub delta_g: f64,
    pub delta_s: Option<f64>,
}

fn signed(v: f64) -> String {
    format!("{v:+.1}")
}

impl fmt::Display for ReportDelta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Acc {}  ΔG {}  ΔS {}",
            signed(self.acc),
            signed(self.delta_g),
            self.delta_s.map_or_else(|| "--".to_string(), signed)
        )
    }
}

/// `other − base` for every headline metric.
pub fn compare_reports(
    base: &EvaluationReport,
    other: &EvaluationReport,
) -> Result<ReportDelta, MetricsError> {
    if base.system_id != other.system_id {
        return Err(MetricsError::Incomparable {
            what: "systems",
            a: base.system_id.clone(),
            b: other.system_id.clone(),
        });
    }
    if base.language != other.language {
        return Err(MetricsError::Incomparable {
            what: "languages",
            a: base.language.to_string(),
            b: other.language.to_string(),
        });
    }
    Ok(ReportDelta {
        acc: other.acc - base.acc,
        delta_g: other.delta_g - base.delta_g,
        delta_s: base.delta_s.zip(other.delta_s).map(|(b, o)| o - b),
    })
}
