#![allow(dead_code)]

use std::path::PathBuf;

use mtgender_core::corpus::{load_challenge_set, ChallengeInstance, CorpusFormat};
use mtgender_core::morphology::GenderLexicon;
use mtgender_core::pipeline::{run_evaluation, EvaluationRun, PipelineOptions};
use mtgender_core::translate::FileBackend;
use mtgender_core::LanguageCode;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub const ES24_ACC: f64 = 70.0;

pub fn es24_delta_g() -> f64 {
    100.0 * (8.0 / 11.0 - 12.0 / 17.0)
}

pub fn es24_delta_s() -> f64 {
    100.0 * (6.0 / 7.0 - 0.55)
}

pub const ES24_INJECTED_ACC: f64 = 85.0;

pub fn es24_corpus() -> Vec<ChallengeInstance> {
    load_challenge_set(&fixture("es24/corpus.tsv"), CorpusFormat::NativeTsv).unwrap()
}

/// Runs the file-backed Spanish fixture; every translation file is served
/// under the same system id so reports stay comparable.
pub fn run_es24(instances: &[ChallengeInstance], translations: &str) -> EvaluationRun {
    let backend = FileBackend::load(&fixture(translations))
        .unwrap()
        .with_system_id("fixture-mt");
    let lexicon = GenderLexicon::bundled(&LanguageCode::Es).unwrap();
    run_evaluation(
        instances,
        &backend,
        &LanguageCode::Es,
        &lexicon,
        &[],
        &PipelineOptions::default(),
    )
    .unwrap()
}

// ---------------------------------------------------------------------------
// Synthetic bitexts for the aligner.

use mtgender_core::aligner::TokenizedPair;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pair(id: String, source: Vec<String>, target: Vec<String>) -> TokenizedPair {
    TokenizedPair {
        pair_id: id,
        source_tokens: source,
        target_original: target.clone(),
        target_tokens: target,
    }
}

/// Target side identical to the source side.
pub fn copy_corpus(pairs: usize, vocab: usize, seed: u64) -> Vec<TokenizedPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..pairs)
        .map(|k| {
            let len = rng.random_range(5..=15);
            let words: Vec<String> = (0..len)
                .map(|_| format!("w{}", rng.random_range(0..vocab)))
                .collect();
            pair(format!("copy-{k}"), words.clone(), words)
        })
        .collect()
}

/// Every source word `e<k>` translates to `f<sigma(k)>`; target word order is
/// shuffled. Returns the corpus and the mapping.
pub fn dictionary_corpus(
    pairs: usize,
    vocab: usize,
    seed: u64,
) -> (Vec<TokenizedPair>, Vec<(String, String)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sigma: Vec<usize> = (0..vocab).collect();
    sigma.shuffle(&mut rng);
    let corpus = (0..pairs)
        .map(|k| {
            let len = rng.random_range(4..=12);
            let ids: Vec<usize> = (0..len).map(|_| rng.random_range(0..vocab)).collect();
            let source = ids.iter().map(|i| format!("e{i}")).collect();
            let mut target: Vec<String> = ids.iter().map(|&i| format!("f{}", sigma[i])).collect();
            target.shuffle(&mut rng);
            pair(format!("dict-{k}"), source, target)
        })
        .collect();
    let mapping = (0..vocab)
        .map(|i| (format!("e{i}"), format!("f{}", sigma[i])))
        .collect();
    (corpus, mapping)
}

/// Fraction of Viterbi links that are `(i, i)`.
pub fn identity_precision(
    corpus: &[TokenizedPair],
    model: &mtgender_core::aligner::AlignmentModel,
) -> f64 {
    let (mut hit, mut total) = (0usize, 0usize);
    for p in corpus {
        let a = model.viterbi_align(p);
        total += a.links.len();
        hit += a.links.iter().filter(|(s, t)| s == t).count();
    }
    hit as f64 / total as f64
}

// ---------------------------------------------------------------------------
// Random prediction fixtures and a scorer written from the metric
// definitions alone.

use mtgender_core::corpus::{Gender, SourceDataset, Stereotype};
use mtgender_core::morphology::PredictedGender;
use mtgender_core::pipeline::{PredictionRecord, PredictionStatus};

#[derive(Debug, Clone, Copy)]
pub struct Outcome {
    pub gold: Gender,
    pub stereotype: Stereotype,
    pub status: PredictionStatus,
    pub predicted: PredictedGender,
}

pub fn record(k: usize, o: Outcome) -> PredictionRecord {
    PredictionRecord {
        instance_id: format!("r{k}"),
        system_id: "sys".into(),
        language: LanguageCode::Es,
        source_dataset: SourceDataset::WinoBias,
        gold_gender: o.gold,
        stereotype: o.stereotype,
        status: o.status,
        predicted: o.predicted,
        entity_source_index: 1,
        entity_target_indices: vec![],
        target_entity: String::new(),
        evidence: None,
        failure: None,
    }
}

pub fn records(outcomes: &[Outcome]) -> Vec<PredictionRecord> {
    outcomes
        .iter()
        .enumerate()
        .map(|(k, &o)| record(k, o))
        .collect()
}

pub fn random_outcome(rng: &mut impl Rng) -> Outcome {
    let gold = [
        Gender::Male,
        Gender::Female,
        Gender::Male,
        Gender::Female,
        Gender::Neutral,
    ][rng.random_range(0..5)];
    let stereotype = match gold {
        Gender::Neutral => Stereotype::Neutral,
        _ if rng.random_bool(0.5) => Stereotype::Pro,
        _ => Stereotype::Anti,
    };
    let status = match rng.random_range(0..10) {
        0 => PredictionStatus::TranslationFailed,
        1 => PredictionStatus::AlignmentDropped,
        2 => PredictionStatus::FixedGender,
        _ => PredictionStatus::Ok,
    };
    let predicted = if matches!(status, PredictionStatus::Ok | PredictionStatus::FixedGender) {
        [
            PredictedGender::Masculine,
            PredictedGender::Feminine,
            PredictedGender::Neutral,
            PredictedGender::Unknown,
        ][rng.random_range(0..4)]
    } else {
        PredictedGender::Unknown
    };
    Outcome {
        gold,
        stereotype,
        status,
        predicted,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaiveScores {
    pub acc: f64,
    pub delta_g: f64,
    pub delta_s: Option<f64>,
}

fn naive_f1(tp: f64, fp: f64, fn_: f64) -> f64 {
    let p = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
    let r = if tp + fn_ > 0.0 { tp / (tp + fn_) } else { 0.0 };
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

/// F1 for male and female over outcomes already restricted to the scored
/// population.
fn naive_gender_f1s(rows: &[&Outcome]) -> (f64, f64) {
    let (mut mtp, mut mfp, mut mfn) = (0.0, 0.0, 0.0);
    let (mut ftp, mut ffp, mut ffn) = (0.0, 0.0, 0.0);
    for o in rows {
        let said_m = o.predicted == PredictedGender::Masculine;
        let said_f = o.predicted == PredictedGender::Feminine;
        if o.gold == Gender::Male {
            if said_m {
                mtp += 1.0;
            } else {
                mfn += 1.0;
            }
            if said_f {
                ffp += 1.0;
            }
        } else {
            if said_f {
                ftp += 1.0;
            } else {
                ffn += 1.0;
            }
            if said_m {
                mfp += 1.0;
            }
        }
    }
    (naive_f1(mtp, mfp, mfn), naive_f1(ftp, ffp, ffn))
}

/// `None` when nothing is scorable.
pub fn naive_score(outcomes: &[Outcome]) -> Option<NaiveScores> {
    let scored: Vec<&Outcome> = outcomes
        .iter()
        .filter(|o| o.gold != Gender::Neutral && o.status == PredictionStatus::Ok)
        .collect();
    if scored.is_empty() {
        return None;
    }
    let mut correct = 0.0;
    for o in &scored {
        if (o.gold == Gender::Male && o.predicted == PredictedGender::Masculine)
            || (o.gold == Gender::Female && o.predicted == PredictedGender::Feminine)
        {
            correct += 1.0;
        }
    }
    let acc = 100.0 * correct / scored.len() as f64;
    let (m, f) = naive_gender_f1s(&scored);
    let pro: Vec<&Outcome> = scored
        .iter()
        .copied()
        .filter(|o| o.stereotype == Stereotype::Pro)
        .collect();
    let anti: Vec<&Outcome> = scored
        .iter()
        .copied()
        .filter(|o| o.stereotype == Stereotype::Anti)
        .collect();
    let delta_s = if pro.is_empty() || anti.is_empty() {
        None
    } else {
        let (pm, pf) = naive_gender_f1s(&pro);
        let (am, af) = naive_gender_f1s(&anti);
        Some(100.0 * ((pm + pf) / 2.0 - (am + af) / 2.0))
    };
    Some(NaiveScores {
        acc,
        delta_g: 100.0 * (m - f),
        delta_s,
    })
}

// ---------------------------------------------------------------------------
// Upstream-format corpus files with the published composition.

/// `all_sentences.tsv` with 240 male, 240 female and 240 neutral rows.
pub fn synthetic_winogender() -> String {
    let occupations = [
        "technician",
        "accountant",
        "supervisor",
        "engineer",
        "worker",
        "educator",
        "clerk",
        "counselor",
        "inspector",
        "mechanic",
        "manager",
        "therapist",
        "administrator",
        "salesperson",
        "receptionist",
        "librarian",
        "advisor",
        "pharmacist",
        "janitor",
        "psychologist",
        "physician",
        "carpenter",
        "nurse",
        "investigator",
        "bartender",
        "specialist",
        "electrician",
        "officer",
        "pathologist",
        "teacher",
        "lawyer",
        "planner",
        "practitioner",
        "plumber",
        "instructor",
        "surgeon",
        "veterinarian",
        "paramedic",
        "examiner",
        "chemist",
        "machinist",
        "appraiser",
        "nutritionist",
        "architect",
        "hairdresser",
        "baker",
        "programmer",
        "paralegal",
        "hygienist",
        "scientist",
        "dispatcher",
        "cashier",
        "auditor",
        "dietitian",
        "painter",
        "broker",
        "chef",
        "doctor",
        "firefighter",
        "secretary",
    ];
    let participants = ["customer", "patient"];
    let mut out = String::from("sentid\tsentence\n");
    for occ in occupations {
        for participant in participants {
            for answer in ["0", "1"] {
                for (gender, pronoun) in [("male", "he"), ("female", "she"), ("neutral", "they")] {
                    out.push_str(&format!(
                        "{occ}.{participant}.{answer}.{gender}.txt\tThe {occ} told the {participant} that {pronoun} could pay with cash.\n"
                    ));
                }
            }
        }
    }
    out
}

/// One WinoBias file with `male` he-lines followed by `female` she-lines.
pub fn synthetic_winobias(male: usize, female: usize) -> String {
    let roles = [
        ("developer", "designer"),
        ("mechanic", "clerk"),
        ("carpenter", "librarian"),
        ("driver", "teacher"),
        ("farmer", "cashier"),
        ("guard", "hairdresser"),
        ("lawyer", "secretary"),
    ];
    let mut out = String::new();
    let pronouns = std::iter::repeat_n("he", male).chain(std::iter::repeat_n("she", female));
    for (k, pronoun) in pronouns.enumerate() {
        let (a, b) = roles[k % roles.len()];
        out.push_str(&format!(
            "{} [The {a}] argued with the {b} because [{pronoun}] did not like the design.\n",
            k + 1
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Misc.

pub fn approx(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

// ---------------------------------------------------------------------------
// Curated morphology cases: `sentence<TAB>entity words<TAB>expected`.

use mtgender_core::morphology::extract_gender;
use mtgender_core::text::target_words;

pub struct SuiteResult {
    pub total: usize,
    pub failures: Vec<String>,
}

pub fn run_morphology_suite(language: &LanguageCode) -> SuiteResult {
    let path = fixture(&format!("morphology/{}.tsv", language.as_str()));
    let text = std::fs::read_to_string(&path).unwrap();
    let lexicon = GenderLexicon::bundled(language).unwrap();
    let mut result = SuiteResult {
        total: 0,
        failures: Vec::new(),
    };
    for line in text
        .lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
    {
        let cols: Vec<&str> = line.split('\t').collect();
        let [sentence, entity, expected] = cols[..] else {
            panic!("{}: malformed row `{line}`", path.display());
        };
        result.total += 1;
        let tokens = target_words(language, sentence);
        let words: Vec<&str> = entity.split(' ').collect();
        let start = tokens
            .windows(words.len())
            .position(|w| w.iter().zip(&words).all(|(a, b)| a == b))
            .unwrap_or_else(|| panic!("entity `{entity}` not in {tokens:?}"));
        let span: Vec<usize> = (start..start + words.len()).collect();
        let call = extract_gender(language, &tokens, &span, &lexicon).unwrap();
        if call.verdict.as_str() != expected {
            result.failures.push(format!(
                "{sentence} [{entity}]: expected {expected}, got {}",
                call.verdict
            ));
        }
    }
    result
}
