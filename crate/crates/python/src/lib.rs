//! Python bindings: `import mtgender`.

use std::path::PathBuf;

use mtgender_core::aligner::AlignerConfig;
use mtgender_core::corpus::{self, load_challenge_set, CorpusFormat};
use mtgender_core::metrics::{compare_reports, EvaluationReport};
use mtgender_core::morphology::{extract_gender as extract, GenderLexicon};
use mtgender_core::pipeline::{
    self, artifact_dir, parse_jsonl, run_evaluation, write_artifacts, PipelineOptions,
    PredictionRecord,
};
use mtgender_core::text;
use mtgender_core::translate::{FileBackend, TranslationRecord};
use mtgender_core::validation::{compute_agreement, sample_for_validation, AnnotationSheet};
use mtgender_core::LanguageCode;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(mtgender, MtGenderError, PyException);

/// `(source_index, target_index)` links of one sentence pair.
type Links = Vec<(usize, usize)>;

fn err(e: impl std::fmt::Display) -> PyErr {
    MtGenderError::new_err(e.to_string())
}

fn lang(code: &str) -> PyResult<LanguageCode> {
    code.parse()
        .map_err(|e: mtgender_core::language::UnknownLanguage| PyValueError::new_err(e.to_string()))
}

fn json_to_py<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (s,))
}

fn lexicon(language: &LanguageCode, path: Option<PathBuf>) -> PyResult<GenderLexicon> {
    match path {
        Some(p) => GenderLexicon::load(language, &p),
        None => GenderLexicon::bundled(language),
    }
    .map_err(err)
}

fn read_predictions(path: &PathBuf) -> PyResult<Vec<PredictionRecord>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| err(format!("{}: {e}", path.display())))?;
    parse_jsonl(&text).map_err(err)
}

/// Scores of one system on one language.
#[pyclass(name = "Report", module = "mtgender", frozen)]
struct PyReport {
    inner: EvaluationReport,
}

#[pymethods]
impl PyReport {
    /// Reads a `report.json` file.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let text =
            std::fs::read_to_string(&path).map_err(|e| err(format!("{}: {e}", path.display())))?;
        let inner = serde_json::from_str(&text).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn system_id(&self) -> &str {
        &self.inner.system_id
    }

    #[getter]
    fn language(&self) -> &str {
        self.inner.language.as_str()
    }

    #[getter]
    fn acc(&self) -> f64 {
        self.inner.acc
    }

    #[getter]
    fn delta_g(&self) -> f64 {
        self.inner.delta_g
    }

    /// `None` when the corpus lacks a pro or anti subset.
    #[getter]
    fn delta_s(&self) -> Option<f64> {
        self.inner.delta_s
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_to_py(py, &self.inner)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __repr__(&self) -> String {
        format!(
            "Report(system_id={:?}, language={:?}, acc={:.1}, delta_g={:.1}, delta_s={})",
            self.inner.system_id,
            self.inner.language.as_str(),
            self.inner.acc,
            self.inner.delta_g,
            self.inner
                .delta_s
                .map_or_else(|| "None".to_string(), |v| format!("{v:.1}"))
        )
    }
}

/// Target-language tokens as the extractor sees them.
#[pyfunction]
fn target_words(language: &str, sentence: &str) -> PyResult<Vec<String>> {
    Ok(text::target_words(&lang(language)?, sentence))
}

/// Gender of the entity at token positions `entity` of `sentence`.
///
/// Returns a dict with `verdict`, `evidence` and `fixed_gender`.
#[pyfunction]
#[pyo3(signature = (language, sentence, entity, lexicon_path=None))]
fn extract_gender<'py>(
    py: Python<'py>,
    language: &str,
    sentence: &str,
    entity: Vec<usize>,
    lexicon_path: Option<PathBuf>,
) -> PyResult<Bound<'py, PyAny>> {
    let language = lang(language)?;
    let lex = lexicon(&language, lexicon_path)?;
    let tokens = text::target_words(&language, sentence);
    let call = extract(&language, &tokens, &entity, &lex).map_err(err)?;
    json_to_py(py, &call)
}

/// Instance counts of a native corpus file.
#[pyfunction]
fn corpus_stats<'py>(py: Python<'py>, path: PathBuf) -> PyResult<Bound<'py, PyAny>> {
    let instances = load_challenge_set(&path, CorpusFormat::NativeTsv).map_err(err)?;
    json_to_py(py, &corpus::corpus_stats(&instances))
}

/// Writes the adjective-injected copy of `path` to `out`.
#[pyfunction]
fn inject_adjectives(path: PathBuf, out: PathBuf) -> PyResult<usize> {
    let instances = load_challenge_set(&path, CorpusFormat::NativeTsv).map_err(err)?;
    let injected = corpus::inject_adjectives(&instances).map_err(err)?;
    corpus::write_challenge_set(&out, &injected).map_err(err)?;
    Ok(injected.len())
}

/// Runs the full pipeline with a file backend.
///
/// With `outdir` set, the five artifacts are written under
/// `outdir/<system>/<language>/`.
#[pyfunction]
#[pyo3(signature = (
    corpus, language, translations, system=None, inject_adjectives=false,
    lexicon_path=None, outdir=None, jobs=1, aligner_iters=5, tension=4.0, p0=0.08
))]
#[allow(clippy::too_many_arguments)]
fn evaluate(
    py: Python<'_>,
    corpus: PathBuf,
    language: &str,
    translations: PathBuf,
    system: Option<String>,
    inject_adjectives: bool,
    lexicon_path: Option<PathBuf>,
    outdir: Option<PathBuf>,
    jobs: usize,
    aligner_iters: usize,
    tension: f64,
    p0: f64,
) -> PyResult<PyReport> {
    let language = lang(language)?;
    let lex = lexicon(&language, lexicon_path)?;
    let run = py.detach(|| -> Result<_, String> {
        let mut instances =
            load_challenge_set(&corpus, CorpusFormat::NativeTsv).map_err(|e| e.to_string())?;
        if inject_adjectives {
            instances = corpus::inject_adjectives(&instances).map_err(|e| e.to_string())?;
        }
        let mut backend = FileBackend::load(&translations).map_err(|e| e.to_string())?;
        if let Some(id) = system {
            backend = backend.with_system_id(id);
        }
        let options = PipelineOptions {
            aligner: AlignerConfig {
                iterations: aligner_iters,
                diagonal_tension: tension,
                null_probability: p0,
                ..AlignerConfig::default()
            },
            jobs,
        };
        let run = run_evaluation(&instances, &backend, &language, &lex, &[], &options)
            .map_err(|e| e.to_string())?;
        if let Some(root) = outdir {
            let dir = artifact_dir(&root, &run.report.system_id, &language);
            write_artifacts(&dir, &run).map_err(|e| e.to_string())?;
        }
        Ok(run)
    });
    let run = run.map_err(err)?;
    Ok(PyReport { inner: run.report })
}

/// `other - base` for Acc, ΔG and ΔS.
#[pyfunction]
fn compare<'py>(py: Python<'py>, base: &PyReport, other: &PyReport) -> PyResult<Bound<'py, PyAny>> {
    let delta = compare_reports(&base.inner, &other.inner).map_err(err)?;
    json_to_py(py, &delta)
}

/// Word-aligns `(source, target)` sentence pairs.
///
/// Returns one list of `(source_index, target_index)` links per pair,
/// together with the fitted diagonal tension.
#[pyfunction]
#[pyo3(signature = (pairs, language, iterations=5, tension=4.0, p0=0.08))]
fn align(
    py: Python<'_>,
    pairs: Vec<(String, String)>,
    language: &str,
    iterations: usize,
    tension: f64,
    p0: f64,
) -> PyResult<(Vec<Links>, f64)> {
    let language = lang(language)?;
    let records: Vec<TranslationRecord> = pairs
        .into_iter()
        .enumerate()
        .map(|(i, (source, target))| TranslationRecord {
            instance_id: i.to_string(),
            system_id: "python".into(),
            language: language.clone(),
            source,
            target,
            failure: None,
        })
        .collect();
    let config = AlignerConfig {
        iterations,
        diagonal_tension: tension,
        null_probability: p0,
        ..AlignerConfig::default()
    };
    let run = py
        .detach(|| pipeline::align_translations(&records, &[], &config))
        .map_err(err)?;
    let links = run
        .alignments
        .into_iter()
        .map(|a| a.map(|a| a.links).unwrap_or_default())
        .collect();
    Ok((links, run.model.tension()))
}

/// English tokens as the aligner sees them.
#[pyfunction]
fn english_words(sentence: &str) -> Vec<String> {
    text::english_words(sentence)
}

/// Draws an annotation sheet of `n` items and writes it to `out`.
#[pyfunction]
#[pyo3(signature = (predictions, translations, out, n=100, seed=0))]
fn sample_sheet(
    predictions: PathBuf,
    translations: PathBuf,
    out: PathBuf,
    n: usize,
    seed: u64,
) -> PyResult<Vec<String>> {
    let records = read_predictions(&predictions)?;
    let targets = FileBackend::load(&translations).map_err(err)?;
    let translated: Vec<TranslationRecord> = records
        .iter()
        .map(|r| TranslationRecord {
            instance_id: r.instance_id.clone(),
            system_id: r.system_id.clone(),
            language: r.language.clone(),
            source: String::new(),
            target: targets.get(&r.instance_id).unwrap_or_default().to_string(),
            failure: None,
        })
        .collect();
    let sheet = sample_for_validation(&records, &translated, n, seed).map_err(err)?;
    sheet.write(&out).map_err(err)?;
    Ok(sheet.items.into_iter().map(|i| i.instance_id).collect())
}

/// Agreement of annotated sheets with the automatic predictions.
#[pyfunction]
fn agreement<'py>(
    py: Python<'py>,
    predictions: PathBuf,
    annotations: Vec<PathBuf>,
) -> PyResult<Bound<'py, PyAny>> {
    let records = read_predictions(&predictions)?;
    let labels = annotations
        .iter()
        .map(|p| AnnotationSheet::read(p).map(|s| s.labels()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let report = compute_agreement(&records, &labels).map_err(err)?;
    json_to_py(py, &report)
}

#[pymodule]
fn mtgender(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MtGenderError", m.py().get_type::<MtGenderError>())?;
    m.add(
        "AGREEMENT_THRESHOLD",
        mtgender_core::validation::AGREEMENT_THRESHOLD,
    )?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(target_words, m)?)?;
    m.add_function(wrap_pyfunction!(english_words, m)?)?;
    m.add_function(wrap_pyfunction!(extract_gender, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_stats, m)?)?;
    m.add_function(wrap_pyfunction!(inject_adjectives, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(align, m)?)?;
    m.add_function(wrap_pyfunction!(sample_sheet, m)?)?;
    m.add_function(wrap_pyfunction!(agreement, m)?)?;
    Ok(())
}
