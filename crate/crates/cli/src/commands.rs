use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mtgender_core::corpus::ingest::{ingest_winobias, ingest_winogender, OccupationStereotypes};
use mtgender_core::corpus::{
    self, inject_adjectives, load_challenge_set, write_challenge_set, CorpusFormat,
};
use mtgender_core::metrics::{compare_reports, compute_report, format_table};
use mtgender_core::pipeline::{
    self, align_translations, artifact_dir, extract_predictions, parse_jsonl, parse_pharaoh_lines,
    run_evaluation, to_jsonl, to_pharaoh_lines, write_artifacts, PipelineOptions,
};
use mtgender_core::translate::{
    to_translations_tsv, translate_corpus, BackendError, FileBackend, HttpBackend, ItemResult,
    SourceItem,
};
use mtgender_core::validation::{
    annotate_interactive, compute_agreement, sample_for_validation, AnnotationSheet,
};
use mtgender_core::{
    AlignerConfig, ChallengeInstance, EvaluationReport, GenderLexicon, LanguageCode,
    PredictionRecord, Stereotype, TranslationRecord, TranslatorBackend,
};

use crate::{
    AlignArgs, AlignerArgs, BackendArgs, Command, CorpusCommand, EvaluateArgs, ExtractArgs,
    LexiconArgs, RunArgs, StageArgs, TranslateArgs, ValidateCommand,
};

/// Parsed `--backend` value.
#[derive(Debug, Clone)]
pub enum BackendSpec {
    File(PathBuf),
    Http(PathBuf),
}

impl BackendSpec {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            Some(("file", p)) if !p.is_empty() => Ok(BackendSpec::File(p.into())),
            Some(("http", p)) if !p.is_empty() => Ok(BackendSpec::Http(p.into())),
            _ => Err(format!(
                "expected `file:<translations.tsv>` or `http:<config.json>`, got `{s}`"
            )),
        }
    }

    fn open(&self) -> Result<Box<dyn TranslatorBackend>, BackendError> {
        Ok(match self {
            BackendSpec::File(p) => Box::new(FileBackend::load(p)?),
            BackendSpec::Http(p) => Box::new(HttpBackend::from_file(p)?),
        })
    }
}

/// A backend reporting a different system id.
struct Renamed {
    inner: Box<dyn TranslatorBackend>,
    system_id: String,
}

impl TranslatorBackend for Renamed {
    fn system_id(&self) -> &str {
        &self.system_id
    }

    fn batch_size(&self) -> usize {
        self.inner.batch_size()
    }

    fn translate_batch(
        &self,
        language: &LanguageCode,
        items: &[SourceItem<'_>],
    ) -> Result<Vec<ItemResult>, BackendError> {
        self.inner.translate_batch(language, items)
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Corpus(c) => corpus_command(c).context("corpus"),
        Command::Translate(a) => translate(a).context("translate"),
        Command::Align(a) => align(a).context("align"),
        Command::Extract(a) => extract(a).context("extract"),
        Command::Report(a) => report(a).context("report"),
        Command::Evaluate(a) => evaluate(a).context("evaluate"),
        Command::Compare { base, other, json } => compare(&base, &other, json).context("compare"),
        Command::Table { reports } => table(&reports).context("table"),
        Command::Validate(c) => validate(c).context("validate"),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, content: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, content).with_context(|| format!("writing {}", path.display()))
}

fn set_jobs(jobs: usize) {
    // a second call in the same process is harmless; the first pool stays
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build_global();
}

fn load_instances(run: &RunArgs) -> Result<Vec<ChallengeInstance>> {
    let instances = load_challenge_set(&run.corpus, CorpusFormat::NativeTsv)?;
    if run.inject_adjectives {
        return Ok(inject_adjectives(&instances)?);
    }
    Ok(instances)
}

fn open_backend(args: &BackendArgs) -> Result<Box<dyn TranslatorBackend>> {
    let inner = args.backend.open()?;
    Ok(match &args.system {
        Some(id) => Box::new(Renamed {
            inner,
            system_id: id.clone(),
        }),
        None => inner,
    })
}

fn load_lexicon(lang: &LanguageCode, args: &LexiconArgs) -> Result<GenderLexicon> {
    Ok(match &args.lexicon {
        Some(path) => GenderLexicon::load(lang, path)?,
        None => GenderLexicon::bundled(lang)?,
    })
}

fn aligner_config(args: &AlignerArgs) -> AlignerConfig {
    AlignerConfig {
        iterations: args.iterations,
        diagonal_tension: args.tension,
        null_probability: args.p0,
        optimize_tension: !args.fixed_tension,
        ..AlignerConfig::default()
    }
}

/// Reads `source<TAB>target` bitext for pooled aligner training.
fn load_pool(
    paths: &[PathBuf],
    system_id: &str,
    lang: &LanguageCode,
) -> Result<Vec<TranslationRecord>> {
    let mut out = Vec::new();
    for path in paths {
        for (i, line) in read(path)?.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let Some((source, target)) = line.split_once('\t') else {
                bail!(
                    "{} line {}: expected `source<TAB>target`",
                    path.display(),
                    i + 1
                );
            };
            out.push(TranslationRecord {
                instance_id: format!("pool-{}", out.len()),
                system_id: system_id.to_string(),
                language: lang.clone(),
                source: source.to_string(),
                target: target.to_string(),
                failure: None,
            });
        }
    }
    Ok(out)
}

/// Rereads `translations.tsv` in corpus order.
fn load_translations(
    dir: &Path,
    instances: &[ChallengeInstance],
    stage: &StageArgs,
    jobs: usize,
) -> Result<Vec<TranslationRecord>> {
    let path = dir.join(pipeline::TRANSLATIONS_FILE);
    let backend = FileBackend::load(&path)?.with_system_id(&stage.system);
    Ok(translate_corpus(
        instances,
        &backend,
        &stage.run.lang,
        jobs,
    )?)
}

fn translate(args: TranslateArgs) -> Result<()> {
    set_jobs(args.backend.jobs);
    let instances = load_instances(&args.run)?;
    let backend = open_backend(&args.backend)?;
    let records = translate_corpus(
        &instances,
        backend.as_ref(),
        &args.run.lang,
        args.backend.jobs,
    )?;
    let dir = artifact_dir(&args.run.outdir, backend.system_id(), &args.run.lang);
    let path = dir.join(pipeline::TRANSLATIONS_FILE);
    write(&path, &to_translations_tsv(&records))?;
    println!("{}", path.display());
    Ok(())
}

fn align(args: AlignArgs) -> Result<()> {
    set_jobs(args.jobs);
    let stage = &args.stage;
    let instances = load_instances(&stage.run)?;
    let dir = artifact_dir(&stage.run.outdir, &stage.system, &stage.run.lang);
    let translations = load_translations(&dir, &instances, stage, args.jobs)?;
    let pool = load_pool(&args.aligner.pool, &stage.system, &stage.run.lang)?;
    let run = align_translations(&translations, &pool, &aligner_config(&args.aligner))?;
    log::info!(
        "aligner: tension {:.3}, {} iterations",
        run.model.tension(),
        args.aligner.iterations
    );
    let path = dir.join(pipeline::ALIGNMENT_FILE);
    write(&path, &to_pharaoh_lines(&run.alignments))?;
    println!("{}", path.display());
    Ok(())
}

fn extract(args: ExtractArgs) -> Result<()> {
    let stage = &args.stage;
    let instances = load_instances(&stage.run)?;
    let dir = artifact_dir(&stage.run.outdir, &stage.system, &stage.run.lang);
    let translations = load_translations(&dir, &instances, stage, 1)?;
    let pharaoh = read(&dir.join(pipeline::ALIGNMENT_FILE))?;
    let alignments = parse_pharaoh_lines(&pharaoh, &translations)?;
    let lexicon = load_lexicon(&stage.run.lang, &args.lexicon)?;
    let predictions = extract_predictions(&instances, &translations, &alignments, &lexicon)?;
    let path = dir.join(pipeline::PREDICTIONS_FILE);
    write(&path, &to_jsonl(&predictions))?;
    println!("{}", path.display());
    Ok(())
}

fn report(args: StageArgs) -> Result<()> {
    let dir = artifact_dir(&args.run.outdir, &args.system, &args.run.lang);
    let predictions = read_predictions(&dir.join(pipeline::PREDICTIONS_FILE))?;
    let report = compute_report(&predictions)?;
    write(
        &dir.join(pipeline::REPORT_JSON_FILE),
        &(report.to_json() + "\n"),
    )?;
    write(&dir.join(pipeline::REPORT_TEXT_FILE), &report.to_text())?;
    print!("{}", report.to_text());
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> Result<()> {
    set_jobs(args.backend.jobs);
    let instances = load_instances(&args.run)?;
    let backend = open_backend(&args.backend)?;
    let lexicon = load_lexicon(&args.run.lang, &args.lexicon)?;
    let pool = load_pool(&args.aligner.pool, backend.system_id(), &args.run.lang)?;
    let options = PipelineOptions {
        aligner: aligner_config(&args.aligner),
        jobs: args.backend.jobs,
    };
    let run = run_evaluation(
        &instances,
        backend.as_ref(),
        &args.run.lang,
        &lexicon,
        &pool,
        &options,
    )?;
    let dir = artifact_dir(&args.run.outdir, backend.system_id(), &args.run.lang);
    write_artifacts(&dir, &run)?;
    print!("{}", run.report.to_text());
    Ok(())
}

fn read_report(path: &Path) -> Result<EvaluationReport> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn read_predictions(path: &Path) -> Result<Vec<PredictionRecord>> {
    parse_jsonl(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn compare(base: &Path, other: &Path, json: bool) -> Result<()> {
    let delta = compare_reports(&read_report(base)?, &read_report(other)?)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&delta)?);
    } else {
        println!("{delta}");
    }
    Ok(())
}

fn table(paths: &[PathBuf]) -> Result<()> {
    if paths.is_empty() {
        bail!("no reports given");
    }
    let reports = paths
        .iter()
        .map(|p| read_report(p))
        .collect::<Result<Vec<_>>>()?;
    print!("{}", format_table(&reports));
    Ok(())
}

fn corpus_command(command: CorpusCommand) -> Result<()> {
    match command {
        CorpusCommand::Stats { corpus, json } => {
            let instances = load_challenge_set(&corpus, CorpusFormat::NativeTsv)?;
            let stats = corpus::corpus_stats(&instances);
            if json {
                println!("{}", serde_json::to_string_pretty(&stats)?);
            } else {
                println!("{}", stats.to_string().trim_end());
            }
        }
        CorpusCommand::Inject { corpus, out } => {
            let instances = load_challenge_set(&corpus, CorpusFormat::NativeTsv)?;
            write_challenge_set(&out, &inject_adjectives(&instances)?)?;
        }
        CorpusCommand::Ingest {
            winogender,
            winobias_pro,
            winobias_anti,
            occupations,
            out,
        } => {
            let stereotypes = match occupations {
                Some(p) => OccupationStereotypes::from_tsv(&read(&p)?)?,
                None => OccupationStereotypes::bundled(),
            };
            let mut instances = Vec::new();
            if let Some(p) = winogender {
                instances.extend(ingest_winogender(&read(&p)?, &stereotypes, "wg")?);
            }
            for (paths, stereotype, tag) in [
                (&winobias_pro, Stereotype::Pro, "pro"),
                (&winobias_anti, Stereotype::Anti, "anti"),
            ] {
                for p in paths {
                    let stem = p
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_default();
                    let prefix = format!("wb-{tag}-{stem}");
                    instances.extend(ingest_winobias(&read(p)?, stereotype, &prefix)?);
                }
            }
            if instances.is_empty() {
                bail!("nothing to ingest; pass --winogender or --winobias-pro/--winobias-anti");
            }
            write_challenge_set(&out, &instances)?;
            println!(
                "{}",
                corpus::corpus_stats(&instances).to_string().trim_end()
            );
        }
    }
    Ok(())
}

fn validate(command: ValidateCommand) -> Result<()> {
    match command {
        ValidateCommand::Sample {
            predictions,
            translations,
            n,
            seed,
            out,
        } => {
            let records = read_predictions(&predictions)?;
            let targets = FileBackend::load(&translations)?;
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
            let sheet = sample_for_validation(&records, &translated, n, seed)?;
            sheet.write(&out)?;
            println!("{} items -> {}", sheet.items.len(), out.display());
        }
        ValidateCommand::Agreement {
            predictions,
            annotations,
            sheet,
            threshold,
            json,
        } => {
            let records = read_predictions(&predictions)?;
            let expected: Option<BTreeSet<String>> = match &sheet {
                Some(p) => Some(
                    AnnotationSheet::read(p)?
                        .items
                        .into_iter()
                        .map(|i| i.instance_id)
                        .collect(),
                ),
                None => None,
            };
            let mut labels = Vec::new();
            for path in &annotations {
                let l = AnnotationSheet::read(path)?.labels();
                if let Some(ids) = &expected {
                    let got: BTreeSet<String> = l.keys().cloned().collect();
                    if &got != ids {
                        bail!("{} does not cover the sample sheet", path.display());
                    }
                }
                labels.push(l);
            }
            let report = compute_agreement(&records, &labels)?;
            let meets = report.meets_threshold(threshold);
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                for (path, pct) in annotations.iter().zip(&report.per_annotator) {
                    println!("{}: {pct:.1}% agree with automatic", path.display());
                }
                println!("human vs automatic: {:.1}%", report.human_vs_auto);
                if let Some(iaa) = report.inter_annotator {
                    println!("inter-annotator: {iaa:.1}%");
                }
                if !report.disagreements.is_empty() {
                    println!("disagreements: {}", report.disagreements.join(", "));
                }
                println!(
                    "threshold {threshold:.1}%: {}",
                    if meets { "met" } else { "NOT met" }
                );
            }
            if !meets {
                log::warn!(
                    "agreement {:.1}% is below {threshold:.1}%",
                    report.human_vs_auto
                );
            }
        }
        ValidateCommand::Annotate { sheet, out } => {
            let mut s = AnnotationSheet::read(&sheet)?;
            let stdin = io::stdin();
            let set = annotate_interactive(&mut s, stdin.lock(), io::stdout())?;
            let target = out.unwrap_or(sheet);
            s.write(&target)?;
            io::stdout().flush()?;
            println!("{set} labels written to {}", target.display());
        }
    }
    Ok(())
}
