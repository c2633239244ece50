//! `mtgender`: translate, align, extract and score a challenge corpus.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mtgender_core::LanguageCode;

/// Exit status for a bad invocation.
const EXIT_USAGE: u8 = 1;
/// Exit status for a run that started but could not finish.
const EXIT_FAILURE: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "mtgender",
    version,
    about = "Gender-bias evaluation for machine translation"
)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Inspect, convert or modify a challenge corpus.
    #[command(subcommand)]
    Corpus(CorpusCommand),
    /// Translate the corpus and write `translations.tsv`.
    Translate(TranslateArgs),
    /// Train the aligner on the translations and write `alignment.pharaoh`.
    Align(AlignArgs),
    /// Read entity genders off the aligned translations into `predictions.jsonl`.
    Extract(ExtractArgs),
    /// Score `predictions.jsonl` into `report.json` and `report.txt`.
    Report(StageArgs),
    /// Run translate, align, extract and report in one go.
    Evaluate(EvaluateArgs),
    /// Metric differences between two `report.json` files (second minus first).
    Compare {
        base: PathBuf,
        other: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print several `report.json` files as one language-by-system table.
    Table { reports: Vec<PathBuf> },
    /// Human validation of the automatic gender judgments.
    #[command(subcommand)]
    Validate(ValidateCommand),
}

#[derive(Subcommand, Debug)]
enum CorpusCommand {
    /// Instance counts by dataset and gold gender.
    Stats {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Write a copy with "handsome"/"pretty" in front of every gendered entity.
    Inject {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert the upstream WinoGender/WinoBias releases to the native TSV.
    Ingest {
        /// WinoGender `all_sentences.tsv`.
        #[arg(long)]
        winogender: Option<PathBuf>,
        /// WinoBias pro-stereotypical files.
        #[arg(long = "winobias-pro")]
        winobias_pro: Vec<PathBuf>,
        /// WinoBias anti-stereotypical files.
        #[arg(long = "winobias-anti")]
        winobias_anti: Vec<PathBuf>,
        /// Occupation majority-gender TSV replacing the bundled list.
        #[arg(long)]
        occupations: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Where a run's artifacts live: `<outdir>/<system>/<lang>/`.
#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Native challenge-corpus TSV.
    #[arg(long)]
    corpus: PathBuf,
    /// Target language code (es, fr, it, ru, uk, he, ar, de).
    #[arg(long, value_parser = parse_language)]
    lang: LanguageCode,
    #[arg(long, default_value = "out")]
    outdir: PathBuf,
    /// Evaluate the adjective-injected version of the corpus.
    #[arg(long)]
    inject_adjectives: bool,
}

#[derive(Args, Debug, Clone)]
struct StageArgs {
    #[command(flatten)]
    run: RunArgs,
    /// System id naming the artifact directory.
    #[arg(long)]
    system: String,
}

#[derive(Args, Debug, Clone)]
struct BackendArgs {
    /// `file:<translations.tsv>` or `http:<config.json>`.
    #[arg(long, value_parser = commands::BackendSpec::parse)]
    backend: commands::BackendSpec,
    /// Override the backend's system id.
    #[arg(long)]
    system: Option<String>,
    /// Worker threads for translation and per-instance stages.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args, Debug, Clone)]
struct AlignerArgs {
    #[arg(long = "aligner-iters", default_value_t = 5)]
    iterations: usize,
    /// Initial diagonal tension.
    #[arg(long, default_value_t = 4.0)]
    tension: f64,
    /// Null-alignment probability.
    #[arg(long, default_value_t = 0.08)]
    p0: f64,
    /// Keep the tension fixed instead of refitting it every iteration.
    #[arg(long)]
    fixed_tension: bool,
    /// Extra `source<TAB>target` bitext to train the aligner on.
    #[arg(long)]
    pool: Vec<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct LexiconArgs {
    /// User lexicon TSV overlaid on the bundled one.
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TranslateArgs {
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    backend: BackendArgs,
}

#[derive(Args, Debug)]
struct AlignArgs {
    #[command(flatten)]
    stage: StageArgs,
    #[command(flatten)]
    aligner: AlignerArgs,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    #[command(flatten)]
    stage: StageArgs,
    #[command(flatten)]
    lexicon: LexiconArgs,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    backend: BackendArgs,
    #[command(flatten)]
    aligner: AlignerArgs,
    #[command(flatten)]
    lexicon: LexiconArgs,
}

#[derive(Subcommand, Debug)]
enum ValidateCommand {
    /// Draw a random annotation sheet from a prediction dump.
    Sample {
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        translations: PathBuf,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Agreement of annotated sheets with the predictions and each other.
    Agreement {
        #[arg(long)]
        predictions: PathBuf,
        /// Annotated sheets, one per annotator.
        #[arg(long = "annotations", required = true)]
        annotations: Vec<PathBuf>,
        /// Sheet every annotation file must cover.
        #[arg(long)]
        sheet: Option<PathBuf>,
        #[arg(long, default_value_t = mtgender_core::validation::AGREEMENT_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        json: bool,
    },
    /// Fill in a sheet's gender column at the terminal.
    Annotate {
        sheet: PathBuf,
        /// Write here instead of updating the sheet in place.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_language(s: &str) -> Result<LanguageCode, String> {
    let lang: LanguageCode = s.parse().map_err(|e| format!("{e}"))?;
    if !lang.is_builtin() {
        return Err(format!("no morphology rules for `{s}`"));
    }
    Ok(lang)
}

/// Joins the error chain, dropping causes already quoted by their parent.
fn error_chain(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if out.ends_with(&text) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(&text);
    }
    out
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", error_chain(&e));
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
