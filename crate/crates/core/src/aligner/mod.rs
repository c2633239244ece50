//! Word alignment over the automatic bitext.
//!
//! Target tokens are aligned to English source positions (or to null) under a
//! lexical translation table `t(f | e)` and a diagonal distortion prior. The
//! table is fitted by EM on the very translations being evaluated; the prior's
//! tension can be refitted after every iteration.

pub mod diagonal;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::text::{english_words, target_words};
use crate::translate::TranslationRecord;
use diagonal::TensionStats;

pub const NULL_WORD: &str = "<null>";
const MODEL_MAGIC: &str = "#mtgender-alignment-model";
const MODEL_VERSION: &str = "v1";
// E-step partial sums are merged in chunk order; a fixed chunk count keeps the
// floating-point result independent of the worker count.
const ESTEP_CHUNKS: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum AlignerError {
    #[error("invalid aligner config: {0}")]
    Config(String),
    #[error("no trainable sentence pairs")]
    EmptyCorpus,
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignerConfig {
    pub iterations: usize,
    pub diagonal_tension: f64,
    pub null_probability: f64,
    pub optimize_tension: bool,
    pub tension_steps: usize,
}

impl Default for AlignerConfig {
    fn default() -> Self {
        Self {
            iterations: 5,
            diagonal_tension: 4.0,
            null_probability: 0.08,
            optimize_tension: true,
            tension_steps: 8,
        }
    }
}

impl AlignerConfig {
    pub fn validate(&self) -> Result<(), AlignerError> {
        if self.iterations == 0 {
            return Err(AlignerError::Config("iterations must be at least 1".into()));
        }
        if !(self.diagonal_tension.is_finite() && self.diagonal_tension > 0.0) {
            return Err(AlignerError::Config(
                "diagonal tension must be positive".into(),
            ));
        }
        if !(self.null_probability > 0.0 && self.null_probability < 1.0) {
            return Err(AlignerError::Config(
                "null probability must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// A sentence pair ready for alignment. Token lists are lowercased;
/// `target_original` keeps the original casing for morphology.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedPair {
    pub pair_id: String,
    pub source_tokens: Vec<String>,
    pub target_tokens: Vec<String>,
    pub target_original: Vec<String>,
}

impl TokenizedPair {
    pub fn is_trainable(&self) -> bool {
        !self.source_tokens.is_empty() && !self.target_tokens.is_empty()
    }
}

#[derive(Debug, Clone, Default)]
pub struct TokenizedCorpus {
    pub pairs: Vec<TokenizedPair>,
    /// Records dropped for a failed or empty translation.
    pub excluded: usize,
}

/// Tokenizes translation records. Failed or empty translations are dropped
/// and counted.
pub fn tokenize_pairs(records: &[TranslationRecord]) -> TokenizedCorpus {
    let mut out = TokenizedCorpus::default();
    for r in records {
        if !r.is_ok() || r.target.trim().is_empty() {
            out.excluded += 1;
            continue;
        }
        let target_original = target_words(&r.language, &r.target);
        out.pairs.push(TokenizedPair {
            pair_id: r.instance_id.clone(),
            source_tokens: english_words(&r.source)
                .into_iter()
                .map(|t| t.to_lowercase())
                .collect(),
            target_tokens: target_original
                .iter()
                .map(|t| r.language.fold_case(t))
                .collect(),
            target_original,
        });
    }
    if out.excluded > 0 {
        log::info!(
            "tokenize: excluded {} pairs without a translation",
            out.excluded
        );
    }
    out
}

/// Sparse lexical table in compressed-row form: row `e` holds the target ids
/// that co-occurred with source word `e` in training.
#[derive(Debug, Clone, PartialEq)]
struct LexicalTable {
    row_start: Vec<usize>,
    cols: Vec<u32>,
    probs: Vec<f64>,
}

impl LexicalTable {
    fn slot(&self, e: u32, f: u32) -> Option<usize> {
        let (a, b) = (self.row_start[e as usize], self.row_start[e as usize + 1]);
        self.cols[a..b].binary_search(&f).ok().map(|k| a + k)
    }

    fn prob(&self, e: u32, f: u32) -> f64 {
        self.slot(e, f).map_or(0.0, |k| self.probs[k])
    }

    fn rows(&self) -> usize {
        self.row_start.len() - 1
    }
}

/// Trained alignment parameters. Source id 0 is the null word.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentModel {
    source_words: Vec<String>,
    source_ids: HashMap<String, u32>,
    target_words: Vec<String>,
    target_ids: HashMap<String, u32>,
    table: LexicalTable,
    tension: f64,
    null_probability: f64,
}

/// Per-iteration diagnostics from [`train_with_trace`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingTrace {
    /// Corpus log-likelihood under the parameters entering each iteration.
    pub log_likelihood: Vec<f64>,
    /// Tension after each iteration.
    pub tension: Vec<f64>,
}

struct EncodedPair {
    source: Vec<u32>,
    target: Vec<u32>,
}

struct Partial {
    counts: Vec<f64>,
    log_likelihood: f64,
    stats: TensionStats,
}

impl AlignmentModel {
    pub fn tension(&self) -> f64 {
        self.tension
    }

    pub fn null_probability(&self) -> f64 {
        self.null_probability
    }

    /// `t(target | source)`; use [`NULL_WORD`] for the null source.
    pub fn translation_prob(&self, source: &str, target: &str) -> f64 {
        match (self.source_ids.get(source), self.target_ids.get(target)) {
            (Some(&e), Some(&f)) => self.table.prob(e, f),
            _ => 0.0,
        }
    }

    /// Target word maximizing `t(· | source)`, ties to the smaller id.
    pub fn best_translation(&self, source: &str) -> Option<&str> {
        let &e = self.source_ids.get(source)?;
        let (a, b) = (
            self.table.row_start[e as usize],
            self.table.row_start[e as usize + 1],
        );
        let mut best: Option<(u32, f64)> = None;
        for k in a..b {
            if best.is_none_or(|(_, p)| self.table.probs[k] > p) {
                best = Some((self.table.cols[k], self.table.probs[k]));
            }
        }
        best.map(|(f, _)| self.target_words[f as usize].as_str())
    }

    pub fn source_vocabulary(&self) -> impl Iterator<Item = &str> {
        self.source_words.iter().skip(1).map(String::as_str)
    }

    /// Sum of each source row, null included, in id order.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.table.rows())
            .map(|e| {
                self.table.probs[self.table.row_start[e]..self.table.row_start[e + 1]]
                    .iter()
                    .sum()
            })
            .collect()
    }

    fn encode_pair(&self, pair: &TokenizedPair) -> (Vec<Option<u32>>, Vec<Option<u32>>) {
        (
            pair.source_tokens
                .iter()
                .map(|w| self.source_ids.get(w).copied())
                .collect(),
            pair.target_tokens
                .iter()
                .map(|w| self.target_ids.get(w).copied())
                .collect(),
        )
    }

    fn e_step_pair(&self, pair: &EncodedPair, counts: &mut [f64], stats: &mut TensionStats) -> f64 {
        let n = pair.source.len();
        let m = pair.target.len();
        let p0 = self.null_probability;
        let mut ll = 0.0;
        let mut post = vec![0.0; n];
        for (jj, &f) in pair.target.iter().enumerate() {
            let j = jj + 1;
            let prior = diagonal::prior(j, m, n, self.tension);
            let null_score = p0 * self.table.prob(0, f);
            let mut total = null_score;
            for (ii, &e) in pair.source.iter().enumerate() {
                post[ii] = (1.0 - p0) * prior[ii] * self.table.prob(e, f);
                total += post[ii];
            }
            if total <= 0.0 {
                continue;
            }
            ll += total.ln();
            let null_post = null_score / total;
            counts[self
                .table
                .slot(0, f)
                .expect("null row covers every target word")] += null_post;
            for (ii, &e) in pair.source.iter().enumerate() {
                let p = post[ii] / total;
                counts[self.table.slot(e, f).expect("co-occurring pair in table")] += p;
                stats.posterior_deviation += p * diagonal::deviation(ii + 1, j, n, m);
            }
            *stats
                .mass
                .entry((m as u32, n as u32, j as u32))
                .or_insert(0.0) += 1.0 - null_post;
            stats.tokens += 1.0;
        }
        ll
    }

    fn e_step(&self, corpus: &[EncodedPair]) -> Partial {
        let chunk = corpus.len().div_ceil(ESTEP_CHUNKS).max(1);
        let partials: Vec<Partial> = corpus
            .par_chunks(chunk)
            .map(|pairs| {
                let mut counts = vec![0.0; self.table.probs.len()];
                let mut stats = TensionStats::default();
                let mut ll = 0.0;
                for p in pairs {
                    ll += self.e_step_pair(p, &mut counts, &mut stats);
                }
                Partial {
                    counts,
                    log_likelihood: ll,
                    stats,
                }
            })
            .collect();
        let mut total = Partial {
            counts: vec![0.0; self.table.probs.len()],
            log_likelihood: 0.0,
            stats: TensionStats::default(),
        };
        for p in partials {
            for (a, b) in total.counts.iter_mut().zip(&p.counts) {
                *a += b;
            }
            total.log_likelihood += p.log_likelihood;
            total.stats.merge(&p.stats);
        }
        total
    }

    fn m_step(&mut self, counts: &[f64]) {
        for e in 0..self.table.rows() {
            let (a, b) = (self.table.row_start[e], self.table.row_start[e + 1]);
            let sum: f64 = counts[a..b].iter().sum();
            if sum > 0.0 {
                for (prob, c) in self.table.probs[a..b].iter_mut().zip(&counts[a..b]) {
                    *prob = c / sum;
                }
            }
        }
    }

    fn encode_corpus(&self, pairs: &[TokenizedPair]) -> Vec<EncodedPair> {
        pairs
            .iter()
            .filter(|p| p.is_trainable())
            .filter_map(|p| {
                let (s, t) = self.encode_pair(p);
                Some(EncodedPair {
                    source: s.into_iter().collect::<Option<_>>()?,
                    target: t.into_iter().collect::<Option<_>>()?,
                })
            })
            .collect()
    }

    /// Log-likelihood of `pairs` under the model. Pairs containing words
    /// outside the training vocabulary are skipped.
    pub fn log_likelihood(&self, pairs: &[TokenizedPair]) -> f64 {
        let corpus = self.encode_corpus(pairs);
        self.e_step(&corpus).log_likelihood
    }

    /// Posterior tension statistics of `pairs` under the current parameters.
    pub fn tension_stats(&self, pairs: &[TokenizedPair]) -> TensionStats {
        let corpus = self.encode_corpus(pairs);
        self.e_step(&corpus).stats
    }

    /// Most probable source position for every target token.
    ///
    /// Null wins only when strictly better than every source position. Ties
    /// go to the position nearest the diagonal, then to the smaller index.
    /// A target token without lexical support is placed by the prior alone.
    pub fn viterbi_align(&self, pair: &TokenizedPair) -> Alignment {
        let n = pair.source_tokens.len();
        let m = pair.target_tokens.len();
        let mut links = Vec::new();
        if n == 0 || m == 0 {
            return Alignment {
                pair_id: pair.pair_id.clone(),
                links,
            };
        }
        let (src, tgt) = self.encode_pair(pair);
        let p0 = self.null_probability;
        for (jj, f) in tgt.iter().enumerate() {
            let j = jj + 1;
            let prior = diagonal::prior(j, m, n, self.tension);
            let lexical: Vec<f64> = src
                .iter()
                .map(|e| match (e, f) {
                    (Some(e), Some(f)) => self.table.prob(*e, *f),
                    _ => 0.0,
                })
                .collect();
            let supported = lexical.iter().any(|&x| x > 0.0);
            let mut best: Option<(usize, f64, f64)> = None;
            for ii in 0..n {
                let score = if supported {
                    (1.0 - p0) * prior[ii] * lexical[ii]
                } else {
                    prior[ii]
                };
                let dev = diagonal::deviation(ii + 1, j, n, m);
                let better = match best {
                    None => true,
                    Some((_, s, d)) => score > s || (score == s && dev < d),
                };
                if better {
                    best = Some((ii, score, dev));
                }
            }
            let (ii, score, _) = best.expect("n > 0");
            let null_score = match f {
                Some(f) if supported => p0 * self.table.prob(0, *f),
                _ => 0.0,
            };
            if null_score > score {
                continue;
            }
            links.push((ii, jj));
        }
        Alignment {
            pair_id: pair.pair_id.clone(),
            links,
        }
    }

    /// Serializes the table as TSV `source<TAB>target<TAB>prob` under a
    /// header line carrying the version, tension and null probability.
    pub fn to_tsv(&self) -> String {
        let mut rows: Vec<(&str, &str, f64)> = Vec::with_capacity(self.table.probs.len());
        for e in 0..self.table.rows() {
            for k in self.table.row_start[e]..self.table.row_start[e + 1] {
                rows.push((
                    &self.source_words[e],
                    &self.target_words[self.table.cols[k] as usize],
                    self.table.probs[k],
                ));
            }
        }
        rows.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut out = format!(
            "{MODEL_MAGIC}\t{MODEL_VERSION}\ttension={:?}\tnull_probability={:?}\n",
            self.tension, self.null_probability
        );
        for (s, t, p) in rows {
            let _ = writeln!(out, "{s}\t{t}\t{p:?}");
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self, AlignerError> {
        let mut lines = text.lines().enumerate();
        let parse_err = |line: usize, message: String| AlignerError::Parse { line, message };
        let (_, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "empty model file".into()))?;
        let fields: Vec<&str> = header.split('\t').collect();
        if fields.len() != 4 || fields[0] != MODEL_MAGIC {
            return Err(parse_err(1, "missing model header".into()));
        }
        if fields[1] != MODEL_VERSION {
            return Err(parse_err(
                1,
                format!("unsupported model version `{}`", fields[1]),
            ));
        }
        let num = |field: &str, key: &str| -> Result<f64, AlignerError> {
            field
                .strip_prefix(key)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| parse_err(1, format!("expected `{key}<number>`")))
        };
        let tension = num(fields[2], "tension=")?;
        let null_probability = num(fields[3], "null_probability=")?;

        let mut source_words = vec![NULL_WORD.to_string()];
        let mut source_ids: HashMap<String, u32> = HashMap::from([(NULL_WORD.to_string(), 0)]);
        let mut target_words = Vec::new();
        let mut target_ids: HashMap<String, u32> = HashMap::new();
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new()];
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(parse_err(
                    i + 1,
                    "expected `source<TAB>target<TAB>prob`".into(),
                ));
            }
            let p: f64 = cols[2]
                .parse()
                .map_err(|_| parse_err(i + 1, format!("invalid probability `{}`", cols[2])))?;
            let e = *source_ids.entry(cols[0].to_string()).or_insert_with(|| {
                source_words.push(cols[0].to_string());
                rows.push(Vec::new());
                (source_words.len() - 1) as u32
            });
            let f = *target_ids.entry(cols[1].to_string()).or_insert_with(|| {
                target_words.push(cols[1].to_string());
                (target_words.len() - 1) as u32
            });
            rows[e as usize].push((f, p));
        }
        let table = build_table(rows);
        Ok(Self {
            source_words,
            source_ids,
            target_words,
            target_ids,
            table,
            tension,
            null_probability,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), AlignerError> {
        fs::write(path, self.to_tsv()).map_err(|source| AlignerError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, AlignerError> {
        let text = fs::read_to_string(path).map_err(|source| AlignerError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_tsv(&text)
    }
}

fn build_table(mut rows: Vec<Vec<(u32, f64)>>) -> LexicalTable {
    let mut row_start = Vec::with_capacity(rows.len() + 1);
    let mut cols = Vec::new();
    let mut probs = Vec::new();
    row_start.push(0);
    for row in &mut rows {
        row.sort_by_key(|&(f, _)| f);
        row.dedup_by_key(|&mut (f, _)| f);
        for &(f, p) in row.iter() {
            cols.push(f);
            probs.push(p);
        }
        row_start.push(cols.len());
    }
    LexicalTable {
        row_start,
        cols,
        probs,
    }
}

/// Builds vocabularies and the uniform co-occurrence initialization.
fn initialize(pairs: &[&TokenizedPair], config: &AlignerConfig) -> AlignmentModel {
    let mut source_words = vec![NULL_WORD.to_string()];
    let mut source_ids: HashMap<String, u32> = HashMap::from([(NULL_WORD.to_string(), 0)]);
    let mut target_words = Vec::new();
    let mut target_ids: HashMap<String, u32> = HashMap::new();
    let mut support: Vec<Vec<u32>> = vec![Vec::new()];

    for p in pairs {
        let s: Vec<u32> = p
            .source_tokens
            .iter()
            .map(|w| {
                *source_ids.entry(w.clone()).or_insert_with(|| {
                    source_words.push(w.clone());
                    support.push(Vec::new());
                    (source_words.len() - 1) as u32
                })
            })
            .collect();
        let t: Vec<u32> = p
            .target_tokens
            .iter()
            .map(|w| {
                *target_ids.entry(w.clone()).or_insert_with(|| {
                    target_words.push(w.clone());
                    (target_words.len() - 1) as u32
                })
            })
            .collect();
        for e in std::iter::once(0).chain(s) {
            support[e as usize].extend(t.iter().copied());
        }
    }
    let rows = support
        .into_iter()
        .map(|mut fs| {
            fs.sort_unstable();
            fs.dedup();
            let u = 1.0 / fs.len().max(1) as f64;
            fs.into_iter().map(|f| (f, u)).collect()
        })
        .collect();
    AlignmentModel {
        source_words,
        source_ids,
        target_words,
        target_ids,
        table: build_table(rows),
        tension: config.diagonal_tension,
        null_probability: config.null_probability,
    }
}

pub fn train(
    pairs: &[TokenizedPair],
    config: &AlignerConfig,
) -> Result<AlignmentModel, AlignerError> {
    train_with_trace(pairs, config).map(|(m, _)| m)
}

/// Runs EM for `config.iterations` rounds and reports the likelihood trace.
pub fn train_with_trace(
    pairs: &[TokenizedPair],
    config: &AlignerConfig,
) -> Result<(AlignmentModel, TrainingTrace), AlignerError> {
    config.validate()?;
    let trainable: Vec<&TokenizedPair> = pairs.iter().filter(|p| p.is_trainable()).collect();
    if trainable.is_empty() {
        return Err(AlignerError::EmptyCorpus);
    }
    let mut model = initialize(&trainable, config);
    let corpus: Vec<EncodedPair> = trainable
        .iter()
        .map(|p| EncodedPair {
            source: p
                .source_tokens
                .iter()
                .map(|w| model.source_ids[w])
                .collect(),
            target: p
                .target_tokens
                .iter()
                .map(|w| model.target_ids[w])
                .collect(),
        })
        .collect();

    let mut trace = TrainingTrace::default();
    for it in 0..config.iterations {
        let estep = model.e_step(&corpus);
        model.m_step(&estep.counts);
        if config.optimize_tension {
            model.tension = estep.stats.optimize(model.tension, config.tension_steps);
        }
        log::debug!(
            "aligner iteration {}: log-likelihood {:.4}, tension {:.4}",
            it + 1,
            estep.log_likelihood,
            model.tension
        );
        trace.log_likelihood.push(estep.log_likelihood);
        trace.tension.push(model.tension);
    }
    Ok((model, trace))
}

/// Links between source and target token positions, 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alignment {
    pub pair_id: String,
    /// `(source_index, target_index)`, sorted by target index; every target
    /// index occurs at most once.
    pub links: Vec<(usize, usize)>,
}

impl Alignment {
    /// Target positions linked to `source_index`, ascending.
    pub fn targets_of(&self, source_index: usize) -> Vec<usize> {
        self.links
            .iter()
            .filter(|&&(s, _)| s == source_index)
            .map(|&(_, t)| t)
            .collect()
    }

    pub fn to_pharaoh(&self) -> String {
        self.links
            .iter()
            .map(|(s, t)| format!("{s}-{t}"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn from_pharaoh(pair_id: impl Into<String>, line: &str) -> Result<Self, String> {
        let mut links = Vec::new();
        for item in line.split_whitespace() {
            let (s, t) = item
                .split_once('-')
                .ok_or_else(|| format!("link `{item}` is not `i-j`"))?;
            let s = s
                .parse()
                .map_err(|_| format!("bad source index in `{item}`"))?;
            let t = t
                .parse()
                .map_err(|_| format!("bad target index in `{item}`"))?;
            links.push((s, t));
        }
        links.sort_by_key(|&(s, t)| (t, s));
        if links.windows(2).any(|w| w[0].1 == w[1].1) {
            return Err("target index linked more than once".into());
        }
        Ok(Alignment {
            pair_id: pair_id.into(),
            links,
        })
    }

    /// Checks link indices against sentence lengths.
    pub fn in_range(&self, source_len: usize, target_len: usize) -> bool {
        self.links
            .iter()
            .all(|&(s, t)| s < source_len && t < target_len)
    }
}

/// Parses a Pharaoh file into one optional link set per line.
pub fn parse_pharaoh(text: &str, ids: &[String]) -> Result<Vec<Alignment>, AlignerError> {
    let lines: Vec<&str> = text.lines().collect();
    if lines.len() != ids.len() {
        return Err(AlignerError::Parse {
            line: lines.len().min(ids.len()) + 1,
            message: format!(
                "expected {} alignment lines, found {}",
                ids.len(),
                lines.len()
            ),
        });
    }
    lines
        .iter()
        .zip(ids)
        .enumerate()
        .map(|(i, (line, id))| {
            Alignment::from_pharaoh(id.clone(), line).map_err(|message| AlignerError::Parse {
                line: i + 1,
                message,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(id: &str, s: &str, t: &str) -> TokenizedPair {
        TokenizedPair {
            pair_id: id.into(),
            source_tokens: s.split_whitespace().map(String::from).collect(),
            target_tokens: t.split_whitespace().map(String::from).collect(),
            target_original: t.split_whitespace().map(String::from).collect(),
        }
    }

    #[test]
    fn single_pair_is_deterministic() {
        let m = train(&[pair("1", "a", "b")], &AlignerConfig::default()).unwrap();
        assert_eq!(m.translation_prob("a", "b"), 1.0);
        assert_eq!(m.translation_prob(NULL_WORD, "b"), 1.0);
    }

    #[test]
    fn empty_corpus_is_error() {
        let err = train(&[pair("1", "a", "")], &AlignerConfig::default()).unwrap_err();
        assert!(matches!(err, AlignerError::EmptyCorpus));
    }

    #[test]
    fn config_validation() {
        for bad in [
            AlignerConfig {
                iterations: 0,
                ..Default::default()
            },
            AlignerConfig {
                diagonal_tension: 0.0,
                ..Default::default()
            },
            AlignerConfig {
                null_probability: 1.0,
                ..Default::default()
            },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn tokenize_records() {
        use crate::language::LanguageCode;
        let rec = |id: &str, src: &str, tgt: &str, lang: LanguageCode| TranslationRecord {
            instance_id: id.into(),
            system_id: "s".into(),
            language: lang,
            source: src.into(),
            target: tgt.into(),
            failure: None,
        };
        let out = tokenize_pairs(&[
            rec("1", "The doctor.", "El doctor.", LanguageCode::Es),
            rec("2", "The doctor.", "الطبيب.", LanguageCode::Ar),
            rec("3", "The doctor.", "", LanguageCode::Es),
        ]);
        assert_eq!(out.excluded, 1);
        assert_eq!(out.pairs[0].source_tokens, ["the", "doctor", "."]);
        assert_eq!(out.pairs[0].target_tokens, ["el", "doctor", "."]);
        assert_eq!(out.pairs[0].target_original, ["El", "doctor", "."]);
        assert_eq!(out.pairs[1].target_tokens, out.pairs[1].target_original);
    }

    #[test]
    fn unseen_target_word_goes_to_diagonal() {
        let m = train(
            &[pair("1", "a b c", "x y z"), pair("2", "a c", "x z")],
            &AlignerConfig::default(),
        )
        .unwrap();
        let al = m.viterbi_align(&pair("q", "a b c", "x UNSEEN z"));
        assert!(al.links.contains(&(1, 1)));
    }

    #[test]
    fn pharaoh_round_trip_and_errors() {
        let al = Alignment::from_pharaoh("p", "1-1 0-0 3-2").unwrap();
        assert_eq!(al.links, vec![(0, 0), (1, 1), (3, 2)]);
        assert_eq!(al.to_pharaoh(), "0-0 1-1 3-2");
        assert_eq!(al.targets_of(1), vec![1]);
        assert!(Alignment::from_pharaoh("p", "0-1 2-1").is_err());
        assert!(Alignment::from_pharaoh("p", "0:1").is_err());
        assert!(Alignment::from_pharaoh("p", "").unwrap().links.is_empty());
        assert!(!al.in_range(3, 3));
    }

    #[test]
    fn model_dump_round_trip() {
        let pairs = [
            pair("1", "the doctor", "el doctor"),
            pair("2", "the nurse", "la enfermera"),
        ];
        let m = train(&pairs, &AlignerConfig::default()).unwrap();
        let dumped = m.to_tsv();
        let back = AlignmentModel::from_tsv(&dumped).unwrap();
        assert_eq!(back.to_tsv(), dumped);
        for p in &pairs {
            assert_eq!(back.viterbi_align(p), m.viterbi_align(p));
        }
        assert!(AlignmentModel::from_tsv("garbage\n").is_err());
    }
}
