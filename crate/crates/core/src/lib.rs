//! Gender-bias evaluation for machine translation.
//!
//! The toolkit runs a three-stage protocol over a Winograd-style challenge
//! corpus of English sentences whose entities carry gold genders:
//!
//! 1. translate every sentence with the system under test ([`translate`]),
//! 2. learn word alignments on the resulting bitext and map each annotated
//!    English entity to its target-side rendering ([`aligner`]),
//! 3. read the grammatical gender of that rendering off determiners,
//!    suffixes and a lexicon ([`morphology`]).
//!
//! [`pipeline`] wires the stages together, [`metrics`] scores the predictions
//! (accuracy, male/female F1 gap, pro/anti-stereotype F1 gap) and
//! [`validation`] supports the human spot-check of the automatic judgments.

pub mod aligner;
pub mod corpus;
pub mod language;
pub mod metrics;
pub mod morphology;
pub mod pipeline;
pub mod text;
pub mod translate;
pub mod validation;

pub use aligner::{AlignerConfig, Alignment, AlignmentModel, TokenizedPair};
pub use corpus::{ChallengeInstance, CorpusStats, Gender, SourceDataset, Stereotype};
pub use language::LanguageCode;
pub use metrics::{ClassScores, EvaluationReport, ReportDelta};
pub use morphology::{GenderCall, GenderEvidence, GenderLexicon, PredictedGender};
pub use pipeline::{PredictionRecord, PredictionStatus};
pub use translate::{TranslationRecord, TranslatorBackend};
pub use validation::{AgreementReport, AnnotationSheet};
