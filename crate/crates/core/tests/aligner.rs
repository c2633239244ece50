mod common;

use common::{copy_corpus, dictionary_corpus, identity_precision};
use mtgender_core::aligner::{self, diagonal, AlignerConfig, Alignment, TokenizedPair};
use mtgender_core::text::{english_words, target_words};
use mtgender_core::LanguageCode;

fn frozen(iterations: usize) -> AlignerConfig {
    AlignerConfig {
        iterations,
        optimize_tension: false,
        ..AlignerConfig::default()
    }
}

#[test]
fn copy_corpus_aligns_to_identity() {
    let corpus = copy_corpus(500, 50, 11);
    let model = aligner::train(&corpus, &AlignerConfig::default()).unwrap();
    let precision = identity_precision(&corpus, &model);
    assert!(precision >= 0.99, "precision {precision}");
}

#[test]
fn dictionary_mapping_recovered() {
    let (corpus, mapping) = dictionary_corpus(500, 50, 12);
    let model = aligner::train(&corpus, &AlignerConfig::default()).unwrap();
    let recovered = mapping
        .iter()
        .filter(|(e, f)| model.best_translation(e) == Some(f.as_str()))
        .count();
    assert!(
        recovered as f64 >= 0.95 * mapping.len() as f64,
        "{recovered}/{}",
        mapping.len()
    );
}

#[test]
fn likelihood_non_decreasing_with_frozen_tension() {
    let (corpus, _) = dictionary_corpus(200, 30, 3);
    let (_, trace) = aligner::train_with_trace(&corpus, &frozen(8)).unwrap();
    for w in trace.log_likelihood.windows(2) {
        assert!(w[1] >= w[0] - 1e-6, "{:?}", trace.log_likelihood);
    }
}

#[test]
fn tension_gradient_matches_finite_difference() {
    let corpus = copy_corpus(10, 8, 5);
    let model = aligner::train(&corpus, &frozen(2)).unwrap();
    let stats = model.tension_stats(&corpus);
    let h = 1e-5;
    for lambda in [0.5, 2.0, 4.0, 9.0] {
        let analytic = stats.gradient(lambda);
        let numeric = (stats.objective(lambda + h) - stats.objective(lambda - h)) / (2.0 * h);
        let rel = (analytic - numeric).abs() / analytic.abs().max(1e-12);
        assert!(
            rel < 1e-4,
            "λ={lambda}: analytic {analytic} numeric {numeric}"
        );
    }
}

#[test]
fn curvature_is_non_positive() {
    let corpus = copy_corpus(10, 8, 6);
    let model = aligner::train(&corpus, &frozen(1)).unwrap();
    let stats = model.tension_stats(&corpus);
    for lambda in [0.1, 1.0, 5.0, 14.0] {
        assert!(stats.curvature(lambda) <= 0.0);
    }
}

#[test]
fn rows_normalized_after_every_iteration() {
    let (corpus, _) = dictionary_corpus(100, 20, 9);
    for iterations in 1..=5 {
        let model = aligner::train(
            &corpus,
            &AlignerConfig {
                iterations,
                ..Default::default()
            },
        )
        .unwrap();
        for (e, s) in model.row_sums().iter().enumerate() {
            assert!(
                (s - 1.0).abs() < 1e-9,
                "iteration {iterations}, row {e}: {s}"
            );
        }
    }
}

#[test]
fn prior_is_normalized_and_peaks_on_diagonal() {
    let p = diagonal::prior(3, 6, 6, 4.0);
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let argmax = p
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap()
        .0;
    assert_eq!(argmax + 1, 3);
}

#[test]
fn unseen_words_follow_the_diagonal() {
    let corpus = copy_corpus(50, 10, 2);
    let model = aligner::train(&corpus, &AlignerConfig::default()).unwrap();
    let probe = TokenizedPair {
        pair_id: "probe".into(),
        source_tokens: vec!["zz1".into(), "zz2".into(), "zz3".into()],
        target_tokens: vec!["yy1".into(), "yy2".into(), "yy3".into()],
        target_original: vec!["yy1".into(), "yy2".into(), "yy3".into()],
    };
    let a = model.viterbi_align(&probe);
    assert_eq!(a.links, vec![(0, 0), (1, 1), (2, 2)]);
}

#[test]
fn identical_input_gives_identical_model() {
    let (corpus, _) = dictionary_corpus(100, 20, 4);
    let a = aligner::train(&corpus, &AlignerConfig::default()).unwrap();
    let b = aligner::train(&corpus, &AlignerConfig::default()).unwrap();
    assert_eq!(a.to_tsv(), b.to_tsv());
}

#[test]
fn saved_model_reloads() {
    let (corpus, _) = dictionary_corpus(50, 15, 8);
    let model = aligner::train(&corpus, &AlignerConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.tsv");
    model.save(&path).unwrap();
    let back = aligner::AlignmentModel::load(&path).unwrap();
    for p in &corpus {
        assert_eq!(model.viterbi_align(p), back.viterbi_align(p));
    }
}

#[test]
fn doctor_links_to_doctor_in_small_bitext() {
    let bitext = [
        (
            "The doctor asked the nurse to help her in the procedure.",
            "El doctor le pidió a la enfermera que le ayudara con el procedimiento.",
        ),
        (
            "The nurse asked the doctor to help her with the patient.",
            "La enfermera le pidió al doctor que la ayudara con el paciente.",
        ),
        (
            "The doctor thanked the nurse.",
            "El doctor agradeció a la enfermera.",
        ),
        (
            "The nurse called the doctor.",
            "La enfermera llamó al doctor.",
        ),
        (
            "The doctor helped the patient.",
            "El doctor ayudó al paciente.",
        ),
    ];
    let corpus: Vec<TokenizedPair> = bitext
        .iter()
        .enumerate()
        .map(|(k, (s, t))| {
            let original = target_words(&LanguageCode::Es, t);
            TokenizedPair {
                pair_id: k.to_string(),
                source_tokens: english_words(s).iter().map(|w| w.to_lowercase()).collect(),
                target_tokens: original.iter().map(|w| w.to_lowercase()).collect(),
                target_original: original,
            }
        })
        .collect();
    let model = aligner::train(&corpus, &AlignerConfig::default()).unwrap();
    let a = model.viterbi_align(&corpus[0]);
    assert_eq!(a.targets_of(1), vec![1], "{}", a.to_pharaoh());
}

#[test]
fn pharaoh_round_trip_and_errors() {
    let a = Alignment::from_pharaoh("x", "0-0 2-1 1-2").unwrap();
    assert_eq!(Alignment::from_pharaoh("x", &a.to_pharaoh()).unwrap(), a);
    assert!(Alignment::from_pharaoh("x", "0-0 1-0").is_err());
    assert!(Alignment::from_pharaoh("x", "0:0").is_err());
    let ids = vec!["a".to_string(), "b".to_string()];
    assert!(aligner::parse_pharaoh("0-0\n", &ids).is_err());
    assert_eq!(
        aligner::parse_pharaoh("0-0\n\n", &ids).unwrap()[1].links,
        vec![]
    );
}

#[test]
fn empty_corpus_and_bad_config_rejected() {
    assert!(aligner::train(&[], &AlignerConfig::default()).is_err());
    let corpus = copy_corpus(5, 5, 1);
    let bad = AlignerConfig {
        null_probability: 1.5,
        ..Default::default()
    };
    assert!(aligner::train(&corpus, &bad).is_err());
}
