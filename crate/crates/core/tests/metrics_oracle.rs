mod common;

use common::{naive_score, records, Outcome};
use mtgender_core::corpus::{Gender, Stereotype};
use mtgender_core::metrics::{compare_reports, compute_report, format_table, MetricsError};
use mtgender_core::morphology::PredictedGender::{self, Feminine, Masculine, Unknown};
use mtgender_core::pipeline::PredictionStatus;
use proptest::prelude::*;

fn ok(gold: Gender, stereotype: Stereotype, predicted: PredictedGender) -> Outcome {
    Outcome {
        gold,
        stereotype,
        status: PredictionStatus::Ok,
        predicted,
    }
}

fn outcome_strategy() -> impl Strategy<Value = Outcome> {
    (0u8..5, any::<bool>(), 0u8..10, 0u8..4).prop_map(|(g, pro, st, p)| {
        let gold = [
            Gender::Male,
            Gender::Female,
            Gender::Male,
            Gender::Female,
            Gender::Neutral,
        ][g as usize];
        let stereotype = match gold {
            Gender::Neutral => Stereotype::Neutral,
            _ if pro => Stereotype::Pro,
            _ => Stereotype::Anti,
        };
        let status = match st {
            0 => PredictionStatus::TranslationFailed,
            1 => PredictionStatus::AlignmentDropped,
            2 => PredictionStatus::FixedGender,
            _ => PredictionStatus::Ok,
        };
        let predicted = if matches!(status, PredictionStatus::Ok | PredictionStatus::FixedGender) {
            [Masculine, Feminine, PredictedGender::Neutral, Unknown][p as usize]
        } else {
            Unknown
        };
        Outcome {
            gold,
            stereotype,
            status,
            predicted,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn matches_naive_scorer(outcomes in prop::collection::vec(outcome_strategy(), 0..=50)) {
        let naive = naive_score(&outcomes);
        match compute_report(&records(&outcomes)) {
            Err(MetricsError::NothingToScore) => prop_assert!(naive.is_none()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
            Ok(report) => {
                let naive = naive.expect("naive scorer found a scorable record");
                prop_assert!((report.acc - naive.acc).abs() <= 1e-9);
                prop_assert!((report.delta_g - naive.delta_g).abs() <= 1e-9);
                match (report.delta_s, naive.delta_s) {
                    (Some(a), Some(b)) => prop_assert!((a - b).abs() <= 1e-9),
                    (None, None) => {}
                    other => prop_assert!(false, "ΔS presence differs: {:?}", other),
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn permutation_invariant(
        outcomes in prop::collection::vec(outcome_strategy(), 1..=50),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut shuffled = outcomes.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let a = compute_report(&records(&outcomes));
        let b = compute_report(&records(&shuffled));
        match (a, b) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.acc, b.acc);
                prop_assert_eq!(a.delta_g, b.delta_g);
                prop_assert_eq!(a.delta_s, b.delta_s);
                prop_assert_eq!(a.counts, b.counts);
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "only one ordering was scorable"),
        }
    }

    #[test]
    fn bounded_and_counts_partition(outcomes in prop::collection::vec(outcome_strategy(), 1..=50)) {
        if let Ok(r) = compute_report(&records(&outcomes)) {
            prop_assert!((0.0..=100.0).contains(&r.acc));
            prop_assert!((-100.0..=100.0).contains(&r.delta_g));
            if let Some(ds) = r.delta_s {
                prop_assert!((-100.0..=100.0).contains(&ds));
            }
            prop_assert_eq!(r.counts.evaluated + r.counts.excluded(), r.counts.total);
            prop_assert_eq!(r.counts.total, outcomes.len());
        }
    }

    #[test]
    fn delta_s_equals_difference_of_subset_reports(outcomes in prop::collection::vec(outcome_strategy(), 1..=50)) {
        let Ok(whole) = compute_report(&records(&outcomes)) else { return Ok(()) };
        let Some(ds) = whole.delta_s else { return Ok(()) };
        let subset = |s: Stereotype| -> Vec<Outcome> {
            outcomes.iter().copied().filter(|o| o.stereotype == s).collect()
        };
        let pro = compute_report(&records(&subset(Stereotype::Pro))).unwrap();
        let anti = compute_report(&records(&subset(Stereotype::Anti))).unwrap();
        let macro_f1 = |r: &mtgender_core::EvaluationReport| (r.male.f1 + r.female.f1) / 2.0;
        prop_assert!((ds - 100.0 * (macro_f1(&pro) - macro_f1(&anti))).abs() <= 1e-9);
    }
}

#[test]
fn all_correct_balanced() {
    let outcomes = vec![
        ok(Gender::Male, Stereotype::Pro, Masculine),
        ok(Gender::Female, Stereotype::Pro, Feminine),
        ok(Gender::Male, Stereotype::Anti, Masculine),
        ok(Gender::Female, Stereotype::Anti, Feminine),
    ];
    let r = compute_report(&records(&outcomes)).unwrap();
    assert_eq!((r.acc, r.delta_g, r.delta_s), (100.0, 0.0, Some(0.0)));
}

#[test]
fn everything_masculine() {
    let mut outcomes = vec![ok(Gender::Male, Stereotype::Pro, Masculine); 3];
    outcomes.extend(vec![ok(Gender::Female, Stereotype::Anti, Masculine); 2]);
    let r = compute_report(&records(&outcomes)).unwrap();
    assert_eq!(r.female.recall, 0.0);
    assert_eq!(r.female.f1, 0.0);
    assert_eq!((r.male.tp, r.male.fp), (3, 2));
    let f1m = 2.0 * 0.6 * 1.0 / 1.6;
    assert!((r.delta_g - 100.0 * f1m).abs() < 1e-12);
}

#[test]
fn eight_record_fixture() {
    let outcomes = vec![
        ok(Gender::Male, Stereotype::Pro, Masculine),
        ok(Gender::Male, Stereotype::Pro, Masculine),
        ok(Gender::Female, Stereotype::Pro, Feminine),
        ok(Gender::Female, Stereotype::Pro, Feminine),
        ok(Gender::Male, Stereotype::Anti, Feminine),
        ok(Gender::Male, Stereotype::Anti, Feminine),
        ok(Gender::Female, Stereotype::Anti, Masculine),
        ok(Gender::Female, Stereotype::Anti, Masculine),
    ];
    let r = compute_report(&records(&outcomes)).unwrap();
    assert_eq!(r.acc, 50.0);
    assert_eq!(r.delta_s, Some(100.0));
    assert_eq!(r.delta_g, 0.0);
}

#[test]
fn unknown_counts_as_wrong() {
    let outcomes = vec![
        ok(Gender::Male, Stereotype::Pro, Masculine),
        ok(Gender::Female, Stereotype::Pro, Unknown),
    ];
    let r = compute_report(&records(&outcomes)).unwrap();
    assert_eq!(r.acc, 50.0);
    assert_eq!(r.counts.unknown, 1);
}

#[test]
fn compare_examples() {
    let base = compute_report(&records(&[ok(Gender::Male, Stereotype::Pro, Masculine)])).unwrap();
    let mut es_a = base.clone();
    es_a.acc = 53.1;
    let mut es_b = base.clone();
    es_b.acc = 63.5;
    let d = compare_reports(&es_a, &es_b).unwrap();
    assert!((d.acc - 10.4).abs() < 1e-9);
    assert!(d.to_string().starts_with("Acc +10.4"), "{d}");

    let mut ru_a = base.clone();
    ru_a.acc = 37.7;
    let mut ru_b = base.clone();
    ru_b.acc = 48.9;
    assert!((compare_reports(&ru_a, &ru_b).unwrap().acc - 11.2).abs() < 1e-9);

    let same = compare_reports(&base, &base).unwrap();
    assert_eq!(
        (same.acc, same.delta_g, same.delta_s),
        (0.0, 0.0, base.delta_s.map(|_| 0.0))
    );

    let mut other_lang = base.clone();
    other_lang.language = mtgender_core::LanguageCode::Fr;
    assert!(compare_reports(&base, &other_lang).is_err());
    let mut other_sys = base.clone();
    other_sys.system_id = "else".into();
    assert!(compare_reports(&base, &other_sys).is_err());
}

#[test]
fn table_has_language_row() {
    let r = compute_report(&records(&[ok(Gender::Male, Stereotype::Pro, Masculine)])).unwrap();
    let table = format_table(&[r]);
    assert!(table.lines().any(|l| l.starts_with("ES")), "{table}");
}

#[test]
fn json_round_trip() {
    let outcomes: Vec<Outcome> = {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        (0..40).map(|_| common::random_outcome(&mut rng)).collect()
    };
    let r = compute_report(&records(&outcomes)).unwrap();
    let back: mtgender_core::EvaluationReport = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(back, r);
}
