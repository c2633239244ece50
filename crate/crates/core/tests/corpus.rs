mod common;

use common::{synthetic_winobias, synthetic_winogender};
use mtgender_core::corpus::ingest::{ingest_winobias, ingest_winogender, OccupationStereotypes};
use mtgender_core::corpus::{
    corpus_stats, inject_adjectives, load_challenge_set, parse_challenge_tsv, to_native_tsv,
    write_challenge_set, ChallengeInstance, CorpusError, CorpusFormat, Gender, SourceDataset,
    Stereotype,
};
use proptest::prelude::*;

fn instance_strategy() -> impl Strategy<Value = ChallengeInstance> {
    (
        prop::collection::vec("[a-z]{1,8}", 1..6),
        prop::collection::vec("[a-z]{1,8}", 0..6),
        prop_oneof![Just("he"), Just("she"), Just("they")],
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|(before, after, pronoun, pro, winobias)| {
            let entity = before.last().unwrap().clone();
            let mut words = before.clone();
            words.push(pronoun.to_string());
            words.extend(after);
            let gold = match pronoun {
                "he" => Gender::Male,
                "she" => Gender::Female,
                _ => Gender::Neutral,
            };
            let stereotype = match (gold, pro) {
                (Gender::Neutral, _) => Stereotype::Neutral,
                (_, true) => Stereotype::Pro,
                _ => Stereotype::Anti,
            };
            ChallengeInstance {
                id: String::new(),
                sentence: format!("{}.", words.join(" ")),
                entity_index: before.len() - 1,
                entity_phrase: entity,
                gold_gender: gold,
                stereotype,
                source_dataset: if winobias {
                    SourceDataset::WinoBias
                } else {
                    SourceDataset::WinoGender
                },
            }
        })
}

fn corpus_strategy() -> impl Strategy<Value = Vec<ChallengeInstance>> {
    prop::collection::vec(instance_strategy(), 0..30).prop_map(|mut v| {
        for (k, inst) in v.iter_mut().enumerate() {
            inst.id = format!("id-{k}");
        }
        v
    })
}

proptest! {
    #[test]
    fn native_tsv_round_trip(corpus in corpus_strategy()) {
        let back = parse_challenge_tsv(&to_native_tsv(&corpus)).unwrap();
        prop_assert_eq!(back, corpus);
    }

    #[test]
    fn stats_partition_the_corpus(corpus in corpus_strategy()) {
        let s = corpus_stats(&corpus);
        prop_assert_eq!(s.total, corpus.len());
        prop_assert_eq!(s.combined().total(), corpus.len());
        let mid = corpus.len() / 2;
        prop_assert_eq!(corpus_stats(&corpus[..mid]) + corpus_stats(&corpus[mid..]), s);
    }

    #[test]
    fn injection_preserves_gold_and_shifts_entity(corpus in corpus_strategy()) {
        let injected = inject_adjectives(&corpus).unwrap();
        prop_assert_eq!(injected.len(), corpus.len());
        for (a, b) in corpus.iter().zip(&injected) {
            prop_assert_eq!(a.gold_gender, b.gold_gender);
            prop_assert!(b.validate().is_ok());
            if a.gold_gender == Gender::Neutral {
                prop_assert_eq!(a, b);
            } else {
                prop_assert_eq!(b.entity_index, a.entity_index + 1);
                prop_assert!(b.is_injected());
            }
        }
    }
}

fn inst(id: &str, gold: Gender, idx: usize, phrase: &str, sentence: &str) -> ChallengeInstance {
    ChallengeInstance {
        id: id.into(),
        sentence: sentence.into(),
        entity_index: idx,
        entity_phrase: phrase.into(),
        gold_gender: gold,
        stereotype: Stereotype::Anti,
        source_dataset: SourceDataset::WinoBias,
    }
}

#[test]
fn injection_examples() {
    let corpus = vec![
        inst(
            "1",
            Gender::Female,
            1,
            "doctor",
            "The doctor asked the nurse to help her in the procedure.",
        ),
        inst("2", Gender::Male, 1, "nurse", "The nurse said he was late."),
        inst(
            "3",
            Gender::Female,
            0,
            "Doctors",
            "Doctors said she was late.",
        ),
    ];
    let out = inject_adjectives(&corpus).unwrap();
    assert_eq!(
        out[0].sentence,
        "The pretty doctor asked the nurse to help her in the procedure."
    );
    assert_eq!(out[0].id, "1+adj");
    assert_eq!(out[0].entity_index, 2);
    assert_eq!(out[1].sentence, "The handsome nurse said he was late.");
    assert_eq!(out[2].sentence, "Pretty doctors said she was late.");
    assert!(matches!(
        inject_adjectives(&out),
        Err(CorpusError::AlreadyInjected(_))
    ));
}

#[test]
fn malformed_rows_report_line_numbers() {
    let good = inst("1", Gender::Male, 1, "nurse", "The nurse said he was late.").to_tsv_line();
    let cases = [
        format!("{good}\nbad line\n"),
        format!("{good}\n2\twinobias\tmale\tpro\tx\tnurse\tThe nurse said he left.\n"),
        format!("{good}\n2\twinobias\tmale\tpro\t1\tdoctor\tThe nurse said he left.\n"),
        format!("{good}\n2\twinobias\tmale\tpro\t1\tnurse\tThe nurse left.\n"),
        format!("{good}\n2\twinobias\tneutral\tpro\t1\tnurse\tThe nurse said they left.\n"),
        format!("{good}\n{good}\n"),
    ];
    for text in cases {
        match parse_challenge_tsv(&text) {
            Err(CorpusError::Line { line, .. }) => assert_eq!(line, 2, "{text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
}

#[test]
fn file_round_trip_and_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.tsv");
    let corpus = vec![inst(
        "1",
        Gender::Male,
        1,
        "nurse",
        "The nurse said he was late.",
    )];
    write_challenge_set(&path, &corpus).unwrap();
    assert_eq!(
        load_challenge_set(&path, CorpusFormat::NativeTsv).unwrap(),
        corpus
    );
    let missing = dir.path().join("nope.tsv");
    let err = load_challenge_set(&missing, CorpusFormat::NativeTsv).unwrap_err();
    assert!(err.to_string().contains("nope.tsv"));
}

#[test]
fn winobias_ingest() {
    let text =
        "1 [The developer] argued with the designer because [she] did not like the design.\n\
                2 The guard protected [the assistant] because it is [his] job.\n";
    let out = ingest_winobias(text, Stereotype::Anti, "wb-anti").unwrap();
    assert_eq!(out[0].entity_phrase, "developer");
    assert_eq!(out[0].entity_index, 1);
    assert_eq!(out[0].gold_gender, Gender::Female);
    assert_eq!(
        out[0].sentence,
        "The developer argued with the designer because she did not like the design."
    );
    assert_eq!(out[1].entity_phrase, "assistant");
    assert_eq!(out[1].gold_gender, Gender::Male);
    assert_eq!(out[1].id, "wb-anti-2");
    assert!(ingest_winobias("1 [The developer argued.\n", Stereotype::Pro, "x").is_err());
}

#[test]
fn winogender_ingest() {
    let text = "sentid\tsentence\n\
                technician.customer.1.male.txt\tThe technician told the customer that he could pay with cash.\n\
                technician.customer.0.female.txt\tThe technician told the customer that she could pay with cash.\n\
                nurse.patient.0.neutral.txt\tThe nurse notified the patient that their shift would be ending in an hour.\n";
    let out = ingest_winogender(text, &OccupationStereotypes::bundled(), "wg").unwrap();
    assert_eq!(out.len(), 3);
    assert_eq!(out[0].entity_phrase, "customer");
    assert_eq!(out[0].stereotype, Stereotype::Neutral);
    assert_eq!(out[1].entity_phrase, "technician");
    assert_eq!(out[1].stereotype, Stereotype::Anti);
    assert_eq!(out[2].gold_gender, Gender::Neutral);
    assert_eq!(out[2].stereotype, Stereotype::Neutral);
}

#[test]
fn synthetic_release_has_published_composition() {
    let wg = ingest_winogender(
        &synthetic_winogender(),
        &OccupationStereotypes::bundled(),
        "wg",
    )
    .unwrap();
    let mut all = wg;
    all.extend(ingest_winobias(&synthetic_winobias(791, 793), Stereotype::Pro, "wb-pro").unwrap());
    all.extend(
        ingest_winobias(&synthetic_winobias(791, 793), Stereotype::Anti, "wb-anti").unwrap(),
    );
    let s = corpus_stats(&parse_challenge_tsv(&to_native_tsv(&all)).unwrap());
    assert_eq!(s.total, 3888);
    assert_eq!(
        (
            s.count(SourceDataset::WinoGender, Gender::Male),
            s.count(SourceDataset::WinoGender, Gender::Female),
            s.count(SourceDataset::WinoGender, Gender::Neutral)
        ),
        (240, 240, 240)
    );
    assert_eq!(
        (
            s.count(SourceDataset::WinoBias, Gender::Male),
            s.count(SourceDataset::WinoBias, Gender::Female),
            s.count(SourceDataset::WinoBias, Gender::Neutral)
        ),
        (1582, 1586, 0)
    );
    let c = s.combined();
    assert_eq!(
        (
            c.get(Gender::Male),
            c.get(Gender::Female),
            c.get(Gender::Neutral)
        ),
        (1822, 1826, 240)
    );
}
