//! Per-language determiner and suffix tables.

use super::lexicon::GenderLexicon;
use super::PredictedGender::{self, Feminine as F, Masculine as M, Neutral as N, Unknown as U};
use crate::language::LanguageCode;

const ES_DETERMINERS: &[(&str, PredictedGender)] = &[
    ("el", M),
    ("al", M),
    ("del", M),
    ("un", M),
    ("los", M),
    ("unos", M),
    ("la", F),
    ("una", F),
    ("las", F),
    ("unas", F),
];

const FR_DETERMINERS: &[(&str, PredictedGender)] = &[
    ("le", M),
    ("un", M),
    ("du", M),
    ("au", M),
    ("la", F),
    ("une", F),
    ("l'", U),
    ("les", U),
    ("des", U),
    ("aux", U),
];

const IT_DETERMINERS: &[(&str, PredictedGender)] = &[
    ("il", M),
    ("lo", M),
    ("i", M),
    ("gli", M),
    ("un", M),
    ("uno", M),
    ("del", M),
    ("dello", M),
    ("dei", M),
    ("degli", M),
    ("al", M),
    ("allo", M),
    ("ai", M),
    ("agli", M),
    ("dal", M),
    ("dallo", M),
    ("nel", M),
    ("nello", M),
    ("sul", M),
    ("sullo", M),
    ("la", F),
    ("una", F),
    ("un'", F),
    ("le", F),
    ("della", F),
    ("delle", F),
    ("alla", F),
    ("alle", F),
    ("dalla", F),
    ("nella", F),
    ("sulla", F),
    ("l'", U),
    ("dell'", U),
    ("all'", U),
    ("dall'", U),
    ("nell'", U),
    ("sull'", U),
];

const DE_DETERMINERS: &[(&str, PredictedGender)] = &[
    ("der", M),
    ("den", M),
    ("dem", M),
    ("des", M),
    ("ein", M),
    ("einen", M),
    ("einem", M),
    ("eines", M),
    ("die", F),
    ("eine", F),
    ("einer", F),
    ("das", N),
];

const DE_PLURAL_SUFFIXES: &[&str] = &["innen", "en", "leute"];

/// German words in `-in` that are not feminine agent nouns.
const DE_IN_EXCEPTIONS: &[&str] = &[
    "termin",
    "medizin",
    "benzin",
    "kamin",
    "disziplin",
    "vitamin",
    "magazin",
    "urin",
    "rubin",
    "delfin",
    "pinguin",
    "berlin",
];

/// Hebrew participles spelled identically in both genders without vowel
/// points.
const HE_HOMOGRAPHS: &[&str] = &["אופה", "מורה", "מנקה", "רועה", "צופה", "קונה"];

/// Russian and Ukrainian common-gender nouns in `-а`/`-я`; agreement, not
/// the ending, shows the referent's gender.
const CYRILLIC_COMMON: &[&str] = &[
    "судья",
    "коллега",
    "сирота",
    "левша",
    "бедняга",
    "пьяница",
    "суддя",
    "колега",
];

const HE_PREFIXES: &[char] = &['ה', 'ו', 'ש', 'ב', 'ל', 'מ', 'כ'];
const AR_PREFIXES: &[&str] = &["وال", "فال", "بال", "كال", "لل", "ال", "و", "ف"];

fn apostrophe_normalized(s: &str) -> String {
    s.replace('’', "'")
}

fn determiner_table(language: &LanguageCode) -> &'static [(&'static str, PredictedGender)] {
    match language {
        LanguageCode::Es => ES_DETERMINERS,
        LanguageCode::Fr => FR_DETERMINERS,
        LanguageCode::It => IT_DETERMINERS,
        LanguageCode::De => DE_DETERMINERS,
        _ => &[],
    }
}

/// Gender signalled by a determiner form; `Some(Unknown)` marks a determiner
/// that does not distinguish gender (elided or plural).
pub(crate) fn determiner(language: &LanguageCode, token: &str) -> Option<PredictedGender> {
    let folded = apostrophe_normalized(&language.fold_case(token));
    determiner_table(language)
        .iter()
        .find(|(form, _)| *form == folded)
        .map(|&(_, g)| g)
}

/// Resolves a German determiner against the first capitalized word that
/// follows it, which carries the plural or `-in` ending.
pub(crate) fn german_determiner(gender: PredictedGender, noun: Option<&str>) -> PredictedGender {
    let Some(noun) = noun.map(|n| n.to_lowercase()) else {
        return gender;
    };
    match gender {
        F if DE_PLURAL_SUFFIXES.iter().any(|s| noun.ends_with(s)) => U,
        M if noun.ends_with("in") || noun.ends_with("innen") => U,
        g => g,
    }
}

/// Splits a leading elided determiner (`l'`, `un'`) off a token.
pub(crate) fn split_elision<'a>(
    language: &LanguageCode,
    token: &'a str,
) -> Option<(&'a str, &'a str)> {
    if !language.uses_elision() {
        return None;
    }
    crate::text::elision_split(token).map(|k| (&token[..k], &token[k..]))
}

pub(crate) struct SuffixCall {
    pub verdict: PredictedGender,
    pub weak: bool,
}

fn strong(verdict: PredictedGender) -> Option<SuffixCall> {
    Some(SuffixCall {
        verdict,
        weak: false,
    })
}

fn cyrillic_gender(word: &str, vowels: &str) -> Option<SuffixCall> {
    let last = word.chars().last()?;
    if !word
        .chars()
        .all(|c| ('\u{0400}'..='\u{04FF}').contains(&c) || c == '-')
    {
        return None;
    }
    match last {
        'а' | 'я' if CYRILLIC_COMMON.contains(&word) => strong(U),
        'а' | 'я' => strong(F),
        'ь' | 'ъ' => None,
        c if vowels.contains(c) => None,
        c if c.is_alphabetic() => strong(M),
        _ => None,
    }
}

pub(crate) fn strip_hebrew_points(s: &str) -> String {
    s.chars()
        .filter(|c| !('\u{0591}'..='\u{05C7}').contains(c))
        .collect()
}

pub(crate) fn strip_arabic_marks(s: &str) -> String {
    s.chars()
        .filter(|c| !('\u{064B}'..='\u{065F}').contains(c) && *c != '\u{0670}' && *c != '\u{0640}')
        .collect()
}

/// Lexicon lookup keys for a token: the token itself, then forms with
/// proclitics removed.
pub(crate) fn lookup_forms(language: &LanguageCode, token: &str) -> Vec<String> {
    let mut forms = Vec::new();
    match language {
        LanguageCode::He => {
            let base = strip_hebrew_points(token);
            let mut cur = base.as_str();
            forms.push(cur.to_string());
            for _ in 0..2 {
                let mut chars = cur.chars();
                match chars.next() {
                    Some(c) if HE_PREFIXES.contains(&c) && cur.chars().count() > 3 => {
                        cur = chars.as_str();
                        forms.push(cur.to_string());
                    }
                    _ => break,
                }
            }
        }
        LanguageCode::Ar => {
            let base = strip_arabic_marks(token);
            forms.push(base.clone());
            for p in AR_PREFIXES {
                if let Some(rest) = base.strip_prefix(p) {
                    if rest.chars().count() >= 3 {
                        forms.push(rest.to_string());
                    }
                }
            }
        }
        _ => {
            forms.push(token.to_string());
            if let Some((_, rest)) = split_elision(language, token) {
                forms.push(rest.to_string());
            }
        }
    }
    forms
}

/// Gender read off the word ending, if the language has a rule for it.
///
/// `Some` with an `Unknown` verdict marks a form known to be ambiguous.
pub(crate) fn suffix(
    language: &LanguageCode,
    token: &str,
    lexicon: &GenderLexicon,
) -> Option<SuffixCall> {
    let word = language.fold_case(token);
    match language {
        LanguageCode::Es | LanguageCode::It => {
            let word = split_elision(language, &word).map_or(word.as_str(), |(_, r)| r);
            if word.ends_with("ista") || word.ends_with("iste") {
                None
            } else if word.ends_with('a') {
                strong(F)
            } else if word.ends_with('o') {
                strong(M)
            } else {
                None
            }
        }
        LanguageCode::Fr => {
            let word = split_elision(language, &word).map_or(word.as_str(), |(_, r)| r);
            word.ends_with('e').then_some(SuffixCall {
                verdict: F,
                weak: true,
            })
        }
        LanguageCode::Ru => cyrillic_gender(&word, "аеёиоуыэюя"),
        LanguageCode::Uk => cyrillic_gender(&word, "аеєиіїоуюя"),
        LanguageCode::He => {
            let forms = lookup_forms(language, &word);
            if forms.iter().any(|f| HE_HOMOGRAPHS.contains(&f.as_str())) {
                return strong(U);
            }
            match forms[0].chars().last()? {
                'ה' | 'ת' => strong(F),
                _ => None,
            }
        }
        LanguageCode::Ar => {
            let forms = lookup_forms(language, &word);
            if forms[0].ends_with('ة') {
                return strong(F);
            }
            let known = forms
                .iter()
                .any(|f| lexicon.contains(f) || lexicon.contains(&format!("{f}ة")));
            known.then_some(SuffixCall {
                verdict: M,
                weak: false,
            })
        }
        LanguageCode::De => {
            if DE_IN_EXCEPTIONS.contains(&word.as_str()) {
                None
            } else if word.ends_with("in") || word.ends_with("innen") {
                strong(F)
            } else {
                None
            }
        }
        LanguageCode::Other(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elided_forms_match_either_apostrophe() {
        assert_eq!(determiner(&LanguageCode::Fr, "L’"), Some(U));
        assert_eq!(determiner(&LanguageCode::It, "un'"), Some(F));
        assert_eq!(determiner(&LanguageCode::Es, "porque"), None);
    }

    #[test]
    fn german_plural_heuristic() {
        assert_eq!(german_determiner(F, Some("Ärztin")), F);
        assert_eq!(german_determiner(F, Some("Ärztinnen")), U);
        assert_eq!(german_determiner(M, Some("Lehrerin")), U);
        assert_eq!(german_determiner(M, Some("Lehrer")), M);
    }

    #[test]
    fn cyrillic_common_gender_is_ambiguous() {
        let lex = GenderLexicon::empty(LanguageCode::Ru);
        assert_eq!(
            suffix(&LanguageCode::Ru, "Судья", &lex).map(|s| s.verdict),
            Some(U)
        );
        assert_eq!(
            suffix(&LanguageCode::Ru, "няня", &lex).map(|s| s.verdict),
            Some(F)
        );
    }

    #[test]
    fn hebrew_prefix_stripping() {
        let forms = lookup_forms(&LanguageCode::He, "והרופאה");
        assert!(forms.contains(&"רופאה".to_string()), "{forms:?}");
    }

    #[test]
    fn arabic_marks_and_article() {
        let forms = lookup_forms(&LanguageCode::Ar, "الطَّبِيبَة");
        assert!(forms.contains(&"طبيبة".to_string()), "{forms:?}");
    }
}
