//! Deterministic tokenization shared by the corpus, aligner and morphology.
//!
//! Text is split on whitespace and then every leading or trailing punctuation
//! character of a chunk becomes its own token. English uses ASCII punctuation
//! only; target languages also peel the common non-ASCII marks (inverted
//! question marks, guillemets, Arabic comma, ...). French and Italian targets
//! additionally split elided articles (`l'`, `un'`, `dell'`) from their host.

use crate::language::LanguageCode;

/// A token with its byte span in the original string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    pub start: usize,
    pub end: usize,
}

const EXTRA_PUNCT: &[char] = &[
    '«', '»', '¿', '¡', '“', '”', '„', '‚', '‘', '’', '…', '–', '—', '،', '؛', '؟', '״', '׳', '·',
];

fn is_ascii_punct(c: char) -> bool {
    c.is_ascii_punctuation()
}

fn is_any_punct(c: char) -> bool {
    c.is_ascii_punctuation() || EXTRA_PUNCT.contains(&c)
}

fn split_chunks<'a>(s: &'a str, is_punct: impl Fn(char) -> bool, out: &mut Vec<Token<'a>>) {
    let mut pos = 0;
    for chunk in s.split_whitespace() {
        // split_whitespace yields subslices, so the offset is recoverable
        let start = chunk.as_ptr() as usize - s.as_ptr() as usize;
        debug_assert!(start >= pos);
        pos = start + chunk.len();

        let mut lead = Vec::new();
        let mut core_start = 0;
        for (i, c) in chunk.char_indices() {
            if is_punct(c) {
                lead.push(Token {
                    text: &chunk[i..i + c.len_utf8()],
                    start: start + i,
                    end: start + i + c.len_utf8(),
                });
                core_start = i + c.len_utf8();
            } else {
                break;
            }
        }
        let rest = &chunk[core_start..];
        let mut trail = Vec::new();
        let mut core_end = rest.len();
        for (i, c) in rest.char_indices().rev() {
            if is_punct(c) {
                trail.push(Token {
                    text: &rest[i..i + c.len_utf8()],
                    start: start + core_start + i,
                    end: start + core_start + i + c.len_utf8(),
                });
                core_end = i;
            } else {
                break;
            }
        }
        out.extend(lead);
        if core_end > 0 {
            out.push(Token {
                text: &rest[..core_end],
                start: start + core_start,
                end: start + core_start + core_end,
            });
        }
        out.extend(trail.into_iter().rev());
    }
}

/// Tokenizes English source text.
pub fn tokenize_english(s: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    split_chunks(s, is_ascii_punct, &mut out);
    out
}

/// Tokenizes a target-language sentence.
pub fn tokenize_target<'a>(language: &LanguageCode, s: &'a str) -> Vec<Token<'a>> {
    let mut chunks = Vec::new();
    split_chunks(s, is_any_punct, &mut chunks);
    if !language.uses_elision() {
        return chunks;
    }
    let mut out: Vec<Token<'a>> = Vec::with_capacity(chunks.len());
    for tok in chunks {
        // a stranded article (`l'` at the end of a truncated output) keeps
        // its apostrophe
        if let Some(prev) = out.last_mut() {
            let elided = matches!(tok.text, "'" | "’")
                && prev.end == tok.start
                && prev.text.chars().count() <= 5
                && prev.text.chars().all(char::is_alphabetic);
            if elided {
                prev.text = &s[prev.start..tok.end];
                prev.end = tok.end;
                continue;
            }
        }
        match elision_split(tok.text) {
            Some(k) => {
                out.push(Token {
                    text: &tok.text[..k],
                    start: tok.start,
                    end: tok.start + k,
                });
                out.push(Token {
                    text: &tok.text[k..],
                    start: tok.start + k,
                    end: tok.end,
                });
            }
            None => out.push(tok),
        }
    }
    out
}

/// Byte offset just past the apostrophe of an elided prefix of at most five
/// letters (`l'`, `qu'`, `dell'`), if the token has one followed by a letter.
pub fn elision_split(token: &str) -> Option<usize> {
    for (count, (i, c)) in token.char_indices().enumerate() {
        if c == '\'' || c == '’' {
            if count == 0 || count > 5 {
                return None;
            }
            let k = i + c.len_utf8();
            return token[k..]
                .chars()
                .next()
                .filter(|n| n.is_alphabetic())
                .map(|_| k);
        }
        if !c.is_alphabetic() {
            return None;
        }
    }
    None
}

/// Convenience: owned English token strings.
pub fn english_words(s: &str) -> Vec<String> {
    tokenize_english(s)
        .into_iter()
        .map(|t| t.text.to_string())
        .collect()
}

/// Convenience: owned target token strings in original case.
pub fn target_words(language: &LanguageCode, s: &str) -> Vec<String> {
    tokenize_target(language, s)
        .into_iter()
        .map(|t| t.text.to_string())
        .collect()
}
