use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// ISO-639-1 code of a target language.
///
/// The eight built-in languages carry morphology rules. Further codes can be
/// admitted through a [`LanguageRegistry`]; they can be translated and aligned
/// but gender extraction rejects them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LanguageCode {
    Es,
    Fr,
    It,
    Ru,
    Uk,
    He,
    Ar,
    De,
    Other(String),
}

#[derive(Debug, thiserror::Error)]
#[error("unsupported language code `{0}`")]
pub struct UnknownLanguage(pub String);

impl LanguageCode {
    pub const BUILTIN: [LanguageCode; 8] = [
        LanguageCode::Es,
        LanguageCode::Fr,
        LanguageCode::It,
        LanguageCode::Ru,
        LanguageCode::Uk,
        LanguageCode::He,
        LanguageCode::Ar,
        LanguageCode::De,
    ];

    pub fn as_str(&self) -> &str {
        match self {
            LanguageCode::Es => "es",
            LanguageCode::Fr => "fr",
            LanguageCode::It => "it",
            LanguageCode::Ru => "ru",
            LanguageCode::Uk => "uk",
            LanguageCode::He => "he",
            LanguageCode::Ar => "ar",
            LanguageCode::De => "de",
            LanguageCode::Other(code) => code,
        }
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self, LanguageCode::Other(_))
    }

    /// French and Italian write elided articles (`l'`) attached to the noun.
    pub fn uses_elision(&self) -> bool {
        matches!(self, LanguageCode::Fr | LanguageCode::It)
    }

    /// Lowercases per language. Scripts without case pass through unchanged.
    pub fn fold_case(&self, s: &str) -> String {
        s.to_lowercase()
    }
}

impl fmt::Display for LanguageCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LanguageCode {
    type Err = UnknownLanguage;

    /// Accepts only the built-in languages; see [`LanguageRegistry::parse`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let code = s.trim().to_ascii_lowercase();
        LanguageCode::BUILTIN
            .iter()
            .find(|l| l.as_str() == code)
            .cloned()
            .ok_or_else(|| UnknownLanguage(s.to_string()))
    }
}

impl Serialize for LanguageCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for LanguageCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(s.parse()
            .unwrap_or_else(|_| LanguageCode::Other(s.to_ascii_lowercase())))
    }
}

/// Set of admissible language codes: the built-ins plus registered extras.
#[derive(Debug, Clone, Default)]
pub struct LanguageRegistry {
    extra: BTreeSet<String>,
}

impl LanguageRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, code: &str) -> &mut Self {
        self.extra.insert(code.trim().to_ascii_lowercase());
        self
    }

    pub fn parse(&self, code: &str) -> Result<LanguageCode, UnknownLanguage> {
        if let Ok(l) = code.parse() {
            return Ok(l);
        }
        let code = code.trim().to_ascii_lowercase();
        if self.extra.contains(&code) {
            Ok(LanguageCode::Other(code))
        } else {
            Err(UnknownLanguage(code))
        }
    }
}
