//! Parses, tokens, sentences and variable bindings.
//!
//! Everything here is immutable once built; the engine always produces new
//! values (or mutates a sentence it owns exclusively).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid feature key `{0}`")]
    InvalidKey(String),
    #[error("invalid value `{value}` for feature `{key}`")]
    InvalidValue { key: String, value: String },
    #[error("duplicate feature key `{0}`")]
    DuplicateKey(String),
    #[error("malformed feature pair `{0}`")]
    MalformedPair(String),
    #[error("parse is missing required feature `{0}`")]
    MissingFeature(&'static str),
}

/// Lowercase feature name such as `root`, `cat` or `case`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FeatureKey(String);

impl FeatureKey {
    pub const ROOT: &'static str = "root";
    pub const CAT: &'static str = "cat";
    pub const FINALCAT: &'static str = "finalcat";
    pub const LEX: &'static str = "lex";
    pub const SUB: &'static str = "sub";

    pub fn new(name: &str) -> Result<Self, ModelError> {
        let lowered = name.to_ascii_lowercase();
        let mut chars = lowered.chars();
        let valid = matches!(chars.next(), Some('a'..='z'))
            && chars.all(|c| matches!(c, 'a'..='z' | '0'..='9' | '_'));
        if valid {
            Ok(FeatureKey(lowered))
        } else {
            Err(ModelError::InvalidKey(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Lexical keys carry word material and keep their case; every other
    /// value is an uppercase tag.
    pub fn is_lexical(&self) -> bool {
        is_lexical_key(&self.0)
    }

    /// Brings a raw value into the canonical case for this key.
    pub fn normalize_value(&self, raw: &str) -> String {
        normalize_value(&self.0, raw)
    }
}

pub(crate) fn is_lexical_key(key: &str) -> bool {
    key == FeatureKey::ROOT || key == FeatureKey::LEX
}

pub(crate) fn normalize_value(key: &str, raw: &str) -> String {
    if is_lexical_key(key) {
        raw.to_string()
    } else {
        raw.to_uppercase()
    }
}

impl fmt::Display for FeatureKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for FeatureKey {
    type Error = ModelError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        FeatureKey::new(&s)
    }
}

impl From<FeatureKey> for String {
    fn from(k: FeatureKey) -> String {
        k.0
    }
}

/// Characters that would break the canonical `key=VALUE;...` form or the
/// tab-separated files built on it.
fn valid_value(v: &str) -> bool {
    !v.is_empty()
        && v.trim() == v
        && !v.chars().any(|c| matches!(c, '\t' | '\n' | '\r' | ';' | '=' | '|'))
}

/// One morphological analysis of a surface form.
///
/// Equality and hashing consider only the features; the display string is
/// presentation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Parse {
    features: BTreeMap<FeatureKey, String>,
    display: Option<String>,
}

impl PartialEq for Parse {
    fn eq(&self, other: &Self) -> bool {
        self.features == other.features
    }
}

impl Eq for Parse {}

impl std::hash::Hash for Parse {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.features.hash(state);
    }
}

impl Parse {
    /// Builds a parse from raw key/value pairs, normalizing case and filling
    /// `finalcat` from `cat` when absent.
    pub fn from_pairs<K, V, I>(pairs: I) -> Result<Self, ModelError>
    where
        K: AsRef<str>,
        V: AsRef<str>,
        I: IntoIterator<Item = (K, V)>,
    {
        let mut features = BTreeMap::new();
        for (k, v) in pairs {
            let key = FeatureKey::new(k.as_ref())?;
            let value = key.normalize_value(v.as_ref());
            if !valid_value(&value) {
                return Err(ModelError::InvalidValue {
                    key: key.0,
                    value: v.as_ref().to_string(),
                });
            }
            if features.contains_key(&key) {
                return Err(ModelError::DuplicateKey(key.0));
            }
            features.insert(key, value);
        }
        Self::from_features(features)
    }

    fn from_features(mut features: BTreeMap<FeatureKey, String>) -> Result<Self, ModelError> {
        if !features.keys().any(|k| k.as_str() == FeatureKey::ROOT) {
            return Err(ModelError::MissingFeature(FeatureKey::ROOT));
        }
        let cat = features
            .iter()
            .find(|(k, _)| k.as_str() == FeatureKey::CAT)
            .map(|(_, v)| v.clone())
            .ok_or(ModelError::MissingFeature(FeatureKey::CAT))?;
        features
            .entry(FeatureKey(FeatureKey::FINALCAT.to_string()))
            .or_insert(cat);
        Ok(Parse {
            features,
            display: None,
        })
    }

    pub fn with_display(mut self, display: impl Into<String>) -> Self {
        self.display = Some(display.into());
        self
    }

    /// Stored value for `key`, or `None` when the parse lacks it.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.features
            .iter()
            .find(|(k, _)| k.as_str() == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn feature(&self, key: &FeatureKey) -> Option<&str> {
        self.features.get(key).map(String::as_str)
    }

    pub fn root(&self) -> &str {
        self.get(FeatureKey::ROOT).expect("parse always has a root")
    }

    pub fn cat(&self) -> &str {
        self.get(FeatureKey::CAT).expect("parse always has a cat")
    }

    pub fn finalcat(&self) -> &str {
        self.get(FeatureKey::FINALCAT)
            .expect("parse always has a finalcat")
    }

    pub fn features(&self) -> impl Iterator<Item = (&FeatureKey, &str)> {
        self.features.iter().map(|(k, v)| (k, v.as_str()))
    }

    pub fn display(&self) -> Option<&str> {
        self.display.as_deref()
    }

    /// Human-readable form: the stored display string, else a rendering such
    /// as `N(ev)+GEN`.
    pub fn display_string(&self) -> String {
        if let Some(d) = &self.display {
            return d.clone();
        }
        let mut out = format!("{}({})", self.cat(), self.root());
        for (k, v) in &self.features {
            match k.as_str() {
                FeatureKey::ROOT | FeatureKey::CAT => {}
                FeatureKey::FINALCAT if v == self.cat() => {}
                FeatureKey::FINALCAT => out.push_str(&format!("=>{v}")),
                _ => {
                    out.push('+');
                    out.push_str(v);
                }
            }
        }
        out
    }

    /// Canonical `key=VALUE(;key=VALUE)*` form, keys ascending.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (i, (k, v)) in self.features.iter().enumerate() {
            if i > 0 {
                out.push(';');
            }
            out.push_str(k.as_str());
            out.push('=');
            out.push_str(v);
        }
        out
    }

    pub fn deserialize(s: &str) -> Result<Self, ModelError> {
        let mut pairs = Vec::new();
        for pair in s.split(';') {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| ModelError::MalformedPair(pair.to_string()))?;
            if k.is_empty() {
                return Err(ModelError::MalformedPair(pair.to_string()));
            }
            pairs.push((k, v));
        }
        Parse::from_pairs(pairs)
    }
}

impl FromStr for Parse {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Parse::deserialize(s)
    }
}

impl fmt::Display for Parse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

/// How a token came to have its single surviving parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Resolution {
    None,
    Multiword,
    Constraint,
    User,
    Fallback,
}

impl Resolution {
    pub fn as_str(self) -> &'static str {
        match self {
            Resolution::None => "NONE",
            Resolution::Multiword => "MULTIWORD",
            Resolution::Constraint => "CONSTRAINT",
            Resolution::User => "USER",
            Resolution::Fallback => "FALLBACK",
        }
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Resolution {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "NONE" => Resolution::None,
            "MULTIWORD" => Resolution::Multiword,
            "CONSTRAINT" => Resolution::Constraint,
            "USER" => Resolution::User,
            "FALLBACK" => Resolution::Fallback,
            other => return Err(format!("unknown resolution `{other}`")),
        })
    }
}

/// A surface form and its current candidate parses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub parses: Vec<Parse>,
    /// Number of original words covered; greater than one after a compose.
    pub span: usize,
    pub resolved_by: Resolution,
    /// Parse count each covered word had straight out of the analyzer
    /// (0 for unknown words). Empty until the token is analyzed.
    pub analysis_counts: Vec<usize>,
}

impl Token {
    /// An unanalyzed token.
    pub fn new(surface: impl Into<String>) -> Self {
        Token {
            surface: surface.into(),
            parses: Vec::new(),
            span: 1,
            resolved_by: Resolution::None,
            analysis_counts: Vec::new(),
        }
    }

    /// A token fresh from the analyzer.
    pub fn analyzed(surface: impl Into<String>, parses: Vec<Parse>) -> Self {
        let count = parses.len();
        Token {
            surface: surface.into(),
            parses,
            span: 1,
            resolved_by: Resolution::None,
            analysis_counts: vec![count],
        }
    }

    pub fn is_ambiguous(&self) -> bool {
        self.parses.len() > 1
    }

    /// Tokens made only of punctuation marks.
    pub fn is_punctuation(&self) -> bool {
        is_punctuation_str(&self.surface)
    }
}

pub(crate) fn is_punctuation_char(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '«' | '»' | '“' | '”' | '„' | '‘' | '’' | '…' | '–' | '—' | '¿' | '¡'
        )
}

pub(crate) fn is_punctuation_str(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_punctuation_char)
}

/// An ordered run of tokens. Sentence-final punctuation is kept apart in
/// `terminator` so the last word is the sentence end for positional rules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub index: usize,
    pub tokens: Vec<Token>,
    pub terminator: Option<String>,
}

impl Sentence {
    pub fn new(index: usize, tokens: Vec<Token>) -> Self {
        Sentence {
            index,
            tokens,
            terminator: None,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn surfaces(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.surface.as_str())
    }

    /// Surfaces joined by spaces, terminator attached.
    pub fn text(&self) -> String {
        let mut out = self.surfaces().collect::<Vec<_>>().join(" ");
        if let Some(t) = &self.terminator {
            out.push_str(t);
        }
        out
    }
}

/// Variable assignments accumulated while matching one rule.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Binding {
    assignments: BTreeMap<String, String>,
}

impl Binding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.assignments.get(var).map(String::as_str)
    }

    /// Extends the binding; fails if `var` is already bound to another value.
    pub fn bind(&self, var: &str, value: &str) -> Option<Binding> {
        match self.assignments.get(var) {
            Some(existing) if existing == value => Some(self.clone()),
            Some(_) => None,
            None => {
                let mut next = self.clone();
                next.assignments.insert(var.to_string(), value.to_string());
                Some(next)
            }
        }
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.assignments
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for Binding {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        Binding {
            assignments: iter
                .into_iter()
                .map(|(k, v)| (k.into(), v.into()))
                .collect(),
        }
    }
}

/// Returns the stored value for `key`, or `None`.
pub fn feature_get<'p>(p: &'p Parse, key: &FeatureKey) -> Option<&'p str> {
    p.feature(key)
}
