//! Lexicon-backed morphological analyzer.
//!
//! The lexicon file holds precomputed analyses, one surface form per line:
//!
//! ```text
//! # name: demo
//! # language: tr
//! evin<TAB>cat=N;poss=2SG;root=ev|N(ev)+2SG-POSS<TAB>case=GEN;cat=N;root=ev<TAB>cat=N;root=evin
//! ```
//!
//! Each tab-separated field after the surface is a canonical parse,
//! optionally followed by `|` and a display string. Any external analyzer can
//! be plugged in by producing this file or implementing [`Analyzer`].

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::model::Parse;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read lexicon {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// Anything that maps a surface form to its candidate parses.
pub trait Analyzer {
    fn analyze(&self, surface: &str) -> &[Parse];
}

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    pub name: String,
    pub language: Option<String>,
    entries: HashMap<String, Vec<Parse>>,
    fold_case: bool,
}

/// Lowercasing with the Turkish dotted/dotless `i` pairs kept apart.
fn turkish_fold(s: &str) -> String {
    s.chars()
        .flat_map(|c| match c {
            'İ' => "i".chars().collect::<Vec<_>>(),
            'I' => "ı".chars().collect(),
            other => other.to_lowercase().collect(),
        })
        .collect()
}

impl Lexicon {
    pub fn new(name: impl Into<String>) -> Self {
        Lexicon {
            name: name.into(),
            ..Default::default()
        }
    }

    /// Enables case-insensitive lookup. Off by default.
    pub fn with_case_folding(mut self, fold: bool) -> Self {
        if fold != self.fold_case {
            let entries = std::mem::take(&mut self.entries);
            self.fold_case = fold;
            for (surface, parses) in entries {
                self.insert(&surface, parses);
            }
        }
        self
    }

    fn key(&self, surface: &str) -> String {
        let nfc: String = surface.nfc().collect();
        if self.fold_case {
            turkish_fold(&nfc)
        } else {
            nfc
        }
    }

    /// Adds parses for a surface, appending to any existing entry.
    pub fn insert(&mut self, surface: &str, parses: Vec<Parse>) {
        let key = self.key(surface);
        self.entries.entry(key).or_default().extend(parses);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, surface: &str) -> bool {
        self.entries.contains_key(&self.key(surface))
    }

    /// Stored parses in file order; empty for unknown surfaces.
    pub fn analyze(&self, surface: &str) -> &[Parse] {
        self.entries
            .get(&self.key(surface))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn parse_str(name: &str, text: &str) -> Result<Self, LexiconError> {
        let mut lex = Lexicon::new(name);
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let trimmed = line.trim_end_matches('\r');
            if trimmed.trim().is_empty() {
                continue;
            }
            if let Some(comment) = trimmed.trim_start().strip_prefix('#') {
                if let Some((k, v)) = comment.split_once(':') {
                    match k.trim() {
                        "name" => lex.name = v.trim().to_string(),
                        "language" => lex.language = Some(v.trim().to_string()),
                        _ => {}
                    }
                }
                continue;
            }
            let mut fields = trimmed.split('\t');
            let surface = fields.next().unwrap_or_default();
            if surface.is_empty() || surface.trim() != surface {
                return Err(LexiconError::Malformed {
                    line: line_no,
                    message: "missing or padded surface form".into(),
                });
            }
            let mut parses = Vec::new();
            for field in fields {
                let (canonical, display) = match field.split_once('|') {
                    Some((c, d)) => (c, Some(d)),
                    None => (field, None),
                };
                let mut parse =
                    Parse::deserialize(canonical).map_err(|e| LexiconError::Malformed {
                        line: line_no,
                        message: format!("`{canonical}`: {e}"),
                    })?;
                if let Some(d) = display.filter(|d| !d.is_empty()) {
                    parse = parse.with_display(d);
                }
                parses.push(parse);
            }
            if parses.is_empty() {
                return Err(LexiconError::Malformed {
                    line: line_no,
                    message: format!("surface `{surface}` has no parses"),
                });
            }
            lex.insert(surface, parses);
        }
        if lex.is_empty() {
            log::warn!("lexicon `{}` is empty", lex.name);
        }
        Ok(lex)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Lexicon::parse_str(&name, &text)
    }
}

impl Analyzer for Lexicon {
    fn analyze(&self, surface: &str) -> &[Parse] {
        Lexicon::analyze(self, surface)
    }
}

/// A surface the analyzer had no parses for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnknownWord {
    pub surface: String,
    pub sentence: usize,
    pub token: usize,
}
