use std::collections::HashMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::actions::{run_rule, ActionError, TraceEntry};
use crate::lexicon::{Lexicon, UnknownWord};
use crate::model::{Parse, Resolution, Sentence, Token};
use crate::rules::RuleSet;

use super::stats::{compile_stats, StatsReport};
use super::tokenize::tokenize;
use super::Execution;

/// Root usage counts, read from `root<TAB>count` lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RootFrequencies(HashMap<String, u64>);

#[derive(Debug, Error)]
pub enum FrequencyError {
    #[error("cannot read frequency file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {0}: expected `root<TAB>count`")]
    Malformed(usize),
}

impl RootFrequencies {
    pub fn get(&self, root: &str) -> u64 {
        self.0.get(root).copied().unwrap_or(0)
    }

    pub fn parse_str(text: &str) -> Result<Self, FrequencyError> {
        let mut map = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (root, count) = line
                .split_once('\t')
                .ok_or(FrequencyError::Malformed(i + 1))?;
            let count: u64 = count
                .trim()
                .parse()
                .map_err(|_| FrequencyError::Malformed(i + 1))?;
            *map.entry(root.to_string()).or_insert(0) += count;
        }
        Ok(RootFrequencies(map))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FrequencyError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| FrequencyError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse_str(&text)
    }
}

impl<S: Into<String>> FromIterator<(S, u64)> for RootFrequencies {
    fn from_iter<I: IntoIterator<Item = (S, u64)>>(iter: I) -> Self {
        RootFrequencies(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

/// What to do with tokens still ambiguous after every rule has run.
#[derive(Debug, Clone, Default)]
pub enum ResolutionPolicy {
    /// Keep the first remaining parse.
    #[default]
    First,
    /// Keep the parse whose root is most frequent; ties go to parse order.
    Frequency(RootFrequencies),
    /// Leave the token ambiguous and queue it for a user decision.
    Interactive,
    /// Leave the token ambiguous.
    Leave,
}

/// A token waiting for a user decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PendingToken {
    pub sentence: usize,
    pub token: usize,
}

#[derive(Debug, Clone)]
pub struct TaggedSentence {
    pub sentence: Sentence,
    pub trace: Vec<TraceEntry>,
    pub unknowns: Vec<UnknownWord>,
    pub pending: Vec<PendingToken>,
}

/// Rule-safe rendering of arbitrary surface text as a feature value.
fn as_value(surface: &str) -> String {
    surface
        .chars()
        .map(|c| match c {
            '\t' | '\n' | '\r' | ';' | '=' | '|' => format!("\\u{{{:x}}}", c as u32),
            other => other.to_string(),
        })
        .collect()
}

fn synthetic(surface: &str, cat: &str) -> Parse {
    Parse::from_pairs([("root", as_value(surface).as_str()), ("cat", cat)])
        .expect("synthetic parse is valid")
}

/// Looks every token up in the lexicon. Unknown words get an `UNKNOWN`
/// parse and are reported; bare punctuation missing from the lexicon gets a
/// `PUNCT` parse.
pub fn analyze_sentence(s: &Sentence, lex: &Lexicon) -> (Sentence, Vec<UnknownWord>) {
    let mut unknowns = Vec::new();
    let mut out = s.clone();
    for (i, token) in out.tokens.iter_mut().enumerate() {
        let parses = lex.analyze(&token.surface);
        let count = parses.len();
        token.parses = if !parses.is_empty() {
            parses.to_vec()
        } else if token.is_punctuation() {
            vec![synthetic(&token.surface, "PUNCT")]
        } else {
            unknowns.push(UnknownWord {
                surface: token.surface.clone(),
                sentence: s.index,
                token: i,
            });
            vec![synthetic(&token.surface, "UNKNOWN")]
        };
        token.analysis_counts = vec![if token.is_punctuation() && count == 0 { 1 } else { count }];
        token.span = 1;
        token.resolved_by = Resolution::None;
    }
    (out, unknowns)
}

fn resolve_residual(token: &mut Token, policy: &ResolutionPolicy) -> bool {
    if !token.is_ambiguous() {
        return false;
    }
    match policy {
        ResolutionPolicy::First => {
            token.parses.truncate(1);
            token.resolved_by = Resolution::Fallback;
            false
        }
        ResolutionPolicy::Frequency(freq) => {
            let best = token
                .parses
                .iter()
                .enumerate()
                .max_by(|(ia, a), (ib, b)| {
                    freq.get(a.root())
                        .cmp(&freq.get(b.root()))
                        .then(ib.cmp(ia))
                })
                .map(|(i, _)| i)
                .unwrap_or(0);
            let keep = token.parses.swap_remove(best);
            token.parses = vec![keep];
            token.resolved_by = Resolution::Fallback;
            false
        }
        ResolutionPolicy::Interactive => true,
        ResolutionPolicy::Leave => false,
    }
}

/// Analyzes a sentence, runs every rule in order, then applies the policy
/// to whatever is still ambiguous.
pub fn tag_sentence(
    s: &Sentence,
    rules: &RuleSet,
    lex: &Lexicon,
    policy: &ResolutionPolicy,
) -> Result<TaggedSentence, ActionError> {
    let (mut sentence, unknowns) = analyze_sentence(s, lex);
    let mut trace = Vec::new();
    for rule in rules.iter() {
        run_rule(rule, &mut sentence, &mut trace)?;
    }
    let mut pending = Vec::new();
    for (i, token) in sentence.tokens.iter_mut().enumerate() {
        if resolve_residual(token, policy) {
            pending.push(PendingToken {
                sentence: sentence.index,
                token: i,
            });
        }
    }
    Ok(TaggedSentence {
        sentence,
        trace,
        unknowns,
        pending,
    })
}

/// A tagged document with its diagnostics, all in document order.
#[derive(Debug, Clone, Default)]
pub struct TaggedCorpus {
    pub sentences: Vec<Sentence>,
    pub trace: Vec<TraceEntry>,
    pub unknowns: Vec<UnknownWord>,
    pub pending: Vec<PendingToken>,
}

impl FromIterator<TaggedSentence> for TaggedCorpus {
    fn from_iter<I: IntoIterator<Item = TaggedSentence>>(iter: I) -> Self {
        let mut corpus = TaggedCorpus::default();
        for t in iter {
            corpus.sentences.push(t.sentence);
            corpus.trace.extend(t.trace);
            corpus.unknowns.extend(t.unknowns);
            corpus.pending.extend(t.pending);
        }
        corpus
    }
}

/// Tags already tokenized sentences, each independently.
pub fn tag_sentences(
    sentences: &[Sentence],
    rules: &RuleSet,
    lex: &Lexicon,
    policy: &ResolutionPolicy,
    exec: Execution,
) -> Result<TaggedCorpus, ActionError> {
    let tag = |s: &Sentence| tag_sentence(s, rules, lex, policy);
    let tagged: Vec<TaggedSentence> = match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            sentences.par_iter().map(tag).collect::<Result<_, _>>()?
        }
        _ => sentences.iter().map(tag).collect::<Result<_, _>>()?,
    };
    Ok(tagged.into_iter().collect())
}

/// Tokenizes and tags raw text, then compiles statistics.
pub fn tag_corpus(
    text: &str,
    rules: &RuleSet,
    lex: &Lexicon,
    policy: &ResolutionPolicy,
    exec: Execution,
) -> Result<(TaggedCorpus, StatsReport), ActionError> {
    let corpus = tag_sentences(&tokenize(text), rules, lex, policy, exec)?;
    let stats = compile_stats(&corpus, exec);
    Ok((corpus, stats))
}
