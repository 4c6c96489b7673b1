//! User resolution of residual ambiguity.
//!
//! A corpus tagged with [`ResolutionPolicy::Interactive`] keeps its pending
//! tokens ambiguous. An [`InteractiveSession`] exposes them in document order
//! and records one choice per token; replaying the same choices always gives
//! the same output.
//!
//! [`ResolutionPolicy::Interactive`]: super::ResolutionPolicy::Interactive

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::model::{Parse, Resolution};

use super::stats::{compile_stats, StatsReport};
use super::tagger::{PendingToken, TaggedCorpus};
use super::Execution;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub index: usize,
    pub canonical: String,
    pub display: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PendingItem {
    pub sentence: usize,
    pub token: usize,
    pub surface: String,
    /// Surfaces before and after the token, space-joined.
    pub left_context: String,
    pub right_context: String,
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChoiceError {
    #[error("sentence {sentence}, token {token} is not awaiting a decision")]
    NotPending { sentence: usize, token: usize },
    #[error("parse index {index} out of range ({candidates} candidates)")]
    InvalidParse { index: usize, candidates: usize },
    #[error("sentence {sentence}, token {token} was already resolved with parse {chosen}")]
    Conflict {
        sentence: usize,
        token: usize,
        chosen: usize,
    },
    #[error("answers line {0}: expected `sentence<TAB>token<TAB>parse`")]
    MalformedAnswer(usize),
    #[error("{0} tokens still await a decision")]
    StillPending(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChoiceOutcome {
    /// False when the same choice had already been recorded.
    pub applied: bool,
    pub remaining: usize,
}

/// One scripted decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Answer {
    pub sentence: usize,
    pub token: usize,
    pub parse: usize,
}

/// Reads `sentence<TAB>token<TAB>parse` lines; `#` starts a comment line.
pub fn parse_answers(text: &str) -> Result<Vec<Answer>, ChoiceError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums: Vec<usize> = line
            .split('\t')
            .map(|f| f.trim().parse())
            .collect::<Result<_, _>>()
            .map_err(|_| ChoiceError::MalformedAnswer(i + 1))?;
        let [sentence, token, parse] = nums.as_slice() else {
            return Err(ChoiceError::MalformedAnswer(i + 1));
        };
        out.push(Answer {
            sentence: *sentence,
            token: *token,
            parse: *parse,
        });
    }
    Ok(out)
}

pub fn write_answers(answers: &[Answer]) -> String {
    answers
        .iter()
        .map(|a| format!("{}\t{}\t{}\n", a.sentence, a.token, a.parse))
        .collect()
}

#[derive(Debug, Clone)]
pub struct InteractiveSession {
    corpus: TaggedCorpus,
    candidates: BTreeMap<PendingToken, Vec<Parse>>,
    chosen: BTreeMap<PendingToken, usize>,
}

impl InteractiveSession {
    pub fn new(corpus: TaggedCorpus) -> Self {
        let candidates = corpus
            .pending
            .iter()
            .map(|p| (*p, corpus.sentences[p.sentence].tokens[p.token].parses.clone()))
            .collect();
        InteractiveSession {
            corpus,
            candidates,
            chosen: BTreeMap::new(),
        }
    }

    pub fn corpus(&self) -> &TaggedCorpus {
        &self.corpus
    }

    pub fn remaining(&self) -> usize {
        self.candidates.len() - self.chosen.len()
    }

    /// Undecided tokens in document order.
    pub fn pending(&self) -> Vec<PendingItem> {
        self.corpus
            .pending
            .iter()
            .filter(|p| !self.chosen.contains_key(p))
            .map(|p| {
                let sentence = &self.corpus.sentences[p.sentence];
                let surfaces: Vec<&str> = sentence.surfaces().collect();
                PendingItem {
                    sentence: p.sentence,
                    token: p.token,
                    surface: surfaces[p.token].to_string(),
                    left_context: surfaces[..p.token].join(" "),
                    right_context: surfaces[p.token + 1..].join(" "),
                    candidates: self.candidates[p]
                        .iter()
                        .enumerate()
                        .map(|(index, parse)| Candidate {
                            index,
                            canonical: parse.serialize(),
                            display: parse.display_string(),
                        })
                        .collect(),
                }
            })
            .collect()
    }

    /// Records the user's pick among the candidates shown for a token.
    pub fn choose(
        &mut self,
        sentence: usize,
        token: usize,
        parse: usize,
    ) -> Result<ChoiceOutcome, ChoiceError> {
        let key = PendingToken { sentence, token };
        let candidates = self
            .candidates
            .get(&key)
            .ok_or(ChoiceError::NotPending { sentence, token })?;
        if parse >= candidates.len() {
            return Err(ChoiceError::InvalidParse {
                index: parse,
                candidates: candidates.len(),
            });
        }
        if let Some(&chosen) = self.chosen.get(&key) {
            return if chosen == parse {
                Ok(ChoiceOutcome {
                    applied: false,
                    remaining: self.remaining(),
                })
            } else {
                Err(ChoiceError::Conflict {
                    sentence,
                    token,
                    chosen,
                })
            };
        }
        let t = &mut self.corpus.sentences[sentence].tokens[token];
        t.parses = vec![candidates[parse].clone()];
        t.resolved_by = Resolution::User;
        self.chosen.insert(key, parse);
        Ok(ChoiceOutcome {
            applied: true,
            remaining: self.remaining(),
        })
    }

    pub fn replay(&mut self, answers: &[Answer]) -> Result<(), ChoiceError> {
        for a in answers {
            self.choose(a.sentence, a.token, a.parse)?;
        }
        Ok(())
    }

    /// Choices made so far, in document order.
    pub fn answers(&self) -> Vec<Answer> {
        self.chosen
            .iter()
            .map(|(p, &parse)| Answer {
                sentence: p.sentence,
                token: p.token,
                parse,
            })
            .collect()
    }

    /// The fully resolved corpus and its statistics.
    pub fn finish(&self, exec: Execution) -> Result<(TaggedCorpus, StatsReport), ChoiceError> {
        match self.remaining() {
            0 => {
                let mut corpus = self.corpus.clone();
                corpus.pending.clear();
                let stats = compile_stats(&corpus, exec);
                Ok((corpus, stats))
            }
            n => Err(ChoiceError::StillPending(n)),
        }
    }
}
