//! Tagged-output TSV: `surface<TAB>parse<TAB>resolved_by` per token, a blank
//! line between sentences. Tokens left ambiguous list their parses joined by
//! `|`.

use serde::Serialize;
use thiserror::Error;

use crate::lexicon::UnknownWord;
use crate::model::{Parse, Resolution, Sentence, Token};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TsvError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

pub fn write_tsv(sentences: &[Sentence]) -> String {
    let mut out = String::new();
    for (i, s) in sentences.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for t in &s.tokens {
            let parses: Vec<String> = t.parses.iter().map(Parse::serialize).collect();
            out.push_str(&t.surface);
            out.push('\t');
            out.push_str(&parses.join("|"));
            out.push('\t');
            out.push_str(t.resolved_by.as_str());
            out.push('\n');
        }
    }
    out
}

pub fn read_tsv(text: &str) -> Result<Vec<Sentence>, TsvError> {
    let mut sentences = Vec::new();
    let mut tokens = Vec::new();
    let flush = |tokens: &mut Vec<Token>, sentences: &mut Vec<Sentence>| {
        if !tokens.is_empty() {
            let index = sentences.len();
            sentences.push(Sentence::new(index, std::mem::take(tokens)));
        }
    };
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            flush(&mut tokens, &mut sentences);
            continue;
        }
        let malformed = |message: String| TsvError::Malformed {
            line: line_no,
            message,
        };
        let fields: Vec<&str> = line.split('\t').collect();
        let [surface, parses, resolved] = fields.as_slice() else {
            return Err(malformed(format!("expected 3 fields, found {}", fields.len())));
        };
        let parses = parses
            .split('|')
            .map(Parse::deserialize)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| malformed(e.to_string()))?;
        let resolved_by: Resolution = resolved.parse().map_err(malformed)?;
        let span = surface.split(' ').count();
        tokens.push(Token {
            surface: surface.to_string(),
            analysis_counts: vec![parses.len(); span],
            parses,
            span,
            resolved_by,
        });
    }
    flush(&mut tokens, &mut sentences);
    Ok(sentences)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlignmentError {
    #[error("tagged output has {tagged} sentences, gold has {gold}")]
    SentenceCount { tagged: usize, gold: usize },
    #[error("sentence {sentence}, token {token}: tagged `{tagged}` vs gold `{gold}`")]
    Token {
        sentence: usize,
        token: usize,
        tagged: String,
        gold: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Accuracy {
    pub correct: usize,
    pub total: usize,
}

impl Accuracy {
    pub fn fraction(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }
}

/// Token-level accuracy. Streams must align surface by surface, composed
/// tokens included; a token counts as correct when its single parse equals
/// the single gold parse.
pub fn score_against_gold(
    tagged: &[Sentence],
    gold: &[Sentence],
) -> Result<Accuracy, AlignmentError> {
    if tagged.len() != gold.len() {
        return Err(AlignmentError::SentenceCount {
            tagged: tagged.len(),
            gold: gold.len(),
        });
    }
    let mut acc = Accuracy {
        correct: 0,
        total: 0,
    };
    for (si, (ts, gs)) in tagged.iter().zip(gold).enumerate() {
        let n = ts.len().max(gs.len());
        for ti in 0..n {
            let (t, g) = (ts.tokens.get(ti), gs.tokens.get(ti));
            match (t, g) {
                (Some(t), Some(g)) if t.surface == g.surface => {
                    acc.total += 1;
                    if let ([tp], [gp]) = (t.parses.as_slice(), g.parses.as_slice()) {
                        if tp.serialize() == gp.serialize() {
                            acc.correct += 1;
                        }
                    }
                }
                _ => {
                    let surface = |x: Option<&Token>| {
                        x.map(|t| t.surface.clone())
                            .unwrap_or_else(|| "<end>".into())
                    };
                    return Err(AlignmentError::Token {
                        sentence: si,
                        token: ti,
                        tagged: surface(t),
                        gold: surface(g),
                    });
                }
            }
        }
    }
    Ok(acc)
}

pub fn write_unknowns(unknowns: &[UnknownWord]) -> String {
    unknowns
        .iter()
        .map(|u| format!("{}\t{}\t{}\n", u.surface, u.sentence, u.token))
        .collect()
}

pub fn write_trace(trace: &[crate::actions::TraceEntry]) -> String {
    trace.iter().map(|e| format!("{e}\n")).collect()
}
