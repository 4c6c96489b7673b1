//! Corpus statistics: the parse-count distribution straight out of the
//! analyzer, and how every word ended up with its tag.
//!
//! Every fraction uses the total word count as its denominator. Punctuation
//! tokens are not words and are left out.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::lexicon::UnknownWord;
use crate::model::{Resolution, Sentence};

use super::tagger::TaggedCorpus;
use super::Execution;

pub const HISTOGRAM_LABELS: [&str; 6] = ["0", "1", "2", "3", "4", ">=5"];

/// How a word's final tag was determined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Zero or one parse out of the analyzer.
    Unambiguous,
    Multiword,
    Constraint,
    User,
    Fallback,
    /// Still ambiguous at the end.
    Unresolved,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Unambiguous,
        Method::Multiword,
        Method::Constraint,
        Method::User,
        Method::Fallback,
        Method::Unresolved,
    ];

    fn index(self) -> usize {
        self as usize
    }
}

/// Mergeable partial counts. Merging is associative and commutative.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StatsAccumulator {
    pub words: u64,
    pub histogram: [u64; 6],
    pub methods: [u64; 6],
    pub roots: BTreeMap<String, u64>,
}

impl StatsAccumulator {
    pub fn from_sentence(s: &Sentence) -> Self {
        let mut acc = StatsAccumulator::default();
        for token in s.tokens.iter().filter(|t| !t.is_punctuation()) {
            let composed = token.span > 1;
            for &count in &token.analysis_counts {
                acc.words += 1;
                acc.histogram[count.min(5)] += 1;
                let method = if composed {
                    Method::Multiword
                } else if count <= 1 {
                    Method::Unambiguous
                } else {
                    match token.resolved_by {
                        Resolution::Multiword => Method::Multiword,
                        Resolution::Constraint => Method::Constraint,
                        Resolution::User => Method::User,
                        Resolution::Fallback => Method::Fallback,
                        Resolution::None if token.parses.len() == 1 => Method::Constraint,
                        Resolution::None => Method::Unresolved,
                    }
                };
                acc.methods[method.index()] += 1;
            }
            if let [parse] = token.parses.as_slice() {
                if !matches!(parse.cat(), "UNKNOWN" | "PUNCT") {
                    *acc.roots.entry(parse.root().to_string()).or_insert(0) += 1;
                }
            }
        }
        acc
    }

    pub fn merge(mut self, other: StatsAccumulator) -> Self {
        self.words += other.words;
        for i in 0..6 {
            self.histogram[i] += other.histogram[i];
            self.methods[i] += other.methods[i];
        }
        for (root, n) in other.roots {
            *self.roots.entry(root).or_insert(0) += n;
        }
        self
    }

    pub fn method(&self, m: Method) -> u64 {
        self.methods[m.index()]
    }

    pub fn finish(self, unknowns: Vec<UnknownWord>) -> StatsReport {
        let total = self.words;
        let frac = |n: u64| if total == 0 { 0.0 } else { n as f64 / total as f64 };
        let parse_histogram = HISTOGRAM_LABELS
            .iter()
            .zip(self.histogram)
            .map(|(label, count)| HistogramBucket {
                parses: label,
                count,
                fraction: frac(count),
            })
            .collect();
        let methods = Method::ALL
            .iter()
            .map(|m| (*m, self.method(*m)))
            .collect::<BTreeMap<_, _>>();
        let user = self.method(Method::User);
        let unresolved = self.method(Method::Unresolved);
        StatsReport {
            total_words: total,
            parse_histogram,
            resolved_auto_fraction: frac(total - user - unresolved),
            resolved_user_fraction: frac(user),
            resolved_by_multiword_fraction: frac(self.method(Method::Multiword)),
            resolved_by_constraint_fraction: frac(self.method(Method::Constraint)),
            methods,
            accuracy_vs_gold: None,
            unknown_list: unknowns,
            root_frequency_table: self.roots,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBucket {
    pub parses: &'static str,
    pub count: u64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    pub total_words: u64,
    pub parse_histogram: Vec<HistogramBucket>,
    pub methods: BTreeMap<Method, u64>,
    pub resolved_auto_fraction: f64,
    pub resolved_user_fraction: f64,
    pub resolved_by_multiword_fraction: f64,
    pub resolved_by_constraint_fraction: f64,
    pub accuracy_vs_gold: Option<f64>,
    pub unknown_list: Vec<UnknownWord>,
    pub root_frequency_table: BTreeMap<String, u64>,
}

impl StatsReport {
    pub fn histogram_counts(&self) -> [u64; 6] {
        let mut out = [0; 6];
        for (o, b) in out.iter_mut().zip(&self.parse_histogram) {
            *o = b.count;
        }
        out
    }

    pub fn method(&self, m: Method) -> u64 {
        self.methods.get(&m).copied().unwrap_or(0)
    }

    /// Words that needed disambiguation.
    pub fn ambiguous_words(&self) -> u64 {
        self.total_words - self.method(Method::Unambiguous)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize") + "\n"
    }

    /// Plain-text table in percentages.
    pub fn to_table(&self) -> String {
        let pct = |f: f64| format!("{:.1}%", f * 100.0);
        let mut out = String::new();
        out.push_str("Words\t");
        out.push_str(&HISTOGRAM_LABELS.join("\t"));
        out.push('\n');
        out.push_str(&self.total_words.to_string());
        for b in &self.parse_histogram {
            out.push('\t');
            out.push_str(&pct(b.fraction));
        }
        out.push_str("\n\nAutomatic\tUser\tMulti-word\tConstraints");
        if self.accuracy_vs_gold.is_some() {
            out.push_str("\tCorrect");
        }
        out.push('\n');
        out.push_str(&format!(
            "{}\t{}\t{}\t{}",
            pct(self.resolved_auto_fraction),
            pct(self.resolved_user_fraction),
            pct(self.resolved_by_multiword_fraction),
            pct(self.resolved_by_constraint_fraction)
        ));
        if let Some(a) = self.accuracy_vs_gold {
            out.push('\t');
            out.push_str(&pct(a));
        }
        out.push('\n');
        out
    }
}

/// Statistics over a tagged corpus, accumulated per sentence and merged.
pub fn compile_stats(corpus: &TaggedCorpus, exec: Execution) -> StatsReport {
    let acc = match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            corpus
                .sentences
                .par_iter()
                .map(StatsAccumulator::from_sentence)
                .reduce(StatsAccumulator::default, StatsAccumulator::merge)
        }
        _ => corpus
            .sentences
            .iter()
            .map(StatsAccumulator::from_sentence)
            .fold(StatsAccumulator::default(), StatsAccumulator::merge),
    };
    acc.finish(corpus.unknowns.clone())
}
