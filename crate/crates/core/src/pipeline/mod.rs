//! End-to-end tagging: tokenize, analyze, apply rules, resolve what is left,
//! compile statistics.

mod interactive;
mod stats;
mod tagger;
mod tokenize;
mod tsv;

pub use interactive::{
    parse_answers, write_answers, Answer, Candidate, ChoiceError, ChoiceOutcome,
    InteractiveSession, PendingItem,
};
pub use stats::{
    compile_stats, HistogramBucket, Method, StatsAccumulator, StatsReport, HISTOGRAM_LABELS,
};
pub use tagger::{
    analyze_sentence, tag_corpus, tag_sentence, tag_sentences, FrequencyError, PendingToken,
    ResolutionPolicy, RootFrequencies, TaggedCorpus, TaggedSentence,
};
pub use tokenize::tokenize;
pub use tsv::{
    read_tsv, score_against_gold, write_trace, write_tsv, write_unknowns, Accuracy,
    AlignmentError, TsvError,
};

/// How per-sentence work is scheduled. Sentences are independent, so both
/// give identical results; `Parallel` runs on the rayon pool when the
/// `parallel` feature is enabled and degrades to sequential otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}
