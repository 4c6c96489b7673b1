//! Constraint-based morphological disambiguation.
//!
//! Surface words are looked up in a [`Lexicon`], which returns every
//! candidate [`Parse`]. Ordered condition–action [`Rule`]s then compose
//! multi-word constructs and delete or select parses based on the local
//! context, with unification variables linking features across neighbouring
//! words. Whatever ambiguity survives is settled by a [`ResolutionPolicy`].
//!
//! ```
//! use morphtag_core::{parse_rule_file, tag_corpus, Execution, Lexicon, ResolutionPolicy};
//!
//! let lex = Lexicon::parse_str("demo", "en\tcat=N;root=en\tcat=ADV;root=en\nbüyük\tcat=ADJ;root=büyük\n").unwrap();
//! let rules = parse_rule_file("LP = 0, Root = en, Cat = N : Delete; LP = 1, Finalcat = ADJ.").unwrap();
//! let (corpus, stats) = tag_corpus("en büyük.", &rules, &lex, &ResolutionPolicy::Leave, Execution::Sequential).unwrap();
//! assert_eq!(corpus.sentences[0].tokens[0].parses[0].cat(), "ADV");
//! assert_eq!(stats.total_words, 2);
//! ```

pub mod actions;
pub mod lexicon;
pub mod matcher;
pub mod model;
pub mod pipeline;
pub mod rules;
pub mod synthetic;

pub use actions::{
    apply_compose, apply_delete, apply_output, apply_rule, run_rule, ActionError, TraceEntry,
};
pub use lexicon::{Analyzer, Lexicon, LexiconError, UnknownWord};
pub use matcher::{group_candidates, match_at, match_rule, satisfies, MatchResult};
pub use model::{feature_get, Binding, FeatureKey, ModelError, Parse, Resolution, Sentence, Token};
pub use pipeline::{
    score_against_gold, tag_corpus, tag_sentence, tokenize, Execution, ResolutionPolicy,
    StatsReport, TaggedCorpus,
};
pub use rules::{parse_rule, parse_rule_file, serialize_rule, Rule, RuleSet};
