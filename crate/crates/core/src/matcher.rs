//! Matching rules against sentences.
//!
//! For an anchor token `a`, group `i` of a rule looks at token
//! `a + offset_i`. The anchor matches when one parse can be picked for every
//! group such that all constraints hold under a single variable binding. The
//! search is depth-first over groups in order and parses in token order, so
//! the first binding found is canonical.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::model::{Binding, FeatureKey, Parse, Sentence, Token};
use crate::rules::{ConditionGroup, Constraint, Rule, SentencePosition, Value};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchResult {
    pub anchor: usize,
    /// First consistent binding in search order.
    pub binding: Binding,
    /// Per group: the token index and every parse index taking part in at
    /// least one consistent binding.
    pub per_group: Vec<(usize, BTreeSet<usize>)>,
}

/// Tests one feature value (absent = `None`) against a constraint value.
fn unify(found: Option<&str>, value: &Value, b: &Binding) -> Option<Binding> {
    let found = found?;
    match value {
        Value::Atom(a) => (a == found).then(|| b.clone()),
        Value::Var(v) => b.bind(v, found),
    }
}

/// Checks a feature constraint against one parse. Positional constraints
/// are the caller's business and pass unchanged.
pub fn satisfies(p: &Parse, c: &Constraint, b: &Binding) -> Option<Binding> {
    match c {
        Constraint::Feature { key, value } => unify(p.feature(key), value, b),
        Constraint::Position(_) | Constraint::Sentence(_) => Some(b.clone()),
    }
}

/// Feature lookup that falls back to the token surface for `lex`.
fn token_feature<'a>(token: &'a Token, p: &'a Parse, key: &FeatureKey) -> Option<&'a str> {
    p.feature(key).or_else(|| {
        (key.as_str() == FeatureKey::LEX).then_some(token.surface.as_str())
    })
}

fn position_ok(s: &Sentence, t: usize, g: &ConditionGroup) -> bool {
    match g.sentence_position() {
        Some(SentencePosition::Begin) => t == 0,
        Some(SentencePosition::End) => t + 1 == s.len(),
        None => true,
    }
}

fn parse_satisfies_group(
    token: &Token,
    p: &Parse,
    g: &ConditionGroup,
    b: &Binding,
) -> Option<Binding> {
    // Atoms and already-bound variables first: no allocation on the
    // common failure path.
    let mut fresh = Vec::new();
    for (key, value) in g.feature_constraints() {
        let found = token_feature(token, p, key)?;
        match value {
            Value::Atom(a) if a != found => return None,
            Value::Atom(_) => {}
            Value::Var(v) => match b.get(v) {
                Some(bound) if bound != found => return None,
                Some(_) => {}
                None => fresh.push((v.as_str(), found)),
            },
        }
    }
    fresh.into_iter().try_fold(b.clone(), |acc, (v, found)| acc.bind(v, found))
}

/// Parses of token `t` satisfying every constraint of `g`, each with its
/// extended binding.
pub fn group_candidates(
    s: &Sentence,
    t: usize,
    g: &ConditionGroup,
    b: &Binding,
) -> Vec<(usize, Binding)> {
    if t >= s.len() || !position_ok(s, t, g) {
        return Vec::new();
    }
    let token = &s.tokens[t];
    token
        .parses
        .iter()
        .enumerate()
        .filter_map(|(i, p)| parse_satisfies_group(token, p, g, b).map(|nb| (i, nb)))
        .collect()
}

/// Token indices the rule's groups address from `anchor`, or `None` when one
/// falls outside the sentence.
pub fn window(rule: &Rule, s: &Sentence, anchor: usize) -> Option<Vec<usize>> {
    rule.groups
        .iter()
        .map(|g| {
            let t = anchor as i64 + g.offset;
            (t >= 0 && (t as usize) < s.len()).then_some(t as usize)
        })
        .collect()
}

struct Search<'a> {
    rule: &'a Rule,
    sentence: &'a Sentence,
    positions: Vec<usize>,
    choice: Vec<usize>,
    first: Option<Binding>,
    used: Vec<BTreeSet<usize>>,
}

impl Search<'_> {
    fn run(&mut self, gi: usize, b: &Binding) {
        if gi == self.positions.len() {
            if self.first.is_none() {
                self.first = Some(b.clone());
            }
            for (set, &pi) in self.used.iter_mut().zip(&self.choice) {
                set.insert(pi);
            }
            return;
        }
        let candidates =
            group_candidates(self.sentence, self.positions[gi], &self.rule.groups[gi], b);
        for (pi, nb) in candidates {
            self.choice.push(pi);
            self.run(gi + 1, &nb);
            self.choice.pop();
        }
    }
}

/// Match of `rule` anchored at `anchor`, if any.
pub fn match_at(rule: &Rule, s: &Sentence, anchor: usize) -> Option<MatchResult> {
    let positions = window(rule, s, anchor)?;
    let mut search = Search {
        rule,
        sentence: s,
        used: vec![BTreeSet::new(); positions.len()],
        positions,
        choice: Vec::new(),
        first: None,
    };
    search.run(0, &Binding::new());
    let binding = search.first?;
    Some(MatchResult {
        anchor,
        binding,
        per_group: search.positions.into_iter().zip(search.used).collect(),
    })
}

/// Every matching anchor, left to right, against a fixed sentence.
pub fn match_rule(rule: &Rule, s: &Sentence) -> Vec<MatchResult> {
    (0..s.len()).filter_map(|a| match_at(rule, s, a)).collect()
}
