//! Applying rule actions to tokens and sentences.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::matcher::{match_at, MatchResult};
use crate::model::{Binding, ModelError, Parse, Resolution, Sentence, Token};
use crate::rules::{template_variables, Action, ComposeTemplate, Rule, RuleKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("compose spans non-contiguous tokens {0:?}")]
    NonContiguous(Vec<usize>),
    #[error("template variable {0} is unbound")]
    UnboundVariable(String),
    #[error("compose template yields an invalid parse: {0}")]
    InvalidTemplate(#[from] ModelError),
}

fn resolution_for(kind: RuleKind) -> Resolution {
    match kind {
        RuleKind::Multiword => Resolution::Multiword,
        RuleKind::Constraint => Resolution::Constraint,
    }
}

/// Keeps only the `matching` parses. A token left with one parse is marked
/// resolved by `by` unless something already resolved it.
pub fn apply_output(t: &Token, matching: &BTreeSet<usize>, by: Resolution) -> Token {
    let mut out = t.clone();
    out.parses = t
        .parses
        .iter()
        .enumerate()
        .filter(|(i, _)| matching.contains(i))
        .map(|(_, p)| p.clone())
        .collect();
    if out.parses.is_empty() {
        // Only reachable with out-of-range indices; never empty a token.
        out.parses = t.parses.clone();
    }
    if out.parses.len() == 1 && out.resolved_by == Resolution::None {
        out.resolved_by = by;
    }
    out
}

/// Removes the `matching` parses in ascending order, stopping once a single
/// parse is left.
pub fn apply_delete(t: &Token, matching: &BTreeSet<usize>, by: Resolution) -> Token {
    let mut out = t.clone();
    let before = t.parses.len();
    let mut keep = vec![true; before];
    let mut remaining = before;
    for &i in matching {
        if remaining <= 1 {
            break;
        }
        if i < before && keep[i] {
            keep[i] = false;
            remaining -= 1;
        }
    }
    out.parses = t
        .parses
        .iter()
        .zip(&keep)
        .filter(|(_, k)| **k)
        .map(|(p, _)| p.clone())
        .collect();
    if before > 1 && out.parses.len() == 1 && out.resolved_by == Resolution::None {
        out.resolved_by = by;
    }
    out
}

/// Substitutes bound values for the `_Var` references in a template value.
fn interpolate(text: &str, b: &Binding) -> Result<String, ActionError> {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    for v in template_variables(text) {
        let at = rest.find(v).expect("variable comes from this text");
        out.push_str(&rest[..at]);
        let value = b
            .get(v)
            .ok_or_else(|| ActionError::UnboundVariable(v.to_string()))?;
        out.push_str(value);
        rest = &rest[at + v.len()..];
    }
    out.push_str(rest);
    Ok(out)
}

/// Builds the single parse a compose template describes.
pub fn compose_parse(tmpl: &ComposeTemplate, b: &Binding) -> Result<Parse, ActionError> {
    let mut pairs = Vec::with_capacity(tmpl.pairs.len());
    for pair in &tmpl.pairs {
        pairs.push((pair.feature_name(), interpolate(&pair.value.text, b)?));
    }
    Ok(Parse::from_pairs(pairs)?)
}

/// Replaces the tokens spanned by `result` with one composed token.
pub fn apply_compose(
    s: &Sentence,
    result: &MatchResult,
    tmpl: &ComposeTemplate,
) -> Result<Sentence, ActionError> {
    let mut positions: Vec<usize> = result.per_group.iter().map(|(t, _)| *t).collect();
    positions.sort_unstable();
    positions.dedup();
    let contiguous = positions.windows(2).all(|w| w[1] == w[0] + 1);
    if positions.is_empty() || !contiguous || *positions.last().unwrap() >= s.len() {
        return Err(ActionError::NonContiguous(positions));
    }
    let parse = compose_parse(tmpl, &result.binding)?;
    let (start, end) = (positions[0], *positions.last().unwrap());
    let parts = &s.tokens[start..=end];
    let composed = Token {
        surface: parts
            .iter()
            .map(|t| t.surface.as_str())
            .collect::<Vec<_>>()
            .join(" "),
        parses: vec![parse],
        span: parts.iter().map(|t| t.span).sum(),
        resolved_by: Resolution::Multiword,
        analysis_counts: parts
            .iter()
            .flat_map(|t| t.analysis_counts.iter().copied())
            .collect(),
    };
    let mut out = s.clone();
    out.tokens.splice(start..=end, std::iter::once(composed));
    Ok(out)
}

/// One action applied to one token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub sentence: usize,
    pub rule: usize,
    pub anchor: usize,
    pub token: usize,
    pub surface: String,
    pub action: &'static str,
    pub before: usize,
    pub after: usize,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sentence={}\trule={}\tanchor={}\ttoken={}\tsurface={}\taction={}\tbefore={}\tafter={}",
            self.sentence,
            self.rule,
            self.anchor,
            self.token,
            self.surface,
            self.action,
            self.before,
            self.after
        )
    }
}

/// Applies the group actions of one match in group order.
fn apply_match(
    rule: &Rule,
    s: &mut Sentence,
    m: &MatchResult,
    trace: &mut Vec<TraceEntry>,
) {
    let by = resolution_for(rule.kind);
    for (group, (t, matching)) in rule.groups.iter().zip(&m.per_group) {
        let token = &s.tokens[*t];
        let updated = match &group.action {
            Action::Null | Action::Compose(_) => continue,
            Action::Output => apply_output(token, matching, by),
            Action::Delete => apply_delete(token, matching, by),
        };
        trace.push(TraceEntry {
            sentence: s.index,
            rule: rule.id,
            anchor: m.anchor,
            token: *t,
            surface: token.surface.clone(),
            action: group.action.name(),
            before: token.parses.len(),
            after: updated.parses.len(),
        });
        s.tokens[*t] = updated;
    }
}

/// Runs one rule over a sentence, anchors left to right. Each anchor is
/// matched against the sentence as left by earlier anchors; after a compose
/// the scan resumes behind the composed token.
pub fn apply_rule(
    rule: &Rule,
    s: &Sentence,
) -> Result<(Sentence, Vec<TraceEntry>), ActionError> {
    let mut out = s.clone();
    let mut trace = Vec::new();
    run_rule(rule, &mut out, &mut trace)?;
    Ok((out, trace))
}

/// [`apply_rule`] on a sentence in place, appending to `trace`.
pub fn run_rule(
    rule: &Rule,
    out: &mut Sentence,
    trace: &mut Vec<TraceEntry>,
) -> Result<(), ActionError> {
    let compose = rule.compose_group().map(|(_, t)| t);
    let mut anchor = 0;
    while anchor < out.len() {
        let Some(m) = match_at(rule, out, anchor) else {
            anchor += 1;
            continue;
        };
        match compose {
            Some(tmpl) => {
                let start = m.per_group.iter().map(|(t, _)| *t).min().unwrap_or(anchor);
                let next = apply_compose(out, &m, tmpl)?;
                for (t, _) in &m.per_group {
                    let token = &out.tokens[*t];
                    trace.push(TraceEntry {
                        sentence: out.index,
                        rule: rule.id,
                        anchor: m.anchor,
                        token: *t,
                        surface: token.surface.clone(),
                        action: "COMPOSE",
                        before: token.parses.len(),
                        after: 1,
                    });
                }
                *out = next;
                anchor = start + 1;
            }
            None => {
                apply_match(rule, out, &m, trace);
                anchor += 1;
            }
        }
    }
    Ok(())
}
