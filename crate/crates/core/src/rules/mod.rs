//! Condition–action rules.
//!
//! A rule is a sequence of condition groups separated by `;` and closed by
//! `.`. Each group constrains the parses of one token (located by `LP`, or by
//! the group's position when `LP` is absent) and may carry an action:
//!
//! ```text
//! LP = 0, Case = _C : Output; LP = 1, Cat = POSTP, Subcat = _C : Output.
//! ```
//!
//! Variables (`_C`) must take the same value everywhere they occur.

mod parser;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::model::FeatureKey;

pub use parser::{parse_rule, parse_rule_file, RuleError, RuleFileError};

/// Right-hand side of a constraint.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum Value {
    Atom(String),
    Var(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Atom(a) => f.write_str(a),
            Value::Var(v) => f.write_str(v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SentencePosition {
    Begin,
    End,
}

impl fmt::Display for SentencePosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SentencePosition::Begin => "BEGIN",
            SentencePosition::End => "END",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum Constraint {
    /// `Key = value` on a morphological feature.
    Feature { key: FeatureKey, value: Value },
    /// `LP = n`: token offset relative to the rule anchor.
    Position(i64),
    /// `SP = BEGIN|END`: absolute sentence position.
    Sentence(SentencePosition),
}

impl Constraint {
    pub fn feature(key: &str, value: Value) -> Self {
        Constraint::Feature {
            key: FeatureKey::new(key).expect("valid feature key"),
            value,
        }
    }
}

fn capitalized(key: &str) -> String {
    let mut chars = key.chars();
    match chars.next() {
        Some(first) => first.to_ascii_uppercase().to_string() + chars.as_str(),
        None => String::new(),
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Feature { key, value } => {
                write!(f, "{} = {}", capitalized(key.as_str()), value)
            }
            Constraint::Position(n) => write!(f, "LP = {n}"),
            Constraint::Sentence(p) => write!(f, "SP = {p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TemplateValue {
    pub text: String,
    /// Written as a double-quoted string rather than a bare atom.
    pub quoted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TemplatePair {
    /// Uppercase slot name, e.g. `CAT`, `R`, `SUB`.
    pub slot: String,
    pub value: TemplateValue,
}

impl TemplatePair {
    /// Feature key the slot writes in the composed parse.
    pub fn feature_name(&self) -> String {
        match self.slot.as_str() {
            "CAT" => FeatureKey::CAT.to_string(),
            "R" => FeatureKey::ROOT.to_string(),
            "SUB" => FeatureKey::SUB.to_string(),
            other => other.to_ascii_lowercase(),
        }
    }
}

/// Slot/value pairs describing the parse built by a compose action.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ComposeTemplate {
    pub pairs: Vec<TemplatePair>,
}

impl fmt::Display for ComposeTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for pair in &self.pairs {
            if pair.value.quoted {
                write!(f, "(*{}* \"{}\")", pair.slot, pair.value.text)?;
            } else {
                write!(f, "(*{}* {})", pair.slot, pair.value.text)?;
            }
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum Action {
    Null,
    Delete,
    Output,
    Compose(ComposeTemplate),
}

impl Action {
    pub fn name(&self) -> &'static str {
        match self {
            Action::Null => "NULL",
            Action::Delete => "DELETE",
            Action::Output => "OUTPUT",
            Action::Compose(_) => "COMPOSE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ConditionGroup {
    /// Constraints in written order, positional ones included.
    pub constraints: Vec<Constraint>,
    pub action: Action,
    /// Token offset from the anchor: the explicit `LP` or the group index.
    pub offset: i64,
}

impl ConditionGroup {
    pub fn feature_constraints(&self) -> impl Iterator<Item = (&FeatureKey, &Value)> {
        self.constraints.iter().filter_map(|c| match c {
            Constraint::Feature { key, value } => Some((key, value)),
            _ => None,
        })
    }

    pub fn sentence_position(&self) -> Option<SentencePosition> {
        self.constraints.iter().find_map(|c| match c {
            Constraint::Sentence(p) => Some(*p),
            _ => None,
        })
    }

    pub fn explicit_position(&self) -> Option<i64> {
        self.constraints.iter().find_map(|c| match c {
            Constraint::Position(n) => Some(*n),
            _ => None,
        })
    }
}

impl fmt::Display for ConditionGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.constraints.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        match &self.action {
            Action::Null => Ok(()),
            Action::Delete => f.write_str(" : Delete"),
            Action::Output => f.write_str(" : Output"),
            Action::Compose(t) => write!(f, " : Compose = {t}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RuleKind {
    Multiword,
    Constraint,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Rule {
    /// 1-based ordinal in its file.
    pub id: usize,
    pub groups: Vec<ConditionGroup>,
    pub kind: RuleKind,
}

impl Rule {
    pub fn compose_group(&self) -> Option<(usize, &ComposeTemplate)> {
        self.groups
            .iter()
            .enumerate()
            .find_map(|(i, g)| match &g.action {
                Action::Compose(t) => Some((i, t)),
                _ => None,
            })
    }

    /// Occurrence count of every variable, template references included.
    pub fn variable_occurrences(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for g in &self.groups {
            for (_, value) in g.feature_constraints() {
                if let Value::Var(v) = value {
                    *counts.entry(v.clone()).or_insert(0) += 1;
                }
            }
            if let Action::Compose(t) = &g.action {
                for pair in &t.pairs {
                    for v in template_variables(&pair.value.text) {
                        *counts.entry(v.to_string()).or_insert(0) += 1;
                    }
                }
            }
        }
        counts
    }

    /// Non-fatal findings: variables used once, template variables no
    /// constraint can bind.
    pub fn lint(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        let bound: std::collections::BTreeSet<&str> = self
            .groups
            .iter()
            .flat_map(|g| g.feature_constraints())
            .filter_map(|(_, v)| match v {
                Value::Var(name) => Some(name.as_str()),
                _ => None,
            })
            .collect();
        for (var, n) in self.variable_occurrences() {
            if n == 1 {
                warnings.push(format!(
                    "rule {}: variable {var} occurs only once and constrains nothing",
                    self.id
                ));
            }
            if !bound.contains(var.as_str()) {
                warnings.push(format!(
                    "rule {}: template variable {var} is never bound by a constraint",
                    self.id
                ));
            }
        }
        warnings
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.groups.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{g}")?;
        }
        f.write_str(".")
    }
}

/// Canonical text for a rule; parses back to the same structure.
pub fn serialize_rule(rule: &Rule) -> String {
    rule.to_string()
}

/// Rules in file order plus load-time warnings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    pub warnings: Vec<String>,
}

impl RuleSet {
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rule> {
        self.rules.iter()
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for r in &self.rules {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }
}

impl From<Vec<Rule>> for RuleSet {
    fn from(rules: Vec<Rule>) -> Self {
        RuleSet {
            rules,
            warnings: Vec::new(),
        }
    }
}

/// Variable names (`_X1`) embedded in a template value, in order.
pub fn template_variables(text: &str) -> Vec<&str> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'_' && i + 1 < bytes.len() && bytes[i + 1].is_ascii_alphabetic() {
            let start = i;
            i += 2;
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(&text[start..i]);
        } else {
            i += 1;
        }
    }
    out
}
