use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::{
    Action, ComposeTemplate, ConditionGroup, Constraint, Rule, RuleKind, RuleSet,
    SentencePosition, TemplatePair, TemplateValue, Value,
};
use crate::model::FeatureKey;

/// A syntax or validation error inside one rule, 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct RuleError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Every failing rule of a file, by 1-based ordinal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleFileError {
    pub errors: Vec<(usize, RuleError)>,
}

impl fmt::Display for RuleFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (ordinal, err)) in self.errors.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "rule {ordinal}: {err}")?;
        }
        Ok(())
    }
}

impl std::error::Error for RuleFileError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Str(String),
    Eq,
    Comma,
    Semi,
    Colon,
    Dot,
    LParen,
    RParen,
    Star,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Eq => "`=`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Star => "`*`".into(),
        }
    }
}

fn is_word_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '=' | ',' | ';' | ':' | '.' | '(' | ')' | '"' | '*')
}

fn err(pos: Pos, message: impl Into<String>) -> RuleError {
    RuleError {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

fn lex(text: &str, start: Pos) -> Result<(Vec<(Tok, Pos)>, Pos), RuleError> {
    let mut out = Vec::new();
    let mut pos = start;
    let mut chars = text.chars().peekable();
    let advance = |pos: &mut Pos, c: char| {
        if c == '\n' {
            pos.line += 1;
            pos.column = 1;
        } else {
            pos.column += 1;
        }
    };
    while let Some(&c) = chars.peek() {
        let here = pos;
        if c.is_whitespace() {
            chars.next();
            advance(&mut pos, c);
            continue;
        }
        let single = match c {
            '=' => Some(Tok::Eq),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            ':' => Some(Tok::Colon),
            '.' => Some(Tok::Dot),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '*' => Some(Tok::Star),
            _ => None,
        };
        if let Some(tok) = single {
            chars.next();
            advance(&mut pos, c);
            out.push((tok, here));
            continue;
        }
        if c == '"' {
            chars.next();
            advance(&mut pos, c);
            let mut s = String::new();
            loop {
                match chars.next() {
                    Some('"') => {
                        advance(&mut pos, '"');
                        break;
                    }
                    Some(ch) => {
                        advance(&mut pos, ch);
                        s.push(ch);
                    }
                    None => return Err(err(here, "unterminated string")),
                }
            }
            out.push((Tok::Str(s), here));
            continue;
        }
        let mut word = String::new();
        while let Some(&ch) = chars.peek() {
            if !is_word_char(ch) {
                break;
            }
            word.push(ch);
            chars.next();
            advance(&mut pos, ch);
        }
        out.push((Tok::Word(word), here));
    }
    Ok((out, pos))
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<(Tok, Pos)> {
        let t = self.toks.get(self.at).cloned();
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> RuleError {
        match self.peek() {
            Some(t) => err(
                self.pos(),
                format!("expected {expected}, found {}", t.describe()),
            ),
            None => err(self.pos(), format!("expected {expected}, found end of input")),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<Pos, RuleError> {
        if self.peek() == Some(&tok) {
            Ok(self.next().unwrap().1)
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn word(&mut self, expected: &str) -> Result<(String, Pos), RuleError> {
        match self.peek() {
            Some(Tok::Word(_)) => match self.next() {
                Some((Tok::Word(w), p)) => Ok((w, p)),
                _ => unreachable!(),
            },
            _ => Err(self.unexpected(expected)),
        }
    }

    fn rule(&mut self) -> Result<Vec<(ConditionGroup, Pos)>, RuleError> {
        let mut groups = Vec::new();
        loop {
            let start = self.pos();
            let index = groups.len() as i64;
            let group = self.group(index)?;
            groups.push((group, start));
            match self.next() {
                Some((Tok::Semi, _)) => continue,
                Some((Tok::Dot, _)) => break,
                Some((t, p)) => {
                    return Err(err(
                        p,
                        format!("expected `,`, `:`, `;` or `.`, found {}", t.describe()),
                    ))
                }
                None => return Err(err(self.end, "rule not terminated by `.`")),
            }
        }
        if let Some((t, p)) = self.next() {
            return Err(err(
                p,
                format!("unexpected {} after end of rule", t.describe()),
            ));
        }
        Ok(groups)
    }

    fn group(&mut self, index: i64) -> Result<ConditionGroup, RuleError> {
        let mut constraints = Vec::new();
        let mut lp_seen = false;
        let mut sp_seen = false;
        loop {
            let (c, p) = self.constraint()?;
            match c {
                Constraint::Position(_) if lp_seen => {
                    return Err(err(p, "more than one LP constraint in a group"))
                }
                Constraint::Sentence(_) if sp_seen => {
                    return Err(err(p, "more than one SP constraint in a group"))
                }
                Constraint::Position(_) => lp_seen = true,
                Constraint::Sentence(_) => sp_seen = true,
                Constraint::Feature { .. } => {}
            }
            constraints.push(c);
            if self.peek() == Some(&Tok::Comma) {
                self.next();
            } else {
                break;
            }
        }
        let action = if self.peek() == Some(&Tok::Colon) {
            self.next();
            self.action()?
        } else {
            Action::Null
        };
        let offset = constraints
            .iter()
            .find_map(|c| match c {
                Constraint::Position(n) => Some(*n),
                _ => None,
            })
            .unwrap_or(index);
        Ok(ConditionGroup {
            constraints,
            action,
            offset,
        })
    }

    fn constraint(&mut self) -> Result<(Constraint, Pos), RuleError> {
        let (key, kpos) = self.word("a feature name")?;
        self.expect(Tok::Eq, "`=`")?;
        let (value, vpos) = self.word("a value")?;
        let upper = key.to_ascii_uppercase();
        let constraint = if upper == "LP" {
            let n = value
                .parse::<i64>()
                .map_err(|_| err(vpos, format!("LP value `{value}` is not an integer")))?;
            Constraint::Position(n)
        } else if upper == "SP" {
            match value.to_ascii_uppercase().as_str() {
                "BEGIN" => Constraint::Sentence(SentencePosition::Begin),
                "END" => Constraint::Sentence(SentencePosition::End),
                _ => {
                    return Err(err(
                        vpos,
                        format!("SP value `{value}` must be BEGIN or END"),
                    ))
                }
            }
        } else {
            let key = FeatureKey::new(&key)
                .map_err(|_| err(kpos, format!("invalid feature name `{key}`")))?;
            let value = if value.starts_with('_') {
                if !valid_var(&value) {
                    return Err(err(vpos, format!("invalid variable name `{value}`")));
                }
                Value::Var(value)
            } else {
                Value::Atom(key.normalize_value(&value))
            };
            Constraint::Feature { key, value }
        };
        Ok((constraint, kpos))
    }

    fn action(&mut self) -> Result<Action, RuleError> {
        let (name, p) = self.word("an action name")?;
        match name.to_ascii_lowercase().as_str() {
            "null" => Ok(Action::Null),
            "delete" => Ok(Action::Delete),
            "output" => Ok(Action::Output),
            "compose" => {
                self.expect(Tok::Eq, "`=` after Compose")?;
                Ok(Action::Compose(self.template()?))
            }
            _ => Err(err(p, format!("unknown action `{name}`"))),
        }
    }

    fn template(&mut self) -> Result<ComposeTemplate, RuleError> {
        self.expect(Tok::LParen, "`(` opening a compose template")?;
        let mut pairs = Vec::new();
        while self.peek() == Some(&Tok::LParen) {
            self.next();
            self.expect(Tok::Star, "`*` before a slot name")?;
            let (slot, spos) = self.word("a slot name")?;
            self.expect(Tok::Star, "`*` after a slot name")?;
            let slot = slot.to_ascii_uppercase();
            if !valid_slot(&slot) {
                return Err(err(spos, format!("invalid slot name `{slot}`")));
            }
            let value = match self.peek() {
                Some(Tok::Word(w)) => TemplateValue {
                    text: w.clone(),
                    quoted: false,
                },
                Some(Tok::Str(s)) => TemplateValue {
                    text: s.clone(),
                    quoted: true,
                },
                _ => return Err(self.unexpected("a slot value")),
            };
            self.next();
            if value.text.is_empty() {
                return Err(err(spos, "empty slot value"));
            }
            self.expect(Tok::RParen, "`)` closing a slot")?;
            pairs.push(TemplatePair { slot, value });
        }
        if pairs.is_empty() {
            return Err(self.unexpected("`(` opening a template slot"));
        }
        self.expect(Tok::RParen, "`)` closing a compose template")?;
        Ok(ComposeTemplate { pairs })
    }
}

fn valid_var(v: &str) -> bool {
    let mut chars = v.chars();
    chars.next() == Some('_')
        && chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric())
}

fn valid_slot(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

fn build_rule(id: usize, text: &str, start: Pos) -> Result<Rule, RuleError> {
    let (toks, end) = lex(text, start)?;
    if toks.is_empty() {
        return Err(err(end, "empty rule"));
    }
    let mut parser = Parser { toks, at: 0, end };
    let groups = parser.rule()?;

    let mut compose_seen = false;
    let mut offsets = BTreeSet::new();
    for (g, p) in &groups {
        if matches!(g.action, Action::Compose(_)) {
            if compose_seen {
                return Err(err(*p, "Compose may appear in at most one group"));
            }
            compose_seen = true;
        }
        if !offsets.insert(g.offset) {
            return Err(err(
                *p,
                format!("two groups target the same offset {}", g.offset),
            ));
        }
    }
    Ok(Rule {
        id,
        groups: groups.into_iter().map(|(g, _)| g).collect(),
        kind: if compose_seen {
            RuleKind::Multiword
        } else {
            RuleKind::Constraint
        },
    })
}

/// Parses the text of a single rule terminated by `.`.
pub fn parse_rule(text: &str) -> Result<Rule, RuleError> {
    build_rule(1, text, Pos { line: 1, column: 1 })
}

/// Parses a rule file: rules end at `.`, `#` lines are comments. Errors from
/// every malformed rule are collected.
pub fn parse_rule_file(text: &str) -> Result<RuleSet, RuleFileError> {
    let mut rules = Vec::new();
    let mut errors = Vec::new();

    // Blank out comment lines, keeping line numbers intact.
    let cleaned: String = text
        .lines()
        .map(|l| if l.trim_start().starts_with('#') { "" } else { l })
        .collect::<Vec<_>>()
        .join("\n");

    let mut chunk = String::new();
    let mut chunk_start = Pos { line: 1, column: 1 };
    let mut pos = Pos { line: 1, column: 1 };
    let mut in_quote = false;
    let mut ordinal = 0;
    for c in cleaned.chars() {
        if chunk.is_empty() {
            chunk_start = pos;
        }
        chunk.push(c);
        if c == '"' {
            in_quote = !in_quote;
        }
        if c == '\n' {
            pos.line += 1;
            pos.column = 1;
        } else {
            pos.column += 1;
        }
        if c == '.' && !in_quote {
            if chunk.trim() == "." {
                ordinal += 1;
                errors.push((ordinal, err(chunk_start, "empty rule")));
            } else {
                ordinal += 1;
                match build_rule(ordinal, &chunk, chunk_start) {
                    Ok(r) => rules.push(r),
                    Err(e) => errors.push((ordinal, e)),
                }
            }
            chunk.clear();
        }
    }
    if !chunk.trim().is_empty() {
        ordinal += 1;
        let e = match lex(&chunk, chunk_start) {
            Err(e) => e,
            Ok((_, end)) => err(end, "rule not terminated by `.`"),
        };
        errors.push((ordinal, e));
    }

    if !errors.is_empty() {
        return Err(RuleFileError { errors });
    }
    let mut warnings: Vec<String> = rules.iter().flat_map(|r| r.lint()).collect();
    if rules.is_empty() {
        log::warn!("rule file contains no rules");
        warnings.push("rule file contains no rules".into());
    }
    Ok(RuleSet { rules, warnings })
}
