//! Brute-force reference matcher. It shares nothing with the library but the
//! public data types: rules are generated in a private representation,
//! rendered to text for the library, and evaluated here by enumerating the
//! full cross product of parse choices.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use morphtag_core::{match_rule, parse_rule, Parse, Sentence, Token};

#[derive(Debug, Clone)]
pub enum Val {
    Atom(String),
    Var(String),
}

#[derive(Debug, Clone)]
pub struct Group {
    pub offset: i64,
    pub explicit_offset: bool,
    /// `Some(true)` = BEGIN, `Some(false)` = END.
    pub sp: Option<bool>,
    pub features: Vec<(String, Val)>,
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub sentence: Sentence,
    pub groups: Vec<Group>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expected {
    pub anchor: usize,
    pub binding: BTreeMap<String, String>,
    pub per_group: Vec<(usize, BTreeSet<usize>)>,
}

const SURFACES: &[&str] = &["ev", "git", "ev", "al"];
const ROOTS: &[&str] = &["ev", "git", "al"];
const CATS: &[&str] = &["N", "V", "ADJ"];
const CASES: &[&str] = &["NOM", "GEN", "LOC"];
const AGRS: &[&str] = &["3SG", "2SG"];
const KEYS: &[&str] = &["cat", "case", "agr", "root", "lex"];
const VARS: &[&str] = &["_X", "_Y"];

fn pick<'a, R: Rng>(rng: &mut R, xs: &[&'a str]) -> &'a str {
    xs.choose(rng).unwrap()
}

fn random_parse<R: Rng>(rng: &mut R) -> Parse {
    let mut pairs = vec![
        ("root".to_string(), pick(rng, ROOTS).to_string()),
        ("cat".to_string(), pick(rng, CATS).to_string()),
    ];
    if rng.gen_bool(0.6) {
        pairs.push(("case".into(), pick(rng, CASES).into()));
    }
    if rng.gen_bool(0.6) {
        pairs.push(("agr".into(), pick(rng, AGRS).into()));
    }
    if rng.gen_bool(0.1) {
        pairs.push(("lex".into(), pick(rng, SURFACES).into()));
    }
    Parse::from_pairs(pairs).unwrap()
}

fn atom_for<R: Rng>(rng: &mut R, key: &str) -> String {
    match key {
        "cat" => pick(rng, CATS),
        "case" => pick(rng, CASES),
        "agr" => pick(rng, AGRS),
        "root" => pick(rng, ROOTS),
        _ => pick(rng, SURFACES),
    }
    .to_string()
}

/// At most 5 tokens, 4 parses per token, 3 groups, 3 constraints per group,
/// 2 distinct variables.
pub fn random_instance<R: Rng>(rng: &mut R) -> Instance {
    let n = rng.gen_range(1..=5);
    let tokens = (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=4);
            Token::analyzed(pick(rng, SURFACES), (0..k).map(|_| random_parse(rng)).collect())
        })
        .collect();
    let sentence = Sentence::new(0, tokens);

    let g = rng.gen_range(1..=3);
    let explicit = rng.gen_bool(0.5);
    let mut offsets: Vec<i64> = if explicit {
        let mut pool: Vec<i64> = (-2..=2).collect();
        pool.shuffle(rng);
        pool.truncate(g);
        pool
    } else {
        (0..g as i64).collect()
    };
    if explicit && rng.gen_bool(0.5) {
        offsets.sort();
    }
    let groups = offsets
        .into_iter()
        .map(|offset| {
            let c = rng.gen_range(1..=3);
            let mut features = Vec::new();
            let mut used = BTreeSet::new();
            for _ in 0..c {
                let key = pick(rng, KEYS);
                if !used.insert(key) {
                    continue;
                }
                let val = if rng.gen_bool(0.4) {
                    Val::Var(pick(rng, VARS).to_string())
                } else {
                    Val::Atom(atom_for(rng, key))
                };
                features.push((key.to_string(), val));
            }
            let sp = match rng.gen_range(0..10) {
                0 => Some(true),
                1 => Some(false),
                _ => None,
            };
            Group {
                offset,
                explicit_offset: explicit,
                sp,
                features,
            }
        })
        .collect();
    Instance { sentence, groups }
}

fn cap(key: &str) -> String {
    let mut c = key.chars();
    let first = c.next().unwrap().to_ascii_uppercase();
    std::iter::once(first).chain(c).collect()
}

/// Rule text for the library's parser, every group with `Output`.
pub fn render(groups: &[Group]) -> String {
    render_with(groups, &vec!["Output"; groups.len()])
}

/// Rule text with one action name per group.
pub fn render_with(groups: &[Group], actions: &[&str]) -> String {
    let parts: Vec<String> = groups
        .iter()
        .zip(actions)
        .map(|(g, action)| {
            let mut cs = Vec::new();
            if g.explicit_offset {
                cs.push(format!("LP = {}", g.offset));
            }
            for (k, v) in &g.features {
                let v = match v {
                    Val::Atom(a) => a.clone(),
                    Val::Var(x) => x.clone(),
                };
                cs.push(format!("{} = {}", cap(k), v));
            }
            match g.sp {
                Some(true) => cs.push("SP = BEGIN".into()),
                Some(false) => cs.push("SP = END".into()),
                None => {}
            }
            format!("{} : {action}", cs.join(", "))
        })
        .collect();
    parts.join("; ") + "."
}

fn value_of<'a>(t: &'a Token, p: &'a Parse, key: &str) -> Option<&'a str> {
    match p.get(key) {
        Some(v) => Some(v),
        None if key == "lex" => Some(&t.surface),
        None => None,
    }
}

fn consistent(inst: &Instance, positions: &[usize], choice: &[usize]) -> Option<BTreeMap<String, String>> {
    let mut binding = BTreeMap::new();
    let n = inst.sentence.tokens.len();
    for ((g, &pos), &pi) in inst.groups.iter().zip(positions).zip(choice) {
        match g.sp {
            Some(true) if pos != 0 => return None,
            Some(false) if pos + 1 != n => return None,
            _ => {}
        }
        let token = &inst.sentence.tokens[pos];
        let parse = &token.parses[pi];
        for (k, v) in &g.features {
            let found = value_of(token, parse, k)?;
            match v {
                Val::Atom(a) => {
                    if a != found {
                        return None;
                    }
                }
                Val::Var(x) => match binding.get(x) {
                    Some(prev) if prev != found => return None,
                    Some(_) => {}
                    None => {
                        binding.insert(x.clone(), found.to_string());
                    }
                },
            }
        }
    }
    Some(binding)
}

/// All matches of the instance, by brute force.
pub fn expected(inst: &Instance) -> Vec<Expected> {
    let n = inst.sentence.tokens.len() as i64;
    let mut out = Vec::new();
    for anchor in 0..n {
        let positions: Option<Vec<usize>> = inst
            .groups
            .iter()
            .map(|g| {
                let p = anchor + g.offset;
                (0..n).contains(&p).then_some(p as usize)
            })
            .collect();
        let Some(positions) = positions else { continue };
        let sizes: Vec<usize> = positions
            .iter()
            .map(|&p| inst.sentence.tokens[p].parses.len())
            .collect();
        let mut first = None;
        let mut union: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); sizes.len()];
        // Odometer over the cross product, last group fastest: lexicographic.
        let mut choice = vec![0usize; sizes.len()];
        'outer: loop {
            if let Some(b) = consistent(inst, &positions, &choice) {
                if first.is_none() {
                    first = Some(b);
                }
                for (u, &c) in union.iter_mut().zip(&choice) {
                    u.insert(c);
                }
            }
            let mut i = sizes.len();
            loop {
                if i == 0 {
                    break 'outer;
                }
                i -= 1;
                choice[i] += 1;
                if choice[i] < sizes[i] {
                    break;
                }
                choice[i] = 0;
            }
        }
        if let Some(binding) = first {
            out.push(Expected {
                anchor: anchor as usize,
                binding,
                per_group: positions.into_iter().zip(union).collect(),
            });
        }
    }
    out
}

/// Runs the library on the instance and compares with the brute force.
pub fn check(inst: &Instance) -> Result<(), String> {
    let text = render(&inst.groups);
    let rule = parse_rule(&text).map_err(|e| format!("{text}: {e}"))?;
    let got: Vec<Expected> = match_rule(&rule, &inst.sentence)
        .into_iter()
        .map(|m| Expected {
            anchor: m.anchor,
            binding: m.binding.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            per_group: m.per_group,
        })
        .collect();
    let want = expected(inst);
    if got == want {
        Ok(())
    } else {
        Err(format!(
            "rule {text}\nsentence {:?}\nlibrary {got:?}\noracle  {want:?}",
            inst.sentence
                .tokens
                .iter()
                .map(|t| (t.surface.clone(), t.parses.iter().map(|p| p.serialize()).collect::<Vec<_>>()))
                .collect::<Vec<_>>()
        ))
    }
}
