//! Seeded synthetic workloads: a random lexicon, rule file and corpus with
//! realistic ambiguity, for load tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lexicon::Lexicon;
use crate::model::Parse;
use crate::rules::{parse_rule_file, RuleSet};

const SYLLABLES: &[&str] = &[
    "ka", "le", "mi", "do", "su", "ra", "te", "bi", "yo", "gü", "şa", "nö", "ze", "pı", "ço", "hu",
];
const CATS: &[&str] = &["N", "V", "ADJ", "ADV", "POSTP", "PN"];
const CASES: &[&str] = &["NOM", "ACC", "DAT", "LOC", "ABL", "GEN"];
const AGRS: &[&str] = &["1SG", "2SG", "3SG", "1PL", "2PL", "3PL"];
const ASPECTS: &[&str] = &["AOR", "PAST", "NARR", "PROG", "OPT"];

pub struct Workload {
    pub lexicon: Lexicon,
    pub rules: RuleSet,
    pub rule_text: String,
    pub text: String,
}

fn surface(mut i: usize) -> String {
    let mut s = String::new();
    loop {
        s.push_str(SYLLABLES[i % SYLLABLES.len()]);
        i /= SYLLABLES.len();
        if i == 0 {
            break;
        }
    }
    s.push_str("ler");
    s
}

fn random_parse(rng: &mut ChaCha8Rng, root: &str) -> Parse {
    let cat = *CATS.choose(rng).unwrap();
    let mut pairs: Vec<(&str, String)> = vec![("root", root.to_string()), ("cat", cat.into())];
    match cat {
        "N" | "PN" | "ADJ" => {
            pairs.push(("case", CASES.choose(rng).unwrap().to_string()));
            pairs.push(("agr", AGRS.choose(rng).unwrap().to_string()));
            if rng.gen_bool(0.4) {
                pairs.push(("poss", AGRS.choose(rng).unwrap().to_string()));
            }
        }
        "V" => {
            pairs.push(("aspect", ASPECTS.choose(rng).unwrap().to_string()));
            pairs.push(("agr", AGRS.choose(rng).unwrap().to_string()));
            pairs.push(("sense", if rng.gen_bool(0.7) { "POS" } else { "NEG" }.into()));
            if rng.gen_bool(0.3) {
                pairs.push(("finalcat", "ADJ".into()));
            }
        }
        "POSTP" => pairs.push(("subcat", CASES.choose(rng).unwrap().to_string())),
        _ => {}
    }
    Parse::from_pairs(pairs).expect("generated parse is valid")
}

fn random_rule(rng: &mut ChaCha8Rng, i: usize) -> String {
    let cat = |rng: &mut ChaCha8Rng| *CATS.choose(rng).unwrap();
    let case = |rng: &mut ChaCha8Rng| *CASES.choose(rng).unwrap();
    match i % 6 {
        0 => "LP = 0, Case = _C : Output; LP = 1, Cat = POSTP, Subcat = _C : Output.".into(),
        1 => format!(
            "LP = 0, Case = GEN, Agr = _A; LP = 1, Cat = {}, Poss = _A : Output.",
            cat(rng)
        ),
        2 => format!("Cat = V, Finalcat = ADJ, SP = END : Delete; LP = -1, Case = {}.", case(rng)),
        3 => format!(
            "Cat = {}, Case = {} : Delete; Cat = {}.",
            cat(rng),
            case(rng),
            cat(rng)
        ),
        4 => format!("Cat = ADJ : Output; Cat = N, Case = {}.", case(rng)),
        _ => format!(
            "Root = _R, Cat = V, Sense = POS; Root = _R, Cat = V, Sense = NEG : Compose = ((*CAT* ADV)(*R* \"_R\")(*SUB* {})).",
            ["TEMP", "MANNER"].choose(rng).unwrap()
        ),
    }
}

/// Builds a workload of about `tokens` words over `surfaces` distinct forms
/// and `rules` rules.
pub fn workload(seed: u64, tokens: usize, surfaces: usize, rules: usize) -> Workload {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lexicon = Lexicon::new("synthetic");
    let forms: Vec<String> = (0..surfaces).map(surface).collect();
    for form in &forms {
        let n = rng.gen_range(1..=5);
        let roots = [form.trim_end_matches("ler").to_string(), form.clone()];
        let parses = (0..n)
            .map(|_| {
                let root = roots.choose(&mut rng).unwrap();
                random_parse(&mut rng, root)
            })
            .collect::<Vec<_>>();
        lexicon.insert(form, parses);
    }
    let rule_text: String = (0..rules)
        .map(|i| random_rule(&mut rng, i) + "\n")
        .collect();
    let rules = parse_rule_file(&rule_text).expect("generated rules parse");

    let mut text = String::new();
    let mut written = 0;
    while written < tokens {
        let len = rng.gen_range(5..=15).min(tokens - written).max(1);
        let mut words: Vec<&str> = Vec::with_capacity(len);
        for _ in 0..len {
            // Occasional reduplication gives the compose rules something to do.
            let word = match words.last() {
                Some(prev) if rng.gen_bool(0.08) => prev,
                _ => forms.choose(&mut rng).unwrap().as_str(),
            };
            words.push(word);
        }
        text.push_str(&words.join(" "));
        text.push_str(".\n");
        written += len;
    }
    Workload {
        lexicon,
        rules,
        rule_text,
        text,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn workload_shape() {
        let w = workload(7, 500, 1000, 50);
        assert_eq!(w.lexicon.len(), 1000);
        assert_eq!(w.rules.len(), 50);
        let words: usize = w.text.split_whitespace().count();
        assert_eq!(words, 500);
        let again = workload(7, 500, 1000, 50);
        assert_eq!(again.text, w.text);
        assert_eq!(again.rule_text, w.rule_text);
    }
}
