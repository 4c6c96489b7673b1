//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use morphtag_core::pipeline::{read_tsv, Method};
use morphtag_core::rules::{Action, ComposeTemplate, Constraint, SentencePosition, Value};
use morphtag_core::synthetic::workload;
use morphtag_core::{
    apply_output, apply_rule, match_rule, parse_rule, parse_rule_file, score_against_gold,
    serialize_rule, tag_corpus, Execution, Lexicon, ResolutionPolicy,
};

const E2E_LIMIT: Duration = Duration::from_secs(1);
const SCALE_LIMIT: Duration = Duration::from_secs(10);
const ORACLE_INSTANCES: usize = 10_000;
const FRACTION_TOLERANCE: f64 = 1e-12;

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name)
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs the `morphtag` binary's `tag` subcommand, writing output, trace and
/// stats into `dir` with `prefix`.
fn tag_binary(dir: &Path, prefix: &str, rules: &Path, lex: &Path, input: &Path, extra: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_morphtag"))
        .arg("tag")
        .arg("--rules").arg(rules)
        .arg("--lexicon").arg(lex)
        .arg("--input").arg(input)
        .arg("--output").arg(dir.join(format!("{prefix}.tsv")))
        .arg("--trace").arg(dir.join(format!("{prefix}.trace")))
        .arg("--stats").arg(dir.join(format!("{prefix}.json")))
        .args(extra)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr))
    })
}

fn end_to_end() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    tag_binary(dir.path(), "demo", &data("demo.mr"), &data("demo.lex"), &data("demo.txt"), &[])?;
    let elapsed = start.elapsed();
    let rules = parse_rule_file(&read(&data("demo.mr"))).map_err(|e| e.to_string())?;
    ensure(rules.len() <= 12, || format!("{} rules", rules.len()))?;
    let output = read(&dir.path().join("demo.tsv"));
    let gold = read(&data("demo.gold.tsv"));
    ensure(output == gold, || format!("output differs from golden TSV:\n{output}"))?;
    let tokens = read_tsv(&output).map_err(|e| e.to_string())?[0].tokens.clone();
    let composed = &tokens[1];
    ensure(tokens.len() == 12 && composed.surface == "döner dönmez" && composed.span == 2, || {
        format!("{} tokens, token 1 `{}`", tokens.len(), composed.surface)
    })?;
    ensure(composed.parses[0].get("sub") == Some("TEMP") && composed.parses[0].cat() == "ADV", || {
        "composed token is not a temporal adverb".into()
    })?;
    ensure(elapsed < E2E_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!("13 -> 12 tokens, golden match, {elapsed:.2?}"))
}

fn rule_fidelity() -> Outcome {
    use morphtag_core::rules::RuleKind;
    let atom = |s: &str| Value::Atom(s.into());
    let var = |s: &str| Value::Var(s.into());
    let feature = |k: &str, v: Value| Constraint::feature(k, v);

    let texts = [
        "LP = 0, Case = _C : Output; LP = 1, Cat = POSTP, Subcat = _C : Output.",
        "Lex=_W1, Root=_R1, Cat=V, Aspect=AOR, Agr=3SG, Sense=POS ; Lex=_W2, Root=_R1, Cat=V, Aspect=AOR, Agr=3SG, Sense = NEG : Compose=((*CAT* ADV)(*R* \"_W1 _W2 (_R1)\")(*SUB* TEMP)).",
        "Cat = V, Finalcat = ADJ, SP = END : Delete.",
    ];
    let rules: Vec<_> = texts
        .iter()
        .map(|t| parse_rule(t).map_err(|e| format!("{t}: {e}")))
        .collect::<Result<_, _>>()?;

    let postp = &rules[0];
    ensure(postp.groups.len() == 2, || "postposition: group count".into())?;
    ensure(postp.groups.iter().map(|g| g.offset).eq([0, 1]), || "postposition: offsets".into())?;
    ensure(postp.groups.iter().all(|g| g.action == Action::Output), || "postposition: actions".into())?;
    ensure(postp.groups[0].constraints.contains(&feature("case", var("_C")))
        && postp.groups[1].constraints.contains(&feature("subcat", var("_C")))
        && postp.groups[1].constraints.contains(&feature("cat", atom("POSTP"))), || "postposition: constraints".into())?;

    let compose = &rules[1];
    ensure(compose.kind == RuleKind::Multiword, || "compose: kind".into())?;
    ensure(compose.groups.iter().map(|g| g.offset).eq([0, 1]), || "compose: offsets".into())?;
    ensure(compose.groups[0].action == Action::Null, || "compose: group 1 action".into())?;
    let expected_first = vec![
        feature("lex", var("_W1")),
        feature("root", var("_R1")),
        feature("cat", atom("V")),
        feature("aspect", atom("AOR")),
        feature("agr", atom("3SG")),
        feature("sense", atom("POS")),
    ];
    ensure(compose.groups[0].constraints == expected_first, || format!("compose: {:?}", compose.groups[0].constraints))?;
    let Action::Compose(ComposeTemplate { pairs }) = &compose.groups[1].action else {
        return Err("compose: group 2 action".into());
    };
    let pairs: Vec<(&str, &str, bool)> = pairs.iter().map(|p| (p.slot.as_str(), p.value.text.as_str(), p.value.quoted)).collect();
    ensure(pairs == [("CAT", "ADV", false), ("R", "_W1 _W2 (_R1)", true), ("SUB", "TEMP", false)], || {
        format!("compose template {pairs:?}")
    })?;

    let adj = &rules[2];
    ensure(adj.groups.len() == 1 && adj.groups[0].offset == 0 && adj.groups[0].action == Action::Delete, || "final-adj: shape".into())?;
    ensure(adj.groups[0].sentence_position() == Some(SentencePosition::End), || "final-adj: SP".into())?;

    for (text, rule) in texts.iter().zip(&rules) {
        let canon = serialize_rule(rule);
        let again = parse_rule(&canon).map_err(|e| format!("{canon}: {e}"))?;
        ensure(&again == rule, || format!("reparse differs: {canon}"))?;
        ensure(serialize_rule(&again) == canon, || format!("unstable: {canon}"))?;
        if !text.contains("Compose") {
            ensure(canon == *text, || format!("`{canon}` != `{text}`"))?;
        }
    }
    Ok("3 rules: structures match, serialization stable".into())
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut with_matches = 0;
    let mut failures = Vec::new();
    for i in 0..ORACLE_INSTANCES {
        let inst = oracle::random_instance(&mut rng);
        if !oracle::expected(&inst).is_empty() {
            with_matches += 1;
        }
        if let Err(e) = oracle::check(&inst) {
            failures.push(format!("instance {i}: {e}"));
        }
    }
    ensure(failures.is_empty(), || format!("{} discrepancies; first:\n{}", failures.len(), failures[0]))?;
    ensure(with_matches * 10 >= ORACLE_INSTANCES, || format!("only {with_matches} instances matched anything"))?;
    Ok(format!("{ORACLE_INSTANCES} instances, 0 discrepancies ({with_matches} with matches)"))
}

fn delete_guard_and_output_idempotence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xde1e7e);
    let (mut deletes, mut outputs) = (0, 0);
    for i in 0..ORACLE_INSTANCES {
        let inst = oracle::random_instance(&mut rng);
        let actions: Vec<&str> = inst
            .groups
            .iter()
            .map(|_| ["Delete", "Delete", "Output", "Null"][rng.gen_range(0..4)])
            .collect();
        let text = oracle::render_with(&inst.groups, &actions);
        let rule = parse_rule(&text).map_err(|e| format!("{text}: {e}"))?;

        let (after, trace) = apply_rule(&rule, &inst.sentence).map_err(|e| e.to_string())?;
        deletes += trace.iter().filter(|e| e.action == "DELETE").count();
        ensure(after.tokens.iter().all(|t| !t.parses.is_empty()), || format!("instance {i}: empty token after {text}"))?;

        for m in match_rule(&rule, &inst.sentence) {
            for (pos, idx) in &m.per_group {
                let t = &inst.sentence.tokens[*pos];
                let once = apply_output(t, idx, morphtag_core::Resolution::Constraint);
                let all: BTreeSet<usize> = (0..once.parses.len()).collect();
                let twice = apply_output(&once, &all, morphtag_core::Resolution::Constraint);
                outputs += 1;
                ensure(once == twice && !once.parses.is_empty(), || format!("instance {i}: output not idempotent"))?;
            }
        }
    }
    ensure(deletes > 0, || "no delete was ever applied".into())?;
    Ok(format!("{deletes} deletes never emptied a token; {outputs} outputs idempotent"))
}

fn statistics() -> Outcome {
    let lex = Lexicon::load(data("demo.lex")).map_err(|e| e.to_string())?;
    let rules = parse_rule_file(&read(&data("demo.mr"))).map_err(|e| e.to_string())?;
    let (corpus, stats) = tag_corpus(&read(&data("demo.txt")), &rules, &lex, &ResolutionPolicy::First, Execution::default())
        .map_err(|e| e.to_string())?;
    ensure(stats.total_words == 13, || format!("{} words", stats.total_words))?;
    let hist = stats.histogram_counts();
    ensure(hist == [0, 7, 4, 1, 0, 1], || format!("histogram {hist:?}"))?;
    let sum: f64 = stats.parse_histogram.iter().map(|b| b.fraction).sum();
    ensure((sum - 1.0).abs() <= FRACTION_TOLERANCE, || format!("fractions sum to {sum}"))?;
    let methods: u64 = stats.methods.values().sum();
    ensure(methods == stats.total_words, || format!("methods sum to {methods}"))?;
    let resolved: u64 = Method::ALL.iter().filter(|m| **m != Method::Unambiguous).map(|m| stats.method(*m)).sum();
    ensure(resolved == stats.ambiguous_words() && resolved == 6, || format!("{resolved} ambiguous words"))?;
    ensure(stats.method(Method::Multiword) == 2 && stats.method(Method::Constraint) == 4, || format!("{:?}", stats.methods))?;
    let gold = read_tsv(&read(&data("demo.gold.tsv"))).map_err(|e| e.to_string())?;
    let acc = score_against_gold(&corpus.sentences, &gold).map_err(|e| e.to_string())?;
    ensure(acc.correct == acc.total && acc.total == 12, || format!("accuracy {}/{}", acc.correct, acc.total))?;
    Ok("buckets 1:7 2:4 3:1 >=5:1 of 13, methods partition, accuracy 12/12".into())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let w = workload(11, 5_000, 500, 50);
    std::fs::write(d.join("syn.mr"), &w.rule_text).unwrap();
    std::fs::write(d.join("syn.txt"), &w.text).unwrap();
    std::fs::write(d.join("syn.lex"), lexicon_text(&w.lexicon, &w.text)).unwrap();
    let runs = [
        ("demo", data("demo.mr"), data("demo.lex"), data("demo.txt"), &[][..]),
        ("syn", d.join("syn.mr"), d.join("syn.lex"), d.join("syn.txt"), &[][..]),
        ("seq", d.join("syn.mr"), d.join("syn.lex"), d.join("syn.txt"), &["--sequential"][..]),
    ];
    for (name, rules, lex, input, extra) in &runs {
        tag_binary(d, &format!("{name}1"), rules, lex, input, extra)?;
        tag_binary(d, &format!("{name}2"), rules, lex, input, extra)?;
        for ext in ["tsv", "trace", "json"] {
            let a = std::fs::read(d.join(format!("{name}1.{ext}"))).unwrap();
            let b = std::fs::read(d.join(format!("{name}2.{ext}"))).unwrap();
            ensure(a == b, || format!("{name}: .{ext} differs between runs"))?;
        }
    }
    for ext in ["tsv", "trace", "json"] {
        let a = std::fs::read(d.join(format!("syn1.{ext}"))).unwrap();
        let b = std::fs::read(d.join(format!("seq1.{ext}"))).unwrap();
        ensure(a == b, || format!("parallel and sequential .{ext} differ"))?;
    }
    let trace_lines = read(&d.join("syn1.trace")).lines().count();
    Ok(format!("output, trace, stats byte-identical (synthetic trace: {trace_lines} lines)"))
}

/// Lexicon file text for the surfaces of a synthetic workload.
fn lexicon_text(lex: &Lexicon, text: &str) -> String {
    let surfaces: BTreeSet<&str> = text.split_whitespace().map(|w| w.trim_end_matches('.')).collect();
    surfaces
        .into_iter()
        .map(|s| {
            let parses: Vec<String> = lex.analyze(s).iter().map(|p| p.serialize()).collect();
            format!("{s}\t{}\n", parses.join("\t"))
        })
        .collect()
}

fn scale() -> Outcome {
    let w = workload(42, 10_000, 1_000, 50);
    let start = Instant::now();
    let (corpus, stats) = tag_corpus(&w.text, &w.rules, &w.lexicon, &ResolutionPolicy::First, Execution::default())
        .map_err(|e| e.to_string())?;
    let lib = start.elapsed();
    ensure(w.lexicon.len() >= 1_000 && w.rules.len() == 50, || "workload shape".into())?;
    ensure(stats.total_words == 10_000, || format!("{} words", stats.total_words))?;
    ensure(lib < SCALE_LIMIT, || format!("library took {lib:?}"))?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    std::fs::write(d.join("w.mr"), &w.rule_text).unwrap();
    std::fs::write(d.join("w.txt"), &w.text).unwrap();
    std::fs::write(d.join("w.lex"), lexicon_text(&w.lexicon, &w.text)).unwrap();
    let start = Instant::now();
    tag_binary(d, "w", &d.join("w.mr"), &d.join("w.lex"), &d.join("w.txt"), &[])?;
    let bin = start.elapsed();
    ensure(bin < SCALE_LIMIT, || format!("binary took {bin:?}"))?;
    Ok(format!(
        "10000 tokens, 1000 surfaces, 50 rules: library {lib:.2?}, binary {bin:.2?} ({} trace entries)",
        corpus.trace.len()
    ))
}

fn main() {
    let checks: [Check; 7] = [
        ("end-to-end reproduction", end_to_end),
        ("rule-example fidelity", rule_fidelity),
        ("oracle equivalence", oracle_equivalence),
        ("delete guard and output idempotence", delete_guard_and_output_idempotence),
        ("statistics", statistics),
        ("determinism", determinism),
        ("scale", scale),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        match std::panic::catch_unwind(check) {
            Ok(Ok(detail)) => println!("PASS {name}: {detail}"),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL {name}: panicked");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
