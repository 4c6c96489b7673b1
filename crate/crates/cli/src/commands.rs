//! Batch subcommands.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use log::info;

use morphtag_core::pipeline::{
    parse_answers, read_tsv, score_against_gold, tag_sentences, tokenize, write_trace, write_tsv,
    write_unknowns, compile_stats, InteractiveSession, RootFrequencies,
};
use morphtag_core::{parse_rule_file, Execution, Lexicon, ResolutionPolicy, RuleSet};

use crate::error::{read_file, write_file, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    First,
    Frequency,
    Interactive,
    Leave,
}

#[derive(Debug, Clone, Args)]
pub struct Resources {
    /// Rule file.
    #[arg(long)]
    pub rules: PathBuf,
    /// Lexicon file (surface, then one parse per tab-separated field).
    #[arg(long)]
    pub lexicon: PathBuf,
    /// Fold case (Turkish dotted/dotless i aware) for lexicon lookup.
    #[arg(long)]
    pub fold_case: bool,
}

impl Resources {
    pub fn load(&self) -> Result<(RuleSet, Lexicon), CliError> {
        let rules = load_rules(&self.rules)?;
        let lexicon = Lexicon::load(&self.lexicon)
            .map_err(|e| CliError::data(&self.lexicon, e))?
            .with_case_folding(self.fold_case);
        Ok((rules, lexicon))
    }
}

#[derive(Debug, Clone, Args)]
pub struct TagArgs {
    #[command(flatten)]
    pub resources: Resources,
    /// Raw input text.
    #[arg(long)]
    pub input: PathBuf,
    /// Tagged TSV output.
    #[arg(long)]
    pub output: PathBuf,
    /// How to settle tokens the rules leave ambiguous.
    #[arg(long, value_enum, default_value_t = Policy::First)]
    pub policy: Policy,
    /// Root frequency table (`root<TAB>count`), required by `--policy frequency`.
    #[arg(long)]
    pub freq: Option<PathBuf>,
    /// Write statistics as JSON.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Gold-standard TSV to score against.
    #[arg(long)]
    pub gold: Option<PathBuf>,
    /// Write the rule application trace.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write unknown words (`surface<TAB>sentence<TAB>token`).
    #[arg(long)]
    pub unknown_log: Option<PathBuf>,
    /// Scripted choices for `--policy interactive`.
    #[arg(long)]
    pub answers: Option<PathBuf>,
    /// Tag sentences one after another instead of in parallel.
    #[arg(long)]
    pub sequential: bool,
}

pub fn load_rules(path: &Path) -> Result<RuleSet, CliError> {
    parse_rule_file(&read_file(path)?).map_err(|e| CliError::data(path, e))
}

pub fn tag(args: &TagArgs) -> Result<String, CliError> {
    let policy = match args.policy {
        Policy::First => ResolutionPolicy::First,
        Policy::Leave => ResolutionPolicy::Leave,
        Policy::Interactive => ResolutionPolicy::Interactive,
        Policy::Frequency => {
            let path = args
                .freq
                .as_ref()
                .ok_or_else(|| CliError::Usage("--policy frequency requires --freq".into()))?;
            ResolutionPolicy::Frequency(
                RootFrequencies::load(path).map_err(|e| CliError::data(path, e))?,
            )
        }
    };
    if args.policy == Policy::Interactive && args.answers.is_none() {
        return Err(CliError::Usage(
            "--policy interactive needs --answers in batch mode; use `serve` for live sessions"
                .into(),
        ));
    }
    let answers = match &args.answers {
        Some(path) => {
            Some(parse_answers(&read_file(path)?).map_err(|e| CliError::data(path, e))?)
        }
        None => None,
    };
    let gold = match &args.gold {
        Some(path) => Some(read_tsv(&read_file(path)?).map_err(|e| CliError::data(path, e))?),
        None => None,
    };

    let (rules, lexicon) = args.resources.load()?;
    for w in &rules.warnings {
        log::warn!("{}: {w}", args.resources.rules.display());
    }
    let text = read_file(&args.input)?;
    let exec = if args.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let mut corpus = tag_sentences(&tokenize(&text), &rules, &lexicon, &policy, exec)
        .map_err(|e| CliError::data(&args.resources.rules, e))?;
    let mut stats = compile_stats(&corpus, exec);
    if let (Policy::Interactive, Some(answers)) = (args.policy, answers) {
        let path = args.answers.as_deref().unwrap();
        let mut session = InteractiveSession::new(corpus);
        session.replay(&answers).map_err(|e| CliError::data(path, e))?;
        (corpus, stats) = session.finish(exec).map_err(|e| CliError::data(path, e))?;
    }

    let mut summary = format!(
        "{} sentences, {} words, {} ambiguous",
        corpus.sentences.len(),
        stats.total_words,
        stats.ambiguous_words()
    );
    if let (Some(gold), Some(path)) = (gold, &args.gold) {
        let acc = score_against_gold(&corpus.sentences, &gold).map_err(|e| CliError::data(path, e))?;
        stats.accuracy_vs_gold = Some(acc.fraction());
        summary.push_str(&format!(
            ", accuracy {:.4} ({}/{})",
            acc.fraction(),
            acc.correct,
            acc.total
        ));
    }
    if !corpus.unknowns.is_empty() {
        summary.push_str(&format!(", {} unknown", corpus.unknowns.len()));
    }

    write_file(&args.output, &write_tsv(&corpus.sentences))?;
    if let Some(path) = &args.stats {
        write_file(path, &stats.to_json())?;
    }
    if let Some(path) = &args.trace {
        write_file(path, &write_trace(&corpus.trace))?;
    }
    if let Some(path) = &args.unknown_log {
        write_file(path, &write_unknowns(&corpus.unknowns))?;
    }
    info!("{summary}");
    Ok(summary)
}

/// Parses and lints a rule file; the summary lists every warning.
pub fn check_rules(path: &Path) -> Result<String, CliError> {
    let rules = load_rules(path)?;
    let compose = rules.iter().filter(|r| r.compose_group().is_some()).count();
    let mut out = format!(
        "{}: {} rules ({} compose, {} constraint), {} warnings\n",
        path.display(),
        rules.len(),
        compose,
        rules.len() - compose,
        rules.warnings.len()
    );
    for w in &rules.warnings {
        out.push_str("warning: ");
        out.push_str(w);
        out.push('\n');
    }
    Ok(out)
}
