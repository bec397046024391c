//! Command-line front end: `evaluate`, `filter`, `stats` and `render`.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use titleval_core::corpus::{DEFAULT_MIN_ABSTRACT_TOKENS, DEFAULT_MIN_TITLE_TOKENS};
use titleval_core::report::{parse_json, ReportFormat};
use titleval_core::{
    corpus_stats, evaluate, filter_corpus, load_corpus, render, write_corpus, EntityConfig, Metric, MetricConfig,
    MoverWeighting, TargetScope,
};

#[derive(Debug, Parser)]
#[command(name = "titleval", version, about = "Score generated paper titles against references")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score every system in a corpus and write a report table.
    Evaluate(EvaluateArgs),
    /// Keep records whose abstract and title meet minimum token counts.
    Filter(FilterArgs),
    /// Reference-title length statistics.
    Stats(StatsArgs),
    /// Re-render a JSON report in another format.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Markdown,
    Csv,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Markdown => ReportFormat::Markdown,
            Format::Csv => ReportFormat::Csv,
            Format::Json => ReportFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Scope {
    EntityWords,
    TitleWords,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Corpus in JSON Lines format.
    corpus: PathBuf,
    /// Comma-separated systems; defaults to every system in the corpus.
    #[arg(long, value_delimiter = ',')]
    systems: Option<Vec<String>>,
    /// Comma-separated metrics: rouge, meteor, moverscore, bertscore, scibertscore, entity.
    #[arg(long, value_delimiter = ',', default_value = "rouge,meteor")]
    metrics: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "markdown")]
    format: Format,
    /// Keep only the first N hypothesis tokens.
    #[arg(long, value_name = "N")]
    truncate_hyp: Option<usize>,
    /// Disable stemming for ROUGE.
    #[arg(long)]
    no_stem: bool,
    /// Uniform instead of IDF token weights for MoverScore.
    #[arg(long)]
    uniform_weights: bool,
    /// Drop stopwords from entity words before matching.
    #[arg(long)]
    entity_stopwords: bool,
    #[arg(long, value_enum, default_value = "entity-words")]
    entity_scope: Scope,
    #[arg(long)]
    bert_model: Option<String>,
    #[arg(long)]
    scibert_model: Option<String>,
    #[arg(long)]
    mover_model: Option<String>,
    /// Worker threads; 0 uses all cores. Does not affect results.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Debug, Args)]
struct FilterArgs {
    corpus: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MIN_ABSTRACT_TOKENS)]
    min_abstract: usize,
    #[arg(long, default_value_t = DEFAULT_MIN_TITLE_TOKENS)]
    min_title: usize,
    /// Output corpus; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StatsFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct StatsArgs {
    corpus: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: StatsFormat,
}

#[derive(Debug, Args)]
struct RenderArgs {
    /// Report previously written with `--format json`.
    report: PathBuf,
    #[arg(long, value_enum, default_value = "markdown")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Runs the CLI and returns the process exit code. Errors are reported on
/// stderr as a single line.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            if code == 0 {
                let _ = e.print();
            } else {
                let text = e.to_string();
                eprintln!("{}", text.lines().next().unwrap_or("invalid arguments"));
            }
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("titleval: {msg}");
            1
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Evaluate(args) => run_evaluate(args),
        Command::Filter(args) => run_filter(args),
        Command::Stats(args) => run_stats(args),
        Command::Render(args) => run_render(args),
    }
}

fn metric_config(args: &EvaluateArgs) -> Result<MetricConfig> {
    let metrics: Vec<Metric> = args
        .metrics
        .iter()
        .filter(|m| !m.trim().is_empty())
        .map(|m| m.trim().parse::<Metric>())
        .collect::<titleval_core::Result<_>>()?;
    if metrics.is_empty() {
        bail!("no metrics requested");
    }
    if args.truncate_hyp == Some(0) {
        bail!("--truncate-hyp must be at least 1");
    }
    let defaults = MetricConfig::default();
    Ok(MetricConfig {
        metrics,
        systems: args.systems.clone(),
        rouge_stemming: !args.no_stem,
        mover_weighting: if args.uniform_weights {
            MoverWeighting::Uniform
        } else {
            MoverWeighting::Idf
        },
        bert_model: args.bert_model.clone().unwrap_or(defaults.bert_model),
        scibert_model: args.scibert_model.clone().unwrap_or(defaults.scibert_model),
        mover_model: args.mover_model.clone().unwrap_or(defaults.mover_model),
        entity: EntityConfig {
            drop_stopwords: args.entity_stopwords,
            target_scope: match args.entity_scope {
                Scope::EntityWords => TargetScope::EntityWords,
                Scope::TitleWords => TargetScope::TitleWords,
            },
        },
        truncate_hyp: args.truncate_hyp,
        workers: args.workers,
    })
}

fn run_evaluate(args: EvaluateArgs) -> Result<()> {
    let config = metric_config(&args)?;
    let corpus = load_corpus(&args.corpus)?;
    let report = evaluate(&corpus, &config)?;
    let bytes = render(&report, args.format.into())?;
    emit(args.out.as_deref(), &bytes)
}

fn run_filter(args: FilterArgs) -> Result<()> {
    let corpus = load_corpus(&args.corpus)?;
    let kept = filter_corpus(&corpus, args.min_abstract, args.min_title)?;
    let mut bytes = Vec::new();
    write_corpus(&kept, &mut bytes)?;
    emit(args.out.as_deref(), &bytes)?;
    eprintln!("kept {} of {} records", kept.len(), corpus.len());
    Ok(())
}

fn run_stats(args: StatsArgs) -> Result<()> {
    let corpus = load_corpus(&args.corpus)?;
    let stats = corpus_stats(&corpus)?;
    let text = match args.format {
        StatsFormat::Json => serde_json::to_string_pretty(&stats)? + "\n",
        StatsFormat::Text => {
            let mut s = format!(
                "records: {}\nmean title tokens: {:.2}\ntitles <= 15 tokens: {:.2}%\nmean abstract tokens: {:.2}\n",
                stats.record_count, stats.mean_title_tokens, stats.pct_titles_le_15, stats.mean_abstract_tokens
            );
            s.push_str("title length histogram:\n");
            for (len, count) in &stats.title_length_histogram {
                s.push_str(&format!("  {len:>3}  {count}\n"));
            }
            s
        }
    };
    emit(None, text.as_bytes())
}

fn run_render(args: RenderArgs) -> Result<()> {
    let bytes = fs::read(&args.report).with_context(|| format!("failed to read {}", args.report.display()))?;
    let report = parse_json(&bytes)?;
    let out = render(&report, args.format.into())?;
    emit(args.out.as_deref(), &out)
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("failed to write {}", p.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}
