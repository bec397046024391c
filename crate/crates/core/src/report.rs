//! End-to-end evaluation and per-system report tables.
//!
//! Every metric is scored per record, then macro-averaged over the corpus and
//! multiplied by 100. Records where a score is undefined (entity metrics with
//! a zero denominator) are skipped for that cell and counted.

use std::fmt::Write as _;
use std::str::FromStr;

use indexmap::IndexSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{AnnotatedField, EvalRecord};
use crate::embedding::{build_idf, greedy_match_score, mover_score, IdfTable};
use crate::entity::{entity_scores, EntityConfig, EntityScores};
use crate::error::{Error, Result};
use crate::lexical::{meteor_score, rouge_l, rouge_n, stem_all};

/// A requested metric family. Families expand to one or more report columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Rouge,
    Meteor,
    MoverScore,
    BertScore,
    SciBertScore,
    Entity,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Rouge,
        Metric::Meteor,
        Metric::MoverScore,
        Metric::BertScore,
        Metric::SciBertScore,
        Metric::Entity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Rouge => "rouge",
            Metric::Meteor => "meteor",
            Metric::MoverScore => "moverscore",
            Metric::BertScore => "bertscore",
            Metric::SciBertScore => "scibertscore",
            Metric::Entity => "entity",
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Metric::Rouge => &["ROUGE-1", "ROUGE-2", "ROUGE-L"],
            Metric::Meteor => &["METEOR"],
            Metric::MoverScore => &["MoverScore"],
            Metric::BertScore => &["BERTScore"],
            Metric::SciBertScore => &["SciBERTScore"],
            Metric::Entity => &EntityScores::COLUMNS,
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == lower)
            .ok_or_else(|| Error::UnknownMetric(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoverWeighting {
    #[default]
    Idf,
    Uniform,
}

/// Everything that affects scores. `workers` only affects scheduling and is
/// excluded from the fingerprint and the serialized form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub metrics: Vec<Metric>,
    pub systems: Option<Vec<String>>,
    pub rouge_stemming: bool,
    pub mover_weighting: MoverWeighting,
    pub bert_model: String,
    pub scibert_model: String,
    pub mover_model: String,
    pub entity: EntityConfig,
    pub truncate_hyp: Option<usize>,
    #[serde(skip)]
    pub workers: usize,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            metrics: vec![Metric::Rouge, Metric::Meteor],
            systems: None,
            rouge_stemming: true,
            mover_weighting: MoverWeighting::Idf,
            bert_model: "bert-base-uncased".into(),
            scibert_model: "allenai/scibert_scivocab_uncased".into(),
            mover_model: "bert-base-uncased".into(),
            entity: EntityConfig::default(),
            truncate_hyp: None,
            workers: 0,
        }
    }
}

impl MetricConfig {
    /// Requested metrics in canonical column order, deduplicated.
    pub fn metric_order(&self) -> Vec<Metric> {
        let mut ms = self.metrics.clone();
        ms.sort();
        ms.dedup();
        ms
    }

    pub fn columns(&self) -> Vec<String> {
        self.metric_order()
            .into_iter()
            .flat_map(|m| m.columns().iter().map(|c| c.to_string()))
            .collect()
    }

    /// Hex SHA-256 prefix over every score-affecting setting.
    pub fn fingerprint(&self) -> String {
        let mut canonical = self.clone();
        canonical.metrics = self.metric_order();
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        hex::encode(&Sha256::digest(&bytes)[..8])
    }
}

/// One aggregated cell: the macro-average ×100, or `None` when no record
/// defines the score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateCell {
    pub value: Option<f64>,
    pub skipped: usize,
}

/// Mean ×100 of the defined values. Values are summed in sorted order so the
/// result does not depend on record order.
pub fn macro_average(values: &[Option<f64>]) -> AggregateCell {
    let mut defined: Vec<f64> = values.iter().flatten().copied().collect();
    let skipped = values.len() - defined.len();
    if defined.is_empty() {
        return AggregateCell { value: None, skipped };
    }
    defined.sort_by(f64::total_cmp);
    let sum: f64 = defined.iter().sum();
    AggregateCell {
        value: Some(100.0 * sum / defined.len() as f64),
        skipped,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub systems: Vec<String>,
    pub columns: Vec<String>,
    /// `values[system][column]` on the ×100 scale; `None` is not available.
    pub values: Vec<Vec<Option<f64>>>,
    pub skip_counts: Vec<Vec<usize>>,
    pub record_count: usize,
    pub config: Option<MetricConfig>,
    pub config_fingerprint: String,
}

impl MetricReport {
    /// A report from precomputed values, e.g. published tables.
    pub fn from_values(systems: Vec<String>, columns: Vec<String>, values: Vec<Vec<Option<f64>>>) -> Result<Self> {
        let report = Self {
            skip_counts: vec![vec![0; columns.len()]; systems.len()],
            systems,
            columns,
            values,
            record_count: 0,
            config: None,
            config_fingerprint: String::new(),
        };
        report.check_shape()?;
        Ok(report)
    }

    pub fn check_shape(&self) -> Result<()> {
        let rows_ok = self.values.len() == self.systems.len() && self.skip_counts.len() == self.systems.len();
        let cols_ok = self
            .values
            .iter()
            .all(|r| r.len() == self.columns.len())
            && self.skip_counts.iter().all(|r| r.len() == self.columns.len());
        if rows_ok && cols_ok {
            Ok(())
        } else {
            Err(Error::Report("value matrix does not match systems x columns".into()))
        }
    }

    pub fn value(&self, system: &str, column: &str) -> Option<f64> {
        let i = self.systems.iter().position(|s| s == system)?;
        let j = self.columns.iter().position(|c| c == column)?;
        self.values[i][j]
    }
}

fn systems_of(corpus: &[EvalRecord], config: &MetricConfig) -> Result<Vec<String>> {
    let systems: Vec<String> = match &config.systems {
        Some(list) => list.iter().cloned().collect::<IndexSet<_>>().into_iter().collect(),
        // Sorted so that the default order does not depend on record order.
        None => corpus
            .iter()
            .flat_map(|r| r.hypotheses.keys().cloned())
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect(),
    };
    if systems.is_empty() {
        return Err(Error::NoSystems);
    }
    for system in &systems {
        if !corpus.iter().any(|r| r.hypotheses.contains_key(system)) {
            return Err(Error::EmptySystem(system.clone()));
        }
        if let Some(r) = corpus.iter().find(|r| !r.hypotheses.contains_key(system)) {
            return Err(Error::MissingHypothesis {
                system: system.clone(),
                record: r.id.clone(),
            });
        }
    }
    Ok(systems)
}

fn missing(metric: Metric, record: &EvalRecord, reason: String) -> Error {
    Error::MissingAnnotation {
        metric: metric.name().to_string(),
        record: record.id.clone(),
        reason,
    }
}

/// Finds the first record (in corpus order) lacking an annotation a
/// requested metric needs.
fn check_annotations(corpus: &[EvalRecord], systems: &[String], config: &MetricConfig) -> Result<()> {
    for metric in config.metric_order() {
        for record in corpus {
            let mut fields: Vec<(String, &AnnotatedField)> = vec![("reference_title".into(), &record.reference_title)];
            fields.extend(systems.iter().map(|s| (format!("hypotheses.{s}"), &record.hypotheses[s])));
            for (name, field) in &fields {
                if field.tokens.is_none() {
                    return Err(missing(metric, record, format!("{name} is not tokenized")));
                }
                let model = match metric {
                    Metric::BertScore => Some(&config.bert_model),
                    Metric::SciBertScore => Some(&config.scibert_model),
                    Metric::MoverScore => Some(&config.mover_model),
                    _ => None,
                };
                if let Some(model) = model {
                    match field.embedding(model) {
                        None => {
                            return Err(missing(metric, record, format!("{name} has no embeddings for model {model:?}")))
                        }
                        Some(e) if e.rows() == 0 => {
                            return Err(missing(metric, record, format!("{name} has an empty embedding block")))
                        }
                        Some(_) => {}
                    }
                }
                if metric == Metric::Entity && field.entities.is_none() {
                    return Err(missing(metric, record, format!("{name} has no entity annotation")));
                }
            }
            if metric == Metric::Entity && record.source.tokens.is_none() {
                return Err(missing(metric, record, "abstract is not tokenized".into()));
            }
        }
    }
    Ok(())
}

struct Scorer<'a> {
    config: &'a MetricConfig,
    metrics: Vec<Metric>,
    idf: IdfTable,
}

impl Scorer<'_> {
    /// Per-column scores in [0, 1] for one (record, system) pair.
    fn score(&self, record: &EvalRecord, hyp: &AnnotatedField) -> Result<Vec<Option<f64>>> {
        let truncated;
        let hyp = match self.config.truncate_hyp {
            Some(k) => {
                truncated = hyp.truncated(k);
                &truncated
            }
            None => hyp,
        };
        let reference = &record.reference_title;
        let h_tokens = hyp.token_strings().unwrap_or_default();
        let r_tokens = reference.token_strings().unwrap_or_default();
        let wrap = |metric: Metric, e: Error| missing(metric, record, e.to_string());

        let mut out = Vec::new();
        for &metric in &self.metrics {
            match metric {
                Metric::Rouge => {
                    let (h, r) = if self.config.rouge_stemming {
                        (stem_all(h_tokens), stem_all(r_tokens))
                    } else {
                        (h_tokens.to_vec(), r_tokens.to_vec())
                    };
                    out.push(Some(rouge_n(&h, &r, 1)?.f1));
                    out.push(Some(rouge_n(&h, &r, 2)?.f1));
                    out.push(Some(rouge_l(&h, &r).f1));
                }
                Metric::Meteor => out.push(Some(meteor_score(h_tokens, r_tokens))),
                Metric::MoverScore => {
                    let s = mover_score(hyp, reference, &self.idf, &self.config.mover_model)
                        .map_err(|e| wrap(metric, e))?;
                    out.push(Some(s));
                }
                Metric::BertScore | Metric::SciBertScore => {
                    let model = if metric == Metric::BertScore {
                        &self.config.bert_model
                    } else {
                        &self.config.scibert_model
                    };
                    let (Some(h), Some(r)) = (hyp.embedding(model), reference.embedding(model)) else {
                        return Err(missing(metric, record, format!("no embeddings for model {model:?}")));
                    };
                    out.push(Some(greedy_match_score(h, r).map_err(|e| wrap(metric, e))?.f1));
                }
                Metric::Entity => {
                    let s = entity_scores(hyp, reference, &record.source, &self.config.entity)
                        .map_err(|e| wrap(metric, e))?;
                    out.extend(s.values());
                }
            }
        }
        Ok(out)
    }
}

/// Scores every (record, system) pair and aggregates per system.
/// The result is independent of record order and worker count.
pub fn evaluate(corpus: &[EvalRecord], config: &MetricConfig) -> Result<MetricReport> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let metrics = config.metric_order();
    if metrics.is_empty() {
        return Err(Error::NoMetrics);
    }
    let systems = systems_of(corpus, config)?;
    check_annotations(corpus, &systems, config)?;

    let idf = match config.mover_weighting {
        MoverWeighting::Idf if metrics.contains(&Metric::MoverScore) => {
            build_idf(corpus.iter().filter_map(|r| r.reference_title.tokens.as_ref()))?
        }
        _ => IdfTable::uniform(),
    };
    let scorer = Scorer {
        config,
        metrics,
        idf,
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Pool(e.to_string()))?;
    let per_record: Vec<Result<Vec<Vec<Option<f64>>>>> = pool.install(|| {
        corpus
            .par_iter()
            .map(|record| {
                systems
                    .iter()
                    .map(|s| scorer.score(record, &record.hypotheses[s]))
                    .collect()
            })
            .collect()
    });
    let per_record = per_record.into_iter().collect::<Result<Vec<_>>>()?;

    let columns = config.columns();
    let mut values = Vec::with_capacity(systems.len());
    let mut skip_counts = Vec::with_capacity(systems.len());
    for s in 0..systems.len() {
        let cells: Vec<AggregateCell> = (0..columns.len())
            .map(|c| {
                let column: Vec<Option<f64>> = per_record.iter().map(|r| r[s][c]).collect();
                macro_average(&column)
            })
            .collect();
        values.push(cells.iter().map(|c| c.value).collect());
        skip_counts.push(cells.iter().map(|c| c.skipped).collect());
    }

    Ok(MetricReport {
        systems,
        columns,
        values,
        skip_counts,
        record_count: corpus.len(),
        config: Some(config.clone()),
        config_fingerprint: config.fingerprint(),
    })
}

// ---------------------------------------------------------------------------
// Rendering

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(Self::Markdown),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(Error::UnknownFormat(s.to_string())),
        }
    }
}

fn two_decimals(v: f64) -> String {
    format!("{v:.2}")
}

/// Rows per column whose rendered value equals the column maximum.
pub fn column_maxima(report: &MetricReport) -> Vec<Vec<usize>> {
    (0..report.columns.len())
        .map(|c| {
            let rounded: Vec<Option<f64>> = report
                .values
                .iter()
                .map(|row| row[c].map(|v| two_decimals(v).parse::<f64>().expect("formatted float")))
                .collect();
            let max = rounded.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
            rounded
                .iter()
                .enumerate()
                .filter(|(_, v)| **v == Some(max))
                .map(|(i, _)| i)
                .collect()
        })
        .collect()
}

pub fn render(report: &MetricReport, format: ReportFormat) -> Result<Vec<u8>> {
    report.check_shape()?;
    match format {
        ReportFormat::Markdown => Ok(render_markdown(report).into_bytes()),
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report)?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

fn render_markdown(report: &MetricReport) -> String {
    let maxima = column_maxima(report);
    let mut out = String::new();
    out.push_str("| Model Name |");
    for c in &report.columns {
        let _ = write!(out, " {c} |");
    }
    out.push_str("\n|---|");
    out.push_str(&"---:|".repeat(report.columns.len()));
    out.push('\n');
    for (i, (system, row)) in report.systems.iter().zip(&report.values).enumerate() {
        let _ = write!(out, "| {system} |");
        for (c, v) in row.iter().enumerate() {
            let cell = match v {
                None => "n/a".to_string(),
                Some(v) if maxima[c].contains(&i) => format!("**{}**", two_decimals(*v)),
                Some(v) => two_decimals(*v),
            };
            let _ = write!(out, " {cell} |");
        }
        out.push('\n');
    }

    let skipped: Vec<String> = report
        .systems
        .iter()
        .zip(&report.skip_counts)
        .flat_map(|(s, row)| {
            row.iter()
                .zip(&report.columns)
                .filter(|(n, _)| **n > 0)
                .map(move |(n, c)| format!("{s}/{c}: {n}"))
        })
        .collect();
    if report.record_count > 0 {
        let _ = write!(out, "\nRecords: {}", report.record_count);
    }
    if !skipped.is_empty() {
        let _ = write!(out, "\nSkipped (undefined) records: {}", skipped.join(", "));
    }
    if !report.config_fingerprint.is_empty() {
        let _ = write!(out, "\nConfig fingerprint: `{}`", report.config_fingerprint);
    }
    if !out.ends_with('\n') {
        out.push('\n');
    }
    out
}

fn render_csv(report: &MetricReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Report(e.to_string());
    let mut header = vec!["system".to_string()];
    header.extend(report.columns.iter().cloned());
    w.write_record(&header).map_err(csv_err)?;
    for (system, row) in report.systems.iter().zip(&report.values) {
        let mut rec = vec![system.clone()];
        rec.extend(row.iter().map(|v| v.map(two_decimals).unwrap_or_default()));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Report(e.to_string()))
}

/// Reads a CSV rendering back into a values-only report.
pub fn parse_csv(bytes: &[u8]) -> Result<MetricReport> {
    let mut r = csv::Reader::from_reader(bytes);
    let header = r.headers().map_err(|e| Error::Report(e.to_string()))?.clone();
    let columns: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut systems = Vec::new();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Report(e.to_string()))?;
        systems.push(rec.get(0).unwrap_or_default().to_string());
        let row = rec
            .iter()
            .skip(1)
            .map(|cell| {
                if cell.is_empty() {
                    Ok(None)
                } else {
                    cell.parse::<f64>()
                        .map(Some)
                        .map_err(|_| Error::Report(format!("bad number {cell:?}")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        values.push(row);
    }
    MetricReport::from_values(systems, columns, values)
}

/// Parses a JSON rendering.
pub fn parse_json(bytes: &[u8]) -> Result<MetricReport> {
    let report: MetricReport = serde_json::from_slice(bytes)?;
    report.check_shape()?;
    Ok(report)
}
