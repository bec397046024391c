//! Abstract/title corpora: loading the line-delimited JSON interchange format,
//! whitespace normalization, length filtering and title-length statistics.
//!
//! One record per line:
//!
//! ```json
//! {"id": "p1",
//!  "abstract": {"text": "...", "tokens": ["..."], "entities": [[0, 2, "Graph Nets"]]},
//!  "reference_title": {"text": "...", "embeddings": {"model": "bert", "dim": 2, "vectors": [[0.1, 0.2]]}},
//!  "hypotheses": {"pegasus": {"text": "..."}}}
//! ```
//!
//! `tokens`, `entities` and `embeddings` are optional. Missing tokens are
//! produced by [`tokenize`]; entities and embeddings are never invented.
//! A title may carry one embedding block or a list of blocks (one per encoder).

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingMatrix;
use crate::entity::EntityMention;
use crate::error::{Error, Result};
use crate::textprep::{tokenize, TokenizedText};

/// Collapses every whitespace run to one space and trims both ends.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// A text field with its optional annotation layers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnnotatedField {
    pub raw_text: String,
    pub tokens: Option<TokenizedText>,
    pub entities: Option<Vec<EntityMention>>,
    pub embeddings: Vec<EmbeddingMatrix>,
}

impl AnnotatedField {
    /// A field tokenized by the engine, with no entity or embedding layers.
    pub fn from_text(text: &str) -> Self {
        let raw_text = normalize_whitespace(text);
        Self {
            tokens: Some(tokenize(&raw_text)),
            raw_text,
            entities: None,
            embeddings: Vec::new(),
        }
    }

    pub fn token_count(&self) -> Option<usize> {
        self.tokens.as_ref().map(TokenizedText::len)
    }

    pub fn token_strings(&self) -> Option<&[String]> {
        self.tokens.as_ref().map(TokenizedText::tokens)
    }

    pub fn embedding(&self, model: &str) -> Option<&EmbeddingMatrix> {
        self.embeddings.iter().find(|e| e.model == model)
    }

    /// Keeps the first `max_tokens` tokens along with the matching embedding
    /// rows. Entity mentions starting past the cut are dropped; mentions
    /// crossing it are clipped.
    pub fn truncated(&self, max_tokens: usize) -> Self {
        let Some(tokens) = &self.tokens else {
            return self.clone();
        };
        let tokens = tokens.truncate(max_tokens);
        let keep = tokens.len();
        let entities = self.entities.as_ref().map(|ents| {
            ents.iter()
                .filter(|e| e.span.0 < keep)
                .map(|e| {
                    if e.span.1 <= keep {
                        e.clone()
                    } else {
                        EntityMention::from_tokens(&tokens.tokens()[e.span.0..keep], (e.span.0, keep))
                    }
                })
                .filter(|e| !e.words.is_empty())
                .collect()
        });
        let embeddings = self
            .embeddings
            .iter()
            .map(|e| EmbeddingMatrix {
                model: e.model.clone(),
                dim: e.dim,
                vectors: e.vectors[..keep.min(e.vectors.len())].to_vec(),
            })
            .collect();
        Self {
            raw_text: self.raw_text.clone(),
            tokens: Some(tokens),
            entities,
            embeddings,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub id: String,
    /// The abstract (the generator's input).
    pub source: AnnotatedField,
    pub reference_title: AnnotatedField,
    pub hypotheses: IndexMap<String, AnnotatedField>,
}

// ---------------------------------------------------------------------------
// Wire format

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireRecord {
    id: String,
    #[serde(rename = "abstract")]
    source: WireField,
    reference_title: WireField,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    hypotheses: IndexMap<String, WireField>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireField {
    text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tokens: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    entities: Option<Vec<(usize, usize, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    embeddings: Option<WireEmbeddings>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum WireEmbeddings {
    One(EmbeddingMatrix),
    Many(Vec<EmbeddingMatrix>),
}

fn schema_error(record: &str, field: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        record: record.to_string(),
        field: field.to_string(),
        message: message.into(),
    }
}

impl WireField {
    fn into_field(self, record: &str, field: &str, allow_embeddings: bool) -> Result<AnnotatedField> {
        let raw_text = normalize_whitespace(&self.text);
        let tokens = match self.tokens {
            None => tokenize(&raw_text),
            Some(given) => TokenizedText::align(&raw_text, &given).ok_or_else(|| {
                schema_error(record, field, "tokens do not align with text")
            })?,
        };

        let entities = self
            .entities
            .map(|spans| {
                spans
                    .into_iter()
                    .map(|(start, end, surface)| {
                        if start >= end || end > tokens.len() {
                            return Err(schema_error(
                                record,
                                field,
                                format!("entity span [{start}, {end}) outside {} tokens", tokens.len()),
                            ));
                        }
                        EntityMention::new(surface, (start, end), &tokens.tokens()[start..end])
                            .ok_or_else(|| schema_error(record, field, "entity has no words"))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;

        let embeddings = match self.embeddings {
            None => Vec::new(),
            Some(WireEmbeddings::One(e)) => vec![e],
            Some(WireEmbeddings::Many(es)) => es,
        };
        if !embeddings.is_empty() && !allow_embeddings {
            return Err(schema_error(record, field, "embeddings are only accepted on titles"));
        }
        let mut seen = HashSet::new();
        for e in &embeddings {
            let where_ = format!("{field}.embeddings[{}]", e.model);
            if !seen.insert(e.model.as_str()) {
                return Err(schema_error(record, &where_, "duplicate model tag"));
            }
            e.validate().map_err(|msg| schema_error(record, &where_, msg))?;
            if e.vectors.len() != tokens.len() {
                return Err(schema_error(
                    record,
                    &where_,
                    format!("{} embedding rows for {} tokens", e.vectors.len(), tokens.len()),
                ));
            }
        }

        Ok(AnnotatedField {
            raw_text,
            tokens: Some(tokens),
            entities,
            embeddings,
        })
    }

    fn from_field(field: &AnnotatedField) -> Self {
        let embeddings = match field.embeddings.len() {
            0 => None,
            1 => Some(WireEmbeddings::One(field.embeddings[0].clone())),
            _ => Some(WireEmbeddings::Many(field.embeddings.clone())),
        };
        Self {
            text: field.raw_text.clone(),
            tokens: field.tokens.as_ref().map(|t| t.tokens().to_vec()),
            entities: field.entities.as_ref().map(|ents| {
                ents.iter()
                    .map(|e| (e.span.0, e.span.1, e.surface.clone()))
                    .collect()
            }),
            embeddings,
        }
    }
}

impl WireRecord {
    fn into_record(self) -> Result<EvalRecord> {
        let id = self.id;
        if id.is_empty() {
            return Err(schema_error("", "id", "record id must be non-empty"));
        }
        let source = self.source.into_field(&id, "abstract", false)?;
        let reference_title = self.reference_title.into_field(&id, "reference_title", true)?;
        let hypotheses = self
            .hypotheses
            .into_iter()
            .map(|(system, f)| {
                let field = f.into_field(&id, &format!("hypotheses.{system}"), true)?;
                Ok((system, field))
            })
            .collect::<Result<_>>()?;
        Ok(EvalRecord {
            id,
            source,
            reference_title,
            hypotheses,
        })
    }

    fn from_record(record: &EvalRecord) -> Self {
        Self {
            id: record.id.clone(),
            source: WireField::from_field(&record.source),
            reference_title: WireField::from_field(&record.reference_title),
            hypotheses: record
                .hypotheses
                .iter()
                .map(|(k, v)| (k.clone(), WireField::from_field(v)))
                .collect(),
        }
    }
}

/// Parses one record per non-blank line. Ids must be unique.
pub fn read_corpus<R: BufRead>(reader: R) -> Result<Vec<EvalRecord>> {
    let mut records = Vec::new();
    let mut ids = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let wire: WireRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if !ids.insert(wire.id.clone()) {
            return Err(Error::DuplicateId {
                id: wire.id,
                line: line_no,
            });
        }
        records.push(wire.into_record()?);
    }
    Ok(records)
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<EvalRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_corpus(BufReader::new(file))
}

pub fn write_corpus<W: Write>(records: &[EvalRecord], mut out: W) -> Result<()> {
    for record in records {
        serde_json::to_writer(&mut out, &WireRecord::from_record(record))?;
        out.write_all(b"\n").map_err(|source| Error::Io {
            path: "<output>".into(),
            source,
        })?;
    }
    Ok(())
}

fn title_and_abstract_len(record: &EvalRecord) -> Result<(usize, usize)> {
    let title = record.reference_title.token_count();
    let source = record.source.token_count();
    match (title, source) {
        (Some(t), Some(s)) => Ok((t, s)),
        _ => Err(Error::Untokenized(record.id.clone())),
    }
}

/// Records whose abstract has at least `min_abstract_tokens` tokens and whose
/// reference title has at least `min_title_tokens`, in input order.
pub fn filter_corpus(
    records: &[EvalRecord],
    min_abstract_tokens: usize,
    min_title_tokens: usize,
) -> Result<Vec<EvalRecord>> {
    let mut kept = Vec::new();
    for record in records {
        let (title, source) = title_and_abstract_len(record)?;
        if source >= min_abstract_tokens && title >= min_title_tokens {
            kept.push(record.clone());
        }
    }
    Ok(kept)
}

pub const DEFAULT_MIN_ABSTRACT_TOKENS: usize = 20;
pub const DEFAULT_MIN_TITLE_TOKENS: usize = 3;
pub const SHORT_TITLE_TOKENS: usize = 15;

/// Reference-title statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub record_count: usize,
    pub mean_title_tokens: f64,
    /// Share of titles with at most 15 tokens, in percent.
    pub pct_titles_le_15: f64,
    pub title_length_histogram: BTreeMap<usize, usize>,
    pub mean_abstract_tokens: f64,
}

pub fn corpus_stats(records: &[EvalRecord]) -> Result<CorpusStats> {
    if records.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut histogram = BTreeMap::new();
    let mut title_total = 0usize;
    let mut abstract_total = 0usize;
    let mut short = 0usize;
    for record in records {
        let (title, source) = title_and_abstract_len(record)?;
        *histogram.entry(title).or_insert(0) += 1;
        title_total += title;
        abstract_total += source;
        if title <= SHORT_TITLE_TOKENS {
            short += 1;
        }
    }
    let n = records.len() as f64;
    Ok(CorpusStats {
        record_count: records.len(),
        mean_title_tokens: title_total as f64 / n,
        pct_titles_le_15: 100.0 * short as f64 / n,
        title_length_histogram: histogram,
        mean_abstract_tokens: abstract_total as f64 / n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn words(n: usize) -> String {
        (0..n).map(|i| format!("w{i}")).collect::<Vec<_>>().join(" ")
    }

    fn record(id: &str, abstract_len: usize, title_len: usize) -> EvalRecord {
        EvalRecord {
            id: id.into(),
            source: AnnotatedField::from_text(&words(abstract_len)),
            reference_title: AnnotatedField::from_text(&words(title_len)),
            hypotheses: IndexMap::new(),
        }
    }

    #[test]
    fn whitespace_examples() {
        assert_eq!(normalize_whitespace("a  b\n\tc "), "a b c");
        assert_eq!(normalize_whitespace(""), "");
        assert_eq!(normalize_whitespace("abc"), "abc");
    }

    #[test]
    fn reads_valid_lines() {
        let data = r#"{"id":"p1","abstract":{"text":"An abstract."},"reference_title":{"text":"A title"}}

{"id":"p2","abstract":{"text":"Another  one"},"reference_title":{"text":"T2"},"hypotheses":{"m":{"text":"x"}}}
{"id":"p3","abstract":{"text":"x"},"reference_title":{"text":"y","tokens":["Y"]}}
"#;
        let records = read_corpus(data.as_bytes()).unwrap();
        assert_eq!(records.len(), 3);
        assert_eq!(records[1].source.raw_text, "Another one");
        assert_eq!(records[1].hypotheses.len(), 1);
        assert_eq!(records[2].reference_title.token_strings().unwrap(), ["y"]);
    }

    #[test]
    fn duplicate_id_is_rejected() {
        let data = "{\"id\":\"p1\",\"abstract\":{\"text\":\"a\"},\"reference_title\":{\"text\":\"b\"}}\n\
                    {\"id\":\"p1\",\"abstract\":{\"text\":\"a\"},\"reference_title\":{\"text\":\"b\"}}\n";
        match read_corpus(data.as_bytes()) {
            Err(Error::DuplicateId { id, line }) => assert_eq!((id.as_str(), line), ("p1", 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_line_names_line_number() {
        let data = "{\"id\":\"p1\",\"abstract\":{\"text\":\"a\"},\"reference_title\":{\"text\":\"b\"}}\nnot json\n";
        assert!(matches!(read_corpus(data.as_bytes()), Err(Error::Parse { line: 2, .. })));
        let unknown = "{\"id\":\"p1\",\"abstract\":{\"text\":\"a\"},\"reference_title\":{\"text\":\"b\"},\"extra\":1}\n";
        assert!(matches!(read_corpus(unknown.as_bytes()), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn embedding_row_mismatch_names_field() {
        let rows = vec![vec![1.0f32, 0.0]; 4];
        let line = serde_json::json!({
            "id": "p1",
            "abstract": {"text": "abstract"},
            "reference_title": {"text": "one two three four five",
                "embeddings": {"model": "bert", "dim": 2, "vectors": rows}},
        });
        let err = read_corpus(line.to_string().as_bytes()).unwrap_err();
        match &err {
            Error::Schema { record, field, .. } => {
                assert_eq!(record, "p1");
                assert_eq!(field, "reference_title.embeddings[bert]");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn entity_spans_are_validated() {
        let line = serde_json::json!({
            "id": "p1",
            "abstract": {"text": "graph nets", "entities": [[0, 3, "graph nets"]]},
            "reference_title": {"text": "t"},
        });
        assert!(matches!(
            read_corpus(line.to_string().as_bytes()),
            Err(Error::Schema { .. })
        ));
    }

    #[test]
    fn filter_thresholds_are_inclusive() {
        let records = vec![record("a", 19, 5), record("b", 20, 3), record("c", 100, 2)];
        let kept = filter_corpus(&records, 20, 3).unwrap();
        let ids: Vec<&str> = kept.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["b"]);
    }

    #[test]
    fn filter_requires_tokens() {
        let mut r = record("a", 30, 5);
        r.source.tokens = None;
        assert!(matches!(filter_corpus(&[r], 20, 3), Err(Error::Untokenized(id)) if id == "a"));
    }

    #[test]
    fn stats_examples() {
        let s = corpus_stats(&[record("a", 30, 10), record("b", 30, 12), record("c", 30, 14)]).unwrap();
        assert_eq!(s.mean_title_tokens, 12.0);
        assert_eq!(s.pct_titles_le_15, 100.0);
        let s = corpus_stats(&[record("a", 30, 16), record("b", 30, 16)]).unwrap();
        assert_eq!(s.pct_titles_le_15, 0.0);
        let s = corpus_stats(&[record("a", 25, 11)]).unwrap();
        assert_eq!(s.mean_title_tokens, 11.0);
        assert_eq!(s.mean_abstract_tokens, 25.0);
        assert!(matches!(corpus_stats(&[]), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn truncated_field_keeps_layers_consistent() {
        let line = serde_json::json!({
            "id": "p1",
            "abstract": {"text": "a"},
            "reference_title": {"text": "Deep Graph Nets for Low Resource NMT",
                "entities": [[1, 3, "Graph Nets"], [5, 7, "Resource NMT"]],
                "embeddings": {"model": "m", "dim": 1, "vectors": [[1.0],[2.0],[3.0],[4.0],[5.0],[6.0],[7.0]]}},
        });
        let rec = read_corpus(line.to_string().as_bytes()).unwrap().remove(0);
        let cut = rec.reference_title.truncated(6);
        assert_eq!(cut.token_count(), Some(6));
        assert_eq!(cut.embeddings[0].vectors.len(), 6);
        let ents = cut.entities.unwrap();
        assert_eq!(ents.len(), 2);
        assert_eq!(ents[1].span, (5, 6));
        assert_eq!(ents[1].words, ["resource"]);
    }

    fn arb_record(id: usize) -> impl Strategy<Value = EvalRecord> {
        (1usize..40, 1usize..25).prop_map(move |(a, t)| record(&format!("r{id}"), a, t))
    }

    proptest! {
        #[test]
        fn filter_is_idempotent_subsequence(
            records in (0usize..20).prop_flat_map(|n| {
                (0..n).map(arb_record).collect::<Vec<_>>()
            }),
            min_a in 0usize..40,
            min_t in 0usize..25,
        ) {
            let once = filter_corpus(&records, min_a, min_t).unwrap();
            let twice = filter_corpus(&once, min_a, min_t).unwrap();
            prop_assert_eq!(&once, &twice);
            let mut it = records.iter();
            for r in &once {
                prop_assert!(it.any(|x| x == r));
            }
        }

        #[test]
        fn histogram_reproduces_mean(lengths in proptest::collection::vec(1usize..30, 1..50)) {
            let records: Vec<_> = lengths.iter().enumerate().map(|(i, &t)| record(&i.to_string(), 20, t)).collect();
            let s = corpus_stats(&records).unwrap();
            let count: usize = s.title_length_histogram.values().sum();
            prop_assert_eq!(count, s.record_count);
            let mean = s.title_length_histogram.iter().map(|(l, c)| (l * c) as f64).sum::<f64>() / count as f64;
            prop_assert!((mean - s.mean_title_tokens).abs() < 1e-9);
        }
    }
}
