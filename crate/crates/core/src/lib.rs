//! Evaluation engine for machine-generated research-paper titles.
//!
//! Lexical overlap (ROUGE-1/2/L, METEOR), embedding similarity (greedy
//! matching as in BERTScore, MoverScore over an exact Word Mover's Distance)
//! and entity-level factual consistency, with corpus filtering, statistics and
//! per-system report tables.

pub mod corpus;
pub mod embedding;
pub mod entity;
pub mod error;
pub mod lexical;
pub mod report;
pub mod textprep;
pub mod transport;

pub use corpus::{
    corpus_stats, filter_corpus, load_corpus, normalize_whitespace, read_corpus, write_corpus, AnnotatedField,
    CorpusStats, EvalRecord,
};
pub use embedding::{build_idf, cosine_matrix, greedy_match_score, mover_score, wmd, EmbeddingMatrix, IdfTable};
pub use entity::{
    aggregate_entity_scores, entity_match, entity_scores, heuristic_entities, intersect_nonunique, intersect_unique,
    EntityConfig, EntityMention, EntityScores, TargetScope,
};
pub use error::{Error, Result};
pub use lexical::{lcs_length, meteor_align, meteor_score, rouge_l, rouge_n, Alignment, PrfScore};
pub use report::{evaluate, render, Metric, MetricConfig, MetricReport, MoverWeighting, ReportFormat};
pub use textprep::{ngram_counts, stem, tokenize, NGramMultiset, TokenizedText};
pub use transport::TransportPlan;
