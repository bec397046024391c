use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate record id {id:?} at line {line}")]
    DuplicateId { id: String, line: usize },

    #[error("record {record:?}, field {field}: {message}")]
    Schema {
        record: String,
        field: String,
        message: String,
    },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("record {0:?} is not tokenized")]
    Untokenized(String),

    #[error("n-gram order must be at least 1")]
    ZeroOrder,

    #[error("embedding dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("embedding row {row} is a zero vector")]
    ZeroVector { row: usize },

    #[error("embedding matrix has no rows")]
    EmptyEmbedding,

    #[error("transport weights must be non-negative and sum to 1 (got sum {sum})")]
    UnnormalizedWeights { sum: f64 },

    #[error("weight count {weights} does not match token count {tokens}")]
    WeightCount { weights: usize, tokens: usize },

    #[error("field {field} has no embeddings for model {model:?}")]
    MissingEmbeddings { field: String, model: String },

    #[error("field {field} has no entity annotation")]
    MissingEntities { field: String },

    #[error("metric {metric} cannot be computed: record {record:?}: {reason}")]
    MissingAnnotation {
        metric: String,
        record: String,
        reason: String,
    },

    #[error("system {0:?} has no hypotheses in the corpus")]
    EmptySystem(String),

    #[error("record {record:?} has no hypothesis for system {system:?}")]
    MissingHypothesis { system: String, record: String },

    #[error("worker pool: {0}")]
    Pool(String),

    #[error("no systems to evaluate")]
    NoSystems,

    #[error("no metrics requested")]
    NoMetrics,

    #[error("unknown metric {0:?}")]
    UnknownMetric(String),

    #[error("unknown report format {0:?} (expected markdown, csv or json)")]
    UnknownFormat(String),

    #[error("malformed report: {0}")]
    Report(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
