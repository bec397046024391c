//! Embedding-based similarity over per-token vectors supplied with the corpus:
//! greedy maximum-cosine matching (BERTScore family) and MoverScore built on
//! an exact Word Mover's Distance.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::AnnotatedField;
use crate::error::{Error, Result};
use crate::lexical::PrfScore;
use crate::textprep::TokenizedText;
use crate::transport::{self, TransportPlan};

/// One vector per token, produced by the encoder named in `model`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingMatrix {
    pub model: String,
    pub dim: usize,
    pub vectors: Vec<Vec<f32>>,
}

impl EmbeddingMatrix {
    pub fn new(model: impl Into<String>, vectors: Vec<Vec<f32>>) -> Self {
        let dim = vectors.first().map_or(0, Vec::len);
        Self {
            model: model.into(),
            dim,
            vectors,
        }
    }

    pub fn rows(&self) -> usize {
        self.vectors.len()
    }

    pub(crate) fn validate(&self) -> std::result::Result<(), String> {
        if self.dim == 0 {
            return Err("embedding dim must be positive".into());
        }
        if let Some((row, v)) = self.vectors.iter().enumerate().find(|(_, v)| v.len() != self.dim) {
            return Err(format!("row {row} has {} values, expected {}", v.len(), self.dim));
        }
        if let Some(row) = self.vectors.iter().position(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(format!("row {row} has a non-finite value"));
        }
        Ok(())
    }

    fn unit_rows(&self) -> Result<Vec<Vec<f64>>> {
        self.vectors
            .iter()
            .enumerate()
            .map(|(row, v)| {
                let norm = v.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return Err(Error::ZeroVector { row });
                }
                Ok(v.iter().map(|&x| f64::from(x) / norm).collect())
            })
            .collect()
    }
}

/// `cos(a_i, b_j)` for every row pair, clamped to [-1, 1].
pub fn cosine_matrix(a: &EmbeddingMatrix, b: &EmbeddingMatrix) -> Result<Vec<Vec<f64>>> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    let ua = a.unit_rows()?;
    let ub = b.unit_rows()?;
    Ok(ua
        .iter()
        .map(|x| {
            ub.iter()
                .map(|y| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>().clamp(-1.0, 1.0))
                .collect()
        })
        .collect())
}

/// Greedy matching: each token takes its best cosine on the other side.
/// Precision averages over hypothesis tokens, recall over reference tokens.
/// No IDF weighting and no baseline rescaling.
pub fn greedy_match_score(hyp: &EmbeddingMatrix, reference: &EmbeddingMatrix) -> Result<PrfScore> {
    if hyp.rows() == 0 || reference.rows() == 0 {
        return Err(Error::EmptyEmbedding);
    }
    let sim = cosine_matrix(hyp, reference)?;
    let precision = sim
        .iter()
        .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .sum::<f64>()
        / hyp.rows() as f64;
    let recall = (0..reference.rows())
        .map(|j| sim.iter().map(|row| row[j]).fold(f64::NEG_INFINITY, f64::max))
        .sum::<f64>()
        / reference.rows() as f64;
    Ok(PrfScore::from_pr(precision, recall))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdfTable {
    pub weights: HashMap<String, f64>,
    pub default_weight: f64,
}

impl IdfTable {
    /// Every token weighs 1.
    pub fn uniform() -> Self {
        Self {
            weights: HashMap::new(),
            default_weight: 1.0,
        }
    }

    pub fn weight(&self, token: &str) -> f64 {
        self.weights.get(token).copied().unwrap_or(self.default_weight)
    }
}

/// `idf(w) = ln(1 + N / (1 + df(w)))` over `N` texts; unseen tokens get
/// `ln(1 + N)`.
pub fn build_idf<'a, I>(texts: I) -> Result<IdfTable>
where
    I: IntoIterator<Item = &'a TokenizedText>,
{
    let mut df: HashMap<&str, usize> = HashMap::new();
    let mut n = 0usize;
    for text in texts {
        n += 1;
        let distinct: HashSet<&str> = text.tokens().iter().map(String::as_str).collect();
        for token in distinct {
            *df.entry(token).or_insert(0) += 1;
        }
    }
    if n == 0 {
        return Err(Error::EmptyCorpus);
    }
    let total = n as f64;
    Ok(IdfTable {
        weights: df
            .into_iter()
            .map(|(w, d)| (w.to_string(), (1.0 + total / (1.0 + d as f64)).ln()))
            .collect(),
        default_weight: (1.0 + total).ln(),
    })
}

const WEIGHT_SUM_TOL: f64 = 1e-9;

fn check_distribution(weights: &[f64], rows: usize) -> Result<()> {
    if weights.len() != rows {
        return Err(Error::WeightCount {
            weights: weights.len(),
            tokens: rows,
        });
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL || weights.iter().any(|&w| w.is_nan() || w < 0.0) {
        return Err(Error::UnnormalizedWeights { sum });
    }
    Ok(())
}

/// Word Mover's Distance: exact minimum-cost transport of the hypothesis
/// token mass onto the reference token mass under ground cost `1 - cos`.
pub fn wmd(
    hyp: &EmbeddingMatrix,
    hyp_weights: &[f64],
    reference: &EmbeddingMatrix,
    ref_weights: &[f64],
) -> Result<TransportPlan> {
    check_distribution(hyp_weights, hyp.rows())?;
    check_distribution(ref_weights, reference.rows())?;
    let cost: Vec<Vec<f64>> = cosine_matrix(hyp, reference)?
        .into_iter()
        .map(|row| row.into_iter().map(|c| 1.0 - c).collect())
        .collect();
    transport::solve(hyp_weights, ref_weights, &cost)
}

fn normalized_weights(tokens: &[String], idf: &IdfTable) -> Vec<f64> {
    let raw: Vec<f64> = tokens.iter().map(|t| idf.weight(t)).collect();
    let total: f64 = raw.iter().sum();
    if total > 0.0 {
        raw.iter().map(|w| w / total).collect()
    } else {
        vec![1.0 / tokens.len() as f64; tokens.len()]
    }
}

fn field_embedding<'a>(field: &'a AnnotatedField, name: &str, model: &str) -> Result<&'a EmbeddingMatrix> {
    field.embedding(model).ok_or_else(|| Error::MissingEmbeddings {
        field: name.to_string(),
        model: model.to_string(),
    })
}

/// Unigram MoverScore: IDF-weighted WMD turned into a similarity,
/// `clamp(1 - cost, 0, 1)`.
pub fn mover_score(
    hyp: &AnnotatedField,
    reference: &AnnotatedField,
    idf: &IdfTable,
    model: &str,
) -> Result<f64> {
    let h = field_embedding(hyp, "hypothesis", model)?;
    let r = field_embedding(reference, "reference_title", model)?;
    let h_tokens = hyp.token_strings().ok_or_else(|| Error::Untokenized("hypothesis".into()))?;
    let r_tokens = reference
        .token_strings()
        .ok_or_else(|| Error::Untokenized("reference_title".into()))?;
    if h_tokens.is_empty() || r_tokens.is_empty() {
        return Err(Error::EmptyEmbedding);
    }
    let plan = wmd(
        h,
        &normalized_weights(h_tokens, idf),
        r,
        &normalized_weights(r_tokens, idf),
    )?;
    Ok((1.0 - plan.cost).clamp(0.0, 1.0))
}
