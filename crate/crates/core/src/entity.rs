//! Entity-level factual consistency between a generated title (h), the
//! author-written title (t) and the abstract (s).
//!
//! An entity matches a text when any one of its words occurs in that text's
//! word set. Intersections are counted per mention (non-unique, NU) or over
//! mentions deduplicated by their word sequence (unique, U).

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::corpus::AnnotatedField;
use crate::error::{Error, Result};
use crate::lexical::harmonic_mean;
use crate::report::{macro_average, AggregateCell};
use crate::textprep::{is_punctuation, normalize_words, Span};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityMention {
    pub surface: String,
    /// Lowercased words with punctuation removed; never empty.
    pub words: Vec<String>,
    /// Token range `[start, end)` in the owning field.
    pub span: Span,
}

impl EntityMention {
    /// Words come from the surface string; if it has none (a surface of bare
    /// punctuation), from the covered tokens instead.
    pub fn new(surface: String, span: Span, covered_tokens: &[String]) -> Option<Self> {
        let mut words = normalize_words(&surface);
        if words.is_empty() {
            words = covered_tokens
                .iter()
                .filter(|t| !is_punctuation(t))
                .cloned()
                .collect();
        }
        (!words.is_empty()).then_some(Self { surface, words, span })
    }

    pub fn from_tokens(tokens: &[String], span: Span) -> Self {
        Self {
            surface: tokens.join(" "),
            words: tokens.iter().filter(|t| !is_punctuation(t)).cloned().collect(),
            span,
        }
    }
}

/// Which words of the target-side title an entity is matched against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetScope {
    /// Words of the other title's entity mentions.
    #[default]
    EntityWords,
    /// Every word of the other title.
    TitleWords,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EntityConfig {
    /// Drop stopwords from entity word lists before matching.
    pub drop_stopwords: bool,
    pub target_scope: TargetScope,
}

const STOPWORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any", "are",
    "as", "at", "be", "because", "been", "before", "being", "below", "between", "both", "but",
    "by", "can", "did", "do", "does", "doing", "down", "during", "each", "few", "for", "from",
    "further", "had", "has", "have", "having", "he", "her", "here", "hers", "him", "his", "how",
    "i", "if", "in", "into", "is", "it", "its", "itself", "just", "me", "more", "most", "my",
    "no", "nor", "not", "now", "of", "off", "on", "once", "only", "or", "other", "our", "ours",
    "out", "over", "own", "same", "she", "should", "so", "some", "such", "than", "that", "the",
    "their", "theirs", "them", "then", "there", "these", "they", "this", "those", "through", "to",
    "too", "under", "until", "up", "very", "via", "was", "we", "were", "what", "when", "where",
    "which", "while", "who", "whom", "why", "will", "with", "you", "your", "yours",
];

pub fn is_stopword(word: &str) -> bool {
    STOPWORDS.binary_search(&word).is_ok()
}

pub fn entity_match(entity: &EntityMention, target_words: &HashSet<String>) -> bool {
    entity.words.iter().any(|w| target_words.contains(w))
}

pub fn intersect_nonunique(mentions: &[EntityMention], target_words: &HashSet<String>) -> usize {
    mentions.iter().filter(|e| entity_match(e, target_words)).count()
}

/// Mentions deduplicated by word sequence, first occurrence kept.
pub fn unique_mentions(mentions: &[EntityMention]) -> Vec<&EntityMention> {
    let mut seen: HashSet<&[String]> = HashSet::new();
    mentions
        .iter()
        .filter(|e| seen.insert(e.words.as_slice()))
        .collect()
}

pub fn intersect_unique(mentions: &[EntityMention], target_words: &HashSet<String>) -> usize {
    unique_mentions(mentions)
        .into_iter()
        .filter(|e| entity_match(e, target_words))
        .count()
}

/// Per-record entity scores; `None` where a denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EntityScores {
    pub prec_s_nu: Option<f64>,
    pub prec_s_u: Option<f64>,
    pub prec_t_nu: Option<f64>,
    pub recall_t_nu: Option<f64>,
    pub f1_t_nu: Option<f64>,
    pub prec_t_u: Option<f64>,
    pub recall_t_u: Option<f64>,
    pub f1_t_u: Option<f64>,
}

impl EntityScores {
    pub const COLUMNS: [&'static str; 8] = [
        "prec_s^NU",
        "prec_s^U",
        "prec_t^NU",
        "recall_t^NU",
        "F1_t^NU",
        "prec_t^U",
        "recall_t^U",
        "F1_t^U",
    ];

    /// Values in [`Self::COLUMNS`] order.
    pub fn values(&self) -> [Option<f64>; 8] {
        [
            self.prec_s_nu,
            self.prec_s_u,
            self.prec_t_nu,
            self.recall_t_nu,
            self.f1_t_nu,
            self.prec_t_u,
            self.recall_t_u,
            self.f1_t_u,
        ]
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

fn f1(p: Option<f64>, r: Option<f64>) -> Option<f64> {
    Some(harmonic_mean(p?, r?))
}

fn prepared(mentions: &[EntityMention], config: &EntityConfig) -> Vec<EntityMention> {
    if !config.drop_stopwords {
        return mentions.to_vec();
    }
    mentions
        .iter()
        .map(|e| {
            let content: Vec<String> = e.words.iter().filter(|w| !is_stopword(w)).cloned().collect();
            if content.is_empty() {
                e.clone()
            } else {
                EntityMention {
                    words: content,
                    ..e.clone()
                }
            }
        })
        .collect()
}

fn text_words(field: &AnnotatedField) -> HashSet<String> {
    field
        .token_strings()
        .unwrap_or_default()
        .iter()
        .filter(|t| !is_punctuation(t))
        .cloned()
        .collect()
}

fn entity_words(mentions: &[EntityMention]) -> HashSet<String> {
    mentions.iter().flat_map(|e| e.words.iter().cloned()).collect()
}

fn mentions_of<'a>(field: &'a AnnotatedField, name: &str) -> Result<&'a [EntityMention]> {
    field
        .entities
        .as_deref()
        .ok_or_else(|| Error::MissingEntities { field: name.to_string() })
}

/// Scores hypothesis `h` against reference title `t` and abstract `s`.
///
/// `h` and `t` must carry entity annotations (possibly empty); `s` only
/// contributes its word set.
pub fn entity_scores(
    h: &AnnotatedField,
    t: &AnnotatedField,
    s: &AnnotatedField,
    config: &EntityConfig,
) -> Result<EntityScores> {
    let h_mentions = prepared(mentions_of(h, "hypothesis")?, config);
    let t_mentions = prepared(mentions_of(t, "reference_title")?, config);
    if s.tokens.is_none() {
        return Err(Error::Untokenized("abstract".into()));
    }

    let s_words = text_words(s);
    let (h_words, t_words) = match config.target_scope {
        TargetScope::EntityWords => (entity_words(&h_mentions), entity_words(&t_mentions)),
        TargetScope::TitleWords => (text_words(h), text_words(t)),
    };

    let n_h = h_mentions.len();
    let n_t = t_mentions.len();
    let n_h_u = unique_mentions(&h_mentions).len();
    let n_t_u = unique_mentions(&t_mentions).len();

    let prec_t_nu = ratio(intersect_nonunique(&h_mentions, &t_words), n_h);
    let recall_t_nu = ratio(intersect_nonunique(&t_mentions, &h_words), n_t);
    let prec_t_u = ratio(intersect_unique(&h_mentions, &t_words), n_h_u);
    let recall_t_u = ratio(intersect_unique(&t_mentions, &h_words), n_t_u);

    Ok(EntityScores {
        prec_s_nu: ratio(intersect_nonunique(&h_mentions, &s_words), n_h),
        prec_s_u: ratio(intersect_unique(&h_mentions, &s_words), n_h_u),
        prec_t_nu,
        recall_t_nu,
        f1_t_nu: f1(prec_t_nu, recall_t_nu),
        prec_t_u,
        recall_t_u,
        f1_t_u: f1(prec_t_u, recall_t_u),
    })
}

/// Macro-average ×100 of each field over the records where it is defined.
pub fn aggregate_entity_scores(per_record: &[EntityScores]) -> [AggregateCell; 8] {
    std::array::from_fn(|k| {
        let column: Vec<Option<f64>> = per_record.iter().map(|s| s.values()[k]).collect();
        macro_average(&column)
    })
}

/// Fallback annotator: maximal runs of tokens that carry an uppercase letter
/// in the raw text and are not stopwords. A rough stand-in for a real NER
/// model, useful for smoke tests only.
pub fn heuristic_entities(field: &AnnotatedField) -> Vec<EntityMention> {
    let Some(tokens) = &field.tokens else {
        return Vec::new();
    };
    let qualifies = |k: usize| {
        let (start, end) = tokens.offsets()[k];
        let surface = &field.raw_text[start..end];
        let token = &tokens.tokens()[k];
        !is_punctuation(token) && !is_stopword(token) && surface.chars().any(char::is_uppercase)
    };
    let mut out = Vec::new();
    let mut k = 0;
    while k < tokens.len() {
        if !qualifies(k) {
            k += 1;
            continue;
        }
        let start = k;
        while k < tokens.len() && qualifies(k) {
            k += 1;
        }
        let surface = field.raw_text[tokens.offsets()[start].0..tokens.offsets()[k - 1].1].to_string();
        if let Some(e) = EntityMention::new(surface, (start, k), &tokens.tokens()[start..k]) {
            out.push(e);
        }
    }
    out
}
