//! Tokenization, stemming, n-gram extraction and truncation shared by all metrics.
//!
//! Tokens are lowercased. Offsets are byte spans into the text the tokens were
//! produced from, always on `char` boundaries, so `&raw[start..end]` recovers
//! the surface form of each token.

use std::collections::HashMap;
use std::sync::OnceLock;

use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-open byte span `[start, end)` into a raw text.
pub type Span = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TokenizedText {
    tokens: Vec<String>,
    offsets: Vec<Span>,
}

impl TokenizedText {
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn offsets(&self) -> &[Span] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Aligns externally produced tokens (e.g. from an annotation pipeline)
    /// against `raw`, matching case-insensitively and left to right.
    ///
    /// Returns `None` when some token cannot be located in order.
    pub fn align(raw: &str, tokens: &[String]) -> Option<Self> {
        let mut cursor = 0;
        let mut offsets = Vec::with_capacity(tokens.len());
        let mut lowered = Vec::with_capacity(tokens.len());
        for token in tokens {
            let needle: Vec<char> = token.chars().flat_map(char::to_lowercase).collect();
            if needle.is_empty() {
                return None;
            }
            let span = find_caseless(raw, cursor, &needle)?;
            cursor = span.1;
            offsets.push(span);
            lowered.push(needle.into_iter().collect());
        }
        Some(Self {
            tokens: lowered,
            offsets,
        })
    }

    /// Keeps only the first `max_tokens` tokens.
    pub fn truncate(&self, max_tokens: usize) -> Self {
        let keep = self.tokens.len().min(max_tokens);
        Self {
            tokens: self.tokens[..keep].to_vec(),
            offsets: self.offsets[..keep].to_vec(),
        }
    }
}

fn find_caseless(raw: &str, from: usize, needle: &[char]) -> Option<Span> {
    for (rel, _) in raw[from..].char_indices() {
        let start = from + rel;
        let mut matched = 0;
        'scan: for (i, c) in raw[start..].char_indices() {
            for lc in c.to_lowercase() {
                if needle.get(matched) != Some(&lc) {
                    break 'scan;
                }
                matched += 1;
            }
            if matched == needle.len() {
                return Some((start, start + i + c.len_utf8()));
            }
        }
    }
    None
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Splits on Unicode whitespace, detaches leading and trailing punctuation as
/// one token per character, and lowercases. Inner punctuation (hyphens,
/// apostrophes, dots) stays inside the word.
pub fn tokenize(text: &str) -> TokenizedText {
    let mut out = TokenizedText::default();
    let mut push = |start: usize, end: usize| {
        out.tokens.push(text[start..end].to_lowercase());
        out.offsets.push((start, end));
    };

    let mut chunk_start = None;
    let bounds = text
        .char_indices()
        .map(|(i, c)| (i, c.is_whitespace()))
        .chain(std::iter::once((text.len(), true)));
    for (i, ws) in bounds {
        match (chunk_start, ws) {
            (None, false) => chunk_start = Some(i),
            (Some(start), true) => {
                split_chunk(text, start, i, &mut push);
                chunk_start = None;
            }
            _ => {}
        }
    }
    out
}

fn split_chunk(text: &str, start: usize, end: usize, push: &mut impl FnMut(usize, usize)) {
    let chunk = &text[start..end];
    let first = chunk.char_indices().find(|&(_, c)| is_word_char(c));
    let last = chunk.char_indices().rev().find(|&(_, c)| is_word_char(c));
    let (core_start, core_end) = match (first, last) {
        (Some((f, _)), Some((l, c))) => (start + f, start + l + c.len_utf8()),
        _ => {
            for (i, c) in chunk.char_indices() {
                push(start + i, start + i + c.len_utf8());
            }
            return;
        }
    };
    for (i, c) in text[start..core_start].char_indices() {
        push(start + i, start + i + c.len_utf8());
    }
    push(core_start, core_end);
    for (i, c) in text[core_end..end].char_indices() {
        push(core_end + i, core_end + i + c.len_utf8());
    }
}

/// True when a token carries no letter or digit.
pub fn is_punctuation(token: &str) -> bool {
    !token.chars().any(is_word_char)
}

/// Normalized words of a phrase: tokenized, lowercased, punctuation-only
/// tokens dropped.
pub fn normalize_words(text: &str) -> Vec<String> {
    tokenize(text)
        .tokens
        .into_iter()
        .filter(|t| !is_punctuation(t))
        .collect()
}

fn stemmer() -> &'static Stemmer {
    static STEMMER: OnceLock<Stemmer> = OnceLock::new();
    STEMMER.get_or_init(|| Stemmer::create(Algorithm::English))
}

/// Porter-family (Snowball English) stem of a lowercase token.
pub fn stem(token: &str) -> String {
    stemmer().stem(token).into_owned()
}

/// Multiset of contiguous n-grams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGramMultiset {
    n: usize,
    counts: HashMap<Vec<String>, usize>,
}

impl NGramMultiset {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &HashMap<Vec<String>, usize> {
        &self.counts
    }

    pub fn get(&self, gram: &[&str]) -> usize {
        let key: Vec<String> = gram.iter().map(|s| s.to_string()).collect();
        self.counts.get(&key).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Σ over shared n-grams of the smaller count.
    pub fn overlap(&self, other: &NGramMultiset) -> usize {
        let (small, large) = if self.counts.len() <= other.counts.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .counts
            .iter()
            .map(|(gram, &c)| c.min(large.counts.get(gram).copied().unwrap_or(0)))
            .sum()
    }
}

pub fn ngram_counts(tokens: &[String], n: usize) -> Result<NGramMultiset> {
    if n == 0 {
        return Err(Error::ZeroOrder);
    }
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram.to_vec()).or_insert(0) += 1;
        }
    }
    Ok(NGramMultiset { n, counts })
}
