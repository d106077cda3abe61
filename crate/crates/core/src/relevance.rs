//! Relevance-weight ranking used to pre-filter a large document pool down to
//! the most threat-relevant candidates.
//!
//! A term's relevance weight is `ln(1 + n_t / (N - n_t + 1))`; a document's
//! weight sums term weights scaled by occurrence counts. Terms absent from
//! the training corpus weigh 0, and the `+1` in the denominator keeps the
//! expression finite when a term occurs in every training document.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::ingest::Document;
use crate::textprep::{normalize, StopwordSet};
use crate::vectorspace::Vocabulary;

/// Relevance weight of a single term against the training vocabulary.
pub fn term_weight(term: &str, vocab: &Vocabulary) -> f64 {
    let n_t = vocab.doc_freq(term) as f64;
    let n = vocab.corpus_size() as f64;
    (1.0 + n_t / (n - n_t + 1.0)).ln()
}

/// Relevance weight of a document: occurrence-count-weighted sum of term
/// weights over its distinct terms, accumulated in sorted term order so the
/// result is deterministic.
pub fn doc_weight<T: AsRef<str>>(doc: &[T], vocab: &Vocabulary) -> f64 {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for token in doc {
        *counts.entry(token.as_ref()).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .map(|(term, count)| count as f64 * term_weight(term, vocab))
        .sum()
}

/// Precomputed per-term weights for every vocabulary term.
#[derive(Debug, Clone)]
pub struct RelevanceTable {
    weights: HashMap<String, f64>,
}

impl RelevanceTable {
    pub fn from_vocabulary(vocab: &Vocabulary) -> RelevanceTable {
        let weights = vocab
            .iter()
            .map(|(_, stat)| (stat.term.clone(), term_weight(&stat.term, vocab)))
            .collect();
        RelevanceTable { weights }
    }

    /// Weight of a term; 0 for terms absent from the training corpus.
    pub fn weight(&self, term: &str) -> f64 {
        self.weights.get(term).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// A document id with its relevance weight, as emitted by ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedDoc {
    pub id: String,
    pub relevance_weight: f64,
}

/// The `min(k, |docs|)` documents with the highest relevance weight,
/// descending; equal weights are ordered by id ascending.
pub fn top_k(
    docs: &[Document],
    stopwords: &StopwordSet,
    vocab: &Vocabulary,
    k: usize,
) -> Vec<RankedDoc> {
    let mut ranked: Vec<RankedDoc> = docs
        .iter()
        .map(|doc| RankedDoc {
            id: doc.id.clone(),
            relevance_weight: doc_weight(&normalize(&doc.text, stopwords), vocab),
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.relevance_weight
            .partial_cmp(&a.relevance_weight)
            .expect("relevance weights are finite")
            .then_with(|| a.id.cmp(&b.id))
    });
    ranked.truncate(k);
    ranked
}
