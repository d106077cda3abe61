//! TF-IDF vector space: vocabulary fitting, sparse embeddings and cosine
//! similarity.
//!
//! Term weights are `f(t,d) * ln(N / n_t)` where `f(t,d)` is the occurrence
//! count of term `t` in document `d`, `N` the number of training documents
//! and `n_t` the number of training documents containing `t`. The natural
//! logarithm is used throughout the crate.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Term statistics fitted on a training corpus. Indices are assigned in
/// lexicographic term order so fitted models serialize reproducibly.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<TermStat>,
    lookup: HashMap<String, usize>,
    corpus_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermStat {
    pub term: String,
    pub doc_freq: usize,
}

impl Vocabulary {
    /// Fit on a corpus of token lists. Document frequency counts documents,
    /// not occurrences.
    pub fn fit<T: AsRef<[String]>>(corpus: &[T]) -> Result<Vocabulary> {
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut doc_freq: BTreeMap<&str, usize> = BTreeMap::new();
        for doc in corpus {
            let mut seen: Vec<&str> = doc.as_ref().iter().map(String::as_str).collect();
            seen.sort_unstable();
            seen.dedup();
            for term in seen {
                *doc_freq.entry(term).or_insert(0) += 1;
            }
        }
        let terms: Vec<TermStat> = doc_freq
            .into_iter()
            .map(|(term, df)| TermStat {
                term: term.to_owned(),
                doc_freq: df,
            })
            .collect();
        let lookup = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.term.clone(), i))
            .collect();
        Ok(Vocabulary {
            terms,
            lookup,
            corpus_size: corpus.len(),
        })
    }

    /// Number of distinct terms V.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of training documents N.
    pub fn corpus_size(&self) -> usize {
        self.corpus_size
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.lookup.get(term).copied()
    }

    /// Document frequency n_t, or 0 for out-of-vocabulary terms.
    pub fn doc_freq(&self, term: &str) -> usize {
        self.index_of(term).map_or(0, |i| self.terms[i].doc_freq)
    }

    pub fn term_at(&self, index: usize) -> Option<&TermStat> {
        self.terms.get(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &TermStat)> {
        self.terms.iter().enumerate()
    }

    /// Inverse document frequency `ln(N / n_t)` for an in-vocabulary index.
    fn idf(&self, index: usize) -> f64 {
        (self.corpus_size as f64 / self.terms[index].doc_freq as f64).ln()
    }
}

/// Serialized form of [`Vocabulary`]:
/// `{"corpus_size": N, "terms": [{"term", "index", "doc_freq"}, ...]}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct VocabularyFile {
    pub corpus_size: usize,
    pub terms: Vec<TermRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TermRecord {
    pub term: String,
    pub index: usize,
    pub doc_freq: usize,
}

impl From<&Vocabulary> for VocabularyFile {
    fn from(vocab: &Vocabulary) -> Self {
        VocabularyFile {
            corpus_size: vocab.corpus_size,
            terms: vocab
                .iter()
                .map(|(index, t)| TermRecord {
                    term: t.term.clone(),
                    index,
                    doc_freq: t.doc_freq,
                })
                .collect(),
        }
    }
}

impl TryFrom<VocabularyFile> for Vocabulary {
    type Error = Error;

    fn try_from(file: VocabularyFile) -> Result<Vocabulary> {
        if file.corpus_size == 0 {
            return Err(Error::ModelFormat("vocabulary corpus_size is 0".into()));
        }
        let mut terms = vec![None; file.terms.len()];
        for rec in file.terms {
            if rec.doc_freq == 0 || rec.doc_freq > file.corpus_size {
                return Err(Error::ModelFormat(format!(
                    "term {:?} has doc_freq {} outside 1..={}",
                    rec.term, rec.doc_freq, file.corpus_size
                )));
            }
            let slot = terms.get_mut(rec.index).ok_or_else(|| {
                Error::ModelFormat(format!("term index {} out of range", rec.index))
            })?;
            if slot.is_some() {
                return Err(Error::ModelFormat(format!(
                    "duplicate term index {}",
                    rec.index
                )));
            }
            *slot = Some(TermStat {
                term: rec.term,
                doc_freq: rec.doc_freq,
            });
        }
        let terms: Vec<TermStat> = terms
            .into_iter()
            .collect::<Option<_>>()
            .ok_or_else(|| Error::ModelFormat("vocabulary indices have gaps".into()))?;
        let lookup: HashMap<String, usize> = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.term.clone(), i))
            .collect();
        if lookup.len() != terms.len() {
            return Err(Error::ModelFormat("duplicate vocabulary term".into()));
        }
        Ok(Vocabulary {
            terms,
            lookup,
            corpus_size: file.corpus_size,
        })
    }
}

/// Sparse vector: (index, weight) entries with strictly increasing indices
/// and nonzero finite weights. Serializes as `[[index, weight], ...]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    /// Build from entries, validating the invariants.
    pub fn from_entries(entries: Vec<(usize, f64)>) -> Result<SparseVector> {
        for window in entries.windows(2) {
            if window[0].0 >= window[1].0 {
                return Err(Error::InvalidArgument(
                    "sparse vector indices must be strictly increasing".into(),
                ));
            }
        }
        for &(_, w) in &entries {
            if w == 0.0 || !w.is_finite() {
                return Err(Error::InvalidArgument(
                    "sparse vector weights must be nonzero and finite".into(),
                ));
            }
        }
        Ok(SparseVector { entries })
    }

    pub fn zero() -> SparseVector {
        SparseVector {
            entries: Vec::new(),
        }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Dot product over the intersection of supports, in ascending index order.
    pub fn dot(&self, other: &SparseVector) -> f64 {
        let mut sum = 0.0;
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() && j < other.entries.len() {
            let (ia, wa) = self.entries[i];
            let (ib, wb) = other.entries[j];
            match ia.cmp(&ib) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    sum += wa * wb;
                    i += 1;
                    j += 1;
                }
            }
        }
        sum
    }

    /// Dot product against a dense vector; out-of-range indices contribute 0.
    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        let mut sum = 0.0;
        for &(idx, w) in &self.entries {
            if let Some(&d) = dense.get(idx) {
                sum += w * d;
            }
        }
        sum
    }

    pub fn norm_squared(&self) -> f64 {
        let mut sum = 0.0;
        for &(_, w) in &self.entries {
            sum += w * w;
        }
        sum
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Squared Euclidean distance, walking the union of supports in
    /// ascending index order. Exactly 0 for identical vectors.
    pub fn distance_squared(&self, other: &SparseVector) -> f64 {
        let mut sum = 0.0;
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() || j < other.entries.len() {
            let a = self.entries.get(i);
            let b = other.entries.get(j);
            let d = match (a, b) {
                (Some(&(ia, wa)), Some(&(ib, wb))) => match ia.cmp(&ib) {
                    std::cmp::Ordering::Less => {
                        i += 1;
                        wa
                    }
                    std::cmp::Ordering::Greater => {
                        j += 1;
                        -wb
                    }
                    std::cmp::Ordering::Equal => {
                        i += 1;
                        j += 1;
                        wa - wb
                    }
                },
                (Some(&(_, wa)), None) => {
                    i += 1;
                    wa
                }
                (None, Some(&(_, wb))) => {
                    j += 1;
                    -wb
                }
                (None, None) => unreachable!(),
            };
            sum += d * d;
        }
        sum
    }
}

impl<'de> Deserialize<'de> for SparseVector {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let entries = Vec::<(usize, f64)>::deserialize(deserializer)?;
        SparseVector::from_entries(entries).map_err(serde::de::Error::custom)
    }
}

/// Embed a token list as a TF-IDF sparse vector. Out-of-vocabulary terms
/// contribute nothing; terms present in every training document get weight 0
/// and are omitted.
pub fn embed<T: AsRef<str>>(doc: &[T], vocab: &Vocabulary) -> SparseVector {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for token in doc {
        if let Some(idx) = vocab.index_of(token.as_ref()) {
            *counts.entry(idx).or_insert(0) += 1;
        }
    }
    let entries: Vec<(usize, f64)> = counts
        .into_iter()
        .filter_map(|(idx, count)| {
            let weight = count as f64 * vocab.idf(idx);
            (weight != 0.0).then_some((idx, weight))
        })
        .collect();
    SparseVector { entries }
}

/// Cosine similarity `a.b / (|a| |b|)`, clamped into [-1, 1]. A zero-norm
/// operand yields 0.
pub fn cosine(a: &SparseVector, b: &SparseVector) -> f64 {
    let norm_a = a.norm();
    let norm_b = b.norm();
    if norm_a == 0.0 || norm_b == 0.0 {
        return 0.0;
    }
    (a.dot(b) / (norm_a * norm_b)).clamp(-1.0, 1.0)
}
