//! Link threat-relevant documents to the most similar CVE descriptions.
//!
//! The index fits its own TF-IDF vocabulary on the linking corpus (which
//! usually spans more years than the classifier's training feed) and answers
//! queries by exhaustive cosine scan.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ingest::{CveEntry, Document};
use crate::textprep::{normalize, StopwordSet};
use crate::vectorspace::{cosine, embed, SparseVector, Vocabulary};

/// Embedded CVE corpus ready for similarity queries.
#[derive(Debug, Clone)]
pub struct LinkIndex {
    vocab: Vocabulary,
    entries: Vec<IndexedEntry>,
}

#[derive(Debug, Clone)]
struct IndexedEntry {
    cve_id: String,
    vector: SparseVector,
    degenerate: bool,
}

impl LinkIndex {
    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Ids of entries whose description normalized to nothing; they stay in
    /// the index with a zero vector and can only match through the tie rule.
    pub fn degenerate_ids(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| e.degenerate)
            .map(|e| e.cve_id.as_str())
            .collect()
    }
}

/// Fit a vocabulary on the normalized CVE descriptions and embed every entry.
pub fn build_link_index(entries: &[CveEntry], stopwords: &StopwordSet) -> Result<LinkIndex> {
    let tokenized: Vec<Vec<String>> = entries
        .iter()
        .map(|e| normalize(&e.description, stopwords))
        .collect();
    let vocab = Vocabulary::fit(&tokenized)?;
    let entries = entries
        .iter()
        .zip(&tokenized)
        .map(|(entry, tokens)| {
            let vector = embed(tokens, &vocab);
            IndexedEntry {
                cve_id: entry.cve_id.clone(),
                degenerate: vector.is_zero(),
                vector,
            }
        })
        .collect();
    Ok(LinkIndex { vocab, entries })
}

/// One candidate CVE for a query document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkMatch {
    pub cve_id: String,
    pub score: f64,
}

/// Ranked candidates for one document, best first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkResult {
    pub id: String,
    pub matches: Vec<LinkMatch>,
}

/// The `min(k, index size)` entries most similar to the document by cosine,
/// descending; equal scores are ordered by CVE id ascending.
pub fn link(doc: &Document, index: &LinkIndex, k: usize, stopwords: &StopwordSet) -> LinkResult {
    let query = embed(&normalize(&doc.text, stopwords), &index.vocab);
    let mut matches: Vec<LinkMatch> = index
        .entries
        .iter()
        .map(|entry| LinkMatch {
            cve_id: entry.cve_id.clone(),
            score: cosine(&query, &entry.vector).max(0.0),
        })
        .collect();
    matches.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .expect("cosine scores are finite")
            .then_with(|| a.cve_id.cmp(&b.cve_id))
    });
    matches.truncate(k);
    LinkResult {
        id: doc.id.clone(),
        matches,
    }
}
