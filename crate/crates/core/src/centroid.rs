//! Centroid novelty classifier: the fitted model is the arithmetic mean of
//! the positive-class TF-IDF vectors; a document's novelty is one minus its
//! cosine similarity to that mean, classified against a threshold.

use crate::error::{Error, Result};
use crate::model::Verdict;
use crate::vectorspace::{SparseVector, Vocabulary};

/// Component-wise mean of sparse vectors as a dense vector of length `dim`.
pub fn fit_centroid(vectors: &[SparseVector], dim: usize) -> Result<Vec<f64>> {
    if vectors.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut sum = vec![0.0; dim];
    for v in vectors {
        for &(idx, w) in v.entries() {
            if idx >= dim {
                return Err(Error::InvalidArgument(format!(
                    "vector index {idx} exceeds centroid dimension {dim}"
                )));
            }
            sum[idx] += w;
        }
    }
    let n = vectors.len() as f64;
    for value in &mut sum {
        *value /= n;
    }
    Ok(sum)
}

/// Fitted centroid plus decision threshold and the vocabulary the training
/// vectors were embedded in.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidModel {
    centroid: Vec<f64>,
    threshold: f64,
    vocab: Vocabulary,
    norm: f64,
}

impl CentroidModel {
    /// Fit from training vectors already embedded in `vocab`.
    pub fn fit(
        vectors: &[SparseVector],
        threshold: f64,
        vocab: Vocabulary,
    ) -> Result<CentroidModel> {
        let centroid = fit_centroid(vectors, vocab.len())?;
        CentroidModel::from_parts(centroid, threshold, vocab)
    }

    /// Assemble from a stored centroid, validating the invariants.
    pub fn from_parts(
        centroid: Vec<f64>,
        threshold: f64,
        vocab: Vocabulary,
    ) -> Result<CentroidModel> {
        if centroid.len() != vocab.len() {
            return Err(Error::ModelFormat(format!(
                "centroid length {} does not match vocabulary size {}",
                centroid.len(),
                vocab.len()
            )));
        }
        if !(0.0..=1.0).contains(&threshold) {
            return Err(Error::InvalidArgument(format!(
                "threshold {threshold} outside [0, 1]"
            )));
        }
        if centroid.iter().any(|w| !w.is_finite()) {
            return Err(Error::ModelFormat(
                "centroid has non-finite components".into(),
            ));
        }
        let norm = dense_norm(&centroid);
        Ok(CentroidModel {
            centroid,
            threshold,
            vocab,
            norm,
        })
    }

    pub fn centroid(&self) -> &[f64] {
        &self.centroid
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn set_threshold(&mut self, threshold: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(Error::InvalidArgument(format!(
                "threshold {threshold} outside [0, 1]"
            )));
        }
        self.threshold = threshold;
        Ok(())
    }

    /// Novelty of a document: `1 - cos(doc, centroid)`, in [0, 1] for TF-IDF
    /// inputs. A zero-norm document scores 1 (maximally novel).
    pub fn novelty_score(&self, doc: &SparseVector) -> f64 {
        let doc_norm = doc.norm();
        if doc_norm == 0.0 || self.norm == 0.0 {
            return 1.0;
        }
        let cos = (doc.dot_dense(&self.centroid) / (doc_norm * self.norm)).clamp(-1.0, 1.0);
        (1.0 - cos).clamp(0.0, 1.0)
    }

    /// Normal iff the novelty score does not exceed the threshold; the tie
    /// sits on the normal side ("larger than" is strict).
    pub fn classify(&self, doc: &SparseVector) -> Verdict {
        if self.novelty_score(doc) <= self.threshold {
            Verdict::Normal
        } else {
            Verdict::Anomalous
        }
    }
}

fn dense_norm(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    for v in values {
        sum += v * v;
    }
    sum.sqrt()
}
