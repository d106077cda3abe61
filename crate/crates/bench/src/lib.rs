//! Shared fixtures for the pipeline benchmarks.

use threatsift_core::ingest::{CveEntry, Document, Label};
use threatsift_core::synth;
use threatsift_core::textprep::{normalize, StopwordSet};
use threatsift_core::vectorspace::{embed, SparseVector, Vocabulary};

pub struct Fixture {
    pub entries: Vec<CveEntry>,
    pub docs: Vec<Document>,
    pub vocab: Vocabulary,
    pub vectors: Vec<SparseVector>,
}

/// A seeded corpus sized like a desk-scale run: `entries` CVE descriptions
/// for training plus an equal mix of relevant and irrelevant documents.
pub fn fixture(entries: usize, docs_per_class: usize) -> Fixture {
    let sw = StopwordSet::bundled_default();
    let threat = synth::synth_vocab("vuln", 120);
    let benign = synth::synth_vocab("daily", 120);
    let mut rng = synth::rng_for_seed(42);

    let entries = synth::synth_cve_feed(&mut rng, &threat, entries, 2017);
    let mut docs = synth::synth_docs(&mut rng, &threat, docs_per_class, "pos", Label::Positive);
    docs.extend(synth::synth_docs(
        &mut rng,
        &benign,
        docs_per_class,
        "neg",
        Label::Negative,
    ));

    let tokenized: Vec<Vec<String>> = entries
        .iter()
        .map(|e| normalize(&e.description, sw))
        .collect();
    let vocab = Vocabulary::fit(&tokenized).expect("non-empty corpus");
    let vectors = tokenized.iter().map(|t| embed(t, &vocab)).collect();
    Fixture {
        entries,
        docs,
        vocab,
        vectors,
    }
}
