//! Seeded generators for synthetic corpora: a "threat" vocabulary feeding a
//! CVE-style feed and positive documents, and a disjoint benign vocabulary
//! feeding negatives. Everything is a pure function of the seed, so fixtures
//! regenerate byte-identically.

use chrono::NaiveDate;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::ingest::{CveEntry, Document, Label};

/// Deterministic rng for a seed.
pub fn rng_for_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `size` distinct pronounceable lowercase words built from a prefix and a
/// base-26 suffix, e.g. `vulnaa`, `vulnab`, ... None collide with the
/// bundled stopword list as long as the prefix is 3+ letters and not itself
/// a stopword.
pub fn synth_vocab(prefix: &str, size: usize) -> Vec<String> {
    (0..size)
        .map(|i| {
            let hi = (i / 26) % 26;
            let lo = i % 26;
            format!(
                "{prefix}{}{}",
                (b'a' + hi as u8) as char,
                (b'a' + lo as u8) as char
            )
        })
        .collect()
}

/// Random document text of `len` words drawn uniformly from `vocab`.
pub fn synth_text(rng: &mut ChaCha8Rng, vocab: &[String], len: usize) -> String {
    (0..len)
        .map(|_| vocab[rng.random_range(0..vocab.len())].as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Labeled documents with ids `{id_prefix}{counter}` drawn from one
/// vocabulary, 5 to 15 words each.
pub fn synth_docs(
    rng: &mut ChaCha8Rng,
    vocab: &[String],
    count: usize,
    id_prefix: &str,
    label: Label,
) -> Vec<Document> {
    (0..count)
        .map(|i| {
            let len = rng.random_range(5..=15);
            Document::new(format!("{id_prefix}{i:04}"), synth_text(rng, vocab, len))
                .with_label(label)
        })
        .collect()
}

/// A CVE feed of `count` entries over the threat vocabulary, ids numbered
/// sequentially from `CVE-{year}-1000` and published through that year.
pub fn synth_cve_feed(
    rng: &mut ChaCha8Rng,
    vocab: &[String],
    count: usize,
    year: i32,
) -> Vec<CveEntry> {
    (0..count)
        .map(|i| {
            let len = rng.random_range(8..=20);
            let day_offset = rng.random_range(0..360);
            let published = NaiveDate::from_ymd_opt(year, 1, 1)
                .expect("valid year")
                .checked_add_days(chrono::Days::new(day_offset))
                .expect("offset stays within the year");
            CveEntry {
                cve_id: format!("CVE-{year}-{}", 1000 + i),
                description: synth_text(rng, vocab, len),
                published,
            }
        })
        .collect()
}
