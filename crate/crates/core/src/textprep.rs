//! Text normalization: lowercase alphabetic tokens with URLs, mentions,
//! hashtag markers, digits and punctuation stripped, then stopwords removed.
//!
//! No stemming or lemmatization is applied; token meaning is preserved as-is.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Ordered sequence of lowercase alphabetic terms produced by [`normalize`].
pub type TokenList = Vec<String>;

/// Bundled English stopword list, one lowercase term per line.
const BUNDLED_STOPWORDS: &str = include_str!("../resources/stopwords_en.txt");

/// Where a stopword set came from, for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StopwordSource {
    BundledDefault,
    File(PathBuf),
}

/// A set of lowercase terms dropped during normalization.
#[derive(Debug, Clone)]
pub struct StopwordSet {
    words: BTreeSet<String>,
    source: StopwordSource,
}

impl StopwordSet {
    /// The bundled default English list, parsed once per process.
    pub fn bundled_default() -> &'static StopwordSet {
        static DEFAULT: OnceLock<StopwordSet> = OnceLock::new();
        DEFAULT.get_or_init(|| {
            let words = BUNDLED_STOPWORDS
                .lines()
                .filter(|l| !l.is_empty())
                .map(|l| l.to_lowercase())
                .collect();
            StopwordSet {
                words,
                source: StopwordSource::BundledDefault,
            }
        })
    }

    pub fn contains(&self, term: &str) -> bool {
        self.words.contains(term)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn source(&self) -> &StopwordSource {
        &self.source
    }

    /// Terms in sorted order (the set is kept sorted internally).
    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(|s| s.as_str())
    }
}

/// Load a stopword set from a one-term-per-line UTF-8 file, lowercased and
/// deduplicated. Without a path, returns a copy of the bundled default list.
///
/// A line containing internal whitespace is a format error naming the line.
pub fn load_stopwords(path: Option<&Path>) -> Result<StopwordSet> {
    let Some(path) = path else {
        return Ok(StopwordSet::bundled_default().clone());
    };
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut words = BTreeSet::new();
    for (lineno, line) in raw.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        if line.chars().any(char::is_whitespace) {
            return Err(Error::parse(
                path,
                lineno + 1,
                format!("stopword entry {line:?} contains whitespace"),
            ));
        }
        words.insert(line.to_lowercase());
    }
    Ok(StopwordSet {
        words,
        source: StopwordSource::File(path.to_path_buf()),
    })
}

fn is_url_token(token: &str) -> bool {
    // Byte-wise prefix compare: the prefixes are ASCII, so this never falls
    // inside a multi-byte character.
    let lower_starts = |prefix: &str| {
        token.len() >= prefix.len()
            && token.as_bytes()[..prefix.len()].eq_ignore_ascii_case(prefix.as_bytes())
    };
    lower_starts("http://") || lower_starts("https://") || lower_starts("www.")
}

/// Normalize raw text into a token list.
///
/// Steps, in order: drop URL tokens (`http://`, `https://`, `www.` prefixes)
/// and `@`-mention tokens; strip leading `#` markers but keep the hashtag
/// word; lowercase; replace every non-alphabetic character with a space;
/// split on whitespace; drop stopwords.
pub fn normalize(text: &str, stopwords: &StopwordSet) -> TokenList {
    let mut kept = String::with_capacity(text.len());
    for token in text.split_whitespace() {
        if is_url_token(token) || token.starts_with('@') {
            continue;
        }
        kept.push_str(token.trim_start_matches('#'));
        kept.push(' ');
    }

    let lowered = kept.to_lowercase();
    let alphabetic: String = lowered
        .chars()
        .map(|c| if c.is_alphabetic() { c } else { ' ' })
        .collect();

    alphabetic
        .split_whitespace()
        .filter(|t| !stopwords.contains(t))
        .map(str::to_owned)
        .collect()
}
