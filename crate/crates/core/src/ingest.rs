//! Corpus ingestion: generic document JSONL, CVE feeds (NVD 1.1 JSON or
//! JSONL) and classified-result serialization.

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::OnceLock;

use chrono::NaiveDate;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Verdict;

/// Binary relevance label carried by evaluation corpora.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

/// One text item: a short post or a CVE description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Document {
        Document {
            id: id.into(),
            text: text.into(),
            label: None,
            timestamp: None,
            source: None,
        }
    }

    pub fn with_label(mut self, label: Label) -> Document {
        self.label = Some(label);
        self
    }
}

/// A CVE database entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CveEntry {
    pub cve_id: String,
    pub description: String,
    pub published: NaiveDate,
}

/// `CVE-` prefix, 4-digit year, sequence number of 4 or more digits.
pub fn is_valid_cve_id(id: &str) -> bool {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^CVE-[0-9]{4}-[0-9]{4,}$").unwrap())
        .is_match(id)
}

/// Supported on-disk layouts for a CVE feed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CveFeedFormat {
    /// NVD 1.1 data feed: one JSON object with a `CVE_Items` array.
    NvdJson,
    /// One `{"cve_id", "description", "published"}` object per line.
    Jsonl,
}

/// Parsed feed plus the number of placeholder entries that were dropped.
#[derive(Debug, Clone)]
pub struct CveFeed {
    pub entries: Vec<CveEntry>,
    pub dropped: usize,
}

/// Load documents from a JSONL file. Every line must be an object with at
/// least `id` and `text`; ids must be unique; unknown fields are ignored.
pub fn load_jsonl(path: &Path) -> Result<Vec<Document>> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut docs = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (lineno, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(line)
            .map_err(|e| Error::parse(path, lineno + 1, e.to_string()))?;
        if doc.id.is_empty() {
            return Err(Error::parse(path, lineno + 1, "empty document id"));
        }
        if !seen.insert(doc.id.clone()) {
            return Err(Error::DuplicateId { id: doc.id });
        }
        docs.push(doc);
    }
    Ok(docs)
}

/// A description that carries no usable text: empty, or an NVD placeholder.
fn is_placeholder_description(description: &str) -> bool {
    let trimmed = description.trim();
    trimmed.is_empty()
        || trimmed.starts_with("** RESERVED **")
        || trimmed.starts_with("** REJECT **")
}

/// Load a CVE feed in either supported format. Entries whose description is
/// empty or a `** RESERVED **`-style placeholder are dropped and counted.
pub fn load_cve_feed(path: &Path, format: CveFeedFormat) -> Result<CveFeed> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let candidates = match format {
        CveFeedFormat::Jsonl => parse_cve_jsonl(path, &raw)?,
        CveFeedFormat::NvdJson => parse_nvd_json(path, &raw)?,
    };
    let mut entries = Vec::with_capacity(candidates.len());
    let mut dropped = 0;
    for entry in candidates {
        if !is_valid_cve_id(&entry.cve_id) {
            return Err(Error::InvalidCveId {
                value: entry.cve_id,
            });
        }
        if is_placeholder_description(&entry.description) {
            dropped += 1;
        } else {
            entries.push(entry);
        }
    }
    Ok(CveFeed { entries, dropped })
}

fn parse_cve_jsonl(path: &Path, raw: &str) -> Result<Vec<CveEntry>> {
    let mut out = Vec::new();
    for (lineno, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let entry: CveEntry = serde_json::from_str(line)
            .map_err(|e| Error::parse(path, lineno + 1, e.to_string()))?;
        out.push(entry);
    }
    Ok(out)
}

// Minimal slice of the NVD 1.1 feed schema: id, English description text and
// published date. Everything else (CVSS, references, CPE) is ignored.
#[derive(Deserialize)]
struct NvdFeed {
    #[serde(rename = "CVE_Items")]
    items: Vec<NvdItem>,
}

#[derive(Deserialize)]
struct NvdItem {
    cve: NvdCve,
    #[serde(rename = "publishedDate")]
    published_date: String,
}

#[derive(Deserialize)]
struct NvdCve {
    #[serde(rename = "CVE_data_meta")]
    meta: NvdMeta,
    #[serde(default)]
    description: NvdDescription,
}

#[derive(Deserialize)]
struct NvdMeta {
    #[serde(rename = "ID")]
    id: String,
}

#[derive(Deserialize, Default)]
struct NvdDescription {
    #[serde(default)]
    description_data: Vec<NvdDescriptionData>,
}

#[derive(Deserialize)]
struct NvdDescriptionData {
    lang: String,
    value: String,
}

fn parse_nvd_json(path: &Path, raw: &str) -> Result<Vec<CveEntry>> {
    let feed: NvdFeed =
        serde_json::from_str(raw).map_err(|e| Error::parse(path, e.line(), e.to_string()))?;
    feed.items
        .into_iter()
        .map(|item| {
            let id = item.cve.meta.id;
            // First English description; entries may carry several languages.
            let description = item
                .cve
                .description
                .description_data
                .into_iter()
                .find(|d| d.lang == "en")
                .map(|d| d.value)
                .unwrap_or_default();
            let date_part = item.published_date.get(..10).unwrap_or("");
            let published = NaiveDate::parse_from_str(date_part, "%Y-%m-%d").map_err(|_| {
                Error::parse(
                    path,
                    0,
                    format!(
                        "entry {id}: unparseable publishedDate {:?}",
                        item.published_date
                    ),
                )
            })?;
            Ok(CveEntry {
                cve_id: id,
                description,
                published,
            })
        })
        .collect()
}

/// Keep entries published within `[from, to]`, order preserved.
pub fn filter_by_date(
    entries: Vec<CveEntry>,
    from: NaiveDate,
    to: NaiveDate,
) -> Result<Vec<CveEntry>> {
    if from > to {
        return Err(Error::InvalidArgument(format!(
            "date range start {from} is after end {to}"
        )));
    }
    Ok(entries
        .into_iter()
        .filter(|e| e.published >= from && e.published <= to)
        .collect())
}

/// One classified document as written to a results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub id: String,
    pub verdict: Verdict,
    pub score: f64,
}

/// Write results as JSONL, one `{"id", "verdict", "score"}` object per line,
/// in input order.
pub fn write_results(results: &[ResultRecord], path: &Path) -> Result<()> {
    let mut out = Vec::new();
    for record in results {
        serde_json::to_writer(&mut out, record)
            .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
        out.push(b'\n');
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&out).map_err(|e| Error::io(path, e))
}

/// Parse a results file back; inverse of [`write_results`].
pub fn load_results(path: &Path) -> Result<Vec<ResultRecord>> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    raw.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(lineno, line)| {
            serde_json::from_str(line).map_err(|e| Error::parse(path, lineno + 1, e.to_string()))
        })
        .collect()
}
