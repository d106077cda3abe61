//! Precision/Recall/F1 computation, threshold sweeps, operating-point
//! selection and the CVE-identifier collection baseline.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Document, Label};
use crate::model::Verdict;

/// Binary confusion counts. A positive label means threat-relevant, a
/// normal verdict means classified as relevant.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    #[serde(rename = "tp")]
    pub true_pos: usize,
    #[serde(rename = "fp")]
    pub false_pos: usize,
    #[serde(rename = "fn")]
    pub false_neg: usize,
    #[serde(rename = "tn")]
    pub true_neg: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.false_neg + self.true_neg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Precision, recall and F1 with every 0/0 case defined as 0.
pub fn metrics(c: &Confusion) -> Metrics {
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let precision = ratio(c.true_pos, c.true_pos + c.false_pos);
    let recall = ratio(c.true_pos, c.true_pos + c.false_neg);
    Metrics {
        precision,
        recall,
        f1: f1_score(precision, recall),
    }
}

/// Tally verdicts against labels. Every document must be labeled.
pub fn confusion_from(verdicts: &[(Document, Verdict)]) -> Result<Confusion> {
    let mut c = Confusion::default();
    for (doc, verdict) in verdicts {
        let label = doc
            .label
            .ok_or_else(|| Error::MissingLabel { id: doc.id.clone() })?;
        match (label, verdict) {
            (Label::Positive, Verdict::Normal) => c.true_pos += 1,
            (Label::Negative, Verdict::Normal) => c.false_pos += 1,
            (Label::Positive, Verdict::Anomalous) => c.false_neg += 1,
            (Label::Negative, Verdict::Anomalous) => c.true_neg += 1,
        }
    }
    Ok(c)
}

/// One operating point of a precision-recall sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Points ordered by strictly increasing threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrCurve {
    pub points: Vec<PrPoint>,
}

impl PrCurve {
    /// CSV rendering: `threshold,precision,recall,f1`, one point per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,precision,recall,f1\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                p.threshold, p.precision, p.recall, p.f1
            ));
        }
        out
    }
}

/// Confusion of the rule "normal iff score <= threshold" over scored labels.
fn confusion_at(scored: &[(Label, f64)], threshold: f64) -> Confusion {
    let mut c = Confusion::default();
    for &(label, score) in scored {
        let normal = score <= threshold;
        match (label, normal) {
            (Label::Positive, true) => c.true_pos += 1,
            (Label::Negative, true) => c.false_pos += 1,
            (Label::Positive, false) => c.false_neg += 1,
            (Label::Negative, false) => c.true_neg += 1,
        }
    }
    c
}

/// Evaluate metrics at every distinct observed score taken as the threshold,
/// plus 0. Metrics are piecewise-constant between observed scores, so this
/// set of points is exhaustive.
pub fn sweep(scored: &[(Label, f64)]) -> Result<PrCurve> {
    if !scored.iter().any(|(label, _)| *label == Label::Positive) {
        return Err(Error::NoPositives);
    }
    let mut thresholds: Vec<f64> = scored.iter().map(|&(_, s)| s).collect();
    thresholds.push(0.0);
    thresholds.sort_by(|a, b| a.partial_cmp(b).expect("scores must not be NaN"));
    thresholds.dedup();

    let points = thresholds
        .into_iter()
        .map(|threshold| {
            let m = metrics(&confusion_at(scored, threshold));
            PrPoint {
                threshold,
                precision: m.precision,
                recall: m.recall,
                f1: m.f1,
            }
        })
        .collect();
    Ok(PrCurve { points })
}

/// The threshold of the maximum-F1 point; ties resolve to the smallest.
pub fn pick_threshold(curve: &PrCurve) -> f64 {
    let mut best = match curve.points.first() {
        Some(p) => p,
        None => return 0.0,
    };
    for p in &curve.points[1..] {
        if p.f1 > best.f1 {
            best = p;
        }
    }
    best.threshold
}

/// Extract CVE identifiers from raw (un-normalized) text: case-insensitive
/// `CVE-YYYY-NNNN+`, returned uppercased, deduplicated, in order of first
/// appearance.
pub fn extract_cve_ids(text: &str) -> Vec<String> {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| Regex::new(r"(?i)CVE-[0-9]{4}-[0-9]{4,}").unwrap());
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for m in re.find_iter(text) {
        let id = m.as_str().to_ascii_uppercase();
        if seen.insert(id.clone()) {
            out.push(id);
        }
    }
    out
}

/// Baseline collector: a document is "normal" (collected) iff its raw text
/// contains a CVE identifier.
pub fn cve_baseline(docs: &[Document]) -> Result<Confusion> {
    let verdicts: Vec<(Document, Verdict)> = docs
        .iter()
        .map(|doc| {
            let verdict = if extract_cve_ids(&doc.text).is_empty() {
                Verdict::Anomalous
            } else {
                Verdict::Normal
            };
            (doc.clone(), verdict)
        })
        .collect();
    confusion_from(&verdicts)
}

/// Evaluation report as serialized by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub confusion: Confusion,
}

impl EvalReport {
    pub fn from_confusion(confusion: Confusion) -> EvalReport {
        let m = metrics(&confusion);
        EvalReport {
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
            confusion,
        }
    }
}
