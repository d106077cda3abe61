//! threatsift-core: classify short texts as relevant or irrelevant to
//! cyber-threat intelligence by novelty detection against a corpus of CVE
//! vulnerability descriptions, and link relevant texts to the most similar
//! CVE entries.
//!
//! The pipeline is: [`textprep`] normalizes raw text into tokens,
//! [`vectorspace`] fits a TF-IDF vocabulary on CVE descriptions and embeds
//! documents as sparse vectors, and either the [`centroid`] classifier or
//! the [`ocsvm`] one-class SVM scores how novel an unseen document is
//! relative to the training corpus. [`relevance`] pre-ranks large document
//! pools, [`linker`] retrieves the closest CVE descriptions for relevant
//! documents, and [`eval`] computes precision/recall/F1 with threshold
//! sweeps plus the CVE-identifier collection baseline.

pub mod centroid;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod linker;
pub mod model;
pub mod ocsvm;
pub mod relevance;
pub mod synth;
pub mod textprep;
pub mod vectorspace;

pub use centroid::CentroidModel;
pub use error::{Error, Result};
pub use eval::{Confusion, EvalReport, Metrics, PrCurve, PrPoint};
pub use ingest::{CveEntry, CveFeed, CveFeedFormat, Document, Label, ResultRecord};
pub use linker::{LinkIndex, LinkMatch, LinkResult};
pub use model::{ModelKind, NoveltyModel, Verdict};
pub use ocsvm::{KernelSpec, OcsvmModel};
pub use relevance::{RankedDoc, RelevanceTable};
pub use textprep::{StopwordSet, TokenList};
pub use vectorspace::{SparseVector, Vocabulary};
