//! Classification verdicts and the on-disk model format shared by the
//! centroid and one-class SVM classifiers.
//!
//! A model file is a single JSON object tagged by `"kind"`:
//!
//! - `{"kind": "centroid", "threshold", "vocabulary", "centroid"}`
//! - `{"kind": "ocsvm", "nu", "kernel", "rho", "support", "vocabulary"}`

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::centroid::CentroidModel;
use crate::error::{Error, Result};
use crate::ocsvm::{KernelSpec, OcsvmModel, SupportVector};
use crate::textprep::TokenList;
use crate::vectorspace::{embed, SparseVector, Vocabulary, VocabularyFile};

/// Outcome of novelty classification. Normal means in-class, i.e. relevant
/// to the training corpus; anomalous means novel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Normal,
    Anomalous,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Normal => write!(f, "normal"),
            Verdict::Anomalous => write!(f, "anomalous"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Centroid,
    Ocsvm,
}

/// Either trained classifier behind one scoring/classification surface.
#[derive(Debug, Clone)]
pub enum NoveltyModel {
    Centroid(CentroidModel),
    Ocsvm(OcsvmModel),
}

impl NoveltyModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            NoveltyModel::Centroid(_) => ModelKind::Centroid,
            NoveltyModel::Ocsvm(_) => ModelKind::Ocsvm,
        }
    }

    pub fn vocab(&self) -> &Vocabulary {
        match self {
            NoveltyModel::Centroid(m) => m.vocab(),
            NoveltyModel::Ocsvm(m) => m.vocab(),
        }
    }

    /// Larger scores are more anomalous. The centroid model emits
    /// `1 - cosine` in [0, 1]; the one-class SVM emits the negated decision
    /// value, anomalous when positive.
    pub fn novelty_score(&self, doc: &SparseVector) -> f64 {
        match self {
            NoveltyModel::Centroid(m) => m.novelty_score(doc),
            NoveltyModel::Ocsvm(m) => m.novelty_score(doc),
        }
    }

    pub fn classify(&self, doc: &SparseVector) -> Verdict {
        match self {
            NoveltyModel::Centroid(m) => m.classify(doc),
            NoveltyModel::Ocsvm(m) => m.classify(doc),
        }
    }

    /// Embed normalized tokens in the model's vocabulary, then score and
    /// classify in one step.
    pub fn assess(&self, tokens: &TokenList) -> (f64, Verdict) {
        let vector = embed(tokens, self.vocab());
        (self.novelty_score(&vector), self.classify(&vector))
    }

    /// True unless this is an SVM whose training hit the update cap.
    pub fn converged(&self) -> bool {
        match self {
            NoveltyModel::Centroid(_) => true,
            NoveltyModel::Ocsvm(m) => m.converged(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = ModelFile::from(self);
        let mut json =
            serde_json::to_string_pretty(&file).map_err(|e| Error::ModelFormat(e.to_string()))?;
        json.push('\n');
        fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<NoveltyModel> {
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: ModelFile = serde_json::from_str(&raw)
            .map_err(|e| Error::ModelFormat(format!("{}: {e}", path.display())))?;
        file.try_into()
    }
}

impl From<CentroidModel> for NoveltyModel {
    fn from(m: CentroidModel) -> Self {
        NoveltyModel::Centroid(m)
    }
}

impl From<OcsvmModel> for NoveltyModel {
    fn from(m: OcsvmModel) -> Self {
        NoveltyModel::Ocsvm(m)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ModelFile {
    Centroid(CentroidFile),
    Ocsvm(OcsvmFile),
}

#[derive(Serialize, Deserialize)]
struct CentroidFile {
    threshold: f64,
    vocabulary: VocabularyFile,
    centroid: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct OcsvmFile {
    nu: f64,
    kernel: KernelSpec,
    rho: f64,
    support: Vec<SupportVector>,
    vocabulary: VocabularyFile,
}

impl From<&NoveltyModel> for ModelFile {
    fn from(model: &NoveltyModel) -> Self {
        match model {
            NoveltyModel::Centroid(m) => ModelFile::Centroid(CentroidFile {
                threshold: m.threshold(),
                vocabulary: VocabularyFile::from(m.vocab()),
                centroid: m.centroid().to_vec(),
            }),
            NoveltyModel::Ocsvm(m) => ModelFile::Ocsvm(OcsvmFile {
                nu: m.nu(),
                kernel: *m.kernel(),
                rho: m.rho(),
                support: m.support().to_vec(),
                vocabulary: VocabularyFile::from(m.vocab()),
            }),
        }
    }
}

impl TryFrom<ModelFile> for NoveltyModel {
    type Error = Error;

    fn try_from(file: ModelFile) -> Result<NoveltyModel> {
        match file {
            ModelFile::Centroid(f) => {
                let vocab = Vocabulary::try_from(f.vocabulary)?;
                let model = CentroidModel::from_parts(f.centroid, f.threshold, vocab)
                    .map_err(|e| Error::ModelFormat(e.to_string()))?;
                Ok(NoveltyModel::Centroid(model))
            }
            ModelFile::Ocsvm(f) => {
                let vocab = Vocabulary::try_from(f.vocabulary)?;
                let model = OcsvmModel::from_parts(f.nu, f.kernel, f.rho, f.support, vocab)?;
                Ok(NoveltyModel::Ocsvm(model))
            }
        }
    }
}
