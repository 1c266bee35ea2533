use std::collections::BTreeMap;
use std::path::Path;

use hoaxscope_core::timeclf::{LinearModel, TfidfModel, TrainConfig};
use serde::{Deserialize, Serialize};

use super::{read_json, write_json};
use crate::error::{Error, Result};

/// A trained timeline classifier: vectorizer plus linear model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub setting: String,
    pub vocabulary: BTreeMap<String, usize>,
    pub idf: Vec<f64>,
    pub doc_count: usize,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub train: TrainConfig,
    /// Effective parameters of the run that trained the model.
    pub config: serde_json::Value,
}

impl ModelFile {
    pub fn new(setting: impl Into<String>, tfidf: &TfidfModel, model: &LinearModel, config: serde_json::Value) -> Self {
        Self {
            format_version: crate::FORMAT_VERSION,
            setting: setting.into(),
            vocabulary: tfidf.vocabulary.clone(),
            idf: tfidf.idf.clone(),
            doc_count: tfidf.doc_count,
            weights: model.weights.clone(),
            bias: model.bias,
            train: model.config,
            config,
        }
    }

    pub fn tfidf(&self) -> TfidfModel {
        TfidfModel {
            vocabulary: self.vocabulary.clone(),
            idf: self.idf.clone(),
            doc_count: self.doc_count,
        }
    }

    pub fn linear(&self) -> LinearModel {
        LinearModel {
            weights: self.weights.clone(),
            bias: self.bias,
            config: self.train,
        }
    }
}

pub fn write_model(path: &Path, model: &ModelFile) -> Result<()> {
    write_json(path, model)
}

pub fn read_model(path: &Path) -> Result<ModelFile> {
    let m: ModelFile = read_json(path)?;
    if m.weights.len() != m.idf.len() || m.vocabulary.len() != m.idf.len() {
        return Err(Error::Validation(format!(
            "{}: vocabulary, idf and weights differ in length",
            path.display()
        )));
    }
    Ok(m)
}
