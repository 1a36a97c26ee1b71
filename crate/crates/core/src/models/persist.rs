//! JSON model files.
//!
//! A model file is one UTF-8 JSON object carrying the classifier parameters,
//! the inline vocabulary and the preprocessing configuration together with its
//! digest. Floats use the shortest representation that parses back to the
//! identical `f64`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ClassifierModel, LinearModel, LinearTrainer, ModelError, NBModel, TrainedModel};
use crate::features::{FeatureMode, Selector, Vocabulary};
use crate::fsutil;
use crate::textprep::PreprocessConfig;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ModelType {
    Nb,
    Sgd,
    Svm,
}

/// On-disk layout. NB models fill `log_prior`/`log_likelihood`; linear models
/// fill `weights`/`biases`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    format_version: u32,
    created_unix_seconds: u64,
    feature_mode: FeatureMode,
    selector: Selector,
    preprocess_config_digest: String,
    preprocess_config: PreprocessConfig,
    vocabulary: Vocabulary,
    model_type: ModelType,
    class_labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    log_prior: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    log_likelihood: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    biases: Option<Vec<f64>>,
}

impl From<&TrainedModel> for ModelFile {
    fn from(m: &TrainedModel) -> Self {
        let (model_type, log_prior, log_likelihood, weights, biases) = match &m.classifier {
            ClassifierModel::Nb(nb) => (
                ModelType::Nb,
                Some(nb.log_prior.clone()),
                Some(nb.log_likelihood.clone()),
                None,
                None,
            ),
            ClassifierModel::Linear(lin) => (
                match lin.trainer {
                    LinearTrainer::Sgd => ModelType::Sgd,
                    LinearTrainer::Svm => ModelType::Svm,
                },
                None,
                None,
                Some(lin.weights.clone()),
                Some(lin.bias.clone()),
            ),
        };
        ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            created_unix_seconds: m.created_unix_seconds,
            feature_mode: m.feature_mode,
            selector: m.selector,
            preprocess_config_digest: m.preprocess.digest(),
            preprocess_config: m.preprocess.clone(),
            vocabulary: m.vocabulary.clone(),
            model_type,
            class_labels: m.class_labels().to_vec(),
            log_prior,
            log_likelihood,
            weights,
            biases,
        }
    }
}

fn invalid(reason: impl Into<String>) -> ModelError {
    ModelError::InvalidModel(reason.into())
}

fn check_matrix(name: &str, rows: &[Vec<f64>], n_rows: usize, n_cols: usize) -> Result<(), ModelError> {
    if rows.len() != n_rows {
        return Err(invalid(format!("{name} has {} rows, expected {n_rows}", rows.len())));
    }
    if let Some(r) = rows.iter().find(|r| r.len() != n_cols) {
        return Err(invalid(format!(
            "{name} row has {} columns but the vocabulary has {n_cols} terms",
            r.len()
        )));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(invalid(format!("{name} contains a non-finite value")));
    }
    Ok(())
}

impl TryFrom<ModelFile> for TrainedModel {
    type Error = ModelError;

    fn try_from(f: ModelFile) -> Result<Self, Self::Error> {
        if f.format_version != MODEL_FORMAT_VERSION {
            return Err(invalid(format!("unsupported format_version {}", f.format_version)));
        }
        if f.preprocess_config.digest() != f.preprocess_config_digest {
            return Err(invalid("preprocess_config_digest does not match preprocess_config"));
        }
        if f.feature_mode != f.selector.feature_mode() {
            return Err(invalid("feature_mode is inconsistent with selector"));
        }
        let k = f.class_labels.len();
        if k < 2 {
            return Err(invalid("fewer than two class labels"));
        }
        if f.class_labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("class_labels must be sorted and distinct"));
        }
        let v = f.vocabulary.len();
        let classifier = match f.model_type {
            ModelType::Nb => {
                let log_prior = f.log_prior.ok_or_else(|| invalid("nb model without log_prior"))?;
                let log_likelihood = f
                    .log_likelihood
                    .ok_or_else(|| invalid("nb model without log_likelihood"))?;
                check_matrix("log_prior", std::slice::from_ref(&log_prior), 1, k)?;
                check_matrix("log_likelihood", &log_likelihood, k, v)?;
                ClassifierModel::Nb(NBModel {
                    class_labels: f.class_labels,
                    log_prior,
                    log_likelihood,
                    vocab_size: v,
                })
            }
            ModelType::Sgd | ModelType::Svm => {
                let weights = f.weights.ok_or_else(|| invalid("linear model without weights"))?;
                let bias = f.biases.ok_or_else(|| invalid("linear model without biases"))?;
                check_matrix("weights", &weights, k, v)?;
                check_matrix("biases", std::slice::from_ref(&bias), 1, k)?;
                ClassifierModel::Linear(LinearModel {
                    class_labels: f.class_labels,
                    weights,
                    bias,
                    trainer: if f.model_type == ModelType::Sgd {
                        LinearTrainer::Sgd
                    } else {
                        LinearTrainer::Svm
                    },
                })
            }
        };
        Ok(TrainedModel {
            classifier,
            vocabulary: f.vocabulary,
            selector: f.selector,
            feature_mode: f.feature_mode,
            preprocess: f.preprocess_config,
            created_unix_seconds: f.created_unix_seconds,
        })
    }
}

impl TrainedModel {
    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec(&ModelFile::from(self)).expect("model serializes");
        out.push(b'\n');
        out
    }

    pub fn from_json_bytes(bytes: &[u8]) -> Result<Self, ModelError> {
        let file: ModelFile = serde_json::from_slice(bytes).map_err(|e| invalid(e.to_string()))?;
        TrainedModel::try_from(file)
    }

    /// Writes the model atomically.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        let path = path.as_ref();
        fsutil::write_atomic(path, &self.to_json_bytes()).map_err(|source| ModelError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|source| ModelError::Io {
            path: path.display().to_string(),
            source,
        })?;
        TrainedModel::from_json_bytes(&bytes)
    }
}
