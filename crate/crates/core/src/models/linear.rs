use serde::{Deserialize, Serialize};

use super::{argmax, ModelError, Prediction};
use crate::features::SparseVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearTrainer {
    Sgd,
    Svm,
}

/// One-vs-rest linear decision functions `w_c · x + b_c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub class_labels: Vec<String>,
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub trainer: LinearTrainer,
}

impl LinearModel {
    pub fn n_features(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }
}

pub fn predict_linear(model: &LinearModel, x: &SparseVector) -> Result<Prediction, ModelError> {
    let n = model.n_features();
    if let Some(index) = x.max_index().filter(|&i| i >= n) {
        return Err(ModelError::IndexOutOfRange { index, vocab_size: n });
    }
    let scores: Vec<f64> = model
        .weights
        .iter()
        .zip(&model.bias)
        .map(|(w, b)| x.dot(w) + b)
        .collect();
    Ok(Prediction {
        class: argmax(&scores),
        scores,
    })
}
