//! Classifiers and the end-to-end training entry point.
//!
//! All three classifiers are multiclass by one-vs-rest and break score ties
//! toward the lexicographically smallest label.

mod linear;
mod nb;
mod persist;
mod sgd;
mod svm;

use std::fmt;
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::LabeledCorpus;
use crate::features::{
    self, build_vocabulary, select_chi_features, ChiOptions, FeatureError, FeatureMode, Selector, SparseVector,
    Vocabulary,
};
use crate::textprep::{preprocess_document, preprocess_text, PreprocessConfig, TokenizedDocument};

pub use linear::{predict_linear, LinearModel, LinearTrainer};
pub use nb::{predict_nb, train_nb, NBModel};
pub use persist::{ModelFile, MODEL_FORMAT_VERSION};
pub use sgd::{hinge_objective, train_sgd, SgdReport};
pub use svm::{train_svm, SvmReport};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("corpus has one class ({0:?}); at least two labels are required")]
    SingleClass(String),
    #[error("need at least 2 training examples, got {0}")]
    TooFewExamples(usize),
    #[error("{features} feature vectors but {labels} labels")]
    LengthMismatch { features: usize, labels: usize },
    #[error("negative feature weight {value} at example {example}, index {index}")]
    NegativeFeature { example: usize, index: usize, value: f64 },
    #[error("feature index {index} out of range for vocabulary of size {vocab_size}")]
    IndexOutOfRange { index: usize, vocab_size: usize },
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("unknown classifier {0:?} (expected nb, sgd or svm)")]
    UnknownClassifier(String),
    #[error("invalid model file: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainHyperparams {
    /// Lidstone smoothing for Naive Bayes.
    pub nb_alpha: f64,
    /// L2 regularization strength for SGD.
    pub sgd_alpha: f64,
    /// Full passes over the shuffled training set.
    pub sgd_epochs: usize,
    /// Soft-margin penalty for the SVM.
    pub svm_c: f64,
    /// Stop when the largest projected-gradient violation in a pass is below this.
    pub svm_tolerance: f64,
    pub svm_max_passes: usize,
    pub seed: u64,
}

impl Default for TrainHyperparams {
    fn default() -> Self {
        TrainHyperparams {
            nb_alpha: 0.01,
            sgd_alpha: 0.0001,
            sgd_epochs: 50,
            svm_c: 1.0,
            svm_tolerance: 1e-3,
            svm_max_passes: 1000,
            seed: 42,
        }
    }
}

impl TrainHyperparams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = [
            ("nb_alpha", self.nb_alpha),
            ("sgd_alpha", self.sgd_alpha),
            ("svm_c", self.svm_c),
            ("svm_tolerance", self.svm_tolerance),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ModelError::InvalidHyperparameter(format!(
                    "{name} must be > 0, got {v}"
                )));
            }
        }
        if self.sgd_epochs == 0 {
            return Err(ModelError::InvalidHyperparameter("sgd_epochs must be >= 1".into()));
        }
        if self.svm_max_passes == 0 {
            return Err(ModelError::InvalidHyperparameter("svm_max_passes must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classifier {
    Nb,
    Sgd,
    Svm,
}

impl Classifier {
    pub const ALL: [Classifier; 3] = [Classifier::Sgd, Classifier::Nb, Classifier::Svm];

    pub fn display_name(self) -> &'static str {
        match self {
            Classifier::Nb => "NB",
            Classifier::Sgd => "SGD",
            Classifier::Svm => "SVM",
        }
    }
}

impl fmt::Display for Classifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classifier::Nb => "nb",
            Classifier::Sgd => "sgd",
            Classifier::Svm => "svm",
        })
    }
}

impl FromStr for Classifier {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nb" => Ok(Classifier::Nb),
            "sgd" => Ok(Classifier::Sgd),
            "svm" => Ok(Classifier::Svm),
            other => Err(ModelError::UnknownClassifier(other.to_string())),
        }
    }
}

/// Row name in reports, e.g. `TFIDF+SVM`.
pub fn method_name(selector: Selector, classifier: Classifier) -> String {
    format!("{}+{}", selector.display_name(), classifier.display_name())
}

/// Everything between raw text and feature vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub selector: Selector,
    pub chi: ChiOptions,
    /// Minimum document frequency for the TF-IDF vocabulary.
    pub min_df: usize,
    pub preprocess: PreprocessConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            selector: Selector::Tfidf,
            chi: ChiOptions::default(),
            min_df: 1,
            preprocess: PreprocessConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn with_selector(selector: Selector) -> Self {
        PipelineConfig {
            selector,
            ..PipelineConfig::default()
        }
    }
}

/// A label and the per-class scores it was chosen from (same order as the
/// model's class labels).
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub class: usize,
    pub scores: Vec<f64>,
}

impl Prediction {
    pub fn score(&self) -> f64 {
        self.scores[self.class]
    }
}

/// First index holding the maximum. Labels are sorted, so ties resolve to the
/// smallest label.
pub(crate) fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Sorted distinct labels and each example's class index.
pub(crate) fn encode_labels<S: AsRef<str>>(y: &[S]) -> Result<(Vec<String>, Vec<usize>), ModelError> {
    let mut labels: Vec<String> = y.iter().map(|l| l.as_ref().to_string()).collect();
    labels.sort();
    labels.dedup();
    match labels.len() {
        0 => return Err(ModelError::TooFewExamples(0)),
        1 => return Err(ModelError::SingleClass(labels[0].clone())),
        _ => {}
    }
    let targets = y
        .iter()
        .map(|l| {
            labels
                .binary_search_by(|c| c.as_str().cmp(l.as_ref()))
                .expect("label present")
        })
        .collect();
    Ok((labels, targets))
}

pub(crate) fn check_training_set<S: AsRef<str>>(
    x: &[SparseVector],
    y: &[S],
    n_features: usize,
) -> Result<(Vec<String>, Vec<usize>), ModelError> {
    if x.len() != y.len() {
        return Err(ModelError::LengthMismatch {
            features: x.len(),
            labels: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(ModelError::TooFewExamples(x.len()));
    }
    check_indices(x, n_features)?;
    encode_labels(y)
}

pub(crate) fn check_indices(x: &[SparseVector], n_features: usize) -> Result<(), ModelError> {
    for v in x {
        if let Some(index) = v.max_index().filter(|&i| i >= n_features) {
            return Err(ModelError::IndexOutOfRange {
                index,
                vocab_size: n_features,
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ClassifierModel {
    Nb(NBModel),
    Linear(LinearModel),
}

impl ClassifierModel {
    pub fn class_labels(&self) -> &[String] {
        match self {
            ClassifierModel::Nb(m) => &m.class_labels,
            ClassifierModel::Linear(m) => &m.class_labels,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            ClassifierModel::Nb(m) => m.vocab_size,
            ClassifierModel::Linear(m) => m.n_features(),
        }
    }

    pub fn kind(&self) -> Classifier {
        match self {
            ClassifierModel::Nb(_) => Classifier::Nb,
            ClassifierModel::Linear(m) => match m.trainer {
                LinearTrainer::Sgd => Classifier::Sgd,
                LinearTrainer::Svm => Classifier::Svm,
            },
        }
    }

    pub fn predict(&self, x: &SparseVector) -> Result<Prediction, ModelError> {
        match self {
            ClassifierModel::Nb(m) => predict_nb(m, x),
            ClassifierModel::Linear(m) => predict_linear(m, x),
        }
    }
}

/// A classifier bundled with the vocabulary and preprocessing it was trained
/// with.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub classifier: ClassifierModel,
    pub vocabulary: Vocabulary,
    pub selector: Selector,
    pub feature_mode: FeatureMode,
    pub preprocess: PreprocessConfig,
    pub created_unix_seconds: u64,
}

impl TrainedModel {
    pub fn class_labels(&self) -> &[String] {
        self.classifier.class_labels()
    }

    pub fn preprocess_config_digest(&self) -> String {
        self.preprocess.digest()
    }

    pub fn method_name(&self) -> String {
        method_name(self.selector, self.classifier.kind())
    }

    pub fn vectorize(&self, doc: &TokenizedDocument) -> SparseVector {
        features::vectorize(doc, &self.vocabulary, self.feature_mode)
    }

    /// Preprocesses, vectorizes and classifies raw text.
    pub fn predict_text(&self, text: &str) -> Prediction {
        let doc = preprocess_text("", None, text, &self.preprocess);
        self.classifier
            .predict(&self.vectorize(&doc))
            .expect("vectors built from the model vocabulary are in range")
    }

    pub fn label(&self, prediction: &Prediction) -> &str {
        &self.class_labels()[prediction.class]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainDiagnostics {
    Nb,
    Sgd(Vec<SgdReport>),
    Svm(Vec<SvmReport>),
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: TrainedModel,
    /// Wall-clock seconds for preprocessing, feature building and fitting.
    pub train_seconds: f64,
    pub diagnostics: TrainDiagnostics,
}

impl TrainOutcome {
    pub fn n_features(&self) -> usize {
        self.model.vocabulary.len()
    }
}

/// Fits one classifier on already vectorized data.
pub fn fit(
    classifier: Classifier,
    x: &[SparseVector],
    y: &[String],
    n_features: usize,
    hyper: &TrainHyperparams,
) -> Result<(ClassifierModel, TrainDiagnostics), ModelError> {
    Ok(match classifier {
        Classifier::Nb => (
            ClassifierModel::Nb(train_nb(x, y, n_features, hyper.nb_alpha)?),
            TrainDiagnostics::Nb,
        ),
        Classifier::Sgd => {
            let (model, reports) = train_sgd(x, y, n_features, hyper)?;
            (ClassifierModel::Linear(model), TrainDiagnostics::Sgd(reports))
        }
        Classifier::Svm => {
            let (model, reports) = train_svm(x, y, n_features, hyper)?;
            (ClassifierModel::Linear(model), TrainDiagnostics::Svm(reports))
        }
    })
}

pub fn preprocess_corpus(corpus: &LabeledCorpus, config: &PreprocessConfig) -> Vec<TokenizedDocument> {
    corpus
        .documents()
        .par_iter()
        .map(|d| preprocess_document(d, config))
        .collect()
}

/// Builds the feature space for `pipeline` from preprocessed training docs.
pub fn build_features(pipeline: &PipelineConfig, docs: &[TokenizedDocument]) -> Result<Vocabulary, FeatureError> {
    match pipeline.selector {
        Selector::Tfidf => build_vocabulary(docs, pipeline.min_df),
        Selector::Chi2 => select_chi_features(docs, &pipeline.chi),
    }
}

/// Preprocess → select features → vectorize → fit.
pub fn train(
    pipeline: &PipelineConfig,
    classifier: Classifier,
    corpus: &LabeledCorpus,
    hyper: &TrainHyperparams,
) -> Result<TrainOutcome, ModelError> {
    hyper.validate()?;
    if let [only] = corpus.labels() {
        return Err(ModelError::SingleClass(only.clone()));
    }
    let start = Instant::now();
    let docs = preprocess_corpus(corpus, &pipeline.preprocess);
    let vocabulary = build_features(pipeline, &docs)?;
    let mode = pipeline.selector.feature_mode();
    let x = features::vectorize_corpus(&docs, &vocabulary, mode);
    let y: Vec<String> = corpus.iter().map(|d| d.label.clone()).collect();
    let (classifier, diagnostics) = fit(classifier, &x, &y, vocabulary.len(), hyper)?;
    let train_seconds = start.elapsed().as_secs_f64();
    let created_unix_seconds = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(TrainOutcome {
        model: TrainedModel {
            classifier,
            vocabulary,
            selector: pipeline.selector,
            feature_mode: mode,
            preprocess: pipeline.preprocess.clone(),
            created_unix_seconds,
        },
        train_seconds,
        diagnostics,
    })
}
