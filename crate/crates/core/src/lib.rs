//! Supervised categorization of Bengali news documents.
//!
//! The pipeline has five stages, each in its own module:
//!
//! * [`corpus`]: load labeled corpora from JSONL or a directory-per-category tree.
//! * [`textprep`]: sentence splitting, tokenization, symbol stripping, suffix
//!   stemming and pronoun/conjunction removal.
//! * [`features`]: vocabularies, smoothed TF-IDF vectors and per-document
//!   chi-square co-occurrence feature selection.
//! * [`models`]: multinomial Naive Bayes, hinge-loss SGD and a dual coordinate
//!   descent linear SVM, all one-vs-rest, plus the persisted model file.
//! * [`eval`]: confusion matrices, macro P/R/F1, accuracy and the six-way
//!   benchmark.
//!
//! [`synthetic`] generates separable toy corpora used by tests and benchmarks.

pub mod corpus;
pub mod eval;
pub mod features;
pub mod fsutil;
pub mod models;
pub mod synthetic;
pub mod textprep;

pub use corpus::{CategoryCounts, CorpusError, LabeledCorpus, LabeledDocument};
pub use eval::{
    benchmark, confusion_matrix, evaluate, metrics_from_matrix, BenchmarkRow, ClassMetrics, ConfusionMatrix, EvalError,
    EvaluationReport, Metrics,
};
pub use features::{
    chi_score_document, select_chi_features, ChiScoreTable, FeatureError, FeatureMode, Selector, SparseVector,
    Vocabulary,
};
pub use models::{
    train, Classifier, LinearModel, ModelError, NBModel, PipelineConfig, TrainHyperparams, TrainOutcome, TrainedModel,
};
pub use textprep::{PreprocessConfig, SuffixRule, SuffixTable, TokenizedDocument};
