//! Metrics and the six-way benchmark.
//!
//! Macro averages are unweighted means over every label of the confusion
//! matrix; macro-F1 is the mean of per-class F1, not the harmonic mean of
//! macro precision and macro recall. A zero denominator yields 0 and that 0
//! still counts toward the mean.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::LabeledCorpus;
use crate::features::Selector;
use crate::fsutil;
use crate::models::{self, method_name, Classifier, ModelError, PipelineConfig, TrainHyperparams, TrainedModel};
use crate::textprep::preprocess_document;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{y_true} true labels but {y_pred} predictions")]
    LengthMismatch { y_true: usize, y_pred: usize },
    #[error("nothing to evaluate")]
    Empty,
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Rows are true labels, columns predicted labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum()
    }
}

pub fn confusion_matrix<S: AsRef<str>, L: AsRef<str>>(
    y_true: &[S],
    y_pred: &[S],
    label_order: &[L],
) -> Result<ConfusionMatrix, EvalError> {
    if y_true.len() != y_pred.len() {
        return Err(EvalError::LengthMismatch {
            y_true: y_true.len(),
            y_pred: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(EvalError::Empty);
    }
    let index: BTreeMap<&str, usize> = label_order.iter().enumerate().map(|(i, l)| (l.as_ref(), i)).collect();
    let lookup = |l: &S| {
        index
            .get(l.as_ref())
            .copied()
            .ok_or_else(|| EvalError::UnknownLabel(l.as_ref().to_string()))
    };
    let k = label_order.len();
    let mut counts = vec![vec![0u64; k]; k];
    for (t, p) in y_true.iter().zip(y_pred) {
        counts[lookup(t)?][lookup(p)?] += 1;
    }
    Ok(ConfusionMatrix {
        labels: label_order.iter().map(|l| l.as_ref().to_string()).collect(),
        counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub per_class: BTreeMap<String, ClassMetrics>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub accuracy: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn metrics_from_matrix(cm: &ConfusionMatrix) -> Metrics {
    let k = cm.labels.len();
    let mut per_class = BTreeMap::new();
    let (mut sum_p, mut sum_r, mut sum_f) = (0.0, 0.0, 0.0);
    for c in 0..k {
        let tp = cm.counts[c][c];
        let predicted: u64 = (0..k).map(|r| cm.counts[r][c]).sum();
        let actual: u64 = cm.counts[c].iter().sum();
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, actual);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        sum_p += precision;
        sum_r += recall;
        sum_f += f1;
        per_class.insert(cm.labels[c].clone(), ClassMetrics { precision, recall, f1 });
    }
    let k = k.max(1) as f64;
    Metrics {
        per_class,
        macro_precision: sum_p / k,
        macro_recall: sum_r / k,
        macro_f1: sum_f / k,
        accuracy: ratio(cm.trace(), cm.total()),
    }
}

/// Rounds seconds to the 4 decimals used in reports.
pub fn round_seconds(s: f64) -> f64 {
    (s * 1e4).round() / 1e4
}

/// One row of the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub method_name: String,
    pub per_class: BTreeMap<String, ClassMetrics>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub accuracy: f64,
    /// `None` when the model was loaded rather than trained in this run.
    pub train_seconds: Option<f64>,
    pub predict_seconds: f64,
    pub n_features: usize,
    pub n_test_documents: usize,
    pub confusion_matrix: ConfusionMatrix,
}

impl EvaluationReport {
    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("report serializes");
        out.push(b'\n');
        out
    }

    pub fn from_json_bytes(bytes: &[u8]) -> Result<Self, serde_json::Error> {
        serde_json::from_slice(bytes)
    }
}

/// Preprocesses and vectorizes every test document with the model's own
/// configuration, predicts, and scores the predictions.
pub fn evaluate(model: &TrainedModel, test: &LabeledCorpus) -> Result<EvaluationReport, EvalError> {
    let labels = model.class_labels();
    if let Some(unknown) = test.labels().iter().find(|l| labels.binary_search(l).is_err()) {
        return Err(EvalError::UnknownLabel(unknown.clone()));
    }

    let start = Instant::now();
    let predicted: Vec<&str> = test
        .documents()
        .par_iter()
        .map(|doc| {
            let tokens = preprocess_document(doc, &model.preprocess);
            let x = model.vectorize(&tokens);
            let p = model
                .classifier
                .predict(&x)
                .expect("vectors built from the model vocabulary are in range");
            labels[p.class].as_str()
        })
        .collect();
    let predict_seconds = start.elapsed().as_secs_f64();

    let truth: Vec<&str> = test.iter().map(|d| d.label.as_str()).collect();
    let cm = confusion_matrix(&truth, &predicted, labels)?;
    let m = metrics_from_matrix(&cm);
    Ok(EvaluationReport {
        method_name: model.method_name(),
        per_class: m.per_class,
        macro_precision: m.macro_precision,
        macro_recall: m.macro_recall,
        macro_f1: m.macro_f1,
        accuracy: m.accuracy,
        train_seconds: None,
        predict_seconds: round_seconds(predict_seconds),
        n_features: model.vocabulary.len(),
        n_test_documents: test.len(),
        confusion_matrix: cm,
    })
}

/// Result of one (selector, classifier) combination.
#[derive(Debug)]
pub struct BenchmarkRow {
    pub method_name: String,
    pub selector: Selector,
    pub classifier: Classifier,
    pub outcome: Result<(TrainedModel, EvaluationReport), EvalError>,
}

impl BenchmarkRow {
    /// File-name stem, e.g. `chi2-sgd`.
    pub fn slug(&self) -> String {
        format!("{}-{}", self.selector, self.classifier)
    }
}

/// Trains and evaluates all six combinations in the reference table order:
/// CHI-SQUARE+SGD, TFIDF+SGD, CHI-SQUARE+NB, TFIDF+NB, CHI-SQUARE+SVM,
/// TFIDF+SVM. A failing combination is reported in its row and the rest
/// still run.
pub fn benchmark(
    train: &LabeledCorpus,
    test: &LabeledCorpus,
    base: &PipelineConfig,
    hyper: &TrainHyperparams,
) -> Vec<BenchmarkRow> {
    let mut rows = Vec::with_capacity(6);
    for classifier in Classifier::ALL {
        for selector in Selector::ALL {
            let pipeline = PipelineConfig {
                selector,
                ..base.clone()
            };
            let outcome = models::train(&pipeline, classifier, train, hyper)
                .map_err(EvalError::from)
                .and_then(|trained| {
                    let mut report = evaluate(&trained.model, test)?;
                    report.train_seconds = Some(round_seconds(trained.train_seconds));
                    Ok((trained.model, report))
                });
            if let Err(e) = &outcome {
                log::error!("{} failed: {e}", method_name(selector, classifier));
            }
            rows.push(BenchmarkRow {
                method_name: method_name(selector, classifier),
                selector,
                classifier,
                outcome,
            });
        }
    }
    rows
}

/// `comparison.tsv`: `method train_sec precision recall f1 accuracy`, one row
/// per successful method. With `with_timing == false` the timing column is
/// `NA`, making the file a pure function of data, configuration and seed.
pub fn comparison_tsv(reports: &[&EvaluationReport], with_timing: bool) -> String {
    let mut out = String::from("method\ttrain_sec\tprecision\trecall\tf1\taccuracy\n");
    for r in reports {
        let train = match (with_timing, r.train_seconds) {
            (true, Some(s)) => format!("{s:.4}"),
            _ => "NA".to_string(),
        };
        writeln!(
            out,
            "{}\t{}\t{:.4}\t{:.4}\t{:.4}\t{:.4}",
            r.method_name, train, r.macro_precision, r.macro_recall, r.macro_f1, r.accuracy
        )
        .unwrap();
    }
    out
}

/// Fixed-width text table in the layout of the published comparison:
/// train time, then macro P/R/F1 (and accuracy) in percent.
pub fn comparison_table(rows: &[BenchmarkRow]) -> String {
    let mut out = format!(
        "{:<16} {:>15} {:>13} {:>10} {:>16} {:>12}\n",
        "Method", "Train Time(sec)", "Precision (%)", "Recall (%)", "F1-Measure (%)", "Accuracy (%)"
    );
    for row in rows {
        match &row.outcome {
            Ok((_, r)) => {
                let train = r.train_seconds.map_or("NA".to_string(), |s| format!("{s:.4}"));
                writeln!(
                    out,
                    "{:<16} {:>15} {:>13.2} {:>10.2} {:>16.2} {:>12.2}",
                    row.method_name,
                    train,
                    100.0 * r.macro_precision,
                    100.0 * r.macro_recall,
                    100.0 * r.macro_f1,
                    100.0 * r.accuracy
                )
                .unwrap();
            }
            Err(e) => writeln!(out, "{:<16} FAILED: {e}", row.method_name).unwrap(),
        }
    }
    out
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), EvalError> {
    fsutil::write_atomic(path, bytes).map_err(|source| EvalError::Io {
        path: path.display().to_string(),
        source,
    })
}
