//! Linear soft-margin SVM (L1 hinge loss) solved by dual coordinate descent.
//!
//! Each one-vs-rest problem solves
//!
//! ```text
//! max  Σ α_i − ½ ‖Σ α_i y_i x̃_i‖²    s.t. 0 ≤ α_i ≤ C
//! ```
//!
//! where `x̃ = (x, 1)` carries the bias as an extra, regularized feature. That
//! removes the equality constraint of the classical dual, so each coordinate
//! update is a closed-form clipped Newton step. Coordinates are visited in
//! index order, which makes training deterministic.
//!
//! A pass ends the solve when, at the final iterate, the largest projected
//! gradient is below the tolerance and the relative primal-dual gap is at
//! most [`DUALITY_GAP_TOLERANCE`].

use log::warn;
use rayon::prelude::*;

use super::{check_training_set, LinearModel, LinearTrainer, ModelError, TrainHyperparams};
use crate::features::SparseVector;

pub const DUALITY_GAP_TOLERANCE: f64 = 1e-2;

/// Per-class solver state at termination.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmReport {
    pub label: String,
    pub converged: bool,
    pub passes: usize,
    /// Largest |projected gradient|: at the final iterate when converged,
    /// otherwise as seen during the last pass.
    pub final_violation: f64,
    /// `½‖w̃‖² + C Σ max(0, 1 − y_i w̃·x̃_i)`.
    pub primal_objective: f64,
    /// `Σ α_i − ½‖w̃‖²`.
    pub dual_objective: f64,
    pub alphas: Vec<f64>,
    /// `y_i (w·x_i + b)` per training example.
    pub margins: Vec<f64>,
}

impl SvmReport {
    pub fn relative_gap(&self) -> f64 {
        relative_gap(self.primal_objective, self.dual_objective)
    }
}

struct BinaryFit {
    weights: Vec<f64>,
    bias: f64,
    report: SvmReport,
}

fn augmented_dot(w: &[f64], bias: f64, x: &SparseVector) -> f64 {
    x.dot(w) + bias
}

fn train_binary(
    x: &[SparseVector],
    targets: &[f64],
    n_features: usize,
    c: f64,
    tolerance: f64,
    max_passes: usize,
) -> (Vec<f64>, f64, Vec<f64>, usize, f64, bool) {
    let n = x.len();
    let mut alpha = vec![0.0f64; n];
    let mut w = vec![0.0f64; n_features];
    let mut bias = 0.0f64;
    let q_diag: Vec<f64> = x.iter().map(|xi| xi.squared_norm() + 1.0).collect();

    let mut passes = 0;
    let mut violation = f64::INFINITY;
    while passes < max_passes {
        passes += 1;
        violation = 0.0;
        for i in 0..n {
            let yi = targets[i];
            let g = yi * augmented_dot(&w, bias, &x[i]) - 1.0;
            let pg = if alpha[i] <= 0.0 {
                g.min(0.0)
            } else if alpha[i] >= c {
                g.max(0.0)
            } else {
                g
            };
            violation = violation.max(pg.abs());
            if pg != 0.0 {
                let old = alpha[i];
                alpha[i] = (old - g / q_diag[i]).clamp(0.0, c);
                let delta = (alpha[i] - old) * yi;
                if delta != 0.0 {
                    for (j, xij) in x[i].iter() {
                        w[j] += delta * xij;
                    }
                    bias += delta;
                }
            }
        }
        // the in-pass figure mixes gradients taken at different iterates;
        // only stop once the final iterate itself is within tolerance
        if violation < tolerance {
            let (exact, gap) = optimality(x, targets, &w, bias, &alpha, c);
            violation = exact;
            if violation < tolerance && gap <= DUALITY_GAP_TOLERANCE {
                return (w, bias, alpha, passes, violation, true);
            }
        }
    }
    (w, bias, alpha, passes, violation, false)
}

/// Exact projected-gradient violation and relative primal-dual gap at the
/// current iterate.
fn optimality(x: &[SparseVector], targets: &[f64], w: &[f64], bias: f64, alpha: &[f64], c: f64) -> (f64, f64) {
    let margins = margins(x, targets, w, bias);
    let mut violation = 0.0f64;
    for (&m, &a) in margins.iter().zip(alpha) {
        let g = m - 1.0;
        let pg = if a <= 0.0 {
            g.min(0.0)
        } else if a >= c {
            g.max(0.0)
        } else {
            g
        };
        violation = violation.max(pg.abs());
    }
    let (primal, dual) = objectives(&margins, w, bias, alpha, c);
    (violation, relative_gap(primal, dual))
}

fn margins(x: &[SparseVector], targets: &[f64], w: &[f64], bias: f64) -> Vec<f64> {
    x.iter()
        .zip(targets)
        .map(|(xi, &yi)| yi * augmented_dot(w, bias, xi))
        .collect()
}

/// Primal and dual objectives of the augmented problem.
fn objectives(margins: &[f64], w: &[f64], bias: f64, alpha: &[f64], c: f64) -> (f64, f64) {
    let half_norm = 0.5 * (w.iter().map(|v| v * v).sum::<f64>() + bias * bias);
    let hinge: f64 = margins.iter().map(|m| (1.0 - m).max(0.0)).sum();
    (half_norm + c * hinge, alpha.iter().sum::<f64>() - half_norm)
}

fn relative_gap(primal: f64, dual: f64) -> f64 {
    (primal - dual) / primal.abs().max(f64::MIN_POSITIVE)
}

fn fit_class(
    label: &str,
    x: &[SparseVector],
    targets: &[f64],
    n_features: usize,
    hyper: &TrainHyperparams,
) -> BinaryFit {
    let c = hyper.svm_c;
    let (weights, bias, alphas, passes, final_violation, converged) =
        train_binary(x, targets, n_features, c, hyper.svm_tolerance, hyper.svm_max_passes);
    if !converged {
        warn!("svm for class {label:?} stopped after {passes} passes with violation {final_violation:.3e}");
    }
    let margins = margins(x, targets, &weights, bias);
    let (primal_objective, dual_objective) = objectives(&margins, &weights, bias, &alphas, c);
    let report = SvmReport {
        label: label.to_string(),
        converged,
        passes,
        final_violation,
        primal_objective,
        dual_objective,
        alphas,
        margins,
    };
    BinaryFit { weights, bias, report }
}

/// Trains one dual coordinate descent SVM per class. Non-convergence within
/// `svm_max_passes` is logged and flagged in the report; the model is still
/// returned.
pub fn train_svm<S: AsRef<str> + Sync>(
    x: &[SparseVector],
    y: &[S],
    n_features: usize,
    hyper: &TrainHyperparams,
) -> Result<(LinearModel, Vec<SvmReport>), ModelError> {
    hyper.validate()?;
    let (class_labels, classes) = check_training_set(x, y, n_features)?;
    let fits: Vec<BinaryFit> = class_labels
        .par_iter()
        .enumerate()
        .map(|(c, label)| {
            let targets: Vec<f64> = classes.iter().map(|&k| if k == c { 1.0 } else { -1.0 }).collect();
            fit_class(label, x, &targets, n_features, hyper)
        })
        .collect();

    let mut weights = Vec::with_capacity(fits.len());
    let mut bias = Vec::with_capacity(fits.len());
    let mut reports = Vec::with_capacity(fits.len());
    for fit in fits {
        weights.push(fit.weights);
        bias.push(fit.bias);
        reports.push(fit.report);
    }
    Ok((
        LinearModel {
            class_labels,
            weights,
            bias,
            trainer: LinearTrainer::Svm,
        },
        reports,
    ))
}
