//! Hinge-loss linear classifier trained by plain SGD with L2 regularization.
//!
//! Each one-vs-rest problem minimizes
//! `J(w, b) = (α/2)‖w‖² + (1/n) Σ max(0, 1 − y_i (w·x_i + b))`
//! with step size `η_t = 1 / (α (t₀ + t))`, `t₀ = 1/α`, `t` counting updates
//! from 1 across epochs. The bias is not regularized.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{check_training_set, LinearModel, LinearTrainer, ModelError, TrainHyperparams};
use crate::features::SparseVector;

/// Per-class training trace.
#[derive(Debug, Clone, PartialEq)]
pub struct SgdReport {
    pub label: String,
    /// Regularized objective `J` after each epoch.
    pub objective_per_epoch: Vec<f64>,
}

/// `(α/2)‖w‖² + mean hinge loss` for targets in {−1, +1}.
pub fn hinge_objective(w: &[f64], b: f64, x: &[SparseVector], targets: &[f64], alpha: f64) -> f64 {
    let reg = 0.5 * alpha * w.iter().map(|v| v * v).sum::<f64>();
    let loss: f64 = x
        .iter()
        .zip(targets)
        .map(|(xi, &yi)| (1.0 - yi * (xi.dot(w) + b)).max(0.0))
        .sum();
    reg + loss / x.len() as f64
}

/// Shuffled visiting order for every epoch, shared by all binary problems.
fn epoch_orders(n: usize, epochs: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..epochs)
        .map(|_| {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            order
        })
        .collect()
}

struct BinaryFit {
    weights: Vec<f64>,
    bias: f64,
    objective_per_epoch: Vec<f64>,
}

fn train_binary(
    x: &[SparseVector],
    targets: &[f64],
    n_features: usize,
    alpha: f64,
    orders: &[Vec<usize>],
) -> BinaryFit {
    // w = scale * v, so the shrink step is O(1)
    let mut v = vec![0.0f64; n_features];
    let mut scale = 1.0f64;
    let mut bias = 0.0f64;
    let t0 = 1.0 / alpha;
    let mut t = 0.0f64;
    let mut objective_per_epoch = Vec::with_capacity(orders.len());

    for order in orders {
        for &i in order {
            t += 1.0;
            let eta = 1.0 / (alpha * (t0 + t));
            let (xi, yi) = (&x[i], targets[i]);
            let margin = yi * (scale * xi.dot(&v) + bias);
            scale *= 1.0 - eta * alpha;
            if margin < 1.0 {
                let step = eta * yi / scale;
                for (j, xij) in xi.iter() {
                    v[j] += step * xij;
                }
                bias += eta * yi;
            }
            if scale < 1e-9 {
                v.iter_mut().for_each(|vj| *vj *= scale);
                scale = 1.0;
            }
        }
        let w: Vec<f64> = v.iter().map(|vj| vj * scale).collect();
        objective_per_epoch.push(hinge_objective(&w, bias, x, targets, alpha));
    }

    BinaryFit {
        weights: v.into_iter().map(|vj| vj * scale).collect(),
        bias,
        objective_per_epoch,
    }
}

pub fn train_sgd<S: AsRef<str> + Sync>(
    x: &[SparseVector],
    y: &[S],
    n_features: usize,
    hyper: &TrainHyperparams,
) -> Result<(LinearModel, Vec<SgdReport>), ModelError> {
    hyper.validate()?;
    let (class_labels, classes) = check_training_set(x, y, n_features)?;
    let orders = epoch_orders(x.len(), hyper.sgd_epochs, hyper.seed);

    let fits: Vec<BinaryFit> = (0..class_labels.len())
        .into_par_iter()
        .map(|c| {
            let targets: Vec<f64> = classes.iter().map(|&k| if k == c { 1.0 } else { -1.0 }).collect();
            train_binary(x, &targets, n_features, hyper.sgd_alpha, &orders)
        })
        .collect();

    let reports = class_labels
        .iter()
        .zip(&fits)
        .map(|(label, fit)| SgdReport {
            label: label.clone(),
            objective_per_epoch: fit.objective_per_epoch.clone(),
        })
        .collect();
    let (weights, bias) = fits.into_iter().map(|f| (f.weights, f.bias)).unzip();
    Ok((
        LinearModel {
            class_labels,
            weights,
            bias,
            trainer: LinearTrainer::Sgd,
        },
        reports,
    ))
}
