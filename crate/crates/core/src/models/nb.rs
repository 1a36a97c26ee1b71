//! Multinomial Naive Bayes with Lidstone smoothing.
//!
//! Feature weights are summed rather than counted, so fractional inputs such
//! as TF-IDF vectors are accepted as long as they are non-negative.

use serde::{Deserialize, Serialize};

use super::{argmax, check_training_set, ModelError, Prediction};
use crate::features::SparseVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NBModel {
    pub class_labels: Vec<String>,
    pub log_prior: Vec<f64>,
    /// One dense row of `ln P(feature | class)` per class.
    pub log_likelihood: Vec<Vec<f64>>,
    pub vocab_size: usize,
}

/// `log_prior(c) = ln(n_c / n)` and
/// `log_likelihood(c, t) = ln((W(c,t) + alpha) / (W(c) + alpha * V))`.
pub fn train_nb<S: AsRef<str>>(
    x: &[SparseVector],
    y: &[S],
    vocab_size: usize,
    alpha: f64,
) -> Result<NBModel, ModelError> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(ModelError::InvalidHyperparameter(format!(
            "nb_alpha must be > 0, got {alpha}"
        )));
    }
    let (class_labels, targets) = check_training_set(x, y, vocab_size)?;
    for (example, v) in x.iter().enumerate() {
        if let Some((index, value)) = v.iter().find(|e| e.1 < 0.0) {
            return Err(ModelError::NegativeFeature { example, index, value });
        }
    }

    let k = class_labels.len();
    let mut class_count = vec![0usize; k];
    let mut weight = vec![vec![0.0f64; vocab_size]; k];
    for (v, &c) in x.iter().zip(&targets) {
        class_count[c] += 1;
        for (i, w) in v.iter() {
            weight[c][i] += w;
        }
    }

    let n = x.len() as f64;
    let log_prior = class_count.iter().map(|&c| (c as f64 / n).ln()).collect();
    let log_likelihood = weight
        .into_iter()
        .map(|row| {
            let total: f64 = row.iter().sum();
            let log_denom = (total + alpha * vocab_size as f64).ln();
            row.into_iter().map(|w| (w + alpha).ln() - log_denom).collect()
        })
        .collect();

    Ok(NBModel {
        class_labels,
        log_prior,
        log_likelihood,
        vocab_size,
    })
}

/// `score(c) = log_prior(c) + Σ_t x_t · log_likelihood(c, t)`.
pub fn predict_nb(model: &NBModel, x: &SparseVector) -> Result<Prediction, ModelError> {
    if let Some(index) = x.max_index().filter(|&i| i >= model.vocab_size) {
        return Err(ModelError::IndexOutOfRange {
            index,
            vocab_size: model.vocab_size,
        });
    }
    let scores: Vec<f64> = model
        .log_prior
        .iter()
        .zip(&model.log_likelihood)
        .map(|(prior, row)| prior + x.dot(row))
        .collect();
    Ok(Prediction {
        class: argmax(&scores),
        scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn sv(entries: &[(usize, f64)]) -> SparseVector {
        SparseVector::new(entries.to_vec()).unwrap()
    }

    fn worked_example() -> NBModel {
        let x = [sv(&[(0, 2.0), (1, 1.0)]), sv(&[(1, 2.0)])];
        train_nb(&x, &["c1", "c2"], 2, 0.01).unwrap()
    }

    #[test]
    fn smoothing_formula() {
        let m = worked_example();
        let lik = |c: usize| -> Vec<f64> { m.log_likelihood[c].iter().map(|l| l.exp()).collect() };
        assert_abs_diff_eq!(lik(0)[0], 2.01 / 3.02, epsilon = 1e-12);
        assert_abs_diff_eq!(lik(0)[1], 1.01 / 3.02, epsilon = 1e-12);
        assert_abs_diff_eq!(lik(1)[0], 0.01 / 2.02, epsilon = 1e-12);
        assert_abs_diff_eq!(lik(1)[1], 2.01 / 2.02, epsilon = 1e-12);
        assert_abs_diff_eq!(m.log_prior[0], 0.5f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn prediction_worked_example() {
        let m = worked_example();
        let p = predict_nb(&m, &sv(&[(0, 1.0)])).unwrap();
        assert_eq!(p.class, 0);
        assert_abs_diff_eq!(p.scores[0], -1.100_269_289_875_739_4, epsilon = 1e-12);
        assert_abs_diff_eq!(p.scores[1], -6.001_414_877_961_150_5, epsilon = 1e-12);
    }

    #[test]
    fn empty_vector_uses_priors() {
        let x = [sv(&[(0, 1.0)]), sv(&[(1, 1.0)]), sv(&[(1, 1.0)])];
        let m = train_nb(&x, &["a", "b", "b"], 2, 1.0).unwrap();
        let p = predict_nb(&m, &SparseVector::default()).unwrap();
        assert_eq!(p.class, 1);
        assert_eq!(p.scores, m.log_prior);
    }

    #[test]
    fn ties_go_to_first_label() {
        let x = [sv(&[(0, 1.0)]), sv(&[(0, 1.0)])];
        let m = train_nb(&x, &["zeta", "alpha"], 1, 1.0).unwrap();
        let p = predict_nb(&m, &sv(&[(0, 3.0)])).unwrap();
        assert_eq!(m.class_labels[p.class], "alpha");
    }

    #[test]
    fn large_alpha_flattens_likelihoods() {
        let x = [sv(&[(0, 5.0), (1, 1.0)]), sv(&[(0, 1.0), (1, 5.0)])];
        let m = train_nb(&x, &["a", "b"], 2, 1e9).unwrap();
        for row in &m.log_likelihood {
            for l in row {
                assert_abs_diff_eq!(l.exp(), 0.5, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn errors() {
        let x = [sv(&[(0, 1.0)]), sv(&[(0, 2.0)])];
        assert!(matches!(
            train_nb(&x, &["a", "a"], 1, 0.01),
            Err(ModelError::SingleClass(_))
        ));
        let neg = [sv(&[(0, -1.0)]), sv(&[(0, 2.0)])];
        assert!(matches!(
            train_nb(&neg, &["a", "b"], 1, 0.01),
            Err(ModelError::NegativeFeature {
                example: 0,
                index: 0,
                ..
            })
        ));
        assert!(matches!(
            train_nb(&x, &["a"], 1, 0.01),
            Err(ModelError::LengthMismatch { .. })
        ));
        let m = train_nb(&x, &["a", "b"], 1, 0.01).unwrap();
        assert!(matches!(
            predict_nb(&m, &sv(&[(1, 1.0)])),
            Err(ModelError::IndexOutOfRange {
                index: 1,
                vocab_size: 1
            })
        ));
    }

    fn arb_training() -> impl Strategy<Value = (Vec<SparseVector>, Vec<String>)> {
        let row = prop::collection::btree_map(0usize..6, 1u8..5, 0..6);
        let label = prop::sample::select(vec!["a", "b", "c"]);
        prop::collection::vec((row, label), 2..8)
            .prop_filter("two labels", |rows| rows.iter().any(|r| r.1 != rows[0].1))
            .prop_map(|rows| {
                rows.into_iter()
                    .map(|(m, l)| {
                        let v = SparseVector::new(m.into_iter().map(|(i, w)| (i, f64::from(w))).collect()).unwrap();
                        (v, l.to_string())
                    })
                    .unzip()
            })
    }

    proptest! {
        #[test]
        fn distributions_are_normalized((x, y) in arb_training(), alpha in prop::sample::select(vec![0.01, 1.0])) {
            let m = train_nb(&x, &y, 6, alpha).unwrap();
            let prior: f64 = m.log_prior.iter().map(|l| l.exp()).sum();
            prop_assert!((prior - 1.0).abs() <= 1e-9);
            for row in &m.log_likelihood {
                let s: f64 = row.iter().map(|l| l.exp()).sum();
                prop_assert!((s - 1.0).abs() <= 1e-6);
            }
        }

        #[test]
        fn scaling_preserves_argmax_under_uniform_priors(
            (x, _) in arb_training(),
            probe in prop::collection::btree_map(0usize..6, 1u8..5, 0..6),
            lambda in 0.01f64..100.0,
        ) {
            // uniform priors: alternate two labels over an even-length set
            let n = x.len() - x.len() % 2;
            let y: Vec<&str> = (0..n).map(|i| if i % 2 == 0 { "a" } else { "b" }).collect();
            let m = train_nb(&x[..n], &y, 6, 0.01).unwrap();
            let v = SparseVector::new(probe.into_iter().map(|(i, w)| (i, f64::from(w))).collect()).unwrap();
            let base = predict_nb(&m, &v).unwrap();
            let scaled = predict_nb(&m, &v.scaled(lambda)).unwrap();
            for c in 0..2 {
                let evidence = base.scores[c] - m.log_prior[c];
                let scaled_evidence = scaled.scores[c] - m.log_prior[c];
                prop_assert!((scaled_evidence - lambda * evidence).abs() <= 1e-9 * (1.0 + scaled_evidence.abs()));
            }
            let gap = (base.scores[0] - base.scores[1]).abs();
            if gap > 1e-9 {
                prop_assert_eq!(base.class, scaled.class);
            }
        }
    }
}
