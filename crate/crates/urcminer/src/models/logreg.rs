//! L2-regularized logistic regression trained by full-batch gradient descent
//! with backtracking line search; multiclass via one-vs-rest.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{check_finite, class_list, labels_of, ModelParams, TrainedModel, MODEL_FORMAT_VERSION};
use crate::dataset::Matrix;
use crate::real::Real;
use crate::Result;

#[derive(Debug, Clone, Copy)]
pub struct LogregConfig {
    pub l2_lambda: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for LogregConfig {
    fn default() -> Self {
        LogregConfig { l2_lambda: 1.0, max_iter: 1000, tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "R: Serialize", deserialize = "R: DeserializeOwned"))]
pub struct LogregParams<R> {
    /// One weight vector per class for multiclass one-vs-rest; a single
    /// vector for the binary case (positive class = classes[1]).
    pub weights: Vec<Vec<R>>,
    pub bias: Vec<R>,
    /// Z-score standardization statistics from the training set.
    pub feature_means: Vec<R>,
    pub feature_stds: Vec<R>,
}

fn sigmoid<R: Real>(z: R) -> R {
    let one = R::one();
    if z >= R::zero() {
        one / (one + (-z).exp())
    } else {
        let e = z.exp();
        e / (one + e)
    }
}

impl<R: Real> LogregParams<R> {
    fn standardize_row(&self, row: &[R]) -> Vec<R> {
        row.iter()
            .zip(self.feature_means.iter().zip(&self.feature_stds))
            .map(|(&v, (&m, &s))| (v - m) / s)
            .collect()
    }

    fn score(&self, class: usize, z: &[R]) -> R {
        let mut acc = self.bias[class];
        for (w, x) in self.weights[class].iter().zip(z) {
            acc += *w * *x;
        }
        acc
    }

    pub fn predict_proba(&self, rows: &[Vec<R>]) -> Vec<Vec<R>> {
        rows.iter()
            .map(|row| {
                let z = self.standardize_row(row);
                if self.weights.len() == 1 {
                    let p = sigmoid(self.score(0, &z));
                    vec![R::one() - p, p]
                } else {
                    // one-vs-rest probabilities, renormalized
                    let raw: Vec<R> = (0..self.weights.len())
                        .map(|k| sigmoid(self.score(k, &z)))
                        .collect();
                    let total: R = raw.iter().copied().sum();
                    if total > R::zero() {
                        raw.into_iter().map(|p| p / total).collect()
                    } else {
                        let k = R::from_usize_(self.weights.len());
                        vec![R::one() / k; self.weights.len()]
                    }
                }
            })
            .collect()
    }
}

/// Regularized negative log-likelihood (mean over rows) and its gradient
/// with respect to (weights, bias). The bias is not penalized.
pub fn loss_and_gradient<R: Real>(
    rows: &[Vec<R>],
    targets: &[R],
    weights: &[R],
    bias: R,
    l2_lambda: R,
) -> (R, Vec<R>, R) {
    let n = R::from_usize_(rows.len());
    let d = weights.len();
    let mut loss = R::zero();
    let mut grad_w = vec![R::zero(); d];
    let mut grad_b = R::zero();
    for (row, &y) in rows.iter().zip(targets) {
        let mut z = bias;
        for (w, x) in weights.iter().zip(row) {
            z += *w * *x;
        }
        // log(1 + exp(z)) - y*z, computed stably
        let log1pexp = if z > R::zero() { z + (-z).exp().ln_1p() } else { z.exp().ln_1p() };
        loss += log1pexp - y * z;
        let residual = sigmoid(z) - y;
        for (g, x) in grad_w.iter_mut().zip(row) {
            *g += residual * *x;
        }
        grad_b += residual;
    }
    loss = loss / n;
    grad_b = grad_b / n;
    for (g, w) in grad_w.iter_mut().zip(weights) {
        *g = *g / n + l2_lambda * *w;
    }
    let penalty: R = weights.iter().map(|w| *w * *w).sum::<R>() * R::half() * l2_lambda;
    (loss + penalty, grad_w, grad_b)
}

fn inf_norm<R: Real>(grad_w: &[R], grad_b: R) -> R {
    grad_w.iter().fold(grad_b.abs(), |m, g| m.max(g.abs()))
}

/// Fits one binary weight vector by gradient descent with backtracking line
/// search, which keeps the loss non-increasing per iteration. Returns the
/// weights, the bias, and the per-iteration loss trace.
fn fit_binary<R: Real>(rows: &[Vec<R>], targets: &[R], config: &LogregConfig) -> (Vec<R>, R, Vec<f64>) {
    let d = rows.first().map_or(0, |r| r.len());
    let lambda = R::real_from(config.l2_lambda);
    let tol = R::real_from(config.tol);
    let mut weights = vec![R::zero(); d];
    let mut bias = R::zero();
    let (mut loss, mut grad_w, mut grad_b) = loss_and_gradient(rows, targets, &weights, bias, lambda);
    let mut history = vec![loss.as_f64()];
    for _ in 0..config.max_iter {
        if inf_norm(&grad_w, grad_b) < tol {
            break;
        }
        let grad_sq: R = grad_w.iter().map(|g| *g * *g).sum::<R>() + grad_b * grad_b;
        let mut step = R::one();
        let armijo = R::real_from(1e-4);
        let mut accepted = false;
        for _ in 0..60 {
            let cand_w: Vec<R> = weights.iter().zip(&grad_w).map(|(w, g)| *w - step * *g).collect();
            let cand_b = bias - step * grad_b;
            let (cand_loss, cand_gw, cand_gb) = loss_and_gradient(rows, targets, &cand_w, cand_b, lambda);
            if cand_loss <= loss - armijo * step * grad_sq {
                weights = cand_w;
                bias = cand_b;
                loss = cand_loss;
                grad_w = cand_gw;
                grad_b = cand_gb;
                accepted = true;
                break;
            }
            step = step * R::half();
        }
        if !accepted {
            break; // no descent step found at machine precision
        }
        history.push(loss.as_f64());
    }
    (weights, bias, history)
}

fn standardization<R: Real>(rows: &[Vec<R>]) -> (Vec<R>, Vec<R>) {
    let d = rows.first().map_or(0, |r| r.len());
    let n = R::from_usize_(rows.len().max(1));
    let mut means = vec![R::zero(); d];
    for row in rows {
        for (m, v) in means.iter_mut().zip(row) {
            *m += *v;
        }
    }
    for m in &mut means {
        *m = *m / n;
    }
    let mut vars = vec![R::zero(); d];
    for row in rows {
        for ((s, v), m) in vars.iter_mut().zip(row).zip(&means) {
            let dlt = *v - *m;
            *s += dlt * dlt;
        }
    }
    let stds = vars
        .into_iter()
        .map(|s| {
            let sd = (s / n).sqrt();
            // zero-variance columns pass through unscaled
            if sd > R::zero() {
                sd
            } else {
                R::one()
            }
        })
        .collect();
    (means, stds)
}

pub fn train_logreg<R: Real>(matrix: &Matrix<R>, config: &LogregConfig) -> Result<TrainedModel<R>> {
    train_logreg_with_history(matrix, config).map(|(m, _)| m)
}

/// Like `train_logreg`, also returning the per-iteration loss trace of each
/// fitted weight vector.
pub fn train_logreg_with_history<R: Real>(
    matrix: &Matrix<R>,
    config: &LogregConfig,
) -> Result<(TrainedModel<R>, Vec<Vec<f64>>)> {
    check_finite(matrix)?;
    let labels = labels_of(matrix)?;
    let classes = class_list(labels)?;
    let (means, stds) = standardization(&matrix.rows);
    let standardized: Vec<Vec<R>> = matrix
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .zip(means.iter().zip(&stds))
                .map(|(&v, (&m, &s))| (v - m) / s)
                .collect()
        })
        .collect();
    let mut weights = Vec::new();
    let mut bias = Vec::new();
    let mut histories = Vec::new();
    if classes.len() == 2 {
        let targets: Vec<R> = labels
            .iter()
            .map(|l| if *l == classes[1] { R::one() } else { R::zero() })
            .collect();
        let (w, b, h) = fit_binary(&standardized, &targets, config);
        weights.push(w);
        bias.push(b);
        histories.push(h);
    } else {
        for class in &classes {
            let targets: Vec<R> = labels
                .iter()
                .map(|l| if l == class { R::one() } else { R::zero() })
                .collect();
            let (w, b, h) = fit_binary(&standardized, &targets, config);
            weights.push(w);
            bias.push(b);
            histories.push(h);
        }
    }
    let model = TrainedModel {
        version: MODEL_FORMAT_VERSION,
        classes,
        feature_names: matrix.feature_names.clone(),
        seed: None,
        params: ModelParams::Logreg(LogregParams {
            weights,
            bias,
            feature_means: means,
            feature_stds: stds,
        }),
    };
    Ok((model, histories))
}
