//! Gaussian naive Bayes.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{check_finite, class_list, labels_of, ModelParams, TrainedModel, MODEL_FORMAT_VERSION};
use crate::dataset::Matrix;
use crate::real::Real;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "R: Serialize", deserialize = "R: DeserializeOwned"))]
pub struct GnbParams<R> {
    /// Per-class feature means, class-major.
    pub means: Vec<Vec<R>>,
    /// Per-class feature variances, floored at the smoothing epsilon.
    pub variances: Vec<Vec<R>>,
    /// Class frequencies.
    pub priors: Vec<R>,
}

impl<R: Real> GnbParams<R> {
    fn log_posterior(&self, class: usize, row: &[R]) -> R {
        let two_pi = R::real_from(std::f64::consts::TAU);
        let mut acc = self.priors[class].ln();
        for ((&x, &m), &v) in row.iter().zip(&self.means[class]).zip(&self.variances[class]) {
            let d = x - m;
            acc = acc - R::half() * ((two_pi * v).ln() + d * d / v);
        }
        acc
    }

    pub fn predict_proba(&self, rows: &[Vec<R>]) -> Vec<Vec<R>> {
        rows.iter()
            .map(|row| {
                let logs: Vec<R> = (0..self.priors.len()).map(|k| self.log_posterior(k, row)).collect();
                let max = logs.iter().copied().fold(R::neg_infinity(), R::max);
                let exps: Vec<R> = logs.iter().map(|&l| (l - max).exp()).collect();
                let total: R = exps.iter().copied().sum();
                exps.into_iter().map(|e| e / total).collect()
            })
            .collect()
    }
}

/// Trains Gaussian naive Bayes. Per-class variances are floored at
/// `var_smoothing` times the largest feature variance of the full training
/// set, keeping log-densities finite for constant features.
pub fn train_gnb<R: Real>(matrix: &Matrix<R>, var_smoothing: f64) -> Result<TrainedModel<R>> {
    check_finite(matrix)?;
    let labels = labels_of(matrix)?;
    let classes = class_list(labels)?;
    let d = matrix.n_cols();
    let n = matrix.n_rows();

    // global per-feature variance for the smoothing scale
    let mut global_mean = vec![R::zero(); d];
    for row in &matrix.rows {
        for (m, v) in global_mean.iter_mut().zip(row) {
            *m += *v;
        }
    }
    let nr = R::from_usize_(n);
    for m in &mut global_mean {
        *m = *m / nr;
    }
    let mut global_var = vec![R::zero(); d];
    for row in &matrix.rows {
        for ((s, v), m) in global_var.iter_mut().zip(row).zip(&global_mean) {
            let dlt = *v - *m;
            *s += dlt * dlt;
        }
    }
    let max_var = global_var.iter().map(|s| *s / nr).fold(R::zero(), R::max);
    let epsilon = R::real_from(var_smoothing) * if max_var > R::zero() { max_var } else { R::one() };

    let mut means = Vec::with_capacity(classes.len());
    let mut variances = Vec::with_capacity(classes.len());
    let mut priors = Vec::with_capacity(classes.len());
    for class in &classes {
        let rows: Vec<&Vec<R>> = matrix
            .rows
            .iter()
            .zip(labels)
            .filter(|(_, l)| *l == class)
            .map(|(r, _)| r)
            .collect();
        let nk = R::from_usize_(rows.len());
        let mut mean = vec![R::zero(); d];
        for row in &rows {
            for (m, v) in mean.iter_mut().zip(row.iter()) {
                *m += *v;
            }
        }
        for m in &mut mean {
            *m = *m / nk;
        }
        let mut var = vec![R::zero(); d];
        for row in &rows {
            for ((s, v), m) in var.iter_mut().zip(row.iter()).zip(&mean) {
                let dlt = *v - *m;
                *s += dlt * dlt;
            }
        }
        let var: Vec<R> = var.into_iter().map(|s| (s / nk).max(epsilon)).collect();
        priors.push(nk / nr);
        means.push(mean);
        variances.push(var);
    }
    Ok(TrainedModel {
        version: MODEL_FORMAT_VERSION,
        classes,
        feature_names: matrix.feature_names.clone(),
        seed: None,
        params: ModelParams::Gnb(GnbParams { means, variances, priors }),
    })
}
