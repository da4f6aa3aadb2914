//! From-scratch supervised classifiers with training, probability
//! prediction, JSON persistence, and the median-of-runs protocol.

mod forest;
mod gnb;
mod logreg;
mod median;

pub use forest::{train_rforest, ForestConfig, ForestParams, TreeNode};
pub use gnb::{train_gnb, GnbParams};
pub use logreg::{loss_and_gradient, train_logreg, train_logreg_with_history, LogregConfig, LogregParams};
pub use median::median_protocol;

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::dataset::Matrix;
use crate::real::Real;
use crate::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Logreg,
    Gnb,
    Rforest,
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_lowercase().as_str() {
            "logreg" | "lr" => Ok(ModelKind::Logreg),
            "gnb" | "nb" => Ok(ModelKind::Gnb),
            "rforest" | "rf" => Ok(ModelKind::Rforest),
            other => Err(Error::InvalidArgument(format!("unknown model kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "R: Serialize", deserialize = "R: DeserializeOwned"))]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelParams<R> {
    Logreg(LogregParams<R>),
    Gnb(GnbParams<R>),
    Rforest(ForestParams<R>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "R: Serialize", deserialize = "R: DeserializeOwned"))]
pub struct TrainedModel<R> {
    pub version: u32,
    /// Ordered class labels; probability vectors align to this order.
    pub classes: Vec<String>,
    pub feature_names: Vec<String>,
    pub seed: Option<u64>,
    pub params: ModelParams<R>,
}

impl<R> TrainedModel<R> {
    pub fn kind(&self) -> ModelKind {
        match self.params {
            ModelParams::Logreg(_) => ModelKind::Logreg,
            ModelParams::Gnb(_) => ModelKind::Gnb,
            ModelParams::Rforest(_) => ModelKind::Rforest,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub comment_id: i64,
    pub class_probabilities: BTreeMap<String, f64>,
    pub predicted_class: String,
}

/// Distinct labels in sorted order; errors when fewer than two are present.
pub fn class_list(labels: &[String]) -> Result<Vec<String>> {
    let mut classes: Vec<String> = labels.to_vec();
    classes.sort();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::Training(format!("need at least 2 classes, got {}", classes.len())));
    }
    Ok(classes)
}

pub(crate) fn check_finite<R: Real>(matrix: &Matrix<R>) -> Result<()> {
    for (i, row) in matrix.rows.iter().enumerate() {
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Training(format!("non-finite feature value in row {i}")));
        }
    }
    Ok(())
}

pub(crate) fn labels_of<R: Real>(matrix: &Matrix<R>) -> Result<&[String]> {
    matrix
        .labels
        .as_deref()
        .ok_or_else(|| Error::Training("training matrix has no labels".into()))
}

/// Per-row class probabilities, aligned to `model.classes`.
pub fn predict_proba<R: Real>(model: &TrainedModel<R>, matrix: &Matrix<R>) -> Result<Vec<Vec<R>>> {
    let aligned = matrix.align_to(&model.feature_names)?;
    let probs = match &model.params {
        ModelParams::Logreg(p) => p.predict_proba(&aligned.rows),
        ModelParams::Gnb(p) => p.predict_proba(&aligned.rows),
        ModelParams::Rforest(p) => p.predict_proba(&aligned.rows),
    };
    Ok(probs)
}

/// Predictions with argmax class; ties broken by class order.
pub fn predict<R: Real>(model: &TrainedModel<R>, matrix: &Matrix<R>) -> Result<Vec<Prediction>> {
    let probs = predict_proba(model, matrix)?;
    Ok(matrix
        .ids
        .iter()
        .zip(probs)
        .map(|(&comment_id, row)| {
            let mut best = 0usize;
            for (i, p) in row.iter().enumerate() {
                if *p > row[best] {
                    best = i;
                }
            }
            Prediction {
                comment_id,
                class_probabilities: model
                    .classes
                    .iter()
                    .zip(&row)
                    .map(|(c, p)| (c.clone(), p.as_f64()))
                    .collect(),
                predicted_class: model.classes[best].clone(),
            }
        })
        .collect())
}

/// Fraction of rows whose argmax class equals the label.
pub fn accuracy<R: Real>(model: &TrainedModel<R>, matrix: &Matrix<R>) -> Result<f64> {
    let labels = labels_of(matrix)?;
    let predictions = predict(model, matrix)?;
    if predictions.is_empty() {
        return Err(Error::InvalidArgument("accuracy of an empty set".into()));
    }
    let hits = predictions
        .iter()
        .zip(labels)
        .filter(|(p, l)| &p.predicted_class == *l)
        .count();
    Ok(hits as f64 / predictions.len() as f64)
}

pub fn save<R: Real + Serialize>(model: &TrainedModel<R>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let f = std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    serde_json::to_writer(std::io::BufWriter::new(f), model)?;
    Ok(())
}

pub fn load<R: Real + DeserializeOwned>(path: impl AsRef<Path>) -> Result<TrainedModel<R>> {
    let path = path.as_ref();
    let f = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let model: TrainedModel<R> = serde_json::from_reader(std::io::BufReader::new(f))?;
    if model.version != MODEL_FORMAT_VERSION {
        return Err(Error::Schema(format!("unsupported model version {}", model.version)));
    }
    Ok(model)
}
