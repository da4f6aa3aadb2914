//! Classification evaluation: per-class precision/recall/F1, accuracy,
//! rank-based AUC, and the confusion matrix.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::models::Prediction;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
    /// True when a zero denominator forced precision or recall to 0.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub classes: Vec<String>,
    pub accuracy: f64,
    /// Mann-Whitney AUC: binary directly, macro one-vs-rest for more classes.
    /// Absent when probabilities were not supplied.
    pub auc: Option<f64>,
    pub per_class: BTreeMap<String, ClassMetrics>,
    /// confusion[i][j] = rows with true class i predicted as class j.
    pub confusion: Vec<Vec<usize>>,
    pub n: usize,
}

fn ratio(num: usize, den: usize) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

/// Builds the full report from true labels and model predictions. The class
/// list is the sorted union of observed and predicted classes.
pub fn classification_report(truth: &[String], predictions: &[Prediction]) -> Result<EvalReport> {
    if truth.len() != predictions.len() {
        return Err(Error::InvalidArgument(format!(
            "length mismatch: {} labels vs {} predictions",
            truth.len(),
            predictions.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::InvalidArgument("cannot evaluate an empty set".into()));
    }
    let mut classes: Vec<String> = truth.to_vec();
    classes.extend(predictions.iter().map(|p| p.predicted_class.clone()));
    classes.extend(predictions.iter().flat_map(|p| p.class_probabilities.keys().cloned()));
    classes.sort();
    classes.dedup();
    let index: BTreeMap<&str, usize> =
        classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();

    let k = classes.len();
    let mut confusion = vec![vec![0usize; k]; k];
    for (label, pred) in truth.iter().zip(predictions) {
        confusion[index[label.as_str()]][index[pred.predicted_class.as_str()]] += 1;
    }

    let mut per_class = BTreeMap::new();
    let mut correct = 0usize;
    for (i, class) in classes.iter().enumerate() {
        let tp = confusion[i][i];
        correct += tp;
        let support: usize = confusion[i].iter().sum();
        let predicted: usize = confusion.iter().map(|row| row[i]).sum();
        let (precision, p_deg) = ratio(tp, predicted);
        let (recall, r_deg) = ratio(tp, support);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        per_class.insert(
            class.clone(),
            ClassMetrics { precision, recall, f1, support, degenerate: p_deg || r_deg },
        );
    }

    let auc = auc_from_predictions(&classes, truth, predictions, &index).ok();
    Ok(EvalReport {
        accuracy: correct as f64 / truth.len() as f64,
        auc,
        per_class,
        confusion,
        n: truth.len(),
        classes,
    })
}

fn auc_from_predictions(
    classes: &[String],
    truth: &[String],
    predictions: &[Prediction],
    index: &BTreeMap<&str, usize>,
) -> Result<f64> {
    if classes.len() == 2 {
        let positive = &classes[1];
        let scores: Vec<f64> = predictions
            .iter()
            .map(|p| p.class_probabilities.get(positive).copied().unwrap_or(0.0))
            .collect();
        let labels: Vec<bool> = truth.iter().map(|l| l == positive).collect();
        return auc(&labels, &scores);
    }
    // macro one-vs-rest: each class in turn is the positive
    let mut total = 0.0;
    for class in classes {
        let scores: Vec<f64> = predictions
            .iter()
            .map(|p| p.class_probabilities.get(class).copied().unwrap_or(0.0))
            .collect();
        let labels: Vec<bool> = truth.iter().map(|l| index[l.as_str()] == index[class.as_str()]).collect();
        total += auc(&labels, &scores)?;
    }
    Ok(total / classes.len() as f64)
}

/// Mann-Whitney AUC with average ranks for tied scores: the probability a
/// randomly drawn positive outranks a randomly drawn negative, ties counting
/// one half.
pub fn auc(truth: &[bool], scores: &[f64]) -> Result<f64> {
    if truth.len() != scores.len() {
        return Err(Error::InvalidArgument("auc: length mismatch".into()));
    }
    let n_pos = truth.iter().filter(|&&t| t).count();
    let n_neg = truth.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::UndefinedMetric("auc needs both classes present".into()));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidArgument("auc: non-finite score".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    // average ranks within tie groups (ranks are 1-based)
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            if truth[idx] {
                rank_sum_pos += avg_rank;
            }
        }
        i = j;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

impl EvalReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Aligned plain-text table: one row per class plus accuracy and AUC.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let width = self
            .classes
            .iter()
            .map(|c| c.len())
            .max()
            .unwrap_or(8)
            .max("Category".len());
        let _ = writeln!(out, "{:<width$}  Precision  Recall  F1-score  Support", "Category");
        for class in &self.classes {
            let m = &self.per_class[class];
            let _ = writeln!(
                out,
                "{:<width$}  {:>9.3}  {:>6.3}  {:>8.3}  {:>7}{}",
                class,
                m.precision,
                m.recall,
                m.f1,
                m.support,
                if m.degenerate { "  (zero denominator)" } else { "" }
            );
        }
        let _ = writeln!(out, "Accuracy: {:.1}%", self.accuracy * 100.0);
        if let Some(auc) = self.auc {
            let _ = writeln!(out, "AUC: {auc:.3}");
        }
        out
    }
}
