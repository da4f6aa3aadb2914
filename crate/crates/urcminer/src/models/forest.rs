//! Random forest of CART trees with Gini impurity. Fully deterministic for a
//! given seed: every tree draws from its own seed-derived stream, so training
//! order (sequential or parallel) cannot change the result.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{check_finite, class_list, labels_of, ModelParams, TrainedModel, MODEL_FORMAT_VERSION};
use crate::dataset::Matrix;
use crate::real::Real;
use crate::Result;

#[derive(Debug, Clone, Copy)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub min_samples_split: usize,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig { n_trees: 100, min_samples_split: 2, seed: 0 }
    }
}

/// Nested tree node: a split on `feature <= threshold` or a leaf holding the
/// training class counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "R: Serialize", deserialize = "R: DeserializeOwned"))]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum TreeNode<R> {
    Split {
        feature: usize,
        threshold: R,
        left: Box<TreeNode<R>>,
        right: Box<TreeNode<R>>,
    },
    Leaf {
        counts: Vec<usize>,
    },
}

impl<R: Real> TreeNode<R> {
    fn leaf_counts(&self, row: &[R]) -> &[usize] {
        match self {
            TreeNode::Leaf { counts } => counts,
            TreeNode::Split { feature, threshold, left, right } => {
                if row[*feature] <= *threshold {
                    left.leaf_counts(row)
                } else {
                    right.leaf_counts(row)
                }
            }
        }
    }

    /// Leaf class frequencies for one row.
    pub fn class_frequencies(&self, row: &[R], n_classes: usize) -> Vec<R> {
        let counts = self.leaf_counts(row);
        let total: usize = counts.iter().sum();
        if total == 0 {
            return vec![R::one() / R::from_usize_(n_classes); n_classes];
        }
        counts.iter().map(|&c| R::from_usize_(c) / R::from_usize_(total)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "R: Serialize", deserialize = "R: DeserializeOwned"))]
pub struct ForestParams<R> {
    pub trees: Vec<TreeNode<R>>,
    pub n_classes: usize,
}

impl<R: Real> ForestParams<R> {
    /// Class probability = mean of per-tree leaf class frequencies.
    pub fn predict_proba(&self, rows: &[Vec<R>]) -> Vec<Vec<R>> {
        let nt = R::from_usize_(self.trees.len());
        rows.iter()
            .map(|row| {
                let mut acc = vec![R::zero(); self.n_classes];
                for tree in &self.trees {
                    for (a, f) in acc.iter_mut().zip(tree.class_frequencies(row, self.n_classes)) {
                        *a += f;
                    }
                }
                acc.into_iter().map(|a| a / nt).collect()
            })
            .collect()
    }
}

fn gini(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / t).powi(2)).sum::<f64>()
}

struct SplitChoice<R> {
    feature: usize,
    threshold: R,
    score: f64,
}

fn grow_tree<R: Real>(
    rows: &[Vec<R>],
    targets: &[usize],
    indices: Vec<usize>,
    n_classes: usize,
    n_candidates: usize,
    min_samples_split: usize,
    rng: &mut ChaCha8Rng,
) -> TreeNode<R> {
    let mut counts = vec![0usize; n_classes];
    for &i in &indices {
        counts[targets[i]] += 1;
    }
    let total = indices.len();
    let pure = counts.iter().any(|&c| c == total);
    if pure || total < min_samples_split {
        return TreeNode::Leaf { counts };
    }

    let d = rows[0].len();
    let candidates = rand::seq::index::sample(rng, d, n_candidates.min(d));
    let parent_impurity = gini(&counts, total);
    let mut best: Option<SplitChoice<R>> = None;
    let mut sortable: Vec<(R, usize)> = Vec::with_capacity(total);
    for feature in candidates.iter() {
        sortable.clear();
        sortable.extend(indices.iter().map(|&i| (rows[i][feature], targets[i])));
        sortable.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut left = vec![0usize; n_classes];
        let mut right = counts.clone();
        for w in 0..total - 1 {
            let (value, label) = sortable[w];
            left[label] += 1;
            right[label] -= 1;
            let next_value = sortable[w + 1].0;
            if next_value <= value {
                continue;
            }
            let nl = w + 1;
            let nr = total - nl;
            let weighted = (nl as f64 * gini(&left, nl) + nr as f64 * gini(&right, nr)) / total as f64;
            let score = parent_impurity - weighted;
            let better = match &best {
                None => score > 1e-12,
                Some(b) => score > b.score + 1e-12,
            };
            if better {
                best = Some(SplitChoice {
                    feature,
                    threshold: (value + next_value) * R::half(),
                    score,
                });
            }
        }
    }

    let Some(split) = best else {
        return TreeNode::Leaf { counts };
    };
    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
        .into_iter()
        .partition(|&i| rows[i][split.feature] <= split.threshold);
    let left = grow_tree(rows, targets, left_idx, n_classes, n_candidates, min_samples_split, rng);
    let right = grow_tree(rows, targets, right_idx, n_classes, n_candidates, min_samples_split, rng);
    TreeNode::Split {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(left),
        right: Box::new(right),
    }
}

/// Trains `n_trees` CART trees on bootstrap samples of size n, with
/// floor(sqrt(d)) candidate features per split, grown until pure or below
/// `min_samples_split`.
pub fn train_rforest<R: Real>(matrix: &Matrix<R>, config: &ForestConfig) -> Result<TrainedModel<R>> {
    check_finite(matrix)?;
    let labels = labels_of(matrix)?;
    let classes = class_list(labels)?;
    let targets: Vec<usize> = labels
        .iter()
        .map(|l| classes.iter().position(|c| c == l).unwrap())
        .collect();
    let n = matrix.n_rows();
    let d = matrix.n_cols();
    let n_candidates = ((d as f64).sqrt().floor() as usize).max(1);

    let trees: Vec<TreeNode<R>> = (0..config.n_trees)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(t as u64 + 1);
            let bootstrap: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            grow_tree(
                &matrix.rows,
                &targets,
                bootstrap,
                classes.len(),
                n_candidates,
                config.min_samples_split,
                &mut rng,
            )
        })
        .collect();

    Ok(TrainedModel {
        version: MODEL_FORMAT_VERSION,
        classes: classes.clone(),
        feature_names: matrix.feature_names.clone(),
        seed: Some(config.seed),
        params: ModelParams::Rforest(ForestParams { trees, n_classes: classes.len() }),
    })
}
