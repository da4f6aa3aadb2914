//! Median-of-runs selection for stochastic trainers.

use super::{accuracy, TrainedModel};
use crate::dataset::Matrix;
use crate::real::Real;
use crate::{Error, Result};

/// Trains `k` models with seeds `base_seed..base_seed+k`, scores each by
/// accuracy on `validation`, and returns the model with the median accuracy
/// (the lower middle for even `k`). Ties resolve to the lowest seed.
pub fn median_protocol<R, F>(
    train_fn: F,
    validation: &Matrix<R>,
    k: usize,
    base_seed: u64,
) -> Result<(TrainedModel<R>, f64)>
where
    R: Real,
    F: Fn(u64) -> Result<TrainedModel<R>>,
{
    if k == 0 {
        return Err(Error::InvalidArgument("median protocol needs k >= 1".into()));
    }
    if validation.n_rows() == 0 {
        return Err(Error::InvalidArgument("median protocol needs a non-empty validation set".into()));
    }
    let mut runs: Vec<(f64, u64, TrainedModel<R>)> = Vec::with_capacity(k);
    for offset in 0..k as u64 {
        let seed = base_seed + offset;
        let model = train_fn(seed)?;
        let acc = accuracy(&model, validation)?;
        runs.push((acc, seed, model));
    }
    runs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let median_acc = runs[(k - 1) / 2].0;
    let chosen = runs
        .into_iter()
        .filter(|(acc, _, _)| *acc == median_acc)
        .min_by_key(|(_, seed, _)| *seed)
        .unwrap();
    Ok((chosen.2, chosen.0))
}
