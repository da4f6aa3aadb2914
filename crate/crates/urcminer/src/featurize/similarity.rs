//! Text and vector similarity measures.

use std::collections::BTreeSet;

use crate::textvec::tokenize;
use crate::{Error, Result};

/// Jaccard similarity over the shared tokenizer's token sets. Two empty sets
/// are identical, so the similarity is 1.0.
pub fn jaccard(text_a: &str, text_b: &str) -> f64 {
    let a: BTreeSet<String> = tokenize(text_a).into_iter().collect();
    let b: BTreeSet<String> = tokenize(text_b).into_iter().collect();
    let union = a.union(&b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(&b).count() as f64 / union as f64
}

/// Cosine similarity between two equal-dimension vectors; any zero vector
/// yields 0.0.
pub fn cosine(vec_a: &[f64], vec_b: &[f64]) -> Result<f64> {
    if vec_a.len() != vec_b.len() {
        return Err(Error::InvalidArgument(format!(
            "cosine: dimension mismatch {} vs {}",
            vec_a.len(),
            vec_b.len()
        )));
    }
    let dot: f64 = vec_a.iter().zip(vec_b).map(|(a, b)| a * b).sum();
    let na: f64 = vec_a.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nb: f64 = vec_b.iter().map(|b| b * b).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        Ok(0.0)
    } else {
        Ok(dot / (na * nb))
    }
}
