//! Mining and detection of update-request comments (URCs) on Stack Overflow
//! answer posts.
//!
//! The crate ingests SO data-dump XML into per-answer threads, extracts a
//! feature vector per comment, vectorizes comment text with TF-IDF, trains
//! classic supervised classifiers (logistic regression, Gaussian naive Bayes,
//! random forest) and evaluates them, and replicates the empirical statistics
//! (prevalence, address latency, role matrix, score quantiles) from annotated
//! threads.

pub mod cli;
pub mod dataset;
pub mod empirics;
pub mod error;
pub mod featurize;
pub mod ingest;
pub mod manifest;
pub mod metrics;
pub mod models;
pub mod real;
pub mod textvec;

pub use error::{Error, Result};
pub use real::Real;

/// Default scalar type for the pipeline.
pub type Scalar = f64;

/// Concrete data matrix used by the CLI pipeline.
pub type DataMatrix = dataset::Matrix<Scalar>;
