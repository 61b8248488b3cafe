//! Prediction of follow-up brain connectomes from baseline scans.
//!
//! The crate covers the whole workflow: connectome vectorisation and CSV
//! ingestion, preprocessing and dimensionality reduction, single and
//! ensemble regressors, declarative pipelines (including the twenty bundled
//! team configurations), and the evaluation and ranking protocol.

pub mod bench;
pub mod connectome;
pub mod dimred;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod learners;
pub mod linalg;
pub mod model;
pub mod optim;
mod par;
pub mod pipeline;
pub mod preprocess;
pub mod rng;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
