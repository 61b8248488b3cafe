//! Feature extraction (PCA, truncated SVD) and feature selection.
//!
//! Everything here is fitted once on training rows and then reapplied
//! unchanged: projections keep their components and centre, selectors keep a
//! [`FeatureMask`].

mod backward;
mod mi;
mod projection;
mod univariate;
mod variance;

pub use backward::backward_elimination;
pub use mi::{equal_frequency_bins, mutual_information, mutual_information_scores, select_k_best_mi, select_percentile_mi};
pub use projection::{fit_pca, fit_tsvd, Projection, ProjectionKind};
pub use univariate::{generic_univariate_select, UnivariateCandidate};
pub use variance::variance_threshold;

use serde::{Deserialize, Serialize};

use crate::preprocess::FeatureMask;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub method: String,
    /// Relevance score per input feature (meaning depends on `method`).
    pub scores: Vec<f64>,
    pub selected: FeatureMask,
}

/// Keeps the `k` highest scores; equal scores favour the lower index.
pub(crate) fn top_k(scores: &[f64], k: usize) -> FeatureMask {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut keep = vec![false; scores.len()];
    for &i in order.iter().take(k) {
        keep[i] = true;
    }
    FeatureMask::new(keep)
}
