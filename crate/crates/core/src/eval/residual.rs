use crate::connectome::{rois_for_features, ConnectivityMatrix, FeatureVector};
use crate::error::{Error, Result};

/// Symmetric matrix of `|pred − truth|` per edge, zero on the diagonal.
pub fn residual_matrix(pred: &FeatureVector, truth: &FeatureVector) -> Result<ConnectivityMatrix> {
    if pred.len() != truth.len() {
        return Err(Error::Shape(format!("vectors of length {} and {}", pred.len(), truth.len())));
    }
    let n = rois_for_features(pred.len())
        .ok_or_else(|| Error::Shape(format!("{} is not a triangular feature count", pred.len())))?;
    let diff: Vec<f64> = pred.values().iter().zip(truth.values()).map(|(a, b)| (a - b).abs()).collect();
    ConnectivityMatrix::devectorize(&FeatureVector::new(diff)?, n)
}
