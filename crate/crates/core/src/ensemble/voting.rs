//! Averaging of member predictions.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::Model;

/// Validates weights (finite, non-negative, positive total) and rescales
/// them to sum to 1. `None` means uniform.
pub fn normalize_weights(weights: Option<&[f64]>, members: usize) -> Result<Vec<f64>> {
    if members == 0 {
        return Err(Error::Parameter("voting needs at least one member".into()));
    }
    let Some(w) = weights else {
        return Ok(vec![1.0 / members as f64; members]);
    };
    if w.len() != members {
        return Err(Error::Parameter(format!("{} weights for {members} members", w.len())));
    }
    if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::Parameter("voting weights must be finite and >= 0".into()));
    }
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return Err(Error::Parameter("voting weights must not all be zero".into()));
    }
    Ok(w.iter().map(|v| v / total).collect())
}

pub fn voting_predict(members: &[Model], weights: Option<&[f64]>, x: &Matrix) -> Result<Matrix> {
    let w = normalize_weights(weights, members.len())?;
    let preds: Vec<Matrix> = members.iter().map(|m| m.predict(x)).collect();
    let shape = preds[0].shape();
    if preds.iter().any(|p| p.shape() != shape) {
        return Err(Error::Shape("voting members disagree on output shape".into()));
    }
    if weights.is_none() {
        let k = members.len() as f64;
        return Ok(Matrix::from_fn(shape.0, shape.1, |i, c| crate::stats::sum(preds.iter().map(|p| p[(i, c)])) / k));
    }
    Ok(Matrix::from_fn(shape.0, shape.1, |i, c| crate::stats::sum(preds.iter().zip(&w).map(|(p, w)| w * p[(i, c)]))))
}
