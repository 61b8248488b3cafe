//! Sample- and feature-level preprocessing fitted on training rows only.
//!
//! Sample eliminators return a [`SampleMask`]; feature filters return a
//! [`FeatureMask`] that is recorded at fit time and reapplied verbatim to any
//! later table.

mod augment;
mod features;
mod iforest;
mod lof;
mod loo;
mod outliers;
mod scaler;
mod transform;

pub use augment::augment_noise;
pub use features::{drop_constant_features, drop_correlated_features, drop_redundant_features};
pub use iforest::{average_path_length, iforest_mask, iforest_scores, IsolationForestParams};
pub use lof::{lof_mask, lof_scores};
pub use loo::loo_prune_mask;
pub use outliers::{iqr_bounds, iqr_mask, zscore_mask};
pub use scaler::{fit_scaler, ScaleMode, ScalerParams};
pub use transform::{logit_transform, sigmoid_transform, LOGIT_EPS};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Which subjects survive an elimination step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleMask {
    keep: Vec<bool>,
}

impl SampleMask {
    /// Errors if no entry is kept.
    pub fn new(keep: Vec<bool>) -> Result<Self> {
        if !keep.iter().any(|&k| k) {
            return Err(Error::InsufficientData(
                "outlier elimination would remove every sample".into(),
            ));
        }
        Ok(SampleMask { keep })
    }

    pub fn all(n: usize) -> Self {
        SampleMask { keep: vec![true; n] }
    }

    pub fn keep(&self) -> &[bool] {
        &self.keep
    }

    pub fn len(&self) -> usize {
        self.keep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keep.is_empty()
    }

    pub fn kept_count(&self) -> usize {
        self.keep.iter().filter(|&&k| k).count()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.keep.iter().enumerate().filter_map(|(i, &k)| k.then_some(i)).collect()
    }

    /// Drops a sample when more than `fraction * n_features` of its features
    /// are flagged; `fraction = 0` drops on any flagged feature.
    pub(crate) fn from_violations(counts: &[usize], n_features: usize, fraction: f64) -> Result<Self> {
        let limit = fraction * n_features as f64;
        SampleMask::new(counts.iter().map(|&c| (c as f64) <= limit).collect())
    }
}

/// Which feature columns survive a selection step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureMask {
    keep: Vec<bool>,
}

impl FeatureMask {
    pub fn new(keep: Vec<bool>) -> Self {
        FeatureMask { keep }
    }

    pub fn all(d: usize) -> Self {
        FeatureMask { keep: vec![true; d] }
    }

    pub fn keep(&self) -> &[bool] {
        &self.keep
    }

    pub fn len(&self) -> usize {
        self.keep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keep.is_empty()
    }

    pub fn kept_count(&self) -> usize {
        self.keep.iter().filter(|&&k| k).count()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.keep.iter().enumerate().filter_map(|(i, &k)| k.then_some(i)).collect()
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if x.ncols() != self.keep.len() {
            return Err(Error::Shape(format!(
                "feature mask fitted on {} columns, table has {}",
                self.keep.len(),
                x.ncols()
            )));
        }
        Ok(linalg::select_cols(x, &self.indices()))
    }
}

pub(crate) fn require_rows(x: &Matrix, min: usize, op: &str) -> Result<()> {
    if x.nrows() < min {
        return Err(Error::InsufficientData(format!(
            "{op} needs at least {min} rows, got {}",
            x.nrows()
        )));
    }
    Ok(())
}
