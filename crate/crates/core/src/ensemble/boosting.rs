//! Squared-loss gradient boosting.
//!
//! Starts from the column means and adds `lr · tree(residual)` per stage.
//! The second-order variant shrinks leaves to `G / (H + λ)`, which under
//! squared loss (unit hessians) is a tree fitted with `l2_leaf = λ`.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::tree::{fit_tree_presorted, Presort, TreeParams};
use super::{Combiner, EnsembleModel};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::model::Model;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BoostVariant {
    Classic,
    SecondOrder { lambda: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoostParams {
    pub n_estimators: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub variant: BoostVariant,
    /// Share of rows drawn without replacement per stage.
    pub subsample: f64,
}

impl Default for BoostParams {
    fn default() -> Self {
        BoostParams {
            n_estimators: 100,
            learning_rate: 0.1,
            max_depth: 3,
            min_samples_leaf: 1,
            variant: BoostVariant::Classic,
            subsample: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoostFit {
    pub model: EnsembleModel,
    /// Training MSE before any stage, then after each stage.
    pub train_loss: Vec<f64>,
}

fn mse(r: &Matrix) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>() / r.len().max(1) as f64
}

pub fn fit_gradient_boosting(x: &Matrix, y: &Matrix, p: &BoostParams, seed: u64) -> Result<BoostFit> {
    fit_gradient_boosting_presorted(x, y, p, seed, &Presort::new(x))
}

/// As [`fit_gradient_boosting`] with a presort of `x` shared across calls.
pub fn fit_gradient_boosting_presorted(
    x: &Matrix,
    y: &Matrix,
    p: &BoostParams,
    seed: u64,
    presort: &Presort,
) -> Result<BoostFit> {
    if !(p.learning_rate > 0.0 && p.learning_rate.is_finite()) {
        return Err(Error::Parameter(format!("learning_rate must be > 0, got {}", p.learning_rate)));
    }
    if !(p.subsample > 0.0 && p.subsample <= 1.0) {
        return Err(Error::Parameter(format!("subsample must lie in (0, 1], got {}", p.subsample)));
    }
    if let BoostVariant::SecondOrder { lambda } = p.variant {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Parameter(format!("second-order lambda must be >= 0, got {lambda}")));
        }
    }
    let n = x.nrows();
    if n == 0 || y.nrows() != n {
        return Err(Error::Shape(format!("{n} input rows but {} target rows", y.nrows())));
    }
    let init: Vec<f64> = linalg::column_means(y).iter().copied().collect();
    let tp = TreeParams {
        max_depth: Some(p.max_depth),
        min_samples_leaf: p.min_samples_leaf,
        l2_leaf: match p.variant {
            BoostVariant::Classic => 0.0,
            BoostVariant::SecondOrder { lambda } => lambda,
        },
        ..Default::default()
    };
    let size = ((p.subsample * n as f64).round() as usize).clamp(1, n);
    let mut resid = Matrix::from_fn(n, y.ncols(), |i, c| y[(i, c)] - init[c]);
    let mut train_loss = vec![mse(&resid)];
    let mut members = Vec::with_capacity(p.n_estimators);
    for t in 0..p.n_estimators {
        let rows: Vec<usize> = if size == n {
            (0..n).collect()
        } else {
            let mut s = sample(&mut rng::stream(seed, &[t as u64, 0]), n, size).into_vec();
            s.sort_unstable();
            s
        };
        let tree = fit_tree_presorted(x, &resid, &rows, &tp, rng::stream(seed, &[t as u64, 1]), Some(presort))?;
        resid -= tree.predict(x) * p.learning_rate;
        train_loss.push(mse(&resid));
        members.push(Model::Tree(tree));
    }
    Ok(BoostFit {
        model: EnsembleModel {
            members,
            combiner: Combiner::StagedSum { init, learning_rate: p.learning_rate },
            n_outputs: y.ncols(),
        },
        train_loss,
    })
}
