//! Trees and ensemble strategies.
//!
//! Every ensemble is an [`EnsembleModel`]: fitted member models plus a rule
//! for combining their outputs. Members draw from random streams indexed by
//! member number, so fitting them in parallel or serially gives identical
//! results.

pub mod adaboost;
pub mod bagging;
pub mod boosting;
pub mod forest;
pub mod tree;
pub mod voting;

pub use adaboost::{fit_adaboost_r2, fit_adaboost_r2_presorted, weighted_median};
pub use bagging::fit_bagging;
pub use boosting::{fit_gradient_boosting, fit_gradient_boosting_presorted, BoostFit, BoostParams, BoostVariant};
pub use forest::{fit_random_forest, ForestParams, SplitSource};
pub use tree::{fit_tree, fit_tree_presorted, Node, Presort, RegressionTree, Splitter, TreeParams};
pub use voting::{normalize_weights, voting_predict};

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::model::Model;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Combiner {
    Mean,
    /// Weighted mean; weights sum to 1.
    Weighted(Vec<f64>),
    /// Per-entry weighted median over members.
    WeightedMedian(Vec<f64>),
    /// `init + lr · Σ members`.
    StagedSum { init: Vec<f64>, learning_rate: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub members: Vec<Model>,
    pub combiner: Combiner,
    pub n_outputs: usize,
}

impl EnsembleModel {
    pub fn member_predictions(&self, x: &Matrix) -> Vec<Matrix> {
        crate::par::map_indexed(self.members.len(), |m| self.members[m].predict(x))
    }

    pub fn predict(&self, x: &Matrix) -> Matrix {
        let n = x.nrows();
        match &self.combiner {
            Combiner::StagedSum { init, learning_rate } => {
                let mut out = Matrix::from_fn(n, self.n_outputs, |_, c| init[c]);
                for m in &self.members {
                    out += m.predict(x) * *learning_rate;
                }
                out
            }
            Combiner::Mean => {
                let preds = self.member_predictions(x);
                let k = preds.len() as f64;
                Matrix::from_fn(n, self.n_outputs, |i, c| crate::stats::sum(preds.iter().map(|p| p[(i, c)])) / k)
            }
            Combiner::Weighted(w) => {
                let preds = self.member_predictions(x);
                Matrix::from_fn(n, self.n_outputs, |i, c| {
                    crate::stats::sum(preds.iter().zip(w).map(|(p, w)| w * p[(i, c)]))
                })
            }
            Combiner::WeightedMedian(w) => {
                let preds = self.member_predictions(x);
                Matrix::from_fn(n, self.n_outputs, |i, c| {
                    let v: Vec<f64> = preds.iter().map(|p| p[(i, c)]).collect();
                    weighted_median(&v, w)
                })
            }
        }
    }
}
