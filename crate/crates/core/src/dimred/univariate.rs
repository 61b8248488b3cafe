use serde::{Deserialize, Serialize};

use super::mi::mutual_information_scores;
use super::{top_k, SelectionReport};
use crate::error::{Error, Result};
use crate::eval::kfold_split;
use crate::linalg::{self, Matrix};
use crate::model::{fit, LearnerSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum UnivariateCandidate {
    KBest { k: usize },
    Percentile { percentile: f64 },
}

impl UnivariateCandidate {
    fn count(&self, d: usize) -> Result<usize> {
        match *self {
            UnivariateCandidate::KBest { k } if k >= 1 && k <= d => Ok(k),
            UnivariateCandidate::Percentile { percentile } if percentile > 0.0 && percentile <= 100.0 => {
                Ok(((percentile * d as f64 / 100.0).ceil() as usize).clamp(1, d))
            }
            c => Err(Error::Parameter(format!("invalid univariate candidate {c:?} for {d} features"))),
        }
    }
}

/// Picks the candidate selection with the lowest `cv_folds`-fold CV MAE of
/// `base` (first candidate wins ties). MI scores are computed once on all
/// rows; only the learner is cross-validated.
pub fn generic_univariate_select(
    x: &Matrix,
    y: &Matrix,
    candidates: &[UnivariateCandidate],
    cv_folds: usize,
    base: &LearnerSpec,
    bins: usize,
    seed: u64,
) -> Result<SelectionReport> {
    if candidates.is_empty() {
        return Err(Error::Parameter("generic univariate select needs at least one candidate".into()));
    }
    let d = x.ncols();
    let counts: Vec<usize> = candidates.iter().map(|c| c.count(d)).collect::<Result<_>>()?;
    let scores = mutual_information_scores(x, y, bins)?;
    let folds = kfold_split(x.nrows(), cv_folds, seed)?;
    let mut best: Option<(f64, usize)> = None;
    for (ci, &k) in counts.iter().enumerate() {
        let mask = top_k(&scores, k);
        let xs = mask.apply(x)?;
        let mut total = 0.0;
        let mut count = 0usize;
        for (fi, f) in folds.iter().enumerate() {
            let model = fit(
                base,
                &linalg::select_rows(&xs, &f.train),
                &linalg::select_rows(y, &f.train),
                crate::rng::derive_seed(seed, &[fi as u64]),
            )?;
            let pred = model.predict(&linalg::select_rows(&xs, &f.test));
            let truth = linalg::select_rows(y, &f.test);
            total += (pred - truth).abs().sum();
            count += f.test.len() * y.ncols();
        }
        let mae = total / count as f64;
        log::debug!("univariate candidate {:?}: cv mae {mae:.6}", candidates[ci]);
        if best.is_none_or(|(b, _)| mae < b) {
            best = Some((mae, ci));
        }
    }
    let (_, ci) = best.expect("non-empty candidates");
    Ok(SelectionReport { method: "generic_univariate_select".into(), scores: scores.clone(), selected: top_k(&scores, counts[ci]) })
}
