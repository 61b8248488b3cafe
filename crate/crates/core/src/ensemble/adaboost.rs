//! AdaBoost.R2 with linear loss.
//!
//! Round 1 trains on the full sample (its weights are uniform); later rounds
//! train on a weighted resample. A round whose weighted average loss reaches
//! 0.5 ends boosting and is discarded unless it is the only member. A round
//! with zero error is kept with unit weight and ends boosting.

use rand::Rng as _;

use super::tree::{fit_tree_presorted, Presort, Splitter};
use super::{Combiner, EnsembleModel};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::model::{fit, LearnerSpec, Model};
use crate::rng;

/// Smallest value whose cumulative weight (in value order, ties by index)
/// reaches half the total.
pub fn weighted_median(values: &[f64], weights: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    for &i in &order {
        acc += weights[i];
        if acc >= 0.5 * total {
            return values[i];
        }
    }
    values[*order.last().expect("non-empty")]
}

pub fn fit_adaboost_r2(
    x: &Matrix,
    y: &[f64],
    base: &LearnerSpec,
    n_estimators: usize,
    learning_rate: f64,
    seed: u64,
) -> Result<EnsembleModel> {
    fit_adaboost_r2_presorted(x, y, base, n_estimators, learning_rate, seed, None)
}

/// As [`fit_adaboost_r2`]. Tree bases with the exhaustive splitter fit on
/// row multisets of `x` through `presort`, which must come from `x`.
pub fn fit_adaboost_r2_presorted(
    x: &Matrix,
    y: &[f64],
    base: &LearnerSpec,
    n_estimators: usize,
    learning_rate: f64,
    seed: u64,
    presort: Option<&Presort>,
) -> Result<EnsembleModel> {
    if n_estimators == 0 {
        return Err(Error::Parameter("adaboost needs at least one estimator".into()));
    }
    if !(learning_rate > 0.0 && learning_rate.is_finite()) {
        return Err(Error::Parameter(format!("learning_rate must be > 0, got {learning_rate}")));
    }
    let n = y.len();
    if n == 0 || x.nrows() != n {
        return Err(Error::Shape(format!("{} rows but {n} targets", x.nrows())));
    }
    let ym = Matrix::from_column_slice(n, 1, y);
    let mut w = vec![1.0 / n as f64; n];
    let mut members = Vec::new();
    let mut member_w = Vec::new();
    for t in 0..n_estimators {
        let member_seed = rng::derive_seed(seed, &[t as u64, 1]);
        let tree_base = match (base, presort) {
            (LearnerSpec::Tree(tp), Some(ps)) if tp.splitter == Splitter::Best => Some((tp, ps)),
            _ => None,
        };
        let model = if t == 0 {
            match tree_base {
                Some((tp, ps)) => {
                    let all: Vec<usize> = (0..n).collect();
                    Model::Tree(fit_tree_presorted(x, &ym, &all, tp, rng::stream(member_seed, &[]), Some(ps))?)
                }
                None => fit(base, x, &ym, member_seed)?,
            }
        } else {
            let mut r = rng::stream(seed, &[t as u64, 0]);
            let cdf: Vec<f64> = w
                .iter()
                .scan(0.0, |acc, v| {
                    *acc += v;
                    Some(*acc)
                })
                .collect();
            let total = *cdf.last().expect("non-empty");
            let rows: Vec<usize> = (0..n)
                .map(|_| {
                    let u = r.random::<f64>() * total;
                    cdf.partition_point(|&c| c <= u).min(n - 1)
                })
                .collect();
            match tree_base {
                Some((tp, ps)) => {
                    Model::Tree(fit_tree_presorted(x, &ym, &rows, tp, rng::stream(member_seed, &[]), Some(ps))?)
                }
                None => fit(base, &linalg::select_rows(x, &rows), &linalg::select_rows(&ym, &rows), member_seed)?,
            }
        };
        let pred = model.predict(x);
        let err: Vec<f64> = (0..n).map(|i| (pred[(i, 0)] - y[i]).abs()).collect();
        let max_err = err.iter().copied().fold(0.0, f64::max);
        if max_err <= 0.0 {
            members.push(model);
            member_w.push(1.0);
            break;
        }
        let loss: Vec<f64> = err.iter().map(|e| e / max_err).collect();
        let avg: f64 = loss.iter().zip(&w).map(|(l, w)| l * w).sum::<f64>() / w.iter().sum::<f64>();
        if avg <= 0.0 {
            members.push(model);
            member_w.push(1.0);
            break;
        }
        if avg >= 0.5 {
            if members.is_empty() {
                members.push(model);
                member_w.push(1.0);
            }
            break;
        }
        let beta = avg / (1.0 - avg);
        members.push(model);
        member_w.push(learning_rate * (1.0 / beta).ln());
        for (wi, l) in w.iter_mut().zip(&loss) {
            *wi *= beta.powf((1.0 - l) * learning_rate);
        }
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= s);
    }
    Ok(EnsembleModel { members, combiner: Combiner::WeightedMedian(member_w), n_outputs: 1 })
}
