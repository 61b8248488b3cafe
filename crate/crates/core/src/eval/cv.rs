use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::metrics::{evaluate, Metrics, PccMode};
use super::rank::{ScoreRecord, Split};
use crate::connectome::LongitudinalDataset;
use crate::error::{Error, Result};
use crate::pipeline::{fit_pipeline, PipelineConfig};
use crate::stats;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    /// Sorted.
    pub train: Vec<usize>,
    /// Sorted.
    pub test: Vec<usize>,
}

/// Seeded shuffle then contiguous folds; the first `n % k` folds hold one
/// extra sample.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::Parameter(format!("k-fold needs k >= 2, got {k}")));
    }
    if n < k {
        return Err(Error::InsufficientData(format!("{n} samples cannot fill {k} folds")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut crate::rng::stream(seed, &[]));
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let size = n / k + usize::from(f < n % k);
        let mut test = order[start..start + size].to_vec();
        test.sort_unstable();
        let mut train: Vec<usize> = order[..start].iter().chain(&order[start + size..]).copied().collect();
        train.sort_unstable();
        folds.push(Fold { train, test });
        start += size;
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub folds: Vec<Metrics>,
    pub mean: Metrics,
    /// Population standard deviation over folds.
    pub std: Metrics,
}

impl CvReport {
    pub fn records(&self, team: &str) -> Vec<ScoreRecord> {
        self.folds
            .iter()
            .enumerate()
            .map(|(i, m)| ScoreRecord { team: team.into(), split: Split::CvFold(i), mae: m.mae, mse: m.mse, pcc: m.pcc })
            .collect()
    }
}

/// Fits `config` on k − 1 folds and scores the held-out fold, for every fold.
pub fn cross_validate(
    config: &PipelineConfig,
    dataset: &LongitudinalDataset,
    k: usize,
    seed: u64,
    mode: PccMode,
) -> Result<CvReport> {
    dataset.targets("cross_validate")?;
    let folds = kfold_split(dataset.n_subjects(), k, seed)?;
    let folds = crate::par::try_map_indexed(folds.len(), |i| {
        let f = &folds[i];
        let fitted = fit_pipeline(config, &dataset.select_rows(&f.train))?;
        let held = dataset.select_rows(&f.test);
        let pred = fitted.predict(held.t0())?;
        evaluate(pred.rows(), held.targets("cross_validate")?.rows(), mode)
    })
    .map_err(|e| e.in_stage(format!("{} cross-validation", config.name)))?;
    let summarize = |get: fn(&Metrics) -> f64| {
        let v: Vec<f64> = folds.iter().map(get).collect();
        (stats::mean(&v), stats::std_dev(&v))
    };
    let (mae, mae_sd) = summarize(|m| m.mae);
    let (mse, mse_sd) = summarize(|m| m.mse);
    let (pcc, pcc_sd) = summarize(|m| m.pcc);
    Ok(CvReport {
        folds,
        mean: Metrics { mae, mse, pcc },
        std: Metrics { mae: mae_sd, mse: mse_sd, pcc: pcc_sd },
    })
}
