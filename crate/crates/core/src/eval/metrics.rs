use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PccMode {
    /// One correlation over every (subject, feature) entry.
    #[default]
    Flattened,
    /// Mean of per-subject correlations.
    PerSubject,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mae: f64,
    pub mse: f64,
    pub pcc: f64,
}

fn check(pred: &Matrix, truth: &Matrix) -> Result<()> {
    if pred.shape() != truth.shape() {
        return Err(Error::Shape(format!("prediction is {:?} but truth is {:?}", pred.shape(), truth.shape())));
    }
    if pred.is_empty() {
        return Err(Error::InsufficientData("cannot score empty tables".into()));
    }
    Ok(())
}

/// Mean absolute error over all entries.
pub fn mae(pred: &Matrix, truth: &Matrix) -> Result<f64> {
    check(pred, truth)?;
    Ok(stats::sum(pred.iter().zip(truth.iter()).map(|(a, b)| (a - b).abs())) / pred.len() as f64)
}

/// Mean squared error over all entries.
pub fn mse(pred: &Matrix, truth: &Matrix) -> Result<f64> {
    check(pred, truth)?;
    Ok(stats::sum(pred.iter().zip(truth.iter()).map(|(a, b)| (a - b) * (a - b))) / pred.len() as f64)
}

/// Pearson correlation; a zero-variance side scores 0 with a warning.
pub fn pcc(pred: &Matrix, truth: &Matrix, mode: PccMode) -> Result<f64> {
    check(pred, truth)?;
    match mode {
        PccMode::Flattened => {
            // Row-major flattening; the order is irrelevant to the statistic.
            let a: Vec<f64> = pred.transpose().iter().copied().collect();
            let b: Vec<f64> = truth.transpose().iter().copied().collect();
            Ok(stats::pearson(&a, &b).unwrap_or_else(|| {
                log::warn!("constant predictions or targets: pcc defined as 0");
                0.0
            }))
        }
        PccMode::PerSubject => {
            let mut total = 0.0;
            let mut constant = 0;
            for i in 0..pred.nrows() {
                let a: Vec<f64> = pred.row(i).iter().copied().collect();
                let b: Vec<f64> = truth.row(i).iter().copied().collect();
                match stats::pearson(&a, &b) {
                    Some(r) => total += r,
                    None => constant += 1,
                }
            }
            if constant > 0 {
                log::warn!("{constant} subject(s) with constant rows: their pcc is defined as 0");
            }
            Ok(total / pred.nrows() as f64)
        }
    }
}

pub fn evaluate(pred: &Matrix, truth: &Matrix, mode: PccMode) -> Result<Metrics> {
    Ok(Metrics { mae: mae(pred, truth)?, mse: mse(pred, truth)?, pcc: pcc(pred, truth, mode)? })
}

/// Mean absolute error of each subject (row).
pub fn per_subject_mae(pred: &Matrix, truth: &Matrix) -> Result<Vec<f64>> {
    check(pred, truth)?;
    Ok((0..pred.nrows())
        .map(|i| stats::sum((0..pred.ncols()).map(|j| (pred[(i, j)] - truth[(i, j)]).abs())) / pred.ncols() as f64)
        .collect())
}

/// Pearson correlation of each subject's predicted and true rows; constant
/// rows score 0.
pub fn per_subject_pcc(pred: &Matrix, truth: &Matrix) -> Result<Vec<f64>> {
    check(pred, truth)?;
    Ok((0..pred.nrows())
        .map(|i| {
            let a: Vec<f64> = pred.row(i).iter().copied().collect();
            let b: Vec<f64> = truth.row(i).iter().copied().collect();
            stats::pearson(&a, &b).unwrap_or(0.0)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn pair(seed: u64) -> (Matrix, Matrix) {
        let mut r = crate::rng::stream(seed, &[]);
        (Matrix::from_fn(6, 10, |_, _| r.random::<f64>()), Matrix::from_fn(6, 10, |_, _| r.random::<f64>()))
    }

    #[test]
    fn exact_prediction() {
        let (a, _) = pair(1);
        assert_eq!(mae(&a, &a).unwrap(), 0.0);
        assert_eq!(mse(&a, &a).unwrap(), 0.0);
        assert!((pcc(&a, &a, PccMode::Flattened).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_offset() {
        let (a, _) = pair(2);
        let b = a.add_scalar(0.01);
        assert!((mae(&b, &a).unwrap() - 0.01).abs() < 1e-15);
        assert!((mse(&b, &a).unwrap() - 1e-4).abs() < 1e-15);
        let neg = a.map(|v| 3.0 - v);
        assert!((pcc(&neg, &a, PccMode::Flattened).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn loop_oracles() {
        for seed in 0..20 {
            let (a, b) = pair(seed);
            let (mut s1, mut s2) = (0.0, 0.0);
            for i in 0..6 {
                for j in 0..10 {
                    s1 += (a[(i, j)] - b[(i, j)]).abs();
                    s2 += (a[(i, j)] - b[(i, j)]).powi(2);
                }
            }
            assert!((mae(&a, &b).unwrap() - s1 / 60.0).abs() < 1e-12);
            assert!((mse(&a, &b).unwrap() - s2 / 60.0).abs() < 1e-12);
            // Textbook one-pass formula.
            let n = 60.0;
            let (sa, sb) = (a.sum(), b.sum());
            let sab: f64 = a.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
            let (saa, sbb) = (a.norm_squared(), b.norm_squared());
            let r = (n * sab - sa * sb) / ((n * saa - sa * sa).sqrt() * (n * sbb - sb * sb).sqrt());
            assert!((pcc(&a, &b, PccMode::Flattened).unwrap() - r).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_prediction_scores_zero() {
        let (a, _) = pair(3);
        let c = Matrix::from_element(6, 10, 0.5);
        assert_eq!(pcc(&c, &a, PccMode::Flattened).unwrap(), 0.0);
        assert_eq!(pcc(&c, &a, PccMode::PerSubject).unwrap(), 0.0);
    }

    #[test]
    fn shape_mismatch() {
        assert!(mae(&Matrix::zeros(2, 3), &Matrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn per_subject_pcc_averages_to_per_subject_mode() {
        let (a, b) = pair(5);
        let per = per_subject_pcc(&a, &b).unwrap();
        assert!((per.iter().sum::<f64>() / 6.0 - pcc(&a, &b, PccMode::PerSubject).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn per_subject_mean_is_overall_mae() {
        let (a, b) = pair(4);
        let per = per_subject_mae(&a, &b).unwrap();
        assert!((per.iter().sum::<f64>() / 6.0 - mae(&a, &b).unwrap()).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn permutation_invariance(seed in 0u64..300) {
            let (a, b) = pair(seed);
            let rows = [5usize, 2, 0, 1, 4, 3];
            let cols = [9usize, 0, 8, 1, 7, 2, 6, 3, 5, 4];
            let pa = Matrix::from_fn(6, 10, |i, j| a[(rows[i], cols[j])]);
            let pb = Matrix::from_fn(6, 10, |i, j| b[(rows[i], cols[j])]);
            prop_assert!((mae(&a, &b).unwrap() - mae(&pa, &pb).unwrap()).abs() < 1e-14);
            prop_assert!((mse(&a, &b).unwrap() - mse(&pa, &pb).unwrap()).abs() < 1e-14);
            prop_assert!((pcc(&a, &b, PccMode::Flattened).unwrap() - pcc(&pa, &pb, PccMode::Flattened).unwrap()).abs() < 1e-12);
        }
    }
}
