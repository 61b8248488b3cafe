//! Single-pass leave-one-out sample pruning against a ridge base learner.

use super::{require_rows, SampleMask};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, ThinSvd};

/// Per-sample absolute leave-one-out residual (averaged over target columns)
/// of a ridge fit with unpenalised intercept, from the hat-matrix identity
/// `e_i / (1 - h_ii)`.
fn loo_residuals(x: &Matrix, y: &Matrix, lambda: f64) -> Vec<f64> {
    let n = x.nrows();
    let xm = linalg::column_means(x);
    let ym = linalg::column_means(y);
    let xc = linalg::center(x, &xm);
    let yc = linalg::center(y, &ym);
    let svd = ThinSvd::new(&xc);
    let r = if lambda == 0.0 { svd.rank() } else { svd.s.len() };
    let shrink: Vec<f64> = (0..r)
        .map(|k| {
            let s2 = svd.s[k] * svd.s[k];
            if lambda == 0.0 { 1.0 } else { s2 / (s2 + lambda) }
        })
        .collect();
    let mut uy = svd.u.columns(0, r).transpose() * &yc;
    for k in 0..r {
        uy.row_mut(k).scale_mut(shrink[k]);
    }
    let fitted = svd.u.columns(0, r) * uy;
    (0..n)
        .map(|i| {
            let h = 1.0 / n as f64 + (0..r).map(|k| shrink[k] * svd.u[(i, k)].powi(2)).sum::<f64>();
            let denom = (1.0 - h).max(1e-12);
            (0..y.ncols()).map(|j| ((yc[(i, j)] - fitted[(i, j)]) / denom).abs()).sum::<f64>() / y.ncols() as f64
        })
        .collect()
}

#[cfg(test)]
fn loo_error(x: &Matrix, y: &Matrix, lambda: f64) -> f64 {
    crate::stats::mean(&loo_residuals(x, y, lambda))
}

/// Visits samples in order and removes sample `i` when the other kept
/// samples have a lower mean leave-one-out error without `i` in the training
/// set than with it. One pass only; at least four samples stay.
pub fn loo_prune_mask(x: &Matrix, y: &Matrix, lambda: f64) -> Result<SampleMask> {
    require_rows(x, 5, "loo_prune")?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Parameter(format!("ridge lambda must be >= 0, got {lambda}")));
    }
    let n = x.nrows();
    let mut keep = vec![true; n];
    let mut idx: Vec<usize> = (0..n).collect();
    let mut res = loo_residuals(x, y, lambda);
    for i in 0..n {
        if idx.len() <= 4 {
            break;
        }
        let pos = idx.iter().position(|&j| j == i).expect("visited in order");
        let with = (crate::stats::sum(res.iter().copied()) - res[pos]) / (idx.len() - 1) as f64;
        let rest: Vec<usize> = idx.iter().copied().filter(|&j| j != i).collect();
        let trial = loo_residuals(&linalg::select_rows(x, &rest), &linalg::select_rows(y, &rest), lambda);
        if crate::stats::mean(&trial) < with {
            keep[i] = false;
            idx = rest;
            res = trial;
        }
    }
    SampleMask::new(keep)
}
