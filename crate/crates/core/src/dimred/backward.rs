//! Backward elimination by OLS coefficient p-values.
//!
//! With several target columns, a feature's p-value is the mean of its
//! per-target p-values.

use super::SelectionReport;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, ThinSvd};
use crate::preprocess::FeatureMask;
use crate::special::t_two_sided_p;

const FALLBACK_RIDGE: f64 = 1e-8;

/// Mean two-sided p-value of each coefficient over the target columns.
fn coefficient_p_values(x: &Matrix, y: &Matrix) -> Vec<f64> {
    let (n, d) = x.shape();
    let df = (n - d - 1) as f64;
    let means = linalg::column_means(x);
    let svd = ThinSvd::new(&linalg::center(x, &means));
    let lambda = if svd.rank() < d {
        log::warn!("singular design in backward elimination; using ridge {FALLBACK_RIDGE:e}");
        FALLBACK_RIDGE
    } else {
        0.0
    };
    let ym = linalg::column_means(y);
    let yc = linalg::center(y, &ym);
    let w = svd.solve_ridge(&yc, lambda);
    let resid = &yc - linalg::center(x, &means) * &w;
    // diag((XᵀX + λI)⁻¹) from the SVD.
    let inv_diag: Vec<f64> = (0..d)
        .map(|j| (0..svd.s.len()).map(|k| svd.vt[(k, j)].powi(2) / (svd.s[k].powi(2) + lambda).max(1e-300)).sum())
        .collect();
    let mut p = vec![0.0; d];
    for c in 0..y.ncols() {
        let sigma2 = resid.column(c).norm_squared() / df;
        for j in 0..d {
            let se = (sigma2 * inv_diag[j]).sqrt();
            let pv = if se > 0.0 {
                t_two_sided_p(w[(j, c)] / se, df)
            } else if w[(j, c)] != 0.0 {
                0.0
            } else {
                1.0
            };
            p[j] += pv;
        }
    }
    p.iter_mut().for_each(|v| *v /= y.ncols() as f64);
    p
}

/// Repeatedly drops the single feature with the largest p-value above
/// `p_threshold`. Stops when none exceeds it, after `max_rounds` drops, or
/// when too few rows remain to estimate the residual variance.
pub fn backward_elimination(x: &Matrix, y: &Matrix, p_threshold: f64, max_rounds: usize) -> Result<SelectionReport> {
    if !(p_threshold > 0.0 && p_threshold < 1.0) {
        return Err(Error::Parameter(format!("p_threshold must lie in (0, 1), got {p_threshold}")));
    }
    if x.nrows() != y.nrows() {
        return Err(Error::Shape(format!("{} input rows but {} target rows", x.nrows(), y.nrows())));
    }
    let d = x.ncols();
    let mut active: Vec<usize> = (0..d).collect();
    let mut scores = vec![f64::NAN; d];
    let mut rounds = 0;
    loop {
        if x.nrows() <= active.len() + 1 {
            log::warn!("backward elimination stopped: {} rows for {} features", x.nrows(), active.len());
            break;
        }
        let p = coefficient_p_values(&linalg::select_cols(x, &active), y);
        for (k, &j) in active.iter().enumerate() {
            scores[j] = p[k];
        }
        if rounds >= max_rounds || active.len() == 1 {
            break;
        }
        let worst = (0..p.len()).fold(0, |b, k| if p[k] > p[b] { k } else { b });
        if p[worst] <= p_threshold {
            break;
        }
        active.remove(worst);
        rounds += 1;
    }
    // Features never scored (loop stopped early) report p = 1.
    for s in scores.iter_mut() {
        if s.is_nan() {
            *s = 1.0;
        }
    }
    let mut keep = vec![false; d];
    for &j in &active {
        keep[j] = true;
    }
    Ok(SelectionReport { method: "backward_elimination".into(), scores, selected: FeatureMask::new(keep) })
}
