//! Orthogonal matching pursuit.

use super::linear::{check_xy, fit_ols, LinearModel, Regularization};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::stats;

/// Greedily adds the column most correlated (in absolute, norm-adjusted
/// terms) with the current residual, refitting least squares on the active
/// set after every addition. Stops early once the residual vanishes.
pub fn fit_omp(x: &Matrix, y: &[f64], n_nonzero: usize) -> Result<LinearModel> {
    check_xy(x, y.len())?;
    let d = x.ncols();
    if n_nonzero == 0 || n_nonzero > d {
        return Err(Error::Parameter(format!("n_nonzero must lie in 1..={d}, got {n_nonzero}")));
    }
    let means = linalg::column_means(x);
    let xc = linalg::center(x, &means);
    let norms: Vec<f64> = xc.column_iter().map(|c| c.norm()).collect();
    let y_mean = stats::mean(y);
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let y_scale = yc.iter().map(|v| v * v).sum::<f64>().sqrt();

    let mut active: Vec<usize> = Vec::new();
    let mut resid = yc.clone();
    let mut model = LinearModel {
        weights: vec![0.0; d],
        intercept: y_mean,
        regularization: Regularization::L0 { k: n_nonzero },
    };
    while active.len() < n_nonzero {
        if resid.iter().map(|v| v * v).sum::<f64>().sqrt() <= 1e-12 * y_scale.max(1e-300) {
            break;
        }
        let best = (0..d)
            .filter(|j| !active.contains(j) && norms[*j] > 0.0)
            .map(|j| {
                let c: f64 = xc.column(j).iter().zip(&resid).map(|(a, r)| a * r).sum();
                (j, (c / norms[j]).abs())
            })
            .fold(None::<(usize, f64)>, |acc, (j, s)| match acc {
                Some((_, bs)) if bs >= s => acc,
                _ => Some((j, s)),
            });
        let Some((j, _)) = best else { break };
        active.push(j);
        let sub = linalg::select_cols(x, &active);
        let fit = fit_ols(&sub, y)?;
        let pred = fit.predict(&sub);
        resid = y.iter().zip(&pred).map(|(a, b)| a - b).collect();
        model.weights = vec![0.0; d];
        for (k, &col) in active.iter().enumerate() {
            model.weights[col] = fit.weights[k];
        }
        model.intercept = fit.intercept;
    }
    Ok(model)
}
