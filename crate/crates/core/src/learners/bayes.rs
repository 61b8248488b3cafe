//! Bayesian ridge regression by evidence maximisation.
//!
//! Gamma priors on the noise precision `alpha` and weight precision `lambda`
//! (shape/rate `1e-6`). Each iteration computes the posterior mean from the
//! SVD of the centred design and then applies the fixed-point updates
//!
//! ```text
//! γ = Σ α s² / (λ + α s²)
//! λ ← (γ + 2λ₁) / (‖w‖² + 2λ₂)
//! α ← (n − γ + 2α₁) / (‖y − Xw‖² + 2α₂)
//! ```

use serde::{Deserialize, Serialize};

use super::linear::{check_xy, CenteredDesign, LinearModel, Regularization};
use crate::error::Result;
use crate::linalg::{self, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BayesianRidgeParams {
    pub max_iter: usize,
    pub tol: f64,
    pub alpha_1: f64,
    pub alpha_2: f64,
    pub lambda_1: f64,
    pub lambda_2: f64,
}

impl Default for BayesianRidgeParams {
    fn default() -> Self {
        BayesianRidgeParams {
            max_iter: 300,
            tol: 1e-4,
            alpha_1: 1e-6,
            alpha_2: 1e-6,
            lambda_1: 1e-6,
            lambda_2: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesianLinearModel {
    pub linear: LinearModel,
    pub alpha: f64,
    pub lambda: f64,
    /// Diagonal of the posterior covariance restricted to the row space.
    pub posterior_var: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

pub fn fit_bayesian_ridge(x: &Matrix, y: &[f64], p: &BayesianRidgeParams) -> Result<BayesianLinearModel> {
    check_xy(x, y.len())?;
    let design = CenteredDesign::new(x);
    Ok(fit_with_design(&design, x, y, p))
}

pub fn fit_bayesian_ridge_columns(x: &Matrix, y: &Matrix, p: &BayesianRidgeParams) -> Result<Vec<BayesianLinearModel>> {
    check_xy(x, y.nrows())?;
    let design = CenteredDesign::new(x);
    Ok(crate::par::map_indexed(y.ncols(), |c| fit_with_design(&design, x, &linalg::col_vec(y, c), p)))
}

fn fit_with_design(design: &CenteredDesign, x: &Matrix, y: &[f64], p: &BayesianRidgeParams) -> BayesianLinearModel {
    let n = y.len();
    let nf = n as f64;
    let svd = &design.svd;
    let y_mean = crate::stats::mean(y);
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let var_y = yc.iter().map(|v| v * v).sum::<f64>() / nf;
    let k = svd.s.len();
    let eig: Vec<f64> = svd.s.iter().map(|s| s * s).collect();
    let uty: Vec<f64> = (0..k).map(|i| svd.u.column(i).iter().zip(&yc).map(|(a, b)| a * b).sum()).collect();
    // ‖y‖² outside the column space of U, needed for the residual norm.
    let y_perp = (yc.iter().map(|v| v * v).sum::<f64>() - uty.iter().map(|v| v * v).sum::<f64>()).max(0.0);

    let mut alpha = 1.0 / (var_y + f64::EPSILON);
    let mut lambda = 1.0;
    // Posterior mean expressed in the right-singular basis.
    let coef_v = |alpha: f64, lambda: f64| -> Vec<f64> {
        (0..k).map(|i| svd.s[i] * uty[i] / (eig[i] + lambda / alpha)).collect()
    };
    let rss = |cv: &[f64]| -> f64 {
        y_perp + (0..k).map(|i| (uty[i] - svd.s[i] * cv[i]).powi(2)).sum::<f64>()
    };

    let mut prev: Option<Vec<f64>> = None;
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..p.max_iter {
        iterations = it + 1;
        let cv = coef_v(alpha, lambda);
        let r = rss(&cv);
        let gamma: f64 = eig.iter().map(|e| alpha * e / (lambda + alpha * e)).sum();
        let w_norm2: f64 = cv.iter().map(|c| c * c).sum();
        lambda = (gamma + 2.0 * p.lambda_1) / (w_norm2 + 2.0 * p.lambda_2);
        alpha = (nf - gamma + 2.0 * p.alpha_1) / (r + 2.0 * p.alpha_2);
        if let Some(old) = &prev {
            // The weight change is the same in the orthonormal basis.
            let change: f64 = weights_from(svd, old).iter().zip(weights_from(svd, &cv)).map(|(a, b)| (a - b).abs()).sum();
            if change < p.tol {
                converged = true;
                break;
            }
        }
        prev = Some(cv);
    }
    if !converged {
        log::warn!("bayesian ridge did not converge in {} iterations", p.max_iter);
    }
    let cv = coef_v(alpha, lambda);
    let weights = weights_from(svd, &cv);
    let intercept = y_mean - weights.iter().zip(&design.x_mean).map(|(a, b)| a * b).sum::<f64>();
    let d = x.ncols();
    let posterior_var: Vec<f64> = (0..d)
        .map(|j| (0..k).map(|i| svd.vt[(i, j)].powi(2) / (alpha * eig[i] + lambda)).sum())
        .collect();
    BayesianLinearModel {
        linear: LinearModel {
            weights,
            intercept,
            regularization: Regularization::L2 { lambda: lambda / alpha },
        },
        alpha,
        lambda,
        posterior_var,
        converged,
        iterations,
    }
}

fn weights_from(svd: &linalg::ThinSvd, cv: &[f64]) -> Vec<f64> {
    (0..svd.vt.ncols())
        .map(|j| (0..cv.len()).map(|i| svd.vt[(i, j)] * cv[i]).sum())
        .collect()
}
