//! Huber regression with a concomitant scale parameter.
//!
//! The objective over `(w, b, σ)` is
//!
//! ```text
//! nσ + Σ_{|r|≤εσ} r²/σ + Σ_{|r|>εσ} (2ε|r| − ε²σ) + λ‖w‖²
//! ```
//!
//! which is jointly convex. `σ` is optimised as `exp(τ)` to keep it positive.

use serde::{Deserialize, Serialize};

use super::linear::{check_xy, LinearModel, Regularization};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::optim::lbfgs;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HuberParams {
    pub epsilon: f64,
    pub lambda: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for HuberParams {
    fn default() -> Self {
        HuberParams { epsilon: 1.35, lambda: 1e-4, tol: 1e-6, max_iter: 100 }
    }
}

impl HuberParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 1.0 && self.epsilon.is_finite()) {
            return Err(Error::Parameter(format!("huber epsilon must exceed 1, got {}", self.epsilon)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Parameter(format!("huber lambda must be >= 0, got {}", self.lambda)));
        }
        Ok(())
    }
}

/// Objective and gradient at `theta = [w.., b, τ]`.
pub fn huber_objective(x: &Matrix, y: &[f64], theta: &[f64], p: &HuberParams) -> (f64, Vec<f64>) {
    let (n, d) = x.shape();
    let w = Vector::from_column_slice(&theta[..d]);
    let b = theta[d];
    let sigma = theta[d + 1].exp();
    let eps = p.epsilon;
    let pred = x * &w;
    let mut f = n as f64 * sigma;
    let mut dsigma = n as f64;
    // d(term)/d(pred) per sample
    let mut dpred = Vector::zeros(n);
    for i in 0..n {
        let r = y[i] - pred[i] - b;
        if r.abs() <= eps * sigma {
            f += r * r / sigma;
            dsigma -= r * r / (sigma * sigma);
            dpred[i] = -2.0 * r / sigma;
        } else {
            f += 2.0 * eps * r.abs() - eps * eps * sigma;
            dsigma -= eps * eps;
            dpred[i] = -2.0 * eps * r.signum();
        }
    }
    let gw = x.tr_mul(&dpred) + &w * (2.0 * p.lambda);
    f += p.lambda * w.norm_squared();
    let mut g = Vec::with_capacity(d + 2);
    g.extend(gw.iter());
    g.push(dpred.sum());
    g.push(dsigma * sigma);
    (f, g)
}

/// Returns the model and the fitted scale.
pub fn fit_huber_with_scale(x: &Matrix, y: &[f64], p: &HuberParams) -> Result<(LinearModel, f64)> {
    check_xy(x, y.len())?;
    p.validate()?;
    let d = x.ncols();
    let mut theta0 = vec![0.0; d + 2];
    theta0[d] = stats::mean(y);
    theta0[d + 1] = stats::std_dev(y).max(1e-3).ln();
    let res = lbfgs(|t| huber_objective(x, y, t, p), theta0, p.tol, p.max_iter);
    if !res.converged {
        log::debug!("huber stopped at gradient norm {:.3e} after {} iterations", res.grad_norm, res.iterations);
    }
    let model = LinearModel {
        weights: res.x[..d].to_vec(),
        intercept: res.x[d],
        regularization: Regularization::L2 { lambda: p.lambda },
    };
    Ok((model, res.x[d + 1].exp()))
}

pub fn fit_huber(x: &Matrix, y: &[f64], p: &HuberParams) -> Result<LinearModel> {
    Ok(fit_huber_with_scale(x, y, p)?.0)
}
