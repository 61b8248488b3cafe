//! Elastic net by cyclic coordinate descent.
//!
//! Features are centred and scaled to unit population variance before
//! solving
//!
//! ```text
//! (1/2n)‖y_c − Zβ‖² + α·ρ‖β‖₁ + α(1−ρ)/2 ‖β‖²
//! ```
//!
//! and the coefficients are mapped back to the original units afterwards.
//! Columns with zero variance get a zero weight.

use serde::{Deserialize, Serialize};

use super::linear::{check_xy, LinearModel, Regularization};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ElasticNetParams {
    pub alpha: f64,
    pub l1_ratio: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ElasticNetParams {
    fn default() -> Self {
        ElasticNetParams {
            alpha: 1.0,
            l1_ratio: 0.5,
            tol: 1e-6,
            max_iter: 10_000,
        }
    }
}

pub(crate) fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

/// Standardised copy of the design: column means, population std devs and
/// the scaled columns (zero for constant features).
pub(crate) struct Standardized {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    pub z: Vec<Vec<f64>>,
}

impl Standardized {
    pub fn new(x: &Matrix) -> Self {
        let mut means = Vec::with_capacity(x.ncols());
        let mut scales = Vec::with_capacity(x.ncols());
        let mut z = Vec::with_capacity(x.ncols());
        for c in x.column_iter() {
            let m = stats::mean(c.as_slice());
            let s = stats::std_dev(c.as_slice());
            means.push(m);
            scales.push(s);
            z.push(if s > 0.0 { c.iter().map(|v| (v - m) / s).collect() } else { vec![0.0; x.nrows()] });
        }
        Standardized { means, scales, z }
    }
}

#[derive(Debug, Clone)]
pub struct ElasticNetFit {
    pub model: LinearModel,
    /// Coefficients in standardised units.
    pub beta: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

pub fn fit_elastic_net(x: &Matrix, y: &[f64], p: &ElasticNetParams) -> Result<ElasticNetFit> {
    check_xy(x, y.len())?;
    if !(p.alpha > 0.0) || !(0.0..=1.0).contains(&p.l1_ratio) || !(p.tol > 0.0) {
        return Err(Error::Parameter(format!(
            "elastic net needs alpha > 0, l1_ratio in [0, 1], tol > 0 (got {}, {}, {})",
            p.alpha, p.l1_ratio, p.tol
        )));
    }
    let std = Standardized::new(x);
    Ok(solve(&std, y, p))
}

pub(crate) fn solve(std: &Standardized, y: &[f64], p: &ElasticNetParams) -> ElasticNetFit {
    let n = y.len();
    let nf = n as f64;
    let d = std.z.len();
    let y_mean = stats::mean(y);
    let mut resid: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let mut beta = vec![0.0; d];
    let l1 = p.alpha * p.l1_ratio;
    let l2 = p.alpha * (1.0 - p.l1_ratio);
    let active: Vec<bool> = std.scales.iter().map(|&s| s > 0.0).collect();

    let mut converged = false;
    let mut iterations = 0;
    while iterations < p.max_iter {
        iterations += 1;
        let mut max_change = 0.0_f64;
        for j in 0..d {
            if !active[j] {
                continue;
            }
            let zj = &std.z[j];
            let old = beta[j];
            let rho: f64 = zj.iter().zip(&resid).map(|(a, r)| a * r).sum::<f64>() / nf + old;
            let new = soft_threshold(rho, l1) / (1.0 + l2);
            if new != old {
                let delta = new - old;
                for (r, a) in resid.iter_mut().zip(zj) {
                    *r -= delta * a;
                }
                beta[j] = new;
                max_change = max_change.max(delta.abs());
            }
        }
        if max_change < p.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("elastic net did not converge in {} iterations", p.max_iter);
    }
    let weights: Vec<f64> = beta
        .iter()
        .zip(&std.scales)
        .map(|(b, s)| if *s > 0.0 { b / s } else { 0.0 })
        .collect();
    let intercept = y_mean - weights.iter().zip(&std.means).map(|(w, m)| w * m).sum::<f64>();
    let regularization = if p.l1_ratio == 1.0 {
        Regularization::L1 { alpha: p.alpha }
    } else {
        Regularization::Elastic { alpha: p.alpha, l1_ratio: p.l1_ratio }
    };
    ElasticNetFit {
        model: LinearModel { weights, intercept, regularization },
        beta,
        iterations,
        converged,
    }
}

/// Largest violation of the optimality conditions in standardised space.
pub fn kkt_residual(x: &Matrix, y: &[f64], fit: &ElasticNetFit, p: &ElasticNetParams) -> f64 {
    let std = Standardized::new(x);
    let n = y.len() as f64;
    let y_mean = stats::mean(y);
    let resid: Vec<f64> = (0..y.len())
        .map(|i| y[i] - y_mean - (0..fit.beta.len()).map(|j| std.z[j][i] * fit.beta[j]).sum::<f64>())
        .collect();
    let l1 = p.alpha * p.l1_ratio;
    let l2 = p.alpha * (1.0 - p.l1_ratio);
    (0..fit.beta.len())
        .filter(|&j| std.scales[j] > 0.0)
        .map(|j| {
            let g = std.z[j].iter().zip(&resid).map(|(a, r)| a * r).sum::<f64>() / n - l2 * fit.beta[j];
            if fit.beta[j] != 0.0 {
                (g - l1 * fit.beta[j].signum()).abs()
            } else {
                (g.abs() - l1).max(0.0)
            }
        })
        .fold(0.0, f64::max)
}

/// Objective in original units (intercept profiled out by centring).
pub fn objective(x: &Matrix, y: &[f64], m: &LinearModel, p: &ElasticNetParams) -> f64 {
    let std = Standardized::new(x);
    let n = y.len() as f64;
    let pred = m.predict(x);
    let rss: f64 = y.iter().zip(&pred).map(|(a, b)| (a - b).powi(2)).sum();
    let beta: Vec<f64> = m.weights.iter().zip(&std.scales).map(|(w, s)| w * s).collect();
    rss / (2.0 * n)
        + p.alpha * p.l1_ratio * beta.iter().map(|b| b.abs()).sum::<f64>()
        + 0.5 * p.alpha * (1.0 - p.l1_ratio) * beta.iter().map(|b| b * b).sum::<f64>()
}
