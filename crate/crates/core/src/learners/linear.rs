//! Least squares and ridge regression with an unpenalised intercept.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, ThinSvd};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularization {
    None,
    L0 { k: usize },
    L1 { alpha: f64 },
    L2 { lambda: f64 },
    Elastic { alpha: f64, l1_ratio: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub regularization: Regularization,
}

impl LinearModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(row).map(|(w, x)| w * x).sum::<f64>()
    }

    pub fn predict(&self, x: &Matrix) -> Vec<f64> {
        (0..x.nrows())
            .map(|i| self.intercept + (0..x.ncols()).map(|j| self.weights[j] * x[(i, j)]).sum::<f64>())
            .collect()
    }

    pub fn nonzero(&self) -> usize {
        self.weights.iter().filter(|&&w| w != 0.0).count()
    }
}

pub(crate) fn check_xy(x: &Matrix, n_targets: usize) -> Result<()> {
    if x.nrows() == 0 {
        return Err(Error::InsufficientData("cannot fit on an empty table".into()));
    }
    if n_targets != x.nrows() {
        return Err(Error::Shape(format!("{} rows but {} targets", x.nrows(), n_targets)));
    }
    Ok(())
}

/// Centred design shared by every target column of one fit.
pub(crate) struct CenteredDesign {
    pub x_mean: Vec<f64>,
    pub svd: ThinSvd,
}

impl CenteredDesign {
    pub fn new(x: &Matrix) -> Self {
        let means = linalg::column_means(x);
        let svd = ThinSvd::new(&linalg::center(x, &means));
        CenteredDesign {
            x_mean: means.iter().copied().collect(),
            svd,
        }
    }

    fn models(&self, y: &Matrix, lambda: f64, reg: Regularization) -> Vec<LinearModel> {
        let y_mean = linalg::column_means(y);
        let yc = linalg::center(y, &y_mean);
        let w = self.svd.solve_ridge(&yc, lambda);
        (0..y.ncols())
            .map(|c| {
                let weights: Vec<f64> = w.column(c).iter().copied().collect();
                let intercept = y_mean[c] - weights.iter().zip(&self.x_mean).map(|(a, b)| a * b).sum::<f64>();
                LinearModel { weights, intercept, regularization: reg }
            })
            .collect()
    }
}

/// Minimum-norm least squares for every column of `y` (rank-deficient designs
/// are handled by the pseudo-inverse).
pub fn fit_ols_columns(x: &Matrix, y: &Matrix) -> Result<Vec<LinearModel>> {
    check_xy(x, y.nrows())?;
    let design = CenteredDesign::new(x);
    if design.svd.rank() < x.ncols().min(x.nrows().saturating_sub(1)) {
        log::debug!("rank-deficient design; using the minimum-norm solution");
    }
    Ok(design.models(y, 0.0, Regularization::None))
}

pub fn fit_ridge_columns(x: &Matrix, y: &Matrix, lambda: f64) -> Result<Vec<LinearModel>> {
    check_xy(x, y.nrows())?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Parameter(format!("ridge lambda must be finite and >= 0, got {lambda}")));
    }
    let design = CenteredDesign::new(x);
    let reg = if lambda == 0.0 { Regularization::None } else { Regularization::L2 { lambda } };
    Ok(design.models(y, lambda, reg))
}

pub fn fit_ols(x: &Matrix, y: &[f64]) -> Result<LinearModel> {
    check_xy(x, y.len())?;
    Ok(fit_ols_columns(x, &Matrix::from_column_slice(y.len(), 1, y))?.remove(0))
}

/// Minimises `Σ(y - Xw - b)² + λ‖w‖²`.
pub fn fit_ridge(x: &Matrix, y: &[f64], lambda: f64) -> Result<LinearModel> {
    check_xy(x, y.len())?;
    Ok(fit_ridge_columns(x, &Matrix::from_column_slice(y.len(), 1, y), lambda)?.remove(0))
}
