//! PLS1 regression by NIPALS, returned as an equivalent linear model.

use super::linear::{check_xy, LinearModel, Regularization};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};

pub fn fit_pls1(x: &Matrix, y: &[f64], n_components: usize) -> Result<LinearModel> {
    check_xy(x, y.len())?;
    if n_components == 0 {
        return Err(Error::Parameter("pls needs at least one component".into()));
    }
    let d = x.ncols();
    let x_mean = linalg::column_means(x);
    let mut xr = linalg::center(x, &x_mean);
    let y_mean = crate::stats::mean(y);
    let mut yr = Vector::from_iterator(y.len(), y.iter().map(|v| v - y_mean));
    let scale = xr.norm().max(1.0) * yr.norm().max(1.0);

    let mut ws: Vec<Vector> = Vec::new();
    let mut ps: Vec<Vector> = Vec::new();
    let mut qs: Vec<f64> = Vec::new();
    for _ in 0..n_components.min(d) {
        let xty = xr.transpose() * &yr;
        let norm = xty.norm();
        // Nothing left to explain.
        if norm <= 1e-12 * scale {
            break;
        }
        let w = xty / norm;
        let t = &xr * &w;
        let tt = t.dot(&t);
        if tt <= 0.0 {
            break;
        }
        let p = xr.transpose() * &t / tt;
        let q = yr.dot(&t) / tt;
        xr -= &t * p.transpose();
        yr -= &t * q;
        ws.push(w);
        ps.push(p);
        qs.push(q);
    }

    let mut weights = vec![0.0; d];
    if !ws.is_empty() {
        let a = ws.len();
        let w = Matrix::from_columns(&ws);
        let p = Matrix::from_columns(&ps);
        let q = Vector::from_vec(qs);
        // B = W (PᵀW)⁻¹ q; PᵀW is upper triangular with unit diagonal.
        let ptw = p.transpose() * &w;
        let z = ptw
            .solve_upper_triangular(&q)
            .unwrap_or_else(|| linalg::ThinSvd::new(&ptw).solve(&Matrix::from_column_slice(a, 1, q.as_slice())).column(0).into_owned());
        let b = w * z;
        weights = b.iter().copied().collect();
    }
    let intercept = y_mean - weights.iter().zip(x_mean.iter()).map(|(a, b)| a * b).sum::<f64>();
    Ok(LinearModel { weights, intercept, regularization: Regularization::None })
}
