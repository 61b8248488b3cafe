//! Epsilon-insensitive support vector regression solved by SMO.
//!
//! The dual has `2n` variables `[α⁺; α⁻]` with labels `+1`/`−1` and linear
//! term `ε ∓ y`. Working pairs are chosen as the maximal violating pair; the
//! solver stops when the violation drops below `tol`.

use serde::{Deserialize, Serialize};

use super::linear::check_xy;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelSpec {
    Linear,
    /// `gamma = None` resolves to `1/d` at fit time.
    Rbf { gamma: Option<f64> },
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec::Rbf { gamma: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
}

impl Kernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Kernel::Rbf { gamma } => (-gamma * linalg::sq_dist(a, b)).exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvrParams {
    pub c: f64,
    pub epsilon: f64,
    pub kernel: KernelSpec,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SvrParams {
    fn default() -> Self {
        SvrParams { c: 1.0, epsilon: 0.1, kernel: KernelSpec::default(), tol: 1e-3, max_iter: 1_000_000 }
    }
}

impl SvrParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Parameter(format!("svr C must be > 0, got {}", self.c)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Parameter(format!("svr epsilon must be >= 0, got {}", self.epsilon)));
        }
        if let KernelSpec::Rbf { gamma: Some(g) } = self.kernel {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(Error::Parameter(format!("rbf gamma must be >= 0, got {g}")));
            }
        }
        Ok(())
    }

    fn resolve_kernel(&self, d: usize) -> Kernel {
        match self.kernel {
            KernelSpec::Linear => Kernel::Linear,
            KernelSpec::Rbf { gamma } => Kernel::Rbf { gamma: gamma.unwrap_or(1.0 / d.max(1) as f64) },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelModel {
    /// `α⁺ − α⁻` per support vector; each lies in `[−C, C]`.
    pub coefficients: Vec<f64>,
    pub support_vectors: Vec<Vec<f64>>,
    pub kernel: Kernel,
    pub epsilon: f64,
    pub c: f64,
    pub bias: f64,
    /// Explicit primal weights, present for the linear kernel.
    pub weights: Option<Vec<f64>>,
}

impl KernelModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        if let Some(w) = &self.weights {
            return self.bias + w.iter().zip(row).map(|(a, b)| a * b).sum::<f64>();
        }
        self.bias
            + self
                .coefficients
                .iter()
                .zip(&self.support_vectors)
                .map(|(c, sv)| c * self.kernel.eval(sv, row))
                .sum::<f64>()
    }

    pub fn predict(&self, x: &Matrix) -> Vec<f64> {
        (0..x.nrows()).map(|i| self.predict_row(&linalg::row_vec(x, i))).collect()
    }
}

fn gram(x: &Matrix, kernel: Kernel) -> Vec<Vec<f64>> {
    let rows: Vec<Vec<f64>> = (0..x.nrows()).map(|i| linalg::row_vec(x, i)).collect();
    let n = rows.len();
    let mut k = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = kernel.eval(&rows[i], &rows[j]);
            k[i][j] = v;
            k[j][i] = v;
        }
    }
    k
}

pub fn fit_svr(x: &Matrix, y: &[f64], p: &SvrParams) -> Result<KernelModel> {
    check_xy(x, y.len())?;
    p.validate()?;
    let kernel = p.resolve_kernel(x.ncols());
    Ok(solve(x, &gram(x, kernel), y, kernel, p))
}

/// Fits every column of `y` against one shared Gram matrix.
pub fn fit_svr_columns(x: &Matrix, y: &Matrix, p: &SvrParams) -> Result<Vec<KernelModel>> {
    check_xy(x, y.nrows())?;
    p.validate()?;
    let kernel = p.resolve_kernel(x.ncols());
    let k = gram(x, kernel);
    Ok(crate::par::map_indexed(y.ncols(), |c| solve(x, &k, &linalg::col_vec(y, c), kernel, p)))
}

fn solve(x: &Matrix, k: &[Vec<f64>], z: &[f64], kernel: Kernel, p: &SvrParams) -> KernelModel {
    const TAU: f64 = 1e-12;
    let n = z.len();
    let l = 2 * n;
    let c = p.c;
    let sign = |t: usize| if t < n { 1.0 } else { -1.0 };
    let q = |s: usize, t: usize| sign(s) * sign(t) * k[s % n][t % n];
    let mut alpha = vec![0.0; l];
    let mut grad: Vec<f64> = (0..l).map(|t| if t < n { p.epsilon - z[t] } else { p.epsilon + z[t - n] }).collect();

    let mut iter = 0;
    loop {
        let (mut gmax, mut gmin) = (f64::NEG_INFINITY, f64::INFINITY);
        let (mut i, mut j) = (usize::MAX, usize::MAX);
        for t in 0..l {
            let yt = sign(t);
            let v = -yt * grad[t];
            let up = if yt > 0.0 { alpha[t] < c } else { alpha[t] > 0.0 };
            let low = if yt > 0.0 { alpha[t] > 0.0 } else { alpha[t] < c };
            if up && v > gmax {
                gmax = v;
                i = t;
            }
            if low && v < gmin {
                gmin = v;
                j = t;
            }
        }
        if i == usize::MAX || j == usize::MAX || gmax - gmin < p.tol {
            break;
        }
        if iter >= p.max_iter {
            log::warn!("svr stopped at max_iter with violation {:.3e}", gmax - gmin);
            break;
        }
        iter += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        if sign(i) != sign(j) {
            let mut quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..l {
            grad[t] += q(i, t) * di + q(j, t) * dj;
        }
    }

    // Bias from free variables, else the midpoint of the feasible interval.
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut free_sum) = (0usize, 0.0);
    for t in 0..l {
        let yt = sign(t);
        let yg = yt * grad[t];
        if alpha[t] >= c {
            if yt < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if yt > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    let rho = if free > 0 { free_sum / free as f64 } else { (ub + lb) / 2.0 };

    let mut coefficients = Vec::new();
    let mut support_vectors = Vec::new();
    for i in 0..n {
        let beta = (alpha[i] - alpha[i + n]).clamp(-c, c);
        if beta != 0.0 {
            coefficients.push(beta);
            support_vectors.push(linalg::row_vec(x, i));
        }
    }
    let weights = match kernel {
        Kernel::Linear => {
            let mut w = vec![0.0; x.ncols()];
            for (b, sv) in coefficients.iter().zip(&support_vectors) {
                for (wj, s) in w.iter_mut().zip(sv) {
                    *wj += b * s;
                }
            }
            Some(w)
        }
        Kernel::Rbf { .. } => None,
    };
    KernelModel { coefficients, support_vectors, kernel, epsilon: p.epsilon, c, bias: -rho, weights }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn wide_tube_has_no_support() {
        let x = Matrix::from_fn(10, 2, |i, j| (i + j) as f64);
        let y: Vec<f64> = (0..10).map(|i| (i as f64).sin()).collect();
        let p = SvrParams { epsilon: 5.0, ..Default::default() };
        let m = fit_svr(&x, &y, &p).unwrap();
        assert!(m.coefficients.is_empty());
        let (lo, hi) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        assert!((m.bias - (lo + hi) / 2.0).abs() < 1e-12);
        for v in m.predict(&x) {
            assert_eq!(v, m.bias);
        }
    }

    #[test]
    fn linear_kernel_recovers_line() {
        let x = Matrix::from_fn(20, 1, |i, _| i as f64 / 10.0);
        let y: Vec<f64> = (0..20).map(|i| 2.0 * x[(i, 0)]).collect();
        let p = SvrParams { c: 1e6, epsilon: 0.0, kernel: KernelSpec::Linear, ..Default::default() };
        let m = fit_svr(&x, &y, &p).unwrap();
        let w = m.weights.as_ref().unwrap()[0];
        assert!((w - 2.0).abs() < 1e-2, "w = {w}");
    }

    #[test]
    fn vanishing_gamma_gives_constant() {
        let mut r = crate::rng::stream(5, &[]);
        let x = Matrix::from_fn(15, 3, |_, _| r.random::<f64>());
        let y: Vec<f64> = (0..15).map(|_| r.random::<f64>()).collect();
        let p = SvrParams { kernel: KernelSpec::Rbf { gamma: Some(1e-12) }, ..Default::default() };
        let m = fit_svr(&x, &y, &p).unwrap();
        let pred = m.predict(&x);
        for v in &pred {
            assert!((v - pred[0]).abs() < 1e-9);
        }
    }

    #[test]
    fn dual_feasible_and_deterministic() {
        let mut r = crate::rng::stream(6, &[]);
        let x = Matrix::from_fn(40, 4, |_, _| r.random::<f64>());
        let y: Vec<f64> = (0..40).map(|i| x[(i, 0)] * 3.0 + r.random::<f64>()).collect();
        let p = SvrParams { c: 0.5, ..Default::default() };
        let a = fit_svr(&x, &y, &p).unwrap();
        let b = fit_svr(&x, &y, &p).unwrap();
        assert_eq!(a, b);
        assert!(a.coefficients.iter().all(|c| c.abs() <= 0.5));
        let sum: f64 = a.coefficients.iter().sum();
        assert!(sum.abs() < 1e-9, "equality constraint violated: {sum}");
    }

    #[test]
    fn rejects_bad_parameters() {
        let x = Matrix::zeros(3, 1);
        assert!(fit_svr(&x, &[0.0; 3], &SvrParams { c: 0.0, ..Default::default() }).is_err());
        assert!(fit_svr(&x, &[0.0; 3], &SvrParams { epsilon: -1.0, ..Default::default() }).is_err());
    }
}
