//! Euclidean k-nearest-neighbour regression over multi-output targets.

use serde::{Deserialize, Serialize};

use super::linear::check_xy;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    #[default]
    Uniform,
    InverseDistance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborModel {
    pub train_x: Matrix,
    pub train_y: Matrix,
    pub k: usize,
    pub weighting: Weighting,
}

pub fn fit_knn(x: &Matrix, y: &Matrix, k: usize, weighting: Weighting) -> Result<NeighborModel> {
    check_xy(x, y.nrows())?;
    if k == 0 || k > x.nrows() {
        return Err(Error::Parameter(format!("knn k must lie in 1..={}, got {k}", x.nrows())));
    }
    Ok(NeighborModel { train_x: x.clone(), train_y: y.clone(), k, weighting })
}

impl NeighborModel {
    /// Indices and squared distances of the `k` nearest rows; ties go to
    /// the lower index.
    pub fn neighbours(&self, row: &[f64]) -> Vec<(usize, f64)> {
        let mut d: Vec<(usize, f64)> = (0..self.train_x.nrows())
            .map(|i| {
                let dist: f64 = self.train_x.row(i).iter().zip(row).map(|(a, b)| (a - b) * (a - b)).sum();
                (i, dist)
            })
            .collect();
        d.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        d.truncate(self.k);
        d
    }

    pub fn predict(&self, x: &Matrix) -> Matrix {
        let m = self.train_y.ncols();
        let mut out = Matrix::zeros(x.nrows(), m);
        for i in 0..x.nrows() {
            let nb = self.neighbours(&linalg::row_vec(x, i));
            let weights: Vec<f64> = match self.weighting {
                Weighting::Uniform => vec![1.0; nb.len()],
                Weighting::InverseDistance => {
                    if nb.iter().any(|&(_, d)| d == 0.0) {
                        nb.iter().map(|&(_, d)| if d == 0.0 { 1.0 } else { 0.0 }).collect()
                    } else {
                        nb.iter().map(|&(_, d)| 1.0 / d.sqrt()).collect()
                    }
                }
            };
            let total: f64 = weights.iter().sum();
            for c in 0..m {
                let s: f64 = nb.iter().zip(&weights).map(|(&(j, _), w)| w * self.train_y[(j, c)]).sum();
                out[(i, c)] = s / total;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn data(seed: u64, n: usize) -> (Matrix, Matrix) {
        let mut r = crate::rng::stream(seed, &[]);
        let x = Matrix::from_fn(n, 3, |_, _| r.random::<f64>());
        let y = Matrix::from_fn(n, 2, |_, _| r.random::<f64>());
        (x, y)
    }

    #[test]
    fn one_neighbour_returns_training_target() {
        let (x, y) = data(1, 20);
        let m = fit_knn(&x, &y, 1, Weighting::Uniform).unwrap();
        assert_eq!(m.predict(&x), y);
        let m = fit_knn(&x, &y, 3, Weighting::InverseDistance).unwrap();
        assert_eq!(m.predict(&x), y);
    }

    #[test]
    fn all_neighbours_give_mean() {
        let (x, y) = data(2, 12);
        let m = fit_knn(&x, &y, 12, Weighting::Uniform).unwrap();
        let p = m.predict(&Matrix::from_element(1, 3, 0.3));
        for c in 0..2 {
            let mean = y.column(c).sum() / 12.0;
            assert!((p[(0, c)] - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_exhaustive_scan() {
        for seed in 0..50 {
            let (x, y) = data(seed, 20);
            let (q, _) = data(seed + 1000, 5);
            let m = fit_knn(&x, &y, 3, Weighting::Uniform).unwrap();
            let p = m.predict(&q);
            for i in 0..5 {
                // Oracle: repeatedly pull the closest unused row.
                let mut used = vec![false; 20];
                let mut picked = Vec::new();
                for _ in 0..3 {
                    let mut best = (usize::MAX, f64::INFINITY);
                    for j in 0..20 {
                        let d: f64 = (0..3).map(|c| (x[(j, c)] - q[(i, c)]).powi(2)).sum();
                        if !used[j] && d < best.1 {
                            best = (j, d);
                        }
                    }
                    used[best.0] = true;
                    picked.push(best.0);
                }
                for c in 0..2 {
                    let want = picked.iter().map(|&j| y[(j, c)]).sum::<f64>() / 3.0;
                    assert_eq!(p[(i, c)], want);
                }
            }
        }
    }

    #[test]
    fn rejects_k_out_of_range() {
        let (x, y) = data(3, 4);
        assert!(fit_knn(&x, &y, 0, Weighting::Uniform).is_err());
        assert!(fit_knn(&x, &y, 5, Weighting::Uniform).is_err());
    }
}
