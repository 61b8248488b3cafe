//! Local outlier factor over Euclidean distance.

use super::SampleMask;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Floor added to the mean reachability distance so duplicate points do
/// not produce an infinite local density.
const LRD_EPS: f64 = 1e-10;

/// Indices of the `k` nearest other rows, nearest first; distance ties go to
/// the lower index.
pub(crate) fn neighbours(dist: &Matrix, i: usize, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..dist.nrows()).filter(|&j| j != i).collect();
    idx.sort_by(|&a, &b| dist[(i, a)].total_cmp(&dist[(i, b)]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

pub(crate) fn distance_matrix(x: &Matrix) -> Matrix {
    let n = x.nrows();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| linalg::row_vec(x, i)).collect();
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = linalg::sq_dist(&rows[i], &rows[j]).sqrt();
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    d
}

/// LOF score per row: mean ratio of neighbour density to own density.
pub fn lof_scores(x: &Matrix, k_neighbors: usize) -> Result<Vec<f64>> {
    let n = x.nrows();
    if k_neighbors == 0 || k_neighbors >= n {
        return Err(Error::InsufficientData(format!(
            "LOF needs more rows ({n}) than neighbours ({k_neighbors}), and k >= 1"
        )));
    }
    let dist = distance_matrix(x);
    let nbrs: Vec<Vec<usize>> = (0..n).map(|i| neighbours(&dist, i, k_neighbors)).collect();
    let k_dist: Vec<f64> = (0..n).map(|i| dist[(i, *nbrs[i].last().unwrap())]).collect();
    let lrd: Vec<f64> = (0..n)
        .map(|i| {
            let reach: f64 = nbrs[i].iter().map(|&o| k_dist[o].max(dist[(i, o)])).sum();
            1.0 / (reach / k_neighbors as f64 + LRD_EPS)
        })
        .collect();
    Ok((0..n)
        .map(|i| nbrs[i].iter().map(|&o| lrd[o]).sum::<f64>() / k_neighbors as f64 / lrd[i])
        .collect())
}

/// Drops rows whose LOF exceeds `threshold`.
pub fn lof_mask(x: &Matrix, k_neighbors: usize, threshold: f64) -> Result<SampleMask> {
    let scores = lof_scores(x, k_neighbors)?;
    SampleMask::new(scores.iter().map(|&s| s <= threshold).collect())
}
