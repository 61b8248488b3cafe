//! Isolation forest anomaly scores.

use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::SampleMask;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsolationForestParams {
    pub n_trees: usize,
    pub subsample: usize,
    pub seed: u64,
}

impl Default for IsolationForestParams {
    fn default() -> Self {
        IsolationForestParams {
            n_trees: 100,
            subsample: 256,
            seed: 0,
        }
    }
}

/// Average unsuccessful-search path length of a binary search tree over `n`
/// points: `2H(n-1) - 2(n-1)/n`.
pub fn average_path_length(n: usize) -> f64 {
    match n {
        0 | 1 => 0.0,
        2 => 1.0,
        _ => {
            let m = (n - 1) as f64;
            2.0 * (m.ln() + EULER_GAMMA) - 2.0 * m / n as f64
        }
    }
}

enum Node {
    Leaf { size: usize },
    Split { feature: usize, threshold: f64, left: Box<Node>, right: Box<Node> },
}

fn grow(x: &Matrix, rows: &mut [usize], depth: usize, limit: usize, r: &mut rng::Rng) -> Node {
    if depth >= limit || rows.len() <= 1 {
        return Node::Leaf { size: rows.len() };
    }
    let candidates: Vec<(usize, f64, f64)> = (0..x.ncols())
        .filter_map(|f| {
            let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                (lo.min(x[(i, f)]), hi.max(x[(i, f)]))
            });
            (hi > lo).then_some((f, lo, hi))
        })
        .collect();
    if candidates.is_empty() {
        return Node::Leaf { size: rows.len() };
    }
    let (feature, lo, hi) = candidates[r.random_range(0..candidates.len())];
    let mut threshold = r.random_range(lo..hi);
    if threshold <= lo {
        threshold = lo + (hi - lo) * 0.5;
    }
    let mut split = 0;
    for k in 0..rows.len() {
        if x[(rows[k], feature)] < threshold {
            rows.swap(k, split);
            split += 1;
        }
    }
    let (l, rr) = rows.split_at_mut(split);
    Node::Split {
        feature,
        threshold,
        left: Box::new(grow(x, l, depth + 1, limit, r)),
        right: Box::new(grow(x, rr, depth + 1, limit, r)),
    }
}

fn path_length(node: &Node, row: &[f64], depth: usize) -> f64 {
    match node {
        Node::Leaf { size } => depth as f64 + average_path_length(*size),
        Node::Split { feature, threshold, left, right } => {
            if row[*feature] < *threshold {
                path_length(left, row, depth + 1)
            } else {
                path_length(right, row, depth + 1)
            }
        }
    }
}

/// Score `2^(-E[h(x)] / c(ψ))` in `(0, 1)`; higher is more anomalous.
/// `subsample` larger than the row count is clamped.
pub fn iforest_scores(x: &Matrix, params: &IsolationForestParams) -> Result<Vec<f64>> {
    let n = x.nrows();
    if n < 2 {
        return Err(Error::InsufficientData(format!("isolation forest needs at least 2 rows, got {n}")));
    }
    if params.n_trees == 0 || params.subsample == 0 {
        return Err(Error::Parameter("n_trees and subsample must be positive".into()));
    }
    let psi = params.subsample.min(n);
    let limit = (psi as f64).log2().ceil() as usize;
    let trees: Vec<Node> = (0..params.n_trees)
        .map(|t| {
            let mut r = rng::stream(params.seed, &[t as u64]);
            let mut rows = sample(&mut r, n, psi).into_vec();
            rows.sort_unstable();
            grow(x, &mut rows, 0, limit, &mut r)
        })
        .collect();
    let norm = average_path_length(psi);
    Ok((0..n)
        .map(|i| {
            let row: Vec<f64> = x.row(i).iter().copied().collect();
            let mean_h = trees.iter().map(|t| path_length(t, &row, 0)).sum::<f64>() / trees.len() as f64;
            if norm > 0.0 {
                2f64.powf(-mean_h / norm)
            } else {
                0.5
            }
        })
        .collect())
}

pub fn iforest_mask(x: &Matrix, params: &IsolationForestParams, threshold: f64) -> Result<SampleMask> {
    let s = iforest_scores(x, params)?;
    SampleMask::new(s.iter().map(|&v| v <= threshold).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, Normal};

    fn cloud_with_outlier(seed: u64) -> Matrix {
        let mut r = rng::stream(seed, &[99]);
        let nd = Normal::new(0.0, 1.0).unwrap();
        let mut x = Matrix::from_fn(60, 3, |_, _| nd.sample(&mut r));
        for j in 0..3 {
            x[(59, j)] = 25.0;
        }
        x
    }

    #[test]
    fn outlier_scores_highest_across_seeds() {
        for seed in 0..20 {
            let x = cloud_with_outlier(seed);
            let p = IsolationForestParams { seed, ..Default::default() };
            let s = iforest_scores(&x, &p).unwrap();
            let top = s[59];
            assert!(s[..59].iter().all(|&v| v < top), "seed {seed}");
            assert!(s.iter().all(|&v| v > 0.0 && v < 1.0));
        }
    }

    #[test]
    fn single_point_subsample_scores_equal() {
        let x = cloud_with_outlier(1);
        let p = IsolationForestParams { subsample: 1, n_trees: 10, seed: 3 };
        let s = iforest_scores(&x, &p).unwrap();
        assert!(s.iter().all(|&v| v == s[0]));
    }

    #[test]
    fn seeded_runs_repeat() {
        let x = cloud_with_outlier(4);
        let p = IsolationForestParams { seed: 11, ..Default::default() };
        assert_eq!(iforest_scores(&x, &p).unwrap(), iforest_scores(&x, &p).unwrap());
    }

    #[test]
    fn path_length_normaliser() {
        assert_eq!(average_path_length(1), 0.0);
        assert_eq!(average_path_length(2), 1.0);
        // 2(ln 255 + γ) - 2·255/256
        let want = 2.0 * ((255f64).ln() + EULER_GAMMA) - 2.0 * 255.0 / 256.0;
        assert!((average_path_length(256) - want).abs() < 1e-12);
    }
}
