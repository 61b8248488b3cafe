//! k-means clustering with k-means++ seeding and Lloyd iterations.

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub assignments: Vec<usize>,
    pub centroids: Matrix,
    /// Inertia after each Lloyd step.
    pub inertia_trace: Vec<f64>,
    pub iterations: usize,
}

impl KMeansResult {
    pub fn inertia(&self) -> f64 {
        self.inertia_trace.last().copied().unwrap_or(0.0)
    }
}

/// Index of the nearest centroid; ties go to the lower index.
pub fn nearest(centroids: &Matrix, row: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for c in 0..centroids.nrows() {
        let d: f64 = centroids.row(c).iter().zip(row).map(|(a, b)| (a - b) * (a - b)).sum();
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

pub fn kmeans(x: &Matrix, k: usize, seed: u64, max_iter: usize) -> Result<KMeansResult> {
    let (n, d) = x.shape();
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("kmeans k must lie in 1..={n}, got {k}")));
    }
    let rows: Vec<Vec<f64>> = (0..n).map(|i| linalg::row_vec(x, i)).collect();
    let mut rng = crate::rng::stream(seed, &[]);

    let mut centroids = Matrix::zeros(k, d);
    let first = rng.random_range(0..n);
    centroids.set_row(0, &x.row(first));
    let mut d2: Vec<f64> = rows.iter().map(|r| linalg::sq_dist(r, &rows[first])).collect();
    for c in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if u < w {
                    chosen = i;
                    break;
                }
                u -= w;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centroids.set_row(c, &x.row(pick));
        for (i, r) in rows.iter().enumerate() {
            d2[i] = d2[i].min(linalg::sq_dist(r, &rows[pick]));
        }
    }

    let mut assignments = vec![usize::MAX; n];
    let mut inertia_trace = Vec::new();
    let mut iterations = 0;
    while iterations < max_iter {
        let mut changed = false;
        for (i, r) in rows.iter().enumerate() {
            let (c, _) = nearest(&centroids, r);
            if assignments[i] != c {
                assignments[i] = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        iterations += 1;
        let mut sums = Matrix::zeros(k, d);
        let mut counts = vec![0usize; k];
        for (i, r) in rows.iter().enumerate() {
            counts[assignments[i]] += 1;
            for j in 0..d {
                sums[(assignments[i], j)] += r[j];
            }
        }
        // Empty clusters keep their previous centroid.
        for c in 0..k {
            if counts[c] > 0 {
                for j in 0..d {
                    centroids[(c, j)] = sums[(c, j)] / counts[c] as f64;
                }
            }
        }
        inertia_trace.push(rows.iter().map(|r| nearest(&centroids, r).1).sum());
    }
    if inertia_trace.is_empty() {
        inertia_trace.push(rows.iter().map(|r| nearest(&centroids, r).1).sum());
    }
    Ok(KMeansResult { assignments, centroids, inertia_trace, iterations })
}
