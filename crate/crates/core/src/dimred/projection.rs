use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, ThinSvd};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionKind {
    Pca,
    Tsvd,
}

/// Linear projection onto `k` orthonormal directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub kind: ProjectionKind,
    /// `k × d`, rows orthonormal; each row's largest-magnitude entry is positive.
    pub components: Matrix,
    /// Feature means subtracted before projecting (PCA only).
    pub center: Option<Vec<f64>>,
    /// `s² / (n − 1)` per component, nonincreasing.
    pub explained_variance: Vec<f64>,
    /// Share of the total sum of squares captured per component.
    pub explained_variance_ratio: Vec<f64>,
}

fn fit(x: &Matrix, k: usize, kind: ProjectionKind) -> Result<Projection> {
    let (n, d) = x.shape();
    if k == 0 || k > n.min(d) {
        return Err(Error::Parameter(format!("projection needs 1 <= k <= min(n, d) = {}, got {k}", n.min(d))));
    }
    let (data, center) = match kind {
        ProjectionKind::Pca => {
            let means = linalg::column_means(x);
            (linalg::center(x, &means), Some(means.iter().copied().collect::<Vec<f64>>()))
        }
        ProjectionKind::Tsvd => (x.clone(), None),
    };
    let svd = ThinSvd::new(&data);
    let mut components = svd.vt.rows(0, k).into_owned();
    for mut row in components.row_iter_mut() {
        let mut at = 0;
        for j in 1..row.len() {
            if row[j].abs() > row[at].abs() {
                at = j;
            }
        }
        if row[at] < 0.0 {
            row.neg_mut();
        }
    }
    let total: f64 = svd.s.iter().map(|s| s * s).sum();
    let denom = (n.max(2) - 1) as f64;
    let explained_variance = (0..k).map(|i| svd.s[i] * svd.s[i] / denom).collect();
    let explained_variance_ratio =
        (0..k).map(|i| if total > 0.0 { svd.s[i] * svd.s[i] / total } else { 0.0 }).collect();
    Ok(Projection { kind, components, center, explained_variance, explained_variance_ratio })
}

/// Top-`k` right singular vectors of the mean-centred data.
pub fn fit_pca(x: &Matrix, k: usize) -> Result<Projection> {
    fit(x, k, ProjectionKind::Pca)
}

/// Top-`k` right singular vectors of the raw (uncentred) data.
pub fn fit_tsvd(x: &Matrix, k: usize) -> Result<Projection> {
    fit(x, k, ProjectionKind::Tsvd)
}

impl Projection {
    pub fn input_dim(&self) -> usize {
        self.components.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.components.nrows()
    }

    pub fn project(&self, x: &Matrix) -> Result<Matrix> {
        if x.ncols() != self.input_dim() {
            return Err(Error::Shape(format!("projection fitted on {} features, got {}", self.input_dim(), x.ncols())));
        }
        let centred = match &self.center {
            Some(c) => linalg::center(x, &linalg::Vector::from_column_slice(c)),
            None => x.clone(),
        };
        Ok(centred * self.components.transpose())
    }

    pub fn reconstruct(&self, z: &Matrix) -> Result<Matrix> {
        if z.ncols() != self.output_dim() {
            return Err(Error::Shape(format!("projection has {} components, got {}", self.output_dim(), z.ncols())));
        }
        let mut out = z * &self.components;
        if let Some(c) = &self.center {
            for (j, mut col) in out.column_iter_mut().enumerate() {
                col.add_scalar_mut(c[j]);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn random(seed: u64, n: usize, d: usize) -> Matrix {
        let mut r = crate::rng::stream(seed, &[]);
        Matrix::from_fn(n, d, |_, _| r.random::<f64>())
    }

    fn rel_err(a: &Matrix, b: &Matrix) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn line_is_one_component() {
        let x = Matrix::from_fn(10, 2, |i, j| i as f64 * if j == 0 { 1.0 } else { 2.0 });
        let p = fit_pca(&x, 1).unwrap();
        assert!((p.explained_variance_ratio[0] - 1.0).abs() < 1e-10);
        let c = p.components.row(0);
        assert!((c[1] / c[0] - 2.0).abs() < 1e-10 && c[1] > 0.0);
    }

    #[test]
    fn full_rank_round_trip() {
        let x = random(1, 12, 5);
        for p in [fit_pca(&x, 5).unwrap(), fit_tsvd(&x, 5).unwrap()] {
            let back = p.reconstruct(&p.project(&x).unwrap()).unwrap();
            assert!(rel_err(&back, &x) < 1e-8);
        }
    }

    #[test]
    fn matches_independent_svd_oracle() {
        let x = random(2, 50, 8);
        let p = fit_pca(&x, 3).unwrap();
        // Oracle: eigenvectors of the sample covariance.
        let n = 50.0;
        let mean: Vec<f64> = (0..8).map(|j| x.column(j).sum() / n).collect();
        let xc = Matrix::from_fn(50, 8, |i, j| x[(i, j)] - mean[j]);
        let eig = (xc.transpose() * &xc).symmetric_eigen();
        let mut order: Vec<usize> = (0..8).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        for k in 0..3 {
            let v = eig.eigenvectors.column(order[k]);
            let dot: f64 = p.components.row(k).iter().zip(v.iter()).map(|(a, b)| a * b).sum();
            assert!((dot.abs() - 1.0).abs() < 1e-8);
            assert!((p.explained_variance[k] - eig.eigenvalues[order[k]] / 49.0).abs() < 1e-10);
        }
        let gram = &p.components * p.components.transpose();
        assert!((gram - Matrix::identity(3, 3)).abs().max() < 1e-8);
    }

    #[test]
    fn tsvd_follows_the_mean() {
        // Rank-1 variation along e1 around a large offset along e0.
        let x = Matrix::from_fn(20, 2, |i, j| if j == 0 { 10.0 } else { i as f64 / 20.0 - 0.5 });
        let t = fit_tsvd(&x, 1).unwrap();
        let p = fit_pca(&x, 1).unwrap();
        assert!(t.components[(0, 0)].abs() > 0.99);
        assert!(p.components[(0, 1)].abs() > 0.99);
    }

    #[test]
    fn zero_mean_tsvd_equals_pca() {
        let raw = random(3, 30, 4);
        let means = linalg::column_means(&raw);
        let x = linalg::center(&raw, &means);
        let a = fit_pca(&x, 3).unwrap();
        let b = fit_tsvd(&x, 3).unwrap();
        assert!((a.components - b.components).abs().max() < 1e-8);
    }

    #[test]
    fn k_out_of_range() {
        let x = random(4, 5, 3);
        assert!(fit_pca(&x, 0).is_err());
        assert!(fit_pca(&x, 4).is_err());
        assert!(fit_pca(&x, 3).unwrap().project(&random(4, 2, 2)).is_err());
    }

    proptest! {
        #[test]
        fn ratios_and_monotone_reconstruction(seed in 0u64..200) {
            let x = random(seed, 15, 6);
            let full = fit_pca(&x, 6).unwrap();
            let sum: f64 = full.explained_variance_ratio.iter().sum();
            prop_assert!(sum <= 1.0 + 1e-9);
            for w in full.explained_variance.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-12);
            }
            let mut last = f64::INFINITY;
            for k in 1..=6 {
                let p = fit_pca(&x, k).unwrap();
                let err = (p.reconstruct(&p.project(&x).unwrap()).unwrap() - &x).norm();
                prop_assert!(err <= last + 1e-9);
                last = err;
            }
        }
    }
}
