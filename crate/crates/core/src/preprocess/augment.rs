use rand_distr::{Distribution, Normal};

use crate::connectome::{FeatureTable, LongitudinalDataset};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng;

/// Appends `copies` noisy replicas of every subject. Gaussian noise is added
/// to the baseline features only; follow-up targets are reused verbatim.
/// Replica `c` of subject `id` is named `id#aug{c}`.
pub fn augment_noise(ds: &LongitudinalDataset, sigma: f64, copies: usize, seed: u64) -> Result<LongitudinalDataset> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::Parameter(format!("noise sigma must be finite and >= 0, got {sigma}")));
    }
    let t1 = ds.targets("augment_noise")?;
    let (n, d) = (ds.n_subjects(), ds.t0().n_features());
    let total = n * (1 + copies);
    let noise = Normal::new(0.0, sigma).expect("validated sigma");
    let mut r = rng::stream(seed, &[]);

    let mut x = Matrix::zeros(total, d);
    let mut y = Matrix::zeros(total, d);
    let mut ids = Vec::with_capacity(total);
    for c in 0..=copies {
        for i in 0..n {
            let row = c * n + i;
            for j in 0..d {
                let base = ds.t0().rows()[(i, j)];
                x[(row, j)] = if c == 0 || sigma == 0.0 { base } else { base + noise.sample(&mut r) };
                y[(row, j)] = t1.rows()[(i, j)];
            }
            let id = &ds.t0().subject_ids()[i];
            ids.push(if c == 0 { id.clone() } else { format!("{id}#aug{c}") });
        }
    }
    LongitudinalDataset::new(FeatureTable::new(ids.clone(), x)?, Some(FeatureTable::new(ids, y)?))
}
