use super::{require_rows, FeatureMask};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::stats;

/// Drops columns whose population variance is exactly zero.
pub fn drop_constant_features(x: &Matrix) -> Result<FeatureMask> {
    require_rows(x, 1, "drop_constant_features")?;
    Ok(FeatureMask::new(
        x.column_iter().map(|c| stats::variance(c.as_slice()) != 0.0).collect(),
    ))
}

/// Drops all-zero columns and exact duplicates of an earlier kept column.
pub fn drop_redundant_features(x: &Matrix) -> Result<FeatureMask> {
    require_rows(x, 1, "drop_redundant_features")?;
    let mut kept: Vec<usize> = Vec::new();
    let mut keep = vec![false; x.ncols()];
    for j in 0..x.ncols() {
        let col = x.column(j);
        if col.iter().all(|&v| v == 0.0) {
            continue;
        }
        if kept.iter().any(|&k| x.column(k) == col) {
            continue;
        }
        kept.push(j);
        keep[j] = true;
    }
    Ok(FeatureMask::new(keep))
}

/// Greedy scan in column order: a column is dropped when its absolute
/// Pearson correlation with an earlier kept column exceeds `threshold`.
/// Zero-variance columns count as uncorrelated.
pub fn drop_correlated_features(x: &Matrix, threshold: f64) -> Result<FeatureMask> {
    require_rows(x, 3, "drop_correlated_features")?;
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::Parameter(format!("correlation threshold must lie in [0, 1], got {threshold}")));
    }
    let n = x.nrows();
    // Unit-norm centred columns; zero columns stay zero.
    let z: Vec<Option<Vec<f64>>> = x
        .column_iter()
        .map(|c| {
            let m = stats::mean(c.as_slice());
            let v: Vec<f64> = c.iter().map(|&a| a - m).collect();
            let norm = stats::sum(v.iter().map(|a| a * a)).sqrt();
            (stats::variance(c.as_slice()) > 0.0 && norm > 0.0).then(|| v.iter().map(|a| a / norm).collect())
        })
        .collect();
    let mut kept: Vec<usize> = Vec::new();
    let mut keep = vec![false; x.ncols()];
    for j in 0..x.ncols() {
        let drop = match &z[j] {
            None => false,
            Some(zj) => kept.iter().any(|&k| match &z[k] {
                Some(zk) => {
                    let r: f64 = (0..n).map(|i| zj[i] * zk[i]).sum();
                    r.abs().min(1.0) > threshold
                }
                None => false,
            }),
        };
        if !drop {
            kept.push(j);
            keep[j] = true;
        }
    }
    Ok(FeatureMask::new(keep))
}
