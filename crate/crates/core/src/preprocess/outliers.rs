use super::{require_rows, SampleMask};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::stats;

/// Per-feature `[Q1 - m·IQR, Q3 + m·IQR]` with linear-interpolation quartiles.
pub fn iqr_bounds(x: &Matrix, multiplier: f64) -> Result<Vec<(f64, f64)>> {
    require_rows(x, 4, "iqr_mask")?;
    if !(multiplier >= 0.0 && multiplier.is_finite()) {
        return Err(Error::Parameter(format!("IQR multiplier must be finite and >= 0, got {multiplier}")));
    }
    Ok(x.column_iter()
        .map(|c| {
            let sorted = stats::sorted_copy(c.as_slice());
            let q1 = stats::quantile_sorted(&sorted, 0.25);
            let q3 = stats::quantile_sorted(&sorted, 0.75);
            let iqr = q3 - q1;
            (q1 - multiplier * iqr, q3 + multiplier * iqr)
        })
        .collect())
}

/// Inter-quartile-range elimination. Values equal to a bound are kept.
pub fn iqr_mask(x: &Matrix, multiplier: f64, fraction: f64) -> Result<SampleMask> {
    let bounds = iqr_bounds(x, multiplier)?;
    let counts: Vec<usize> = (0..x.nrows())
        .map(|i| {
            bounds
                .iter()
                .enumerate()
                .filter(|(j, (lo, hi))| {
                    let v = x[(i, *j)];
                    v < *lo || v > *hi
                })
                .count()
        })
        .collect();
    SampleMask::from_violations(&counts, x.ncols(), fraction)
}

/// `μ ± k·σ` elimination with population σ. Zero-variance features never
/// flag a sample; values exactly on the bound are kept.
pub fn zscore_mask(x: &Matrix, k: f64, fraction: f64) -> Result<SampleMask> {
    require_rows(x, 2, "zscore_mask")?;
    if !(k > 0.0) {
        return Err(Error::Parameter(format!("k must be positive, got {k}")));
    }
    let moments: Vec<(f64, f64)> = x
        .column_iter()
        .map(|c| (stats::mean(c.as_slice()), stats::std_dev(c.as_slice())))
        .collect();
    let counts: Vec<usize> = (0..x.nrows())
        .map(|i| {
            moments
                .iter()
                .enumerate()
                .filter(|(j, (mu, sd))| *sd > 0.0 && (x[(i, *j)] - mu).abs() > k * sd)
                .count()
        })
        .collect();
    SampleMask::from_violations(&counts, x.ncols(), fraction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn column(v: &[f64]) -> Matrix {
        Matrix::from_column_slice(v.len(), 1, v)
    }

    #[test]
    fn constant_column_keeps_everything() {
        let x = column(&[2.0; 5]);
        assert_eq!(iqr_bounds(&x, 1.5).unwrap(), vec![(2.0, 2.0)]);
        assert_eq!(iqr_mask(&x, 1.5, 0.0).unwrap().kept_count(), 5);
    }

    #[test]
    fn bounds_follow_quartiles() {
        // Q1 = 2, Q3 = 6 for [0, 2, 4, 6, 8].
        let x = column(&[0.0, 2.0, 4.0, 6.0, 8.0]);
        assert_eq!(iqr_bounds(&x, 1.5).unwrap(), vec![(-4.0, 12.0)]);
    }

    #[test]
    fn far_value_dropped() {
        let mut v: Vec<f64> = (1..=9).map(f64::from).collect();
        v.push(100.0);
        // Oracle: sorted positions (n-1)q = 2.25 and 6.75 give Q1 = 3.25, Q3 = 7.75.
        let (q1, q3) = (3.25, 7.75);
        assert!(100.0 > q3 + 1.5 * (q3 - q1));
        let m = iqr_mask(&column(&v), 1.5, 0.0).unwrap();
        assert_eq!(m.keep().iter().filter(|k| !**k).count(), 1);
        assert!(!m.keep()[9]);
    }

    #[test]
    fn iqr_boundary_is_kept() {
        // Q1 = 2, Q3 = 3, so 4.5 sits exactly on the upper bound.
        let x = column(&[1.0, 2.0, 2.0, 3.0, 4.5]);
        let (lo, hi) = iqr_bounds(&x, 1.5).unwrap()[0];
        assert_eq!((lo, hi), (0.5, 4.5));
        assert_eq!(iqr_mask(&x, 1.5, 0.0).unwrap().kept_count(), 5);
    }

    #[test]
    fn iqr_needs_four_rows() {
        assert!(iqr_mask(&column(&[1.0, 2.0, 3.0]), 1.5, 0.0).is_err());
    }

    #[test]
    fn zscore_rules() {
        let same = Matrix::from_element(6, 3, 0.4);
        assert_eq!(zscore_mask(&same, 3.0, 0.0).unwrap().kept_count(), 6);

        let mut v = vec![0.0; 9];
        v.push(10.0);
        // μ = 1, σ = 3, so 10 sits exactly on μ + 3σ and stays.
        assert_eq!(zscore_mask(&column(&v), 3.0, 0.0).unwrap().kept_count(), 10);
        assert_eq!(zscore_mask(&column(&v), 2.9, 0.0).unwrap().kept_count(), 9);

        let mut r = crate::rng::stream(1, &[]);
        let x = Matrix::from_fn(50, 4, |_, _| r.random::<f64>() * 100.0);
        assert_eq!(zscore_mask(&x, 1e9, 0.0).unwrap().kept_count(), 50);
    }
}
