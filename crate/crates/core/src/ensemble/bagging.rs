//! Bootstrap aggregation over any base learner.

use rand::seq::index::sample;
use rand::Rng as _;

use super::{Combiner, EnsembleModel};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::model::{fit, LearnerSpec};
use crate::rng;

/// Member `m` trains on `round(fraction·n)` rows drawn from stream `(seed, m)`,
/// with replacement when `bootstrap` is set.
pub fn fit_bagging(
    x: &Matrix,
    y: &Matrix,
    base: &LearnerSpec,
    n_estimators: usize,
    sample_fraction: f64,
    bootstrap: bool,
    seed: u64,
) -> Result<EnsembleModel> {
    if n_estimators == 0 {
        return Err(Error::Parameter("bagging needs at least one estimator".into()));
    }
    if !(sample_fraction > 0.0 && sample_fraction <= 1.0) {
        return Err(Error::Parameter(format!("sample_fraction must lie in (0, 1], got {sample_fraction}")));
    }
    let n = x.nrows();
    let size = ((sample_fraction * n as f64).round() as usize).max(1);
    let members = crate::par::try_map_indexed(n_estimators, |m| {
        let mut r = rng::stream(seed, &[m as u64, 0]);
        let rows: Vec<usize> = if bootstrap {
            (0..size).map(|_| r.random_range(0..n)).collect()
        } else if size == n {
            (0..n).collect()
        } else {
            let mut s = sample(&mut r, n, size).into_vec();
            s.sort_unstable();
            s
        };
        fit(base, &linalg::select_rows(x, &rows), &linalg::select_rows(y, &rows), rng::derive_seed(seed, &[m as u64, 1]))
    })?;
    Ok(EnsembleModel { members, combiner: Combiner::Mean, n_outputs: y.ncols() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, Normal};

    fn noisy(seed: u64) -> (Matrix, Matrix) {
        let mut r = rng::stream(seed, &[]);
        let nd = Normal::new(0.0, 1.0).unwrap();
        let x = Matrix::from_fn(40, 5, |_, _| r.random::<f64>());
        let y = Matrix::from_fn(40, 1, |i, _| x[(i, 0)] - x[(i, 3)] + nd.sample(&mut r));
        (x, y)
    }

    #[test]
    fn single_full_member_equals_base() {
        let (x, y) = noisy(1);
        let base = LearnerSpec::Pls { n_components: 2 };
        let b = fit_bagging(&x, &y, &base, 1, 1.0, false, 3).unwrap();
        let direct = fit(&base, &x, &y, rng::derive_seed(3, &[0, 1])).unwrap();
        assert_eq!(b.predict(&x), direct.predict(&x));
    }

    #[test]
    fn prediction_is_member_mean() {
        let (x, y) = noisy(2);
        let b = fit_bagging(&x, &y, &LearnerSpec::Ridge { lambda: 1.0 }, 6, 0.8, true, 1).unwrap();
        let preds = b.member_predictions(&x);
        let out = b.predict(&x);
        for i in 0..40 {
            let m = preds.iter().map(|p| p[(i, 0)]).sum::<f64>() / 6.0;
            assert!((out[(i, 0)] - m).abs() < 1e-12);
        }
    }

    #[test]
    fn bagged_pls_is_more_stable() {
        // Summed variance, over data draws, of predictions at fixed queries.
        let base = LearnerSpec::Pls { n_components: 3 };
        let mut r = rng::stream(99, &[]);
        let q = Matrix::from_fn(10, 10, |_, _| r.random::<f64>());
        let (mut single, mut bagged) = (vec![Vec::new(); 10], vec![Vec::new(); 10]);
        for seed in 0..60 {
            let mut r = rng::stream(1000 + seed, &[]);
            let nd = Normal::new(0.0, 1.0).unwrap();
            let x = Matrix::from_fn(20, 10, |_, _| r.random::<f64>());
            let y = Matrix::from_fn(20, 1, |i, _| x[(i, 0)] - x[(i, 3)] + nd.sample(&mut r));
            let a = fit(&base, &x, &y, seed).unwrap().predict(&q);
            let b = fit_bagging(&x, &y, &base, 30, 1.0, true, seed).unwrap().predict(&q);
            for i in 0..10 {
                single[i].push(a[(i, 0)]);
                bagged[i].push(b[(i, 0)]);
            }
        }
        let vs: f64 = single.iter().map(|v| crate::stats::variance(v)).sum();
        let vb: f64 = bagged.iter().map(|v| crate::stats::variance(v)).sum();
        assert!(vb < vs, "bagged {vb} vs single {vs}");
    }

    #[test]
    fn rejects_bad_parameters() {
        let (x, y) = noisy(3);
        assert!(fit_bagging(&x, &y, &LearnerSpec::Ols, 0, 1.0, true, 0).is_err());
        assert!(fit_bagging(&x, &y, &LearnerSpec::Ols, 2, 0.0, true, 0).is_err());
    }
}
