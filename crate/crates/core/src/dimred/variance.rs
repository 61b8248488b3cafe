use super::SelectionReport;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::preprocess::FeatureMask;
use crate::stats;

/// Keeps features with population variance above `threshold`, or drops the
/// `drop_lowest` lowest-variance features (equal variances drop the lower
/// index first). Exactly one mode must be given.
pub fn variance_threshold(x: &Matrix, threshold: Option<f64>, drop_lowest: Option<usize>) -> Result<SelectionReport> {
    if x.nrows() < 2 {
        return Err(Error::InsufficientData(format!("variance threshold needs at least 2 rows, got {}", x.nrows())));
    }
    let scores: Vec<f64> = x.column_iter().map(|c| stats::variance(c.as_slice())).collect();
    let d = scores.len();
    let keep = match (threshold, drop_lowest) {
        (Some(t), None) => {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::Parameter(format!("variance threshold must be >= 0, got {t}")));
            }
            scores.iter().map(|&v| v > t).collect::<Vec<bool>>()
        }
        (None, Some(k)) => {
            if k >= d {
                return Err(Error::Parameter(format!("cannot drop {k} of {d} features")));
            }
            let mut order: Vec<usize> = (0..d).collect();
            order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
            let mut keep = vec![true; d];
            for &i in order.iter().take(k) {
                keep[i] = false;
            }
            keep
        }
        _ => return Err(Error::Parameter("give exactly one of threshold or drop_lowest".into())),
    };
    if !keep.iter().any(|&k| k) {
        return Err(Error::InsufficientData("variance threshold removed every feature".into()));
    }
    Ok(SelectionReport { method: "variance_threshold".into(), scores, selected: FeatureMask::new(keep) })
}
