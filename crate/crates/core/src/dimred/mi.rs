//! Mutual information by equal-frequency binning and plug-in estimation.

use super::{top_k, SelectionReport};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Bin of each value: `min(bins − 1, ⌊r·bins/n⌋)` where `r` counts strictly
/// smaller values, so ties always share a bin.
pub fn equal_frequency_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0; n];
    let mut rank = 0;
    for (pos, &i) in order.iter().enumerate() {
        if pos > 0 && values[i] != values[order[pos - 1]] {
            rank = pos;
        }
        out[i] = ((rank * bins) / n.max(1)).min(bins - 1);
    }
    out
}

fn plug_in(a: &[usize], b: &[usize], bins: usize) -> f64 {
    let n = a.len() as f64;
    let mut joint = vec![0usize; bins * bins];
    let mut pa = vec![0usize; bins];
    let mut pb = vec![0usize; bins];
    for (&i, &j) in a.iter().zip(b) {
        joint[i * bins + j] += 1;
        pa[i] += 1;
        pb[j] += 1;
    }
    let mut mi = 0.0;
    for i in 0..bins {
        for j in 0..bins {
            let c = joint[i * bins + j];
            if c > 0 {
                let pxy = c as f64 / n;
                mi += pxy * (pxy * n * n / (pa[i] as f64 * pb[j] as f64)).ln();
            }
        }
    }
    mi.max(0.0)
}

/// Plug-in MI (nats) between two samples after equal-frequency binning.
pub fn mutual_information(a: &[f64], b: &[f64], bins: usize) -> f64 {
    plug_in(&equal_frequency_bins(a, bins), &equal_frequency_bins(b, bins), bins)
}

/// Score of each column of `x`: mean MI with the columns of `y`.
pub fn mutual_information_scores(x: &Matrix, y: &Matrix, bins: usize) -> Result<Vec<f64>> {
    if bins < 2 {
        return Err(Error::Parameter(format!("mutual information needs at least 2 bins, got {bins}")));
    }
    if x.nrows() != y.nrows() {
        return Err(Error::Shape(format!("{} input rows but {} target rows", x.nrows(), y.nrows())));
    }
    if x.nrows() < bins {
        return Err(Error::InsufficientData(format!("{} rows for {bins} bins", x.nrows())));
    }
    let yb: Vec<Vec<usize>> = y.column_iter().map(|c| equal_frequency_bins(c.as_slice(), bins)).collect();
    if y.column_iter().all(|c| c.iter().all(|v| *v == c[0])) {
        log::warn!("constant target: every mutual information score is 0");
    }
    let m = yb.len() as f64;
    Ok(crate::par::map_indexed(x.ncols(), |j| {
        let xb = equal_frequency_bins(x.column(j).as_slice(), bins);
        yb.iter().map(|b| plug_in(&xb, b, bins)).sum::<f64>() / m
    }))
}

/// Keeps the `k` features with the highest MI score.
pub fn select_k_best_mi(x: &Matrix, y: &Matrix, k: usize, bins: usize) -> Result<SelectionReport> {
    if k == 0 || k > x.ncols() {
        return Err(Error::Parameter(format!("k must lie in 1..={}, got {k}", x.ncols())));
    }
    let scores = mutual_information_scores(x, y, bins)?;
    let selected = top_k(&scores, k);
    Ok(SelectionReport { method: "select_k_best".into(), scores, selected })
}

/// Keeps the top `⌈p·d/100⌉` features (at least one).
pub fn select_percentile_mi(x: &Matrix, y: &Matrix, percentile: f64, bins: usize) -> Result<SelectionReport> {
    if !(percentile > 0.0 && percentile <= 100.0) {
        return Err(Error::Parameter(format!("percentile must lie in (0, 100], got {percentile}")));
    }
    let d = x.ncols();
    let k = ((percentile * d as f64 / 100.0).ceil() as usize).clamp(1, d.max(1));
    let mut rep = select_k_best_mi(x, y, k, bins)?;
    rep.method = "select_percentile".into();
    Ok(rep)
}
