use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::t_two_sided_p;
use crate::stats;

/// Two-sided paired t-test p-value. An all-zero difference gives 1; a
/// nonzero constant difference gives 0.
pub fn paired_ttest(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!("paired samples of length {} and {}", a.len(), b.len())));
    }
    if a.len() < 2 {
        return Err(Error::InsufficientData("a paired t-test needs at least 2 pairs".into()));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if d.iter().all(|&v| v == 0.0) {
        return Ok(1.0);
    }
    let n = d.len() as f64;
    let m = stats::mean(&d);
    let sd = (stats::variance(&d) * n / (n - 1.0)).sqrt();
    if sd == 0.0 {
        return Ok(0.0);
    }
    Ok(t_two_sided_p(m / (sd / n.sqrt()), n - 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceMatrix {
    pub names: Vec<String>,
    /// `p[i][j]`, symmetric with a unit diagonal.
    pub p: Vec<Vec<f64>>,
}

/// Pairwise paired t-tests over aligned per-subject error vectors.
pub fn paired_ttest_matrix(names: &[String], errors: &[Vec<f64>]) -> Result<SignificanceMatrix> {
    if names.len() != errors.len() {
        return Err(Error::Shape(format!("{} names for {} error vectors", names.len(), errors.len())));
    }
    let k = errors.len();
    let mut p = vec![vec![1.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let v = paired_ttest(&errors[i], &errors[j])?;
            p[i][j] = v;
            p[j][i] = v;
        }
    }
    Ok(SignificanceMatrix { names: names.to_vec(), p })
}
