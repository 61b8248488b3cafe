use serde::{Deserialize, Serialize};

use super::require_rows;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleMode {
    Standard,
    MaxAbs,
}

/// Per-feature affine map `(x - center) / scale` learned on training rows.
/// Degenerate features get `center = 0`, `scale = 1` and pass through.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub mode: ScaleMode,
    pub center: Vec<f64>,
    pub scale: Vec<f64>,
}

pub fn fit_scaler(x: &Matrix, mode: ScaleMode) -> Result<ScalerParams> {
    require_rows(x, if mode == ScaleMode::Standard { 2 } else { 1 }, "fit_scaler")?;
    let (center, scale) = x
        .column_iter()
        .map(|c| match mode {
            ScaleMode::Standard => {
                let sd = stats::std_dev(c.as_slice());
                if sd > 0.0 {
                    (stats::mean(c.as_slice()), sd)
                } else {
                    (0.0, 1.0)
                }
            }
            ScaleMode::MaxAbs => {
                let m = c.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
                (0.0, if m > 0.0 { m } else { 1.0 })
            }
        })
        .unzip();
    Ok(ScalerParams { mode, center, scale })
}

impl ScalerParams {
    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if x.ncols() != self.scale.len() {
            return Err(Error::Shape(format!(
                "scaler fitted on {} features, table has {}",
                self.scale.len(),
                x.ncols()
            )));
        }
        Ok(Matrix::from_fn(x.nrows(), x.ncols(), |i, j| (x[(i, j)] - self.center[j]) / self.scale[j]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_and_maxabs() {
        let x = Matrix::from_column_slice(2, 1, &[0.0, 2.0]);
        let p = fit_scaler(&x, ScaleMode::Standard).unwrap();
        assert_eq!(p.apply(&x).unwrap().as_slice(), &[-1.0, 1.0]);

        let x = Matrix::from_column_slice(2, 1, &[-4.0, 2.0]);
        let p = fit_scaler(&x, ScaleMode::MaxAbs).unwrap();
        assert_eq!(p.apply(&x).unwrap().as_slice(), &[-1.0, 0.5]);
    }

    #[test]
    fn degenerate_features_pass_through() {
        let x = Matrix::from_row_slice(2, 2, &[3.0, 0.0, 3.0, 0.0]);
        for mode in [ScaleMode::Standard, ScaleMode::MaxAbs] {
            let p = fit_scaler(&x, mode).unwrap();
            if mode == ScaleMode::Standard {
                assert_eq!(p.apply(&x).unwrap(), x);
            }
            assert_eq!(p.apply(&x).unwrap().column(1), x.column(1));
        }
    }

    #[test]
    fn held_out_uses_training_params() {
        let train = Matrix::from_row_slice(3, 2, &[1.0, 10.0, 2.0, 20.0, 3.0, 60.0]);
        let p = fit_scaler(&train, ScaleMode::Standard).unwrap();
        let mean_row = Matrix::from_row_slice(1, 2, &[2.0, 30.0]);
        let z = p.apply(&mean_row).unwrap();
        assert!(z.iter().all(|v| v.abs() < 1e-12));
        assert!(fit_scaler(&Matrix::zeros(1, 2), ScaleMode::Standard).is_err());
    }
}
