use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const LOGIT_EPS: f64 = 1e-6;

/// `ln(p / (1 - p))` of each entry clipped to `[eps, 1 - eps]`.
pub fn logit_transform(x: &Matrix, eps: f64) -> Result<Matrix> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Parameter(format!("logit eps must lie in (0, 0.5), got {eps}")));
    }
    if let Some(v) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Domain(format!("logit input {v} outside [0, 1]")));
    }
    Ok(x.map(|v| {
        let p = v.clamp(eps, 1.0 - eps);
        (p / (1.0 - p)).ln()
    }))
}

pub fn sigmoid_transform(x: &Matrix) -> Matrix {
    x.map(|v| {
        if v >= 0.0 {
            1.0 / (1.0 + (-v).exp())
        } else {
            let e = v.exp();
            e / (1.0 + e)
        }
    })
}
