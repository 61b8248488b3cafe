//! Dense linear-algebra helpers over `nalgebra` matrices (rows are samples).

use nalgebra::{DMatrix, DVector};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Relative cutoff below which singular values are treated as zero.
pub const RCOND: f64 = 1e-10;

pub fn column_means(x: &Matrix) -> Vector {
    Vector::from_iterator(
        x.ncols(),
        x.column_iter()
            .map(|c| crate::stats::sum(c.iter().copied()) / x.nrows().max(1) as f64),
    )
}

/// Subtracts `means` from every row.
pub fn center(x: &Matrix, means: &Vector) -> Matrix {
    let mut out = x.clone();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        col.add_scalar_mut(-means[j]);
    }
    out
}

/// Thin SVD `x = u * diag(s) * vt`, singular values sorted descending.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    pub u: Matrix,
    pub s: Vector,
    pub vt: Matrix,
}

impl ThinSvd {
    pub fn new(x: &Matrix) -> Self {
        let k = x.nrows().min(x.ncols());
        if k == 0 {
            return ThinSvd {
                u: Matrix::zeros(x.nrows(), 0),
                s: Vector::zeros(0),
                vt: Matrix::zeros(0, x.ncols()),
            };
        }
        let svd = x.clone().svd(true, true);
        let (u, vt) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b)));
        let mut su = Matrix::zeros(x.nrows(), k);
        let mut svt = Matrix::zeros(k, x.ncols());
        let mut s = Vector::zeros(k);
        for (dst, &src) in order.iter().enumerate() {
            su.set_column(dst, &u.column(src));
            svt.set_row(dst, &vt.row(src));
            s[dst] = svd.singular_values[src];
        }
        ThinSvd { u: su, s, vt: svt }
    }

    /// Number of singular values above `RCOND * s_max`.
    pub fn rank(&self) -> usize {
        let smax = self.s.iter().copied().fold(0.0, f64::max);
        self.s.iter().filter(|&&v| v > RCOND * smax && v > 0.0).count()
    }

    /// Minimum-norm least-squares solution of `x w = b` for every column of `b`.
    pub fn solve(&self, b: &Matrix) -> Matrix {
        let r = self.rank();
        let u = self.u.columns(0, r);
        let vt = self.vt.rows(0, r);
        let mut utb = u.transpose() * b;
        for i in 0..r {
            let inv = 1.0 / self.s[i];
            utb.row_mut(i).scale_mut(inv);
        }
        vt.transpose() * utb
    }

    /// Ridge solution `(xᵀx + λI)⁻¹ xᵀ b`, column by column.
    pub fn solve_ridge(&self, b: &Matrix, lambda: f64) -> Matrix {
        if lambda == 0.0 {
            return self.solve(b);
        }
        let mut utb = self.u.transpose() * b;
        for i in 0..self.s.len() {
            let s = self.s[i];
            utb.row_mut(i).scale_mut(s / (s * s + lambda));
        }
        self.vt.transpose() * utb
    }
}

/// Solves the symmetric positive (semi)definite system `a x = b`, adding
/// diagonal jitter if the Cholesky factorisation fails.
pub fn solve_spd(a: &Matrix, b: &Matrix) -> Matrix {
    if let Some(ch) = a.clone().cholesky() {
        return ch.solve(b);
    }
    log::warn!("singular system; adding 1e-10 diagonal jitter");
    let mut jit = a.clone();
    let scale = a.diagonal().iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    for i in 0..jit.nrows() {
        jit[(i, i)] += 1e-10 * scale;
    }
    match jit.clone().cholesky() {
        Some(ch) => ch.solve(b),
        None => ThinSvd::new(&jit).solve(b),
    }
}

pub fn row_vec(x: &Matrix, i: usize) -> Vec<f64> {
    x.row(i).iter().copied().collect()
}

pub fn col_vec(x: &Matrix, j: usize) -> Vec<f64> {
    x.column(j).iter().copied().collect()
}

/// Selects rows by index, in the given order.
pub fn select_rows(x: &Matrix, rows: &[usize]) -> Matrix {
    Matrix::from_fn(rows.len(), x.ncols(), |i, j| x[(rows[i], j)])
}

pub fn select_cols(x: &Matrix, cols: &[usize]) -> Matrix {
    Matrix::from_fn(x.nrows(), cols.len(), |i, j| x[(i, cols[j])])
}

pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
