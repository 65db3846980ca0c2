//! Dense linear-algebra helpers shared by the solvers.

use nalgebra::{Cholesky, DMatrix, DVector};
use rayon::prelude::*;

/// Work size (n·p) above which column passes are split across threads.
const PARALLEL_WORK: usize = 1 << 20;

/// `Xᵀv`, one dot product per column.
///
/// Each entry is an independent sequential dot product, so the result is
/// bitwise identical whether or not the pass runs in parallel.
pub fn column_dots(x: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
    let (n, p) = x.shape();
    assert_eq!(n, v.len(), "dimension mismatch in Xᵀv");
    let col = |j: usize| x.column(j).dot(v);
    if n * p >= PARALLEL_WORK {
        let out: Vec<f64> = (0..p).into_par_iter().map(col).collect();
        DVector::from_vec(out)
    } else {
        DVector::from_fn(p, |j, _| col(j))
    }
}

/// `Σ_j w_j X_j` over the listed columns.
pub fn combine_columns(x: &DMatrix<f64>, cols: &[usize], w: &[f64]) -> DVector<f64> {
    let mut out = DVector::zeros(x.nrows());
    for (&j, &wj) in cols.iter().zip(w) {
        if wj != 0.0 {
            out.axpy(wj, &x.column(j), 1.0);
        }
    }
    out
}

/// Solves `(I_n + Σ_j c_j X_j X_jᵀ) a = y` for nonnegative column weights `c_j`.
///
/// With `m` weighted columns the matrix-inversion identity
/// `(I + ZZᵀ)⁻¹ = I − Z (I_m + ZᵀZ)⁻¹ Zᵀ`, `Z = X_S diag(√c)`, reduces the work to
/// an `m×m` Cholesky solve whenever `m < n`; otherwise the `n×n` system is
/// factorized directly.
pub fn shifted_gram_solve(
    x: &DMatrix<f64>,
    cols: &[usize],
    weights: &[f64],
    y: &DVector<f64>,
) -> DVector<f64> {
    let n = x.nrows();
    let active: Vec<(usize, f64)> = cols
        .iter()
        .zip(weights)
        .filter(|(_, &c)| c > 0.0)
        .map(|(&j, &c)| (j, c.sqrt()))
        .collect();
    let m = active.len();
    if m == 0 {
        return y.clone();
    }
    let z = DMatrix::from_fn(n, m, |i, k| {
        let (j, r) = active[k];
        x[(i, j)] * r
    });
    if m < n {
        let mut a = z.tr_mul(&z);
        for k in 0..m {
            a[(k, k)] += 1.0;
        }
        let zty = z.tr_mul(y);
        let chol = Cholesky::new(a).expect("I + ZᵀZ is positive definite");
        let t = chol.solve(&zty);
        y - &z * t
    } else {
        let mut a = &z * z.transpose();
        for i in 0..n {
            a[(i, i)] += 1.0;
        }
        let chol = Cholesky::new(a).expect("I + ZZᵀ is positive definite");
        chol.solve(y)
    }
}

/// Solves the ridge system `(XᵀX + μI) w = Xᵀy` restricted to `cols`.
pub fn ridge_on_columns(x: &DMatrix<f64>, cols: &[usize], y: &DVector<f64>, mu: f64) -> DVector<f64> {
    let xs = x.select_columns(cols);
    let mut a = xs.tr_mul(&xs);
    for k in 0..cols.len() {
        a[(k, k)] += mu;
    }
    let b = xs.tr_mul(y);
    match Cholesky::new(a.clone()) {
        Some(chol) => chol.solve(&b),
        None => a.lu().solve(&b).unwrap_or_else(|| DVector::zeros(cols.len())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (DMatrix<f64>, DVector<f64>) {
        let x = DMatrix::from_row_slice(
            4,
            3,
            &[1.0, 0.5, -0.2, 0.3, -1.0, 0.7, 2.0, 0.1, 0.4, -0.6, 0.9, 1.1],
        );
        let y = DVector::from_vec(vec![1.0, -2.0, 0.5, 0.3]);
        (x, y)
    }

    fn dense_solve(x: &DMatrix<f64>, cols: &[usize], c: &[f64], y: &DVector<f64>) -> DVector<f64> {
        let n = x.nrows();
        let mut a = DMatrix::<f64>::identity(n, n);
        for (&j, &cj) in cols.iter().zip(c) {
            let xj = x.column(j);
            a += cj * xj * xj.transpose();
        }
        a.try_inverse().unwrap() * y
    }

    #[test]
    fn woodbury_matches_dense_inverse() {
        let (x, y) = sample();
        let cols = [0, 2];
        let c = [0.7, 2.5];
        let a = shifted_gram_solve(&x, &cols, &c, &y);
        let b = dense_solve(&x, &cols, &c, &y);
        assert!((a - b).amax() < 1e-12);
    }

    #[test]
    fn direct_branch_when_columns_exceed_rows() {
        let x = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, -1.0, 0.5, 0.1, 3.0]);
        let y = DVector::from_vec(vec![1.0, 1.0]);
        let cols = [0, 1, 2];
        let c = [1.0, 0.3, 0.2];
        let a = shifted_gram_solve(&x, &cols, &c, &y);
        let b = dense_solve(&x, &cols, &c, &y);
        assert!((a - b).amax() < 1e-12);
    }

    #[test]
    fn column_dots_is_transpose_product() {
        let (x, y) = sample();
        let d = column_dots(&x, &y);
        assert!((d - x.transpose() * &y).amax() < 1e-15);
    }
}
