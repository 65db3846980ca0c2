use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use sparsereg::datagen::{sample_dataset, Dataset, SyntheticSpec};
use sparsereg::penalties::{fit_path, fit_single, lambda_grid, lambda_max, soft_threshold, CdOptions, Penalty};
use sparsereg::{LossKind, Task};

fn gaussian(n: usize, p: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(n, p, |_, _| StandardNormal.sample(&mut rng))
}

/// Columns orthogonal to the intercept and to each other, with
/// `XᵀX / n = I`, so that standardization leaves them unchanged.
fn orthonormal_design(n: usize, p: usize, seed: u64) -> DMatrix<f64> {
    let mut a = gaussian(n, p + 1, seed);
    a.column_mut(0).fill(1.0);
    let q = a.qr().q();
    q.columns(1, p).into_owned() * (n as f64).sqrt()
}

#[test]
fn orthonormal_lasso_is_soft_thresholded_regression() {
    let (n, p) = (60, 6);
    let x = orthonormal_design(n, p, 1);
    let w = DVector::from_vec(vec![2.0, -1.0, 0.5, 0.0, 0.0, 0.1]);
    let noise = gaussian(n, 1, 2).column(0).into_owned() * 0.3;
    let y = &x * &w + noise;
    let data = Dataset::new(x.clone(), y.clone());
    let opts = CdOptions { tol: 1e-12, ..CdOptions::default() };
    for lambda in [0.05, 0.3, 0.8] {
        let pt = fit_single(&data, LossKind::Ols, Penalty::Lasso, lambda, &opts).unwrap();
        for j in 0..p {
            let z = x.column(j).dot(&y) / n as f64;
            assert!((pt.coefficients[j] - soft_threshold(z, lambda)).abs() < 1e-8, "λ={lambda} j={j}");
        }
    }
}

#[test]
fn zero_solution_starts_exactly_at_lambda_max() {
    let data = sample_dataset(&SyntheticSpec::toeplitz(80, 15, 4, 0.3, 2.0, 3)).unwrap();
    let top = lambda_max(&data, LossKind::Ols, Penalty::Lasso).unwrap();
    let opts = CdOptions::default();
    let above = fit_single(&data, LossKind::Ols, Penalty::Lasso, top * 1.0001, &opts).unwrap();
    assert_eq!(above.support_size(), 0);
    let below = fit_single(&data, LossKind::Ols, Penalty::Lasso, top * 0.99, &opts).unwrap();
    assert!(below.support_size() > 0);
}

#[test]
fn grid_is_log_spaced() {
    let data = sample_dataset(&SyntheticSpec::toeplitz(50, 10, 3, 0.2, 2.0, 4)).unwrap();
    let grid = lambda_grid(&data, LossKind::Ols, Penalty::Lasso, Some(20), Some(0.01)).unwrap();
    assert_eq!(grid.len(), 20);
    let r0 = grid[1] / grid[0];
    assert!(grid.windows(2).all(|w| (w[1] / w[0] - r0).abs() < 1e-12));
    assert!((grid[19] / grid[0] - 0.01).abs() < 1e-12);
}

fn pop_sd(x: &DMatrix<f64>, j: usize) -> f64 {
    let c = x.column(j);
    let m = c.mean();
    (c.map(|v| (v - m).powi(2)).sum() / x.nrows() as f64).sqrt()
}

fn standardize(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows() as f64;
    let mut out = x.clone();
    for mut col in out.column_iter_mut() {
        let m = col.sum() / n;
        col.add_scalar_mut(-m);
        let sd = (col.norm_squared() / n).sqrt();
        col /= sd;
    }
    out
}

#[test]
fn lasso_kkt_at_fixed_lambda() {
    let data = sample_dataset(&SyntheticSpec::toeplitz(50, 10, 3, 0.4, 3.0, 5)).unwrap();
    let xs = standardize(&data.x);
    let lambda = 0.3 * lambda_max(&data, LossKind::Ols, Penalty::Lasso).unwrap();
    let pt = fit_single(&data, LossKind::Ols, Penalty::Lasso, lambda, &CdOptions::default()).unwrap();
    assert!(pt.converged);
    // Back to the standardized scale, where the penalty acts.
    let b = DVector::from_fn(10, |j, _| pt.coefficients[j] * pop_sd(&data.x, j));
    let ym = data.y.mean();
    let r = data.y.map(|v| v - ym) - &xs * &b;
    for j in 0..10 {
        let g = xs.column(j).dot(&r) / 50.0;
        if b[j] == 0.0 {
            assert!(g.abs() <= lambda + 1e-6, "j={j}: {g} > {lambda}");
        } else {
            assert!((g - lambda * b[j].signum()).abs() <= 1e-6, "j={j}: {g} vs {lambda}");
        }
    }
    assert!(b.iter().any(|v| *v != 0.0) && b.iter().any(|v| *v == 0.0));
}

#[test]
fn logistic_lasso_kkt() {
    let spec = SyntheticSpec { task: Task::Classification, ..SyntheticSpec::toeplitz(120, 8, 3, 0.2, 3.0, 6) };
    let data = sample_dataset(&spec).unwrap();
    let xs = standardize(&data.x);
    let lambda = 0.2 * lambda_max(&data, LossKind::Logistic, Penalty::Lasso).unwrap();
    let opts = CdOptions { tol: 1e-10, irls_tol: 1e-10, ..CdOptions::default() };
    let pt = fit_single(&data, LossKind::Logistic, Penalty::Lasso, lambda, &opts).unwrap();
    assert!(pt.converged);
    let n = 120.0;
    let b = DVector::from_fn(8, |j, _| pt.coefficients[j] * pop_sd(&data.x, j));
    let eta = &xs * &b;
    // Intercept on the standardized scale: fitted values are unchanged by
    // centering, so recover it from the original-scale fit.
    let offset = pt.intercept + (0..8).map(|j| pt.coefficients[j] * data.x.column(j).mean()).sum::<f64>();
    let resid = DVector::from_fn(120, |i, _| {
        let y01 = if data.y[i] > 0.0 { 1.0 } else { 0.0 };
        y01 - 1.0 / (1.0 + (-(eta[i] + offset)).exp())
    });
    assert!(resid.sum().abs() / n < 1e-6, "intercept stationarity");
    for j in 0..8 {
        let g = xs.column(j).dot(&resid) / n;
        if b[j] == 0.0 {
            assert!(g.abs() <= lambda + 1e-5, "j={j}");
        } else {
            assert!((g - lambda * b[j].signum()).abs() <= 1e-5, "j={j}: {g}");
        }
    }
}

#[test]
fn nonconvex_paths_end_denser_than_they_start() {
    let data = sample_dataset(&SyntheticSpec::toeplitz(100, 20, 4, 0.2, 6.0, 7)).unwrap();
    for penalty in [Penalty::mcp(), Penalty::scad(), Penalty::ElasticNet { alpha: 0.5 }] {
        let path = fit_path(&data, LossKind::Ols, penalty, None, &CdOptions::default()).unwrap();
        assert_eq!(path.points.len(), 100);
        assert!(path.all_converged(), "{penalty}");
        assert_eq!(path.points[0].support_size(), 0);
        assert!(path.points.last().unwrap().support_size() >= 4);
    }
}

#[test]
fn path_csv_has_one_line_per_lambda() {
    let data = sample_dataset(&SyntheticSpec::toeplitz(40, 6, 2, 0.2, 2.0, 8)).unwrap();
    let path = fit_path(&data, LossKind::Ols, Penalty::Lasso, Some(&[0.5, 0.1, 0.01]), &CdOptions::default()).unwrap();
    let mut buf = Vec::new();
    path.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("lambda,support_size,objective,coefficients\n"));
}
