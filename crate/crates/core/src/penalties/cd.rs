use nalgebra::{DMatrix, DVector};

use super::prox::prox_unchecked;
use super::{PathPoint, Penalty, PenaltyError, RegPath};
use crate::datagen::Dataset;
use crate::losses::{softplus, LossKind, LossModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdOptions {
    /// Largest standardized coefficient change at which a sweep sequence stops.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Logistic only: outer IRLS tolerance on coefficient change.
    pub irls_tol: f64,
    pub max_irls: usize,
    /// Logistic only: lower bound on the IRLS weights `π(1 − π)`.
    pub weight_floor: f64,
}

impl Default for CdOptions {
    fn default() -> Self {
        Self { tol: 1e-7, max_sweeps: 10_000, irls_tol: 1e-6, max_irls: 100, weight_floor: 1e-5 }
    }
}

struct Standardized {
    x: DMatrix<f64>,
    mean: Vec<f64>,
    /// Population standard deviation; 0 marks a constant column, held at 0.
    scale: Vec<f64>,
}

fn standardize(x: &DMatrix<f64>) -> Standardized {
    let (n, p) = x.shape();
    let mut xs = x.clone();
    let mut mean = vec![0.0; p];
    let mut scale = vec![0.0; p];
    for j in 0..p {
        let mut col = xs.column_mut(j);
        let m = col.sum() / n as f64;
        col.add_scalar_mut(-m);
        let sd = (col.norm_squared() / n as f64).sqrt();
        if sd > 1e-12 * (1.0 + m.abs()) {
            col /= sd;
            scale[j] = sd;
        } else {
            col.fill(0.0);
        }
        mean[j] = m;
    }
    Standardized { x: xs, mean, scale }
}

fn check_loss(loss: LossKind, data: &Dataset) -> Result<(), PenaltyError> {
    match loss {
        LossKind::Ols => Ok(()),
        LossKind::Logistic => Ok(LossModel::new(loss).validate_labels(data.y.iter())?),
        other => Err(PenaltyError::UnsupportedLoss(other)),
    }
}

fn to_unit_labels(y: &DVector<f64>) -> DVector<f64> {
    y.map(|v| if v > 0.0 { 1.0 } else { 0.0 })
}

/// Smallest λ at which every coefficient is zero:
/// `max_j |X̃ⱼᵀ(Y − Ȳ)| / n`, divided by the mixing weight for Elastic-Net.
pub fn lambda_max(data: &Dataset, loss: LossKind, penalty: Penalty) -> Result<f64, PenaltyError> {
    check_loss(loss, data)?;
    penalty.validate()?;
    let st = standardize(&data.x);
    let target = if loss == LossKind::Logistic { to_unit_labels(&data.y) } else { data.y.clone() };
    let centered = target.add_scalar(-target.mean());
    let n = data.n() as f64;
    let lmax = (0..data.p()).map(|j| st.x.column(j).dot(&centered).abs() / n).fold(0.0, f64::max);
    Ok(match penalty {
        Penalty::ElasticNet { alpha } => lmax / alpha.max(1e-3),
        _ => lmax,
    })
}

/// Log-spaced grid of `count` values from `λ_max` down to `ratio·λ_max`.
///
/// Defaults: 100 values, ratio `1e-3` when `n > p` and `1e-2` otherwise.
pub fn lambda_grid(
    data: &Dataset,
    loss: LossKind,
    penalty: Penalty,
    count: Option<usize>,
    ratio: Option<f64>,
) -> Result<Vec<f64>, PenaltyError> {
    let count = count.unwrap_or(100);
    let ratio = ratio.unwrap_or(if data.n() > data.p() { 1e-3 } else { 1e-2 });
    if count == 0 || !(ratio > 0.0 && ratio < 1.0) {
        return Err(PenaltyError::InvalidGrid { count, ratio });
    }
    let top = lambda_max(data, loss, penalty)?.max(1e-12);
    if count == 1 {
        return Ok(vec![top]);
    }
    let step = ratio.ln() / (count - 1) as f64;
    Ok((0..count).map(|i| top * (step * i as f64).exp()).collect())
}

/// Coordinate-descent state on the standardized problem.
struct Solver<'a> {
    x: &'a DMatrix<f64>,
    active_cols: Vec<usize>,
    penalty: Penalty,
    n: f64,
    /// IRLS weights; `None` for plain least squares.
    weights: Option<Vec<f64>>,
    nu: Vec<f64>,
}

impl Solver<'_> {
    /// One pass over `cols`; returns the largest coefficient change.
    fn sweep(&self, cols: &[usize], lambda: f64, w: &mut [f64], r: &mut DVector<f64>) -> f64 {
        let mut change = 0.0f64;
        for &j in cols {
            let xj = self.x.column(j);
            let grad = match &self.weights {
                None => xj.dot(r),
                Some(wt) => xj.iter().zip(r.iter()).zip(wt).map(|((a, b), c)| a * b * c).sum(),
            } / self.n;
            let nu = self.nu[j];
            let z = grad + nu * w[j];
            let next = prox_unchecked(self.penalty, z, lambda, nu);
            let delta = next - w[j];
            if delta != 0.0 {
                r.axpy(-delta, &xj, 1.0);
                w[j] = next;
                change = change.max(delta.abs() * nu.sqrt());
            }
        }
        change
    }

    fn objective_ols(&self, w: &[f64], r: &DVector<f64>, lambda: f64) -> f64 {
        r.norm_squared() / (2.0 * self.n) + self.penalty.total(w, lambda)
    }

    /// Active-set coordinate descent until a full sweep moves nothing by
    /// more than `tol`. Returns (converged, achieved change, sweeps).
    #[allow(clippy::too_many_arguments)]
    fn solve(
        &self,
        lambda: f64,
        w: &mut [f64],
        r: &mut DVector<f64>,
        opts: &CdOptions,
        mut on_sweep: impl FnMut(&[f64], &DVector<f64>),
        mut after_sweep: impl FnMut(&mut DVector<f64>),
        budget: usize,
    ) -> (bool, f64, usize) {
        let mut sweeps = 0;
        let mut change = f64::INFINITY;
        while sweeps < budget {
            change = self.sweep(&self.active_cols, lambda, w, r);
            after_sweep(r);
            sweeps += 1;
            on_sweep(w, r);
            if change <= opts.tol {
                return (true, change, sweeps);
            }
            let active: Vec<usize> = self.active_cols.iter().copied().filter(|&j| w[j] != 0.0).collect();
            while sweeps < budget {
                let c = self.sweep(&active, lambda, w, r);
                after_sweep(r);
                sweeps += 1;
                on_sweep(w, r);
                if c <= opts.tol {
                    break;
                }
            }
        }
        (false, change, sweeps)
    }
}

fn destandardize(st: &Standardized, w: &[f64], center: f64) -> (f64, DVector<f64>) {
    let coef = DVector::from_iterator(
        w.len(),
        w.iter().zip(&st.scale).map(|(&v, &s)| if s > 0.0 { v / s } else { 0.0 }),
    );
    let intercept = center - coef.iter().zip(&st.mean).map(|(c, m)| c * m).sum::<f64>();
    (intercept, coef)
}

fn validate_lambdas(lambdas: &[f64]) -> Result<(), PenaltyError> {
    match lambdas.iter().find(|l| !(**l >= 0.0 && l.is_finite())) {
        Some(&bad) => Err(PenaltyError::InvalidLambda(bad)),
        None => Ok(()),
    }
}

fn ols_path(data: &Dataset, penalty: Penalty, lambdas: &[f64], opts: &CdOptions) -> Vec<PathPoint> {
    let st = standardize(&data.x);
    let n = data.n() as f64;
    let ybar = data.y.mean();
    let mut r = data.y.add_scalar(-ybar);
    let mut w = vec![0.0; data.p()];
    let solver = Solver {
        x: &st.x,
        active_cols: (0..data.p()).filter(|&j| st.scale[j] > 0.0).collect(),
        penalty,
        n,
        weights: None,
        nu: vec![1.0; data.p()],
    };
    lambdas
        .iter()
        .map(|&lambda| {
            let mut trace = Vec::new();
            let (converged, achieved, sweeps) = solver.solve(
                lambda,
                &mut w,
                &mut r,
                opts,
                |w, r| trace.push(solver.objective_ols(w, r, lambda)),
                |_| {},
                opts.max_sweeps,
            );
            let (intercept, coefficients) = destandardize(&st, &w, ybar);
            PathPoint {
                lambda,
                intercept,
                coefficients,
                objective: solver.objective_ols(&w, &r, lambda),
                converged,
                achieved_tol: achieved,
                sweeps,
                sweep_objectives: trace,
            }
        })
        .collect()
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

fn logistic_path(data: &Dataset, penalty: Penalty, lambdas: &[f64], opts: &CdOptions) -> Vec<PathPoint> {
    let st = standardize(&data.x);
    let (nr, p) = (data.n(), data.p());
    let n = nr as f64;
    let y01 = to_unit_labels(&data.y);
    let ybar = y01.mean().clamp(1e-6, 1.0 - 1e-6);
    let mut b0 = (ybar / (1.0 - ybar)).ln();
    let mut w = vec![0.0; p];
    let cols: Vec<usize> = (0..p).filter(|&j| st.scale[j] > 0.0).collect();

    let linear = |b0: f64, w: &[f64]| {
        let mut eta = DVector::from_element(nr, b0);
        for &j in &cols {
            if w[j] != 0.0 {
                eta.axpy(w[j], &st.x.column(j), 1.0);
            }
        }
        eta
    };
    let objective = |eta: &DVector<f64>, w: &[f64], lambda: f64| {
        let nll: f64 = eta.iter().zip(data.y.iter()).map(|(&e, &y)| softplus(-y * e)).sum();
        nll / n + penalty.total(w, lambda)
    };

    lambdas
        .iter()
        .map(|&lambda| {
            let mut converged = false;
            let mut achieved = f64::INFINITY;
            let mut sweeps = 0;
            for _ in 0..opts.max_irls {
                let eta = linear(b0, &w);
                let pi = eta.map(sigmoid);
                let wt: Vec<f64> = pi.iter().map(|&q| (q * (1.0 - q)).max(opts.weight_floor)).collect();
                // Working residual (z − η) = (y − π)/W.
                let mut r = DVector::from_iterator(nr, (0..nr).map(|i| (y01[i] - pi[i]) / wt[i]));
                let wsum: f64 = wt.iter().sum();
                let nu: Vec<f64> = (0..p)
                    .map(|j| st.x.column(j).iter().zip(&wt).map(|(x, c)| c * x * x).sum::<f64>() / n)
                    .map(|v| v.max(1e-12))
                    .collect();
                let solver = Solver { x: &st.x, active_cols: cols.clone(), penalty, n, weights: Some(wt.clone()), nu };
                let w_prev = w.clone();
                let b_prev = b0;
                let mut b = b0;
                let (_, _, s) = solver.solve(
                    lambda,
                    &mut w,
                    &mut r,
                    opts,
                    |_, _| {},
                    |r| {
                        let shift = r.iter().zip(&wt).map(|(a, c)| a * c).sum::<f64>() / wsum;
                        if shift != 0.0 {
                            r.add_scalar_mut(-shift);
                            b += shift;
                        }
                    },
                    opts.max_sweeps.saturating_sub(sweeps).max(1),
                );
                b0 = b;
                sweeps += s;
                achieved = w.iter().zip(&w_prev).map(|(a, c)| (a - c).abs()).fold((b0 - b_prev).abs(), f64::max);
                if achieved <= opts.irls_tol {
                    converged = true;
                    break;
                }
                if sweeps >= opts.max_sweeps {
                    break;
                }
            }
            let eta = linear(b0, &w);
            let (intercept, coefficients) = destandardize(&st, &w, b0);
            PathPoint {
                lambda,
                intercept,
                coefficients,
                objective: objective(&eta, &w, lambda),
                converged,
                achieved_tol: achieved,
                sweeps,
                sweep_objectives: Vec::new(),
            }
        })
        .collect()
}

/// Fits the whole path, warm-starting each λ from the previous solution.
///
/// Without explicit `lambdas` the default [`lambda_grid`] is used; explicit
/// values are fitted in the order given.
pub fn fit_path(
    data: &Dataset,
    loss: LossKind,
    penalty: Penalty,
    lambdas: Option<&[f64]>,
    opts: &CdOptions,
) -> Result<RegPath, PenaltyError> {
    check_loss(loss, data)?;
    penalty.validate()?;
    let grid = match lambdas {
        Some(l) => l.to_vec(),
        None => lambda_grid(data, loss, penalty, None, None)?,
    };
    validate_lambdas(&grid)?;
    let points = match loss {
        LossKind::Ols => ols_path(data, penalty, &grid, opts),
        _ => logistic_path(data, penalty, &grid, opts),
    };
    Ok(RegPath { penalty, loss, points })
}

/// Fit at a single λ from a zero start.
pub fn fit_single(
    data: &Dataset,
    loss: LossKind,
    penalty: Penalty,
    lambda: f64,
    opts: &CdOptions,
) -> Result<PathPoint, PenaltyError> {
    let mut path = fit_path(data, loss, penalty, Some(&[lambda]), opts)?;
    Ok(path.points.remove(0))
}
