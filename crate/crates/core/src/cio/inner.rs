//! The inner problem `c(s) = max_α f(α, s)` and its gradient in `s`.

use nalgebra::DVector;

use super::CioError;
use crate::datagen::Dataset;
use crate::linalg::{column_dots, shifted_gram_solve};
use crate::losses::{LossKind, LossModel};
use crate::support::Support;

/// Stopping rule of the dual coordinate-ascent inner solver used for every
/// loss except OLS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerOptions {
    /// Largest coordinate change in a sweep at which the solve stops.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for InnerOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_sweeps: 100_000 }
    }
}

#[derive(Debug, Clone)]
pub struct InnerSolution {
    /// `c(s)`.
    pub value: f64,
    /// The maximizing dual vector `α*(s)`.
    pub alpha: DVector<f64>,
    /// `∇c(s)_j = −(γ/2)(Xⱼᵀα*)²` for every feature `j`.
    pub grad: DVector<f64>,
}

fn check_common(data: &Dataset, model: &LossModel, gamma: f64) -> Result<(), CioError> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(CioError::InvalidGamma(gamma));
    }
    model.validate_labels(data.y.iter())?;
    Ok(())
}

fn check_support(support: &Support, p: usize) -> Result<(), CioError> {
    match support.indices().last() {
        Some(&j) if j >= p => Err(CioError::SupportOutOfRange { index: j, p }),
        _ => Ok(()),
    }
}

/// Maximizes `−Σ ℓ̂(yᵢ, αᵢ) − ½ Σⱼ cⱼ (Xⱼᵀα)²` over the conjugate domain,
/// with `cⱼ = γ sⱼ` on the listed columns.
pub(crate) fn solve_dual(
    cols: &[usize],
    weights: &[f64],
    data: &Dataset,
    model: &LossModel,
    opts: &InnerOptions,
) -> Result<DVector<f64>, CioError> {
    let n = data.n();
    let active: Vec<(usize, f64)> = cols.iter().zip(weights).filter(|(_, &c)| c > 0.0).map(|(&j, &c)| (j, c)).collect();

    if model.kind == LossKind::Ols {
        let (c, w): (Vec<usize>, Vec<f64>) = active.into_iter().unzip();
        return Ok(-shifted_gram_solve(&data.x, &c, &w, &data.y));
    }

    let m = active.len();
    // Row-major copy of the weighted columns for cache-friendly sweeps.
    let mut rows = vec![0.0; n * m];
    for (k, &(j, _)) in active.iter().enumerate() {
        for (i, v) in data.x.column(j).iter().enumerate() {
            rows[i * m + k] = *v;
        }
    }
    let c: Vec<f64> = active.iter().map(|&(_, c)| c).collect();
    let diag: Vec<f64> = (0..n).map(|i| (0..m).map(|k| c[k] * rows[i * m + k].powi(2)).sum()).collect();

    let y = &data.y;
    let mut alpha = DVector::from_fn(n, |i, _| model.project(y[i], model.domain_center(y[i])));
    // t_k = Xⱼᵀα for the k-th active column.
    let mut t = vec![0.0; m];
    let recompute = |alpha: &DVector<f64>, t: &mut [f64]| {
        t.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            let r = &rows[i * m..(i + 1) * m];
            for k in 0..m {
                t[k] += r[k] * alpha[i];
            }
        }
    };
    recompute(&alpha, &mut t);

    let mut change = f64::INFINITY;
    for _ in 0..opts.max_sweeps {
        change = 0.0;
        for i in 0..n {
            let r = &rows[i * m..(i + 1) * m];
            let a = diag[i];
            // (Qα)ᵢ without the diagonal term.
            let off: f64 = (0..m).map(|k| c[k] * r[k] * t[k]).sum::<f64>() - a * alpha[i];
            let next = model.coordinate_argmax(y[i], a, off);
            let delta = next - alpha[i];
            if delta != 0.0 {
                for k in 0..m {
                    t[k] += r[k] * delta;
                }
                alpha[i] = next;
                change = f64::max(change, delta.abs());
            }
        }
        recompute(&alpha, &mut t);
        if change <= opts.tol {
            return Ok(alpha);
        }
    }
    Err(CioError::InnerNotConverged { achieved: change, sweeps: opts.max_sweeps })
}

fn finish(alpha: DVector<f64>, weights: &[f64], cols: &[usize], data: &Dataset, model: &LossModel, gamma: f64) -> InnerSolution {
    let dots = column_dots(&data.x, &alpha);
    let conj: f64 = alpha.iter().zip(data.y.iter()).map(|(&a, &y)| model.conjugate(y, a)).sum();
    let quad: f64 = cols.iter().zip(weights).map(|(&j, &c)| c * dots[j] * dots[j]).sum();
    let value = -conj - 0.5 * quad;
    let grad = dots.map(|d| -0.5 * gamma * d * d);
    InnerSolution { value, alpha, grad }
}

/// `c(s)` and `∇c(s)` for a binary support.
pub fn inner_value_grad(support: &Support, data: &Dataset, model: &LossModel, gamma: f64) -> Result<InnerSolution, CioError> {
    inner_value_grad_with(support, data, model, gamma, &InnerOptions::default())
}

pub fn inner_value_grad_with(
    support: &Support,
    data: &Dataset,
    model: &LossModel,
    gamma: f64,
    opts: &InnerOptions,
) -> Result<InnerSolution, CioError> {
    check_common(data, model, gamma)?;
    check_support(support, data.p())?;
    let cols = support.indices();
    let weights = vec![gamma; cols.len()];
    let alpha = solve_dual(cols, &weights, data, model, opts)?;
    Ok(finish(alpha, &weights, cols, data, model, gamma))
}

/// `c(s)` and `∇c(s)` at a fractional `s ∈ [0,1]^p`, where the inner problem
/// weights column `j` by `γ sⱼ`.
pub fn relaxed_value_grad(s: &[f64], data: &Dataset, model: &LossModel, gamma: f64) -> Result<InnerSolution, CioError> {
    check_common(data, model, gamma)?;
    let p = data.p();
    if s.len() != p {
        return Err(CioError::DimensionMismatch { found: s.len(), expected: p });
    }
    if let Some((j, &v)) = s.iter().enumerate().find(|(_, &v)| !(0.0..=1.0).contains(&v)) {
        return Err(CioError::InvalidRelaxation { index: j, value: v });
    }
    let cols: Vec<usize> = (0..p).filter(|&j| s[j] > 0.0).collect();
    let weights: Vec<f64> = cols.iter().map(|&j| gamma * s[j]).collect();
    let alpha = solve_dual(&cols, &weights, data, model, &InnerOptions::default())?;
    Ok(finish(alpha, &weights, &cols, data, model, gamma))
}

/// `c(s)` alone, skipping the `O(np)` gradient pass.
pub fn support_value(support: &Support, data: &Dataset, model: &LossModel, gamma: f64) -> Result<f64, CioError> {
    check_common(data, model, gamma)?;
    check_support(support, data.p())?;
    let cols = support.indices();
    let weights = vec![gamma; cols.len()];
    let alpha = solve_dual(cols, &weights, data, model, &InnerOptions::default())?;
    let conj: f64 = alpha.iter().zip(data.y.iter()).map(|(&a, &y)| model.conjugate(y, a)).sum();
    let quad: f64 = cols.iter().map(|&j| data.x.column(j).dot(&alpha).powi(2)).sum();
    Ok(-conj - 0.5 * gamma * quad)
}
