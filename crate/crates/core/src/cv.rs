//! Hyper-parameter schedules and validation-based model selection.

use std::cmp::Ordering;

use thiserror::Error;

use crate::datagen::Dataset;
use crate::metrics::{auc, mse_fit, support_metrics, LinearFit, MetricsError};
use crate::penalties::RegPath;
use crate::support::Support;

#[derive(Debug, Error)]
pub enum CvError {
    #[error("schedule needs at least one step")]
    NoSteps,
    #[error("dataset has no nonzero rows to scale γ from")]
    DegenerateDesign,
    #[error("{0} grid is empty")]
    EmptyGrid(&'static str),
    #[error("every grid cell failed; first error: {first}")]
    AllCellsFailed { first: String },
    #[error("target support size {k} outside the path's range {min}..={max}")]
    OutOfRange { k: usize, min: usize, max: usize },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// `1 / max_i ‖xᵢ‖²`.
pub fn gamma0(data: &Dataset) -> Result<f64, CvError> {
    let m = data.max_row_norm_sq();
    if !(m > 0.0) {
        return Err(CvError::DegenerateDesign);
    }
    Ok(1.0 / m)
}

/// `p / (n k max_i ‖xᵢ‖²)`.
pub fn normalized_gamma0(data: &Dataset, k: usize) -> Result<f64, CvError> {
    Ok(gamma0(data)? * data.p() as f64 / (data.n() as f64 * k.max(1) as f64))
}

/// `γ_t = 2ᵗ γ₀` for `t = 0..steps`.
pub fn gamma_schedule(data: &Dataset, steps: usize) -> Result<Vec<f64>, CvError> {
    doubling(gamma0(data)?, steps)
}

pub fn doubling(start: f64, steps: usize) -> Result<Vec<f64>, CvError> {
    if steps == 0 {
        return Err(CvError::NoSteps);
    }
    Ok((0..steps).map(|t| start * 2f64.powi(t as i32)).collect())
}

/// Up to `count` distinct integers log-spaced over `lo..=hi`.
pub fn log_spaced_ints(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    let lo = lo.max(1);
    if hi < lo || count == 0 {
        return Vec::new();
    }
    if count == 1 || hi == lo {
        return vec![hi];
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut ks: Vec<usize> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp().round() as usize)
        .map(|k| k.clamp(lo, hi))
        .collect();
    ks.dedup();
    ks
}

/// Default sparsity grid: 10 log-spaced values over
/// `max(1, k_true/4)..=min(p, 4·k_true)` when the true sparsity is known,
/// otherwise over `1..=min(p, n/2)`.
pub fn default_k_grid(k_true: Option<usize>, n: usize, p: usize) -> Vec<usize> {
    match k_true {
        Some(k) if k > 0 => log_spaced_ints((k / 4).max(1), p.min(4 * k), 10),
        _ => log_spaced_ints(1, p.min(n / 2).max(1), 10),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// Minimize validation mean squared error.
    Mse,
    /// Maximize validation AUC.
    Auc,
}

impl Criterion {
    /// Validation score, oriented so that smaller is better.
    fn loss(self, fit: &LinearFit, validation: &Dataset) -> Result<f64, MetricsError> {
        match self {
            Criterion::Mse => mse_fit(fit, validation),
            Criterion::Auc => {
                let scores = fit.predict(&validation.x);
                Ok(-auc(scores.as_slice(), validation.y.as_slice())?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub k: usize,
    /// γ or λ.
    pub param: f64,
    /// Validation MSE, or AUC for [`Criterion::Auc`].
    pub score: Option<f64>,
    pub support_size: Option<usize>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct GridSearchResult {
    pub k: usize,
    pub param: f64,
    pub score: f64,
    pub fit: LinearFit,
    pub table: Vec<CellOutcome>,
}

/// Fits every `(k, param)` cell on `train` and keeps the best on
/// `validation`.
///
/// The fitter receives the previous fit for the same `k` along the
/// schedule as a warm start. Failed cells are recorded and skipped. Ties go
/// to the smaller `k`, then the smaller parameter.
pub fn grid_search<F, E>(
    train: &Dataset,
    validation: &Dataset,
    k_grid: &[usize],
    schedule: &[f64],
    criterion: Criterion,
    mut fitter: F,
) -> Result<GridSearchResult, CvError>
where
    F: FnMut(&Dataset, usize, f64, Option<&LinearFit>) -> Result<LinearFit, E>,
    E: std::fmt::Display,
{
    if k_grid.is_empty() {
        return Err(CvError::EmptyGrid("k"));
    }
    if schedule.is_empty() {
        return Err(CvError::EmptyGrid("parameter"));
    }
    let mut table = Vec::with_capacity(k_grid.len() * schedule.len());
    let mut best: Option<(f64, usize, f64, LinearFit)> = None;
    let mut first_error = None;

    for &k in k_grid {
        let mut warm: Option<LinearFit> = None;
        for &param in schedule {
            let outcome = fitter(train, k, param, warm.as_ref())
                .map_err(|e| e.to_string())
                .and_then(|fit| criterion.loss(&fit, validation).map(|l| (l, fit)).map_err(|e| e.to_string()));
            match outcome {
                Ok((loss, fit)) => {
                    table.push(CellOutcome {
                        k,
                        param,
                        score: Some(if criterion == Criterion::Auc { -loss } else { loss }),
                        support_size: Some(fit.support().len()),
                        error: None,
                    });
                    let better = match &best {
                        None => true,
                        Some((bl, bk, bp, _)) => loss
                            .total_cmp(bl)
                            .then(k.cmp(bk))
                            .then(param.total_cmp(bp))
                            == Ordering::Less,
                    };
                    if better {
                        best = Some((loss, k, param, fit.clone()));
                    }
                    warm = Some(fit);
                }
                Err(msg) => {
                    first_error.get_or_insert_with(|| msg.clone());
                    table.push(CellOutcome { k, param, score: None, support_size: None, error: Some(msg) });
                }
            }
        }
    }

    match best {
        Some((loss, k, param, fit)) => Ok(GridSearchResult {
            k,
            param,
            score: if criterion == Criterion::Auc { -loss } else { loss },
            fit,
            table,
        }),
        None => Err(CvError::AllCellsFailed { first: first_error.unwrap_or_default() }),
    }
}

/// TF and FF of a regularization path at support size `k_target`,
/// interpolated linearly between the nearest smaller and larger sizes on
/// the path when no point has exactly that size.
pub fn sparsity_interpolate(path: &RegPath, k_target: usize, truth: &Support) -> Result<(f64, f64), CvError> {
    let counts: Vec<(usize, f64, f64)> = path
        .points
        .iter()
        .map(|pt| {
            let m = support_metrics(&pt.support(), truth);
            (pt.support_size(), m.tf as f64, m.ff as f64)
        })
        .collect();
    let (min, max) = counts
        .iter()
        .fold((usize::MAX, 0), |(lo, hi), c| (lo.min(c.0), hi.max(c.0)));
    if counts.is_empty() || k_target < min || k_target > max {
        return Err(CvError::OutOfRange { k: k_target, min: min.min(max), max });
    }
    if let Some(c) = counts.iter().find(|c| c.0 == k_target) {
        return Ok((c.1, c.2));
    }
    // Closest sizes on each side; the first point along the path wins ties.
    let below = counts.iter().filter(|c| c.0 < k_target).fold(None::<&(usize, f64, f64)>, |acc, c| match acc {
        Some(a) if a.0 >= c.0 => Some(a),
        _ => Some(c),
    });
    let above = counts.iter().filter(|c| c.0 > k_target).fold(None::<&(usize, f64, f64)>, |acc, c| match acc {
        Some(a) if a.0 <= c.0 => Some(a),
        _ => Some(c),
    });
    let (lo, hi) = (below.expect("bracketed"), above.expect("bracketed"));
    let t = (k_target - lo.0) as f64 / (hi.0 - lo.0) as f64;
    Ok((lo.1 + t * (hi.1 - lo.1), lo.2 + t * (hi.2 - lo.2)))
}
