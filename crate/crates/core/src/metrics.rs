//! Support-recovery and prediction metrics.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::datagen::Dataset;
use crate::support::Support;
use crate::ZERO_THRESHOLD;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("length mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("AUC needs both classes; got {positives} positive and {negatives} negative labels")]
    SingleClass { positives: usize, negatives: usize },
    #[error("label {0} is not ±1")]
    InvalidLabel(f64),
    #[error("empty input")]
    Empty,
}

/// An affine predictor `b₀ + xᵀw`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub intercept: f64,
    pub coefficients: DVector<f64>,
}

impl LinearFit {
    pub fn new(coefficients: DVector<f64>) -> Self {
        Self { intercept: 0.0, coefficients }
    }

    pub fn predict(&self, x: &DMatrix<f64>) -> DVector<f64> {
        (x * &self.coefficients).add_scalar(self.intercept)
    }

    pub fn support(&self) -> Support {
        support_of(self.coefficients.as_slice())
    }
}

pub(crate) fn support_of(w: &[f64]) -> Support {
    Support::unbudgeted(w.iter().enumerate().filter(|(_, v)| v.abs() > ZERO_THRESHOLD).map(|(j, _)| j))
}

/// One evaluated configuration.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsRecord {
    /// Fraction of true features selected.
    pub accuracy: f64,
    /// Fraction of selected features outside the true support; 0 when
    /// nothing is selected.
    pub fdr: f64,
    pub tf: usize,
    pub ff: usize,
    pub mse: f64,
    pub auc: Option<f64>,
    pub support_size: usize,
    pub seconds: f64,
    pub relative_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionMetrics {
    pub accuracy: f64,
    pub fdr: f64,
    pub tf: usize,
    pub ff: usize,
}

/// Compares two supports. `accuracy` is 0 when the true support is empty.
pub fn support_metrics(selected: &Support, truth: &Support) -> SelectionMetrics {
    let tf = selected.indices().iter().filter(|&&j| truth.contains(j)).count();
    let ff = selected.len() - tf;
    let accuracy = if truth.is_empty() { 0.0 } else { tf as f64 / truth.len() as f64 };
    let fdr = if tf + ff == 0 { 0.0 } else { ff as f64 / (tf + ff) as f64 };
    SelectionMetrics { accuracy, fdr, tf, ff }
}

/// A, FDR, TF and FF of `w` against `w_true`, with entries at or below
/// [`ZERO_THRESHOLD`] in magnitude treated as zero.
pub fn selection_metrics(w: &[f64], w_true: &[f64]) -> Result<SelectionMetrics, MetricsError> {
    if w.len() != w_true.len() {
        return Err(MetricsError::DimensionMismatch { left: w.len(), right: w_true.len() });
    }
    Ok(support_metrics(&support_of(w), &support_of(w_true)))
}

/// `(1/n) Σ (yᵢ − xᵢᵀw)²`.
pub fn mse(w: &DVector<f64>, data: &Dataset) -> Result<f64, MetricsError> {
    mse_fit(&LinearFit::new(w.clone()), data)
}

/// Mean squared residual of an affine fit.
pub fn mse_fit(fit: &LinearFit, data: &Dataset) -> Result<f64, MetricsError> {
    if fit.coefficients.len() != data.p() {
        return Err(MetricsError::DimensionMismatch { left: fit.coefficients.len(), right: data.p() });
    }
    if data.n() == 0 {
        return Err(MetricsError::Empty);
    }
    let resid = &data.y - fit.predict(&data.x);
    Ok(resid.norm_squared() / data.n() as f64)
}

/// Area under the ROC curve by the Mann–Whitney rank statistic; tied
/// scores count one half.
pub fn auc(scores: &[f64], labels: &[f64]) -> Result<f64, MetricsError> {
    if scores.len() != labels.len() {
        return Err(MetricsError::DimensionMismatch { left: scores.len(), right: labels.len() });
    }
    if let Some(&bad) = labels.iter().find(|&&l| l != 1.0 && l != -1.0) {
        return Err(MetricsError::InvalidLabel(bad));
    }
    let positives = labels.iter().filter(|&&l| l > 0.0).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(MetricsError::SingleClass { positives, negatives });
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Midranks (1-based) over tie groups.
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        rank_sum_pos += mid * order[i..=j].iter().filter(|&&t| labels[t] > 0.0).count() as f64;
        i = j + 1;
    }
    let (np, nn) = (positives as f64, negatives as f64);
    Ok((rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn))
}
