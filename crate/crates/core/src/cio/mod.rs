//! Exact cardinality-constrained ridge regression
//!
//! ```text
//! min_{s ∈ {0,1}^p, Σs ≤ k}  c(s),   c(s) = min_w Σᵢ ℓ(yᵢ, xᵢᵀ(s∘w)) + ‖w‖²/(2γ)
//! ```
//!
//! by outer approximation: `c` is convex in `s`, so every evaluated support
//! yields a global linear under-estimator. The master problem over all cuts
//! gives a lower bound, evaluated supports give upper bounds, and the loop
//! stops once the two meet.

mod dual;
mod inner;
mod master;

use std::io::Write;
use std::time::{Duration, Instant};

use nalgebra::DVector;
use thiserror::Error;

pub use inner::{inner_value_grad, inner_value_grad_with, relaxed_value_grad, support_value, InnerOptions, InnerSolution};
pub use master::{solve_master, CutPool, MasterSolution, MasterStrategy};

use dual::NodeDual;
use master::{solve_master_pruned, Pruning};

use crate::datagen::Dataset;
use crate::losses::{LossError, LossModel};
use crate::saddle::{self, SaddleError, SubgradientConfig};
use crate::support::Support;

#[derive(Debug, Error)]
pub enum CioError {
    #[error("budget k = {k} must lie in 1..={p}")]
    InvalidBudget { k: usize, p: usize },
    #[error("ridge coefficient γ = {0} must be positive")]
    InvalidGamma(f64),
    #[error("support index {index} out of range for p = {p}")]
    SupportOutOfRange { index: usize, p: usize },
    #[error("relaxed indicator s[{index}] = {value} is outside [0, 1]")]
    InvalidRelaxation { index: usize, value: f64 },
    #[error("vector has length {found}, expected {expected}")]
    DimensionMismatch { found: usize, expected: usize },
    #[error("warm start {support} does not fit budget {k} with p = {p}")]
    InvalidWarmStart { support: Support, k: usize, p: usize },
    #[error("inner solver stopped after {sweeps} sweeps with coordinate change {achieved:e}")]
    InnerNotConverged { achieved: f64, sweeps: usize },
    #[error(transparent)]
    Loss(#[from] LossError),
    #[error("warm-start relaxation failed: {0}")]
    WarmStart(Box<SaddleError>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OaConfig {
    /// Stop once `best c(s) − η ≤ epsilon`.
    pub epsilon: f64,
    pub time_limit: Duration,
    /// Deterministic cap on master solves, independent of wall-clock time.
    pub max_iterations: Option<usize>,
    pub master: MasterStrategy,
    pub inner: InnerOptions,
}

impl OaConfig {
    /// Defaults for a loss: 60 s for regression, 180 s for classification.
    pub fn for_loss(model: &LossModel) -> Self {
        let secs = if model.is_classification() { 180 } else { 60 };
        Self {
            epsilon: 1e-4,
            time_limit: Duration::from_secs(secs),
            max_iterations: None,
            master: MasterStrategy::Auto,
            inner: InnerOptions::default(),
        }
    }
}

/// One outer-approximation iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct OaLogRow {
    pub iter: usize,
    /// `c(s)` at the support the master proposed in this iteration.
    pub value: f64,
    pub eta: f64,
    /// `best c(s) − η`.
    pub gap: f64,
    pub elapsed: f64,
    pub cuts: usize,
}

#[derive(Debug, Clone)]
pub struct OaResult {
    pub support: Support,
    /// Best `c(s)` found.
    pub value: f64,
    /// Largest master lower bound.
    pub bound: f64,
    /// `value − bound ≤ epsilon` was established.
    pub certified: bool,
    pub iterations: usize,
    pub cuts: usize,
    pub warm_start: Support,
    pub coefficients: DVector<f64>,
    pub log: Vec<OaLogRow>,
}

impl OaResult {
    pub fn write_log<W: Write>(&self, out: W) -> std::io::Result<()> {
        write_log(&self.log, out)
    }
}

pub fn write_log<W: Write>(rows: &[OaLogRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "iter,value,eta,gap,elapsed,cuts")?;
    for r in rows {
        writeln!(out, "{},{:e},{:e},{:e},{:.6},{}", r.iter, r.value, r.eta, r.gap, r.elapsed, r.cuts)?;
    }
    Ok(())
}

/// Regression coefficients `w_S = −γ X_Sᵀ α*(s)`, zero off the support.
pub fn coefficients_from_support(
    support: &Support,
    data: &Dataset,
    model: &LossModel,
    gamma: f64,
) -> Result<DVector<f64>, CioError> {
    let sol = inner_value_grad(support, data, model, gamma)?;
    Ok(coefficients_from_alpha(support, data, &sol.alpha, gamma))
}

fn coefficients_from_alpha(support: &Support, data: &Dataset, alpha: &DVector<f64>, gamma: f64) -> DVector<f64> {
    let mut w = DVector::zeros(data.p());
    for &j in support.indices() {
        w[j] = -gamma * data.x.column(j).dot(alpha);
    }
    w
}

/// Outer approximation for `min c(s)` over supports of size at most `k`.
///
/// Without a `warm` support the loop starts from the support returned by the
/// sub-gradient relaxation with default settings.
pub fn cutting_plane_solve(
    data: &Dataset,
    model: &LossModel,
    k: usize,
    gamma: f64,
    warm: Option<&Support>,
    cfg: &OaConfig,
) -> Result<OaResult, CioError> {
    let start = Instant::now();
    let p = data.p();
    if k == 0 || k > p {
        return Err(CioError::InvalidBudget { k, p });
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(CioError::InvalidGamma(gamma));
    }
    model.validate_labels(data.y.iter())?;
    let deadline = start + cfg.time_limit;

    let warm_start = match warm {
        Some(s) if s.len() <= k && s.span() <= p => Support::new(s.indices().iter().copied(), k),
        Some(s) => return Err(CioError::InvalidWarmStart { support: s.clone(), k, p }),
        None => {
            saddle::subgradient_solve(data, model, k, &SubgradientConfig::new(gamma), None)
                .map_err(|e| CioError::WarmStart(Box::new(e)))?
                .support
        }
    };

    let mut pool = CutPool::new(p);
    let first = inner_value_grad_with(&warm_start, data, model, gamma, &cfg.inner)?;
    pool.add(&warm_start, first.value, &first.grad);
    let mut node_dual = NodeDual::new(data, model, gamma, &first.alpha);
    let mut best = (first.value, warm_start.clone(), first.alpha);
    let mut bound = f64::NEG_INFINITY;
    let mut log = Vec::new();
    let mut certified = false;
    let mut iterations = 0;

    loop {
        iterations += 1;
        let pruning = Pruning { bound: &mut node_dual, upper: best.0, epsilon: cfg.epsilon };
        let m = solve_master_pruned(&pool, k, &best.1, cfg.master, Some(deadline), pruning);
        bound = bound.max(m.lower_bound);
        let gap = best.0 - bound;
        if gap <= cfg.epsilon {
            certified = true;
            log.push(OaLogRow { iter: iterations, value: best.0, eta: bound, gap, elapsed: start.elapsed().as_secs_f64(), cuts: pool.len() });
            break;
        }
        if !m.complete {
            log.push(OaLogRow { iter: iterations, value: best.0, eta: bound, gap, elapsed: start.elapsed().as_secs_f64(), cuts: pool.len() });
            break;
        }

        let sol = inner_value_grad_with(&m.support, data, model, gamma, &cfg.inner)?;
        pool.add(&m.support, sol.value, &sol.grad);
        let value = sol.value;
        if value < best.0 {
            best = (value, m.support.clone(), sol.alpha);
        }
        log.push(OaLogRow {
            iter: iterations,
            value,
            eta: bound,
            gap: best.0 - bound,
            elapsed: start.elapsed().as_secs_f64(),
            cuts: pool.len(),
        });

        if best.0 - bound <= cfg.epsilon {
            certified = true;
            break;
        }
        if Instant::now() >= deadline || cfg.max_iterations.is_some_and(|cap| iterations >= cap) {
            break;
        }
    }

    let coefficients = coefficients_from_alpha(&best.1, data, &best.2, gamma);
    Ok(OaResult {
        support: best.1,
        value: best.0,
        bound,
        certified,
        iterations,
        cuts: pool.len(),
        warm_start,
        coefficients,
        log,
    })
}
