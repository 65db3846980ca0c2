//! Boolean relaxation of cardinality-constrained ridge regression, solved by
//! dual projected sub-gradient ascent.
//!
//! The saddle function is
//!
//! ```text
//! f(α, s) = −Σᵢ ℓ̂(yᵢ, αᵢ) − (γ/2) Σⱼ sⱼ (Xⱼᵀα)²
//! ```
//!
//! linear in `s` and concave in `α`. For fixed `α` the minimization over
//! `s ∈ [0,1]^p, Σs ≤ k` keeps the `k` largest scores `(Xⱼᵀα)²`; its value
//! `g(α) = min_s f(α, s)` is a lower bound on the optimum of the exact
//! problem, and any binary support gives an upper bound `c(s)`. The solver
//! ascends `g` with projected super-gradient steps, tracks both bounds, and
//! recovers a support from the averaged dual iterate.

use std::fmt;
use std::io::Write;

use nalgebra::DVector;
use thiserror::Error;

use crate::cio::{self, CioError};
use crate::datagen::Dataset;
use crate::linalg::column_dots;
use crate::losses::{LossError, LossKind, LossModel};
use crate::support::Support;

#[derive(Debug, Error)]
pub enum SaddleError {
    #[error("budget k = {k} must lie in 1..={p}")]
    InvalidBudget { k: usize, p: usize },
    #[error("ridge coefficient γ = {0} must be positive")]
    InvalidGamma(f64),
    #[error("constant step size must be positive, got {0}")]
    InvalidStep(f64),
    #[error("penalty λ = {0} must be nonnegative")]
    InvalidLambda(f64),
    #[error("dual vector has length {found}, expected {expected}")]
    DimensionMismatch { found: usize, expected: usize },
    #[error("dual coordinate {index} (α = {alpha}) lies outside the conjugate domain")]
    OutsideDomain { index: usize, alpha: f64 },
    #[error("non-finite sub-gradient at iteration {iteration}")]
    NonFinite { iteration: usize },
    #[error(transparent)]
    Loss(#[from] LossError),
    #[error(transparent)]
    Inner(#[from] CioError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    Constant(f64),
    /// `δᵗ = (min c(sᵗ) − max f(αᵗ, sᵗ)) / ‖∇_α f(αᵗ, sᵗ)‖²`.
    Adaptive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubgradientConfig {
    pub t_max: usize,
    /// Relative duality gap at which to stop.
    pub gap_tol: f64,
    pub step_rule: StepRule,
    pub gamma: f64,
    /// Evaluate `c(sᵗ)` at every iterate and return the best support seen.
    /// `None` picks the loss-dependent default: on for OLS (closed-form
    /// `c(s)`), off for losses that need an inner solve.
    pub track_best_primal: Option<bool>,
    /// Stop after this many consecutive iterations without improving the
    /// upper bound. Disabled by default.
    pub patience: Option<usize>,
}

impl SubgradientConfig {
    pub fn new(gamma: f64) -> Self {
        Self {
            t_max: 200,
            gap_tol: 1e-4,
            step_rule: StepRule::Adaptive,
            gamma,
            track_best_primal: None,
            patience: None,
        }
    }

    pub fn tracks_primal(&self, model: &LossModel) -> bool {
        self.track_best_primal.unwrap_or(model.kind == LossKind::Ols)
    }

    fn validate(&self) -> Result<(), SaddleError> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(SaddleError::InvalidGamma(self.gamma));
        }
        if let StepRule::Constant(d) = self.step_rule {
            if !(d > 0.0) {
                return Err(SaddleError::InvalidStep(d));
            }
        }
        Ok(())
    }
}

/// Running state of the sub-gradient ascent.
#[derive(Debug, Clone)]
pub struct SaddleState {
    pub alpha: DVector<f64>,
    pub alpha_sum: DVector<f64>,
    pub t: usize,
    /// Smallest upper bound seen (`c(sᵗ)` when tracked, otherwise the primal
    /// objective of `w = −γ X_sᵀα`, which dominates `c(sᵗ)`).
    pub best_upper: f64,
    /// Largest `f(αᵗ, sᵗ)` seen.
    pub best_lower: f64,
    pub incumbent: Option<Support>,
}

impl SaddleState {
    fn new(alpha: DVector<f64>) -> Self {
        let n = alpha.len();
        Self {
            alpha,
            alpha_sum: DVector::zeros(n),
            t: 0,
            best_upper: f64::INFINITY,
            best_lower: f64::NEG_INFINITY,
            incumbent: None,
        }
    }

    /// `(best_upper − best_lower) / max(1, |best_upper|)`.
    pub fn relative_gap(&self) -> f64 {
        (self.best_upper - self.best_lower) / self.best_upper.abs().max(1.0)
    }
}

/// Smallest step returned by [`adaptive_step`] while the gap is open.
pub const MIN_STEP: f64 = 1e-12;

/// The adaptive step `(best_upper − best_lower) / ‖∇‖²`.
///
/// Returns 0 once the gap has closed or the gradient vanishes; both mean the
/// iterate can no longer move.
pub fn adaptive_step(state: &SaddleState, grad_norm_sq: f64) -> f64 {
    let gap = state.best_upper - state.best_lower;
    if !(grad_norm_sq > 0.0) || !(gap > 0.0) {
        return 0.0;
    }
    (gap / grad_norm_sq).max(MIN_STEP)
}

/// How the first dual iterate was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaInit {
    Warm,
    /// `α⁰ = −Y / (1 + γ·mean_j ‖Xⱼ‖)`, projected.
    RegressionHeuristic,
    /// Center of each coordinate's conjugate domain.
    DomainCenter,
}

impl fmt::Display for AlphaInit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlphaInit::Warm => "warm",
            AlphaInit::RegressionHeuristic => "regression-heuristic",
            AlphaInit::DomainCenter => "domain-center",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    /// `f(αᵗ, sᵗ)` (plus `λ|sᵗ|` in penalized mode).
    pub lower: f64,
    pub upper: f64,
    pub step: f64,
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct SubgradientResult {
    pub support: Support,
    pub alpha_avg: DVector<f64>,
    pub gap: f64,
    pub iterations: usize,
    pub best_upper: f64,
    pub best_lower: f64,
    /// Whether `best_upper` is the exact `c(s)` of the best support.
    pub upper_is_exact: bool,
    pub init: AlphaInit,
    pub trace: Vec<TraceRow>,
}

impl SubgradientResult {
    /// Writes the convergence trace as `t,lower,upper,step,gap` rows.
    pub fn write_trace<W: Write>(&self, out: W) -> std::io::Result<()> {
        write_trace(&self.trace, self.init, out)
    }
}

pub fn write_trace<W: Write>(trace: &[TraceRow], init: AlphaInit, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# alpha_init={init}")?;
    writeln!(out, "t,lower,upper,step,gap")?;
    for r in trace {
        writeln!(out, "{},{:e},{:e},{:e},{:e}", r.t, r.lower, r.upper, r.step, r.gap)?;
    }
    Ok(())
}

fn check_alpha(alpha: &DVector<f64>, data: &Dataset, model: &LossModel) -> Result<(), SaddleError> {
    if alpha.len() != data.n() {
        return Err(SaddleError::DimensionMismatch { found: alpha.len(), expected: data.n() });
    }
    for (i, (&a, &y)) in alpha.iter().zip(data.y.iter()).enumerate() {
        if !model.in_domain(y, a) {
            return Err(SaddleError::OutsideDomain { index: i, alpha: a });
        }
    }
    Ok(())
}

fn conjugate_sum(alpha: &DVector<f64>, data: &Dataset, model: &LossModel) -> f64 {
    alpha.iter().zip(data.y.iter()).map(|(&a, &y)| model.conjugate(y, a)).sum()
}

/// `f(α, s)` for a binary support.
pub fn dual_function(
    alpha: &DVector<f64>,
    support: &Support,
    data: &Dataset,
    model: &LossModel,
    gamma: f64,
) -> Result<f64, SaddleError> {
    check_alpha(alpha, data, model)?;
    let quad: f64 = support
        .indices()
        .iter()
        .map(|&j| data.x.column(j).dot(alpha).powi(2))
        .sum();
    Ok(-conjugate_sum(alpha, data, model) - 0.5 * gamma * quad)
}

/// Indices of the `k` largest scores, ties broken by the lower index.
fn top_k(scores: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    let order = |a: &usize, b: &usize| scores[*b].total_cmp(&scores[*a]).then(a.cmp(b));
    if k < idx.len() && k > 0 {
        idx.select_nth_unstable_by(k - 1, order);
    }
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

/// `argmin_s f(α, s)` over `Σs ≤ k`: the `k` largest `(Xⱼᵀα)²`.
pub fn partial_min_support(
    alpha: &DVector<f64>,
    data: &Dataset,
    gamma: f64,
    k: usize,
) -> Result<Support, SaddleError> {
    let p = data.p();
    if k > p {
        return Err(SaddleError::InvalidBudget { k, p });
    }
    if !(gamma > 0.0) {
        return Err(SaddleError::InvalidGamma(gamma));
    }
    let scores: Vec<f64> = column_dots(&data.x, alpha).iter().map(|v| v * v).collect();
    Ok(Support::new(top_k(&scores, k), k))
}

/// Upper bound from the primal point `w_S = −γ X_Sᵀα`:
/// `Σ ℓ(yᵢ, xᵢᵀw) + ‖w‖²/(2γ) ≥ c(s)`.
fn primal_bound(xt_alpha: &DVector<f64>, support: &[usize], data: &Dataset, model: &LossModel, gamma: f64) -> f64 {
    let mut u = DVector::zeros(data.n());
    let mut w_sq = 0.0;
    for &j in support {
        let wj = -gamma * xt_alpha[j];
        w_sq += wj * wj;
        u.axpy(wj, &data.x.column(j), 1.0);
    }
    let loss: f64 = data.y.iter().zip(u.iter()).map(|(&y, &ui)| model.loss_unchecked(y, ui)).sum();
    loss + w_sq / (2.0 * gamma)
}

enum Mode {
    Budget(usize),
    Penalty(f64),
}

impl Mode {
    fn select(&self, scores: &[f64], gamma: f64) -> Support {
        match *self {
            Mode::Budget(k) => Support::new(top_k(scores, k), k),
            Mode::Penalty(lambda) => Support::unbudgeted(
                scores.iter().enumerate().filter(|(_, &b)| lambda - 0.5 * gamma * b < 0.0).map(|(j, _)| j),
            ),
        }
    }

    fn offset(&self, support: &Support) -> f64 {
        match *self {
            Mode::Budget(_) => 0.0,
            Mode::Penalty(lambda) => lambda * support.len() as f64,
        }
    }
}

fn initial_alpha(data: &Dataset, model: &LossModel, gamma: f64) -> (DVector<f64>, AlphaInit) {
    match model.kind {
        LossKind::Ols | LossKind::L1Svr | LossKind::L2Svr => {
            let p = data.p().max(1) as f64;
            let mean_norm = data.x.column_iter().map(|c| c.norm()).sum::<f64>() / p;
            let scale = 1.0 / (1.0 + gamma * mean_norm);
            let a = data.y.map(|y| -y * scale);
            let a = DVector::from_iterator(a.len(), a.iter().zip(data.y.iter()).map(|(&ai, &y)| model.project(y, ai)));
            (a, AlphaInit::RegressionHeuristic)
        }
        _ => {
            let a = data.y.map(|y| model.project(y, model.domain_center(y)));
            (a, AlphaInit::DomainCenter)
        }
    }
}

fn run(
    data: &Dataset,
    model: &LossModel,
    mode: Mode,
    cfg: &SubgradientConfig,
    warm_alpha: Option<&DVector<f64>>,
) -> Result<SubgradientResult, SaddleError> {
    cfg.validate()?;
    model.validate_labels(data.y.iter())?;
    let gamma = cfg.gamma;
    let track = cfg.tracks_primal(model);

    let (alpha0, init) = match warm_alpha {
        Some(a) => {
            if a.len() != data.n() {
                return Err(SaddleError::DimensionMismatch { found: a.len(), expected: data.n() });
            }
            let a = DVector::from_iterator(a.len(), a.iter().zip(data.y.iter()).map(|(&ai, &y)| model.project(y, ai)));
            (a, AlphaInit::Warm)
        }
        None => initial_alpha(data, model, gamma),
    };

    let upper_of = |support: &Support, xt_alpha: &DVector<f64>| -> Result<f64, SaddleError> {
        let base = if track {
            cio::support_value(support, data, model, gamma)?
        } else {
            primal_bound(xt_alpha, support.indices(), data, model, gamma)
        };
        Ok(base + mode.offset(support))
    };

    let mut state = SaddleState::new(alpha0);
    let mut trace = Vec::new();
    let mut since_improvement = 0usize;

    while state.t < cfg.t_max {
        let xt_alpha = column_dots(&data.x, &state.alpha);
        let scores: Vec<f64> = xt_alpha.iter().map(|v| v * v).collect();
        let support = mode.select(&scores, gamma);

        let quad: f64 = support.indices().iter().map(|&j| scores[j]).sum();
        let lower = -conjugate_sum(&state.alpha, data, model) - 0.5 * gamma * quad + mode.offset(&support);
        let upper = upper_of(&support, &xt_alpha)?;

        state.best_lower = state.best_lower.max(lower);
        if upper < state.best_upper {
            state.best_upper = upper;
            state.incumbent = Some(support.clone());
            since_improvement = 0;
        } else {
            since_improvement += 1;
        }
        state.alpha_sum += &state.alpha;
        state.t += 1;

        // ∇_α f(α, s) = −ℓ̂'(y, α) − γ Σ_{j∈s} Xⱼ (Xⱼᵀα)
        let mut grad = DVector::from_iterator(
            data.n(),
            state.alpha.iter().zip(data.y.iter()).map(|(&a, &y)| -model.conjugate_slope(y, a)),
        );
        for &j in support.indices() {
            grad.axpy(-gamma * xt_alpha[j], &data.x.column(j), 1.0);
        }
        let grad_norm_sq = grad.norm_squared();
        if !grad_norm_sq.is_finite() {
            return Err(SaddleError::NonFinite { iteration: state.t });
        }

        let gap = state.relative_gap();
        let step = match cfg.step_rule {
            StepRule::Constant(d) => d,
            StepRule::Adaptive => adaptive_step(&state, grad_norm_sq),
        };
        trace.push(TraceRow { t: state.t, lower, upper, step, gap });

        if gap <= cfg.gap_tol || step == 0.0 {
            break;
        }
        if cfg.patience.is_some_and(|pat| since_improvement >= pat) {
            break;
        }

        let y = &data.y;
        let next = DVector::from_iterator(
            data.n(),
            (0..data.n()).map(|i| model.project(y[i], state.alpha[i] + step * grad[i])),
        );
        state.alpha = next;
    }

    let alpha_avg = &state.alpha_sum / state.t.max(1) as f64;
    let xt_avg = column_dots(&data.x, &alpha_avg);
    let scores: Vec<f64> = xt_avg.iter().map(|v| v * v).collect();
    let recovered = mode.select(&scores, gamma);

    let support = if track {
        let v = upper_of(&recovered, &xt_avg)?;
        if v < state.best_upper {
            state.best_upper = v;
            recovered
        } else {
            state.incumbent.clone().unwrap_or(recovered)
        }
    } else {
        recovered
    };

    Ok(SubgradientResult {
        support,
        alpha_avg,
        gap: state.relative_gap(),
        iterations: state.t,
        best_upper: state.best_upper,
        best_lower: state.best_lower,
        upper_is_exact: track,
        init,
        trace,
    })
}

/// Cardinality-constrained relaxation: supports of size exactly `min(k, p)`.
pub fn subgradient_solve(
    data: &Dataset,
    model: &LossModel,
    k: usize,
    cfg: &SubgradientConfig,
    warm_alpha: Option<&DVector<f64>>,
) -> Result<SubgradientResult, SaddleError> {
    let p = data.p();
    if k == 0 || k > p {
        return Err(SaddleError::InvalidBudget { k, p });
    }
    run(data, model, Mode::Budget(k), cfg, warm_alpha)
}

/// Cardinality-penalized relaxation of `min c(s) + λ|s|`: the support keeps
/// every feature with `λ − (γ/2)(Xⱼᵀα)² < 0`.
pub fn penalized_solve(
    data: &Dataset,
    model: &LossModel,
    lambda: f64,
    cfg: &SubgradientConfig,
    warm_alpha: Option<&DVector<f64>>,
) -> Result<SubgradientResult, SaddleError> {
    if !(lambda >= 0.0) {
        return Err(SaddleError::InvalidLambda(lambda));
    }
    run(data, model, Mode::Penalty(lambda), cfg, warm_alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{sample_dataset, Covariance, SyntheticSpec};
    use nalgebra::DMatrix;

    fn small() -> Dataset {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 0.5, -0.3, 2.0, 0.8, -1.1]);
        let y = DVector::from_vec(vec![0.4, -1.2, 0.9]);
        Dataset::new(x, y)
    }

    fn independent(n: usize, p: usize, k_true: usize, seed: u64) -> Dataset {
        let spec = SyntheticSpec {
            covariance: Covariance::Identity,
            ..SyntheticSpec::toeplitz(n, p, k_true, 0.0, 6.0, seed)
        };
        sample_dataset(&spec).unwrap()
    }

    fn combinations(p: usize, k: usize) -> Vec<Vec<usize>> {
        fn rec(start: usize, p: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for j in start..p {
                cur.push(j);
                rec(j + 1, p, k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(0, p, k, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn dual_function_at_zero() {
        let data = small();
        let ols = LossModel::new(LossKind::Ols);
        let v = dual_function(&DVector::zeros(3), &Support::full(2), &data, &ols, 1.3).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn dual_function_empty_support() {
        let data = small();
        let ols = LossModel::new(LossKind::Ols);
        let a = DVector::from_vec(vec![0.3, -0.7, 1.1]);
        let v = dual_function(&a, &Support::empty(1), &data, &ols, 2.0).unwrap();
        let expected: f64 = -a.iter().zip(data.y.iter()).map(|(a, y)| 0.5 * a * a + y * a).sum::<f64>();
        assert!((v - expected).abs() < 1e-15);
    }

    #[test]
    fn dual_function_matches_dense_formula() {
        let data = small();
        let ols = LossModel::new(LossKind::Ols);
        let a = DVector::from_vec(vec![0.3, -0.7, 1.1]);
        let gamma = 0.8;
        let s = Support::new([1], 1);
        // −½‖α‖² − Yᵀα − (γ/2) αᵀ X_s X_sᵀ α with X_s X_sᵀ formed densely.
        let xs = data.x.column(1).into_owned();
        let q = &xs * xs.transpose();
        let dense = -0.5 * a.norm_squared() - data.y.dot(&a) - 0.5 * gamma * (a.transpose() * q * &a)[(0, 0)];
        let v = dual_function(&a, &s, &data, &ols, gamma).unwrap();
        assert!((v - dense).abs() < 1e-12);
    }

    #[test]
    fn dual_function_rejects_out_of_domain() {
        let x = DMatrix::from_row_slice(2, 1, &[1.0, 2.0]);
        let data = Dataset::new(x, DVector::from_vec(vec![1.0, -1.0]));
        let hinge = LossModel::new(LossKind::Hinge);
        let a = DVector::from_vec(vec![0.5, 0.5]);
        assert!(matches!(
            dual_function(&a, &Support::full(1), &data, &hinge, 1.0),
            Err(SaddleError::OutsideDomain { index: 0, .. })
        ));
    }

    #[test]
    fn partial_min_examples() {
        let x = DMatrix::<f64>::identity(3, 3) * 2.0;
        let data = Dataset::new(x, DVector::zeros(3));
        let a = DVector::from_vec(vec![1.0, 2.0, 0.0]);
        assert_eq!(partial_min_support(&a, &data, 1.0, 1).unwrap().indices(), &[1]);
        let s = partial_min_support(&DVector::zeros(3), &data, 1.0, 2).unwrap();
        assert_eq!(s.indices(), &[0, 1]);
        assert!(matches!(partial_min_support(&a, &data, 1.0, 4), Err(SaddleError::InvalidBudget { .. })));
    }

    #[test]
    fn partial_min_agrees_with_enumeration() {
        let data = independent(5, 8, 3, 17);
        let ols = LossModel::new(LossKind::Ols);
        let gamma = 0.7;
        for seed in 0..5u64 {
            let a = DVector::from_fn(5, |i, _| ((i as f64 + 1.0) * (seed as f64 + 0.37)).sin());
            let s = partial_min_support(&a, &data, gamma, 3).unwrap();
            let mut best = (f64::INFINITY, Vec::new());
            for c in combinations(8, 3) {
                let v = dual_function(&a, &Support::new(c.clone(), 3), &data, &ols, gamma).unwrap();
                if v < best.0 {
                    best = (v, c);
                }
            }
            let v = dual_function(&a, &s, &data, &ols, gamma).unwrap();
            assert!((v - best.0).abs() < 1e-12);
        }
    }

    #[test]
    fn adaptive_step_examples() {
        let mut st = SaddleState::new(DVector::zeros(1));
        st.best_upper = 1.0;
        st.best_lower = 0.0;
        assert_eq!(adaptive_step(&st, 4.0), 0.25);
        assert_eq!(adaptive_step(&st, 0.0), 0.0);
        st.best_lower = 1.0;
        assert_eq!(adaptive_step(&st, 4.0), 0.0);
        st.best_lower = 0.0;
        st.best_upper = 1e-20;
        assert_eq!(adaptive_step(&st, 1e10), MIN_STEP);
    }

    #[test]
    fn adaptive_steps_match_trace_ratios() {
        // Recompute each δᵗ from the running bounds and the gradient norm.
        let data = independent(30, 10, 3, 4);
        let ols = LossModel::new(LossKind::Ols);
        let cfg = SubgradientConfig { t_max: 15, gap_tol: 0.0, ..SubgradientConfig::new(0.05) };
        let res = subgradient_solve(&data, &ols, 3, &cfg, None).unwrap();
        let (mut alpha, _) = initial_alpha(&data, &ols, cfg.gamma);
        let (mut bu, mut bl) = (f64::INFINITY, f64::NEG_INFINITY);
        for row in &res.trace {
            bu = bu.min(row.upper);
            bl = bl.max(row.lower);
            let xa = data.x.transpose() * &alpha;
            let scores: Vec<f64> = xa.iter().map(|v| v * v).collect();
            let s = top_k(&scores, 3);
            let mut g = -(&alpha + &data.y);
            for &j in &s {
                g -= cfg.gamma * xa[j] * data.x.column(j);
            }
            let expected = ((bu - bl) / g.norm_squared()).max(MIN_STEP);
            assert!((row.step - expected).abs() <= 1e-8 * expected, "t={} step {} vs {}", row.t, row.step, expected);
            alpha += row.step * g;
        }
    }

    #[test]
    fn full_budget_selects_everything() {
        let data = independent(20, 5, 2, 8);
        let ols = LossModel::new(LossKind::Ols);
        let cfg = SubgradientConfig::new(0.5);
        let res = subgradient_solve(&data, &ols, 5, &cfg, None).unwrap();
        assert_eq!(res.support, Support::full(5));
        let ridge = cio::support_value(&Support::full(5), &data, &ols, 0.5).unwrap();
        assert!((res.best_upper - ridge).abs() < 1e-12);
    }

    #[test]
    fn zero_response_is_a_fixed_point() {
        let mut data = independent(15, 6, 2, 3);
        data.y.fill(0.0);
        let ols = LossModel::new(LossKind::Ols);
        let res = subgradient_solve(&data, &ols, 2, &SubgradientConfig::new(1.0), None).unwrap();
        assert_eq!(res.alpha_avg.amax(), 0.0);
        assert_eq!(res.best_upper, 0.0);
        assert_eq!(res.iterations, 1);
    }

    #[test]
    fn recovers_enumerated_optimum_on_independent_designs() {
        let ols = LossModel::new(LossKind::Ols);
        let mut hits = 0;
        for seed in 0..10u64 {
            let data = independent(20, 8, 3, 100 + seed);
            let gamma = 10.0;
            let res = subgradient_solve(&data, &ols, 3, &SubgradientConfig::new(gamma), None).unwrap();
            let best = combinations(8, 3)
                .into_iter()
                .map(|c| cio::support_value(&Support::new(c, 3), &data, &ols, gamma).unwrap())
                .fold(f64::INFINITY, f64::min);
            let got = cio::support_value(&res.support, &data, &ols, gamma).unwrap();
            if (got - best).abs() <= 1e-6 {
                hits += 1;
            }
        }
        assert!(hits >= 9, "only {hits}/10 instances reached the enumerated optimum");
    }

    #[test]
    fn weak_duality_along_the_trace() {
        for kind in [LossKind::Ols, LossKind::Hinge, LossKind::Logistic, LossKind::L2Svm] {
            let mut data = independent(40, 12, 3, 21);
            if kind.is_classification() {
                data.y.apply(|v| *v = if *v >= 0.0 { 1.0 } else { -1.0 });
            }
            let model = LossModel::new(kind);
            let cfg = SubgradientConfig { t_max: 40, track_best_primal: Some(true), ..SubgradientConfig::new(0.2) };
            let res = subgradient_solve(&data, &model, 3, &cfg, None).unwrap();
            for r in &res.trace {
                assert!(r.lower <= r.upper + 1e-9, "{kind}: t={} {} > {}", r.t, r.lower, r.upper);
            }
            assert!(res.best_lower <= res.best_upper + 1e-9);
            assert_eq!(res.support.len(), 3);
        }
    }

    #[test]
    fn solves_are_deterministic() {
        let data = independent(30, 15, 4, 5);
        let ols = LossModel::new(LossKind::Ols);
        let cfg = SubgradientConfig::new(0.3);
        let a = subgradient_solve(&data, &ols, 4, &cfg, None).unwrap();
        let b = subgradient_solve(&data, &ols, 4, &cfg, None).unwrap();
        assert_eq!(a.support, b.support);
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.alpha_avg, b.alpha_avg);
    }

    #[test]
    fn penalized_extremes() {
        let data = independent(25, 8, 3, 9);
        let ols = LossModel::new(LossKind::Ols);
        let cfg = SubgradientConfig { t_max: 30, ..SubgradientConfig::new(0.5) };
        let res = penalized_solve(&data, &ols, 0.0, &cfg, None).unwrap();
        assert_eq!(res.support.len(), 8);
        let res = penalized_solve(&data, &ols, 1e12, &cfg, None).unwrap();
        assert!(res.support.is_empty());
        assert!(penalized_solve(&data, &ols, -1.0, &cfg, None).is_err());
    }

    #[test]
    fn trace_export() {
        let data = independent(10, 4, 2, 1);
        let res = subgradient_solve(&data, &LossModel::new(LossKind::Ols), 2, &SubgradientConfig::new(0.1), None).unwrap();
        let mut buf = Vec::new();
        res.write_trace(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# alpha_init=regression-heuristic"));
        assert_eq!(lines.next(), Some("t,lower,upper,step,gap"));
        assert_eq!(lines.count(), res.trace.len());
    }

    #[test]
    fn rejects_bad_configs() {
        let data = independent(10, 4, 2, 1);
        let ols = LossModel::new(LossKind::Ols);
        assert!(matches!(subgradient_solve(&data, &ols, 0, &SubgradientConfig::new(1.0), None), Err(SaddleError::InvalidBudget { .. })));
        assert!(matches!(subgradient_solve(&data, &ols, 2, &SubgradientConfig::new(0.0), None), Err(SaddleError::InvalidGamma(_))));
        let cfg = SubgradientConfig { step_rule: StepRule::Constant(-1.0), ..SubgradientConfig::new(1.0) };
        assert!(matches!(subgradient_solve(&data, &ols, 2, &cfg, None), Err(SaddleError::InvalidStep(_))));
    }
}
