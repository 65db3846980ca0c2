//! Penalized estimators fitted by pathwise coordinate descent.
//!
//! For OLS the objective is
//!
//! ```text
//! (1/2n) ‖Y − b₀ − Xw‖² + Σⱼ P(wⱼ; λ)
//! ```
//!
//! and for logistic regression `(1/n) Σ log(1 + exp(−yᵢ(b₀ + xᵢᵀw))) + Σ P`,
//! handled by iteratively reweighted least squares around the same
//! coordinate descent. Columns are standardized to zero mean and unit
//! (population) variance before fitting; reported coefficients are on the
//! original scale, reported objectives on the standardized one. The
//! intercept is never penalized.

mod cd;
mod prox;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::DVector;
use thiserror::Error;

pub use cd::{fit_path, fit_single, lambda_grid, lambda_max, CdOptions};
pub use prox::{penalty_eval, soft_threshold, univariate_prox};

use crate::losses::{LossError, LossKind};
use crate::metrics::LinearFit;
use crate::support::Support;
use crate::ZERO_THRESHOLD;

#[derive(Debug, Error)]
pub enum PenaltyError {
    #[error("λ = {0} must be finite and nonnegative")]
    InvalidLambda(f64),
    #[error("elastic-net mixing α = {0} must lie in (0, 1]")]
    InvalidMixing(f64),
    #[error("{name} concavity γ = {gamma} must exceed {min}")]
    InvalidConcavity { name: &'static str, gamma: f64, min: f64 },
    #[error("coordinate curvature ν = {0} must be positive")]
    InvalidCurvature(f64),
    #[error("penalized fitting supports OLS and logistic losses, not {0}")]
    UnsupportedLoss(LossKind),
    #[error("λ grid needs a positive count and a ratio in (0, 1), got {count} and {ratio}")]
    InvalidGrid { count: usize, ratio: f64 },
    #[error("unknown penalty {0:?}")]
    UnknownPenalty(String),
    #[error(transparent)]
    Loss(#[from] LossError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Penalty {
    Lasso,
    /// `λ(α|w| + (1−α)w²/2)`.
    ElasticNet { alpha: f64 },
    Mcp { gamma: f64 },
    Scad { gamma: f64 },
}

impl Penalty {
    pub const MCP_DEFAULT_GAMMA: f64 = 3.0;
    pub const SCAD_DEFAULT_GAMMA: f64 = 3.7;

    pub fn mcp() -> Self {
        Penalty::Mcp { gamma: Self::MCP_DEFAULT_GAMMA }
    }

    pub fn scad() -> Self {
        Penalty::Scad { gamma: Self::SCAD_DEFAULT_GAMMA }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Penalty::Lasso => "lasso",
            Penalty::ElasticNet { .. } => "enet",
            Penalty::Mcp { .. } => "mcp",
            Penalty::Scad { .. } => "scad",
        }
    }

    pub fn validate(&self) -> Result<(), PenaltyError> {
        match *self {
            Penalty::Lasso => Ok(()),
            Penalty::ElasticNet { alpha } if alpha > 0.0 && alpha <= 1.0 => Ok(()),
            Penalty::ElasticNet { alpha } => Err(PenaltyError::InvalidMixing(alpha)),
            Penalty::Mcp { gamma } if gamma > 1.0 && gamma.is_finite() => Ok(()),
            Penalty::Mcp { gamma } => Err(PenaltyError::InvalidConcavity { name: "MCP", gamma, min: 1.0 }),
            Penalty::Scad { gamma } if gamma > 2.0 && gamma.is_finite() => Ok(()),
            Penalty::Scad { gamma } => Err(PenaltyError::InvalidConcavity { name: "SCAD", gamma, min: 2.0 }),
        }
    }

    /// `Σⱼ P(wⱼ; λ)`.
    pub fn total(&self, w: &[f64], lambda: f64) -> f64 {
        w.iter().map(|&v| penalty_eval(*self, v, lambda)).sum()
    }
}

impl fmt::Display for Penalty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Penalty::Lasso => f.write_str("lasso"),
            Penalty::ElasticNet { alpha } => write!(f, "enet(alpha={alpha})"),
            Penalty::Mcp { gamma } => write!(f, "mcp(gamma={gamma})"),
            Penalty::Scad { gamma } => write!(f, "scad(gamma={gamma})"),
        }
    }
}

/// Parses `lasso`, `enet`, `mcp`, `scad` with default parameters.
impl FromStr for Penalty {
    type Err = PenaltyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lasso" | "l1" => Ok(Penalty::Lasso),
            "enet" | "elasticnet" | "elastic-net" => Ok(Penalty::ElasticNet { alpha: 0.5 }),
            "mcp" => Ok(Penalty::mcp()),
            "scad" => Ok(Penalty::scad()),
            _ => Err(PenaltyError::UnknownPenalty(s.to_string())),
        }
    }
}

/// Fit at one value of λ.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPoint {
    pub lambda: f64,
    pub intercept: f64,
    /// Coefficients on the original feature scale.
    pub coefficients: DVector<f64>,
    /// Penalized objective on the standardized scale.
    pub objective: f64,
    pub converged: bool,
    /// Final largest coefficient change (standardized scale).
    pub achieved_tol: f64,
    pub sweeps: usize,
    /// Objective after every coordinate sweep (OLS only).
    pub sweep_objectives: Vec<f64>,
}

impl PathPoint {
    pub fn support(&self) -> Support {
        Support::unbudgeted(
            self.coefficients.iter().enumerate().filter(|(_, w)| w.abs() > ZERO_THRESHOLD).map(|(j, _)| j),
        )
    }

    pub fn support_size(&self) -> usize {
        self.coefficients.iter().filter(|w| w.abs() > ZERO_THRESHOLD).count()
    }

    pub fn fit(&self) -> LinearFit {
        LinearFit { intercept: self.intercept, coefficients: self.coefficients.clone() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegPath {
    pub penalty: Penalty,
    pub loss: LossKind,
    /// Points in decreasing order of λ.
    pub points: Vec<PathPoint>,
}

impl RegPath {
    pub fn lambdas(&self) -> Vec<f64> {
        self.points.iter().map(|pt| pt.lambda).collect()
    }

    pub fn all_converged(&self) -> bool {
        self.points.iter().all(|pt| pt.converged)
    }

    /// First point (largest λ) whose support has exactly `k` features.
    pub fn point_with_size(&self, k: usize) -> Option<&PathPoint> {
        self.points.iter().find(|pt| pt.support_size() == k)
    }

    /// Writes `lambda,support_size,objective,coefficients` rows, the last
    /// column listing nonzeros as `index:value` pairs joined by `;`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "lambda,support_size,objective,coefficients")?;
        for pt in &self.points {
            let nz: Vec<String> = pt
                .coefficients
                .iter()
                .enumerate()
                .filter(|(_, w)| w.abs() > ZERO_THRESHOLD)
                .map(|(j, w)| format!("{j}:{w:e}"))
                .collect();
            writeln!(out, "{:e},{},{:e},{}", pt.lambda, pt.support_size(), pt.objective, nz.join(";"))?;
        }
        Ok(())
    }
}
