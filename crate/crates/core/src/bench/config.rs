//! Experiment configuration, read from TOML. The grammar is documented in
//! `docs/config.md`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::BenchError;
use crate::datagen::{Covariance, SyntheticSpec, Task, WeightScheme};
use crate::losses::LossKind;
use crate::penalties::Penalty;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Cio,
    Ss,
    Lasso,
    Enet,
    Mcp,
    Scad,
}

impl Method {
    pub const ALL: [Method; 6] = [Method::Cio, Method::Ss, Method::Lasso, Method::Enet, Method::Mcp, Method::Scad];

    pub fn name(self) -> &'static str {
        match self {
            Method::Cio => "cio",
            Method::Ss => "ss",
            Method::Lasso => "lasso",
            Method::Enet => "enet",
            Method::Mcp => "mcp",
            Method::Scad => "scad",
        }
    }

    pub fn is_penalized(self) -> bool {
        !matches!(self, Method::Cio | Method::Ss)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| BenchError::Config(format!("unknown method '{s}' (expected one of cio, ss, lasso, enet, mcp, scad)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    /// `k` equals the true sparsity.
    FixedK,
    /// `k` (or λ) selected on the validation split.
    CrossValidatedK,
    /// One row per `k` in the sparsity grid, for TF-versus-FF curves.
    RocSweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Design {
    Toeplitz,
    HardMi,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaStart {
    /// `γ₀ = 1 / max_i ‖xᵢ‖²`.
    RowNorm,
    /// `γ₀ = p / (n k max_i ‖xᵢ‖²)`.
    Normalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub p: usize,
    pub k_true: usize,
    #[serde(default = "default_design")]
    pub design: Design,
    #[serde(default)]
    pub rho: f64,
    pub snr: f64,
    #[serde(default = "default_task")]
    pub task: String,
    /// `signed_unit` or `uniform_over_root`; defaults per design.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<String>,
    /// Fresh rows generated for the test metrics.
    #[serde(default = "default_test_size")]
    pub test_size: usize,
}

fn default_design() -> Design {
    Design::Toeplitz
}
fn default_task() -> String {
    "regression".into()
}
fn default_test_size() -> usize {
    1000
}

/// Settings shared by the two cardinality-constrained methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsetConfig {
    /// Loss; defaults to `ols` for regression and `hinge` for classification.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss: Option<String>,
    /// Length of the doubling γ schedule searched on the validation split.
    #[serde(default = "default_gamma_steps")]
    pub gamma_steps: usize,
    #[serde(default = "default_gamma_start")]
    pub gamma_start: GammaStart,
    /// Fixed γ, bypassing the schedule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Outer-approximation wall-clock limit in seconds (CIO).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_limit: Option<f64>,
    /// Deterministic cap on outer-approximation iterations (CIO).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Sub-gradient iteration budget (SS).
    #[serde(default = "default_t_max")]
    pub t_max: usize,
}

fn default_gamma_steps() -> usize {
    5
}
fn default_gamma_start() -> GammaStart {
    GammaStart::RowNorm
}
fn default_epsilon() -> f64 {
    1e-4
}
fn default_t_max() -> usize {
    200
}

impl Default for SubsetConfig {
    fn default() -> Self {
        Self {
            loss: None,
            gamma_steps: default_gamma_steps(),
            gamma_start: default_gamma_start(),
            gamma: None,
            time_limit: None,
            max_iterations: None,
            epsilon: default_epsilon(),
            t_max: default_t_max(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenalizedConfig {
    /// `ols` or `logistic`; defaults by task.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss: Option<String>,
    #[serde(default = "default_n_lambda")]
    pub n_lambda: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_ratio: Option<f64>,
    #[serde(default = "default_enet_alpha")]
    pub enet_alpha: f64,
    #[serde(default = "default_mcp_gamma")]
    pub mcp_gamma: f64,
    #[serde(default = "default_scad_gamma")]
    pub scad_gamma: f64,
}

fn default_n_lambda() -> usize {
    100
}
fn default_enet_alpha() -> f64 {
    0.5
}
fn default_mcp_gamma() -> f64 {
    Penalty::MCP_DEFAULT_GAMMA
}
fn default_scad_gamma() -> f64 {
    Penalty::SCAD_DEFAULT_GAMMA
}

impl Default for PenalizedConfig {
    fn default() -> Self {
        Self {
            loss: None,
            n_lambda: default_n_lambda(),
            lambda_ratio: None,
            enet_alpha: default_enet_alpha(),
            mcp_gamma: default_mcp_gamma(),
            scad_gamma: default_scad_gamma(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub methods: Vec<Method>,
    pub n_grid: Vec<usize>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_protocol")]
    pub protocol: Protocol,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    /// Record wall-clock columns. When off, `seconds` and `relative_time`
    /// are written as 0 so that reruns produce identical files.
    #[serde(default = "default_true")]
    pub timing: bool,
    /// Sparsity grid for the cross-validated and ROC protocols.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_grid: Option<Vec<usize>>,
    /// Worker threads; all available cores when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub data: DataConfig,
    #[serde(default)]
    pub cio: SubsetConfig,
    #[serde(default)]
    pub ss: SubsetConfig,
    #[serde(default)]
    pub penalized: PenalizedConfig,
}

fn default_name() -> String {
    "experiment".into()
}
fn default_replications() -> usize {
    10
}
fn default_protocol() -> Protocol {
    Protocol::FixedK
}
fn default_output() -> PathBuf {
    PathBuf::from("results")
}
fn default_true() -> bool {
    true
}

fn parse_loss(s: &str) -> Result<LossKind, BenchError> {
    s.parse::<LossKind>().map_err(|e| BenchError::Config(e.to_string()))
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, BenchError> {
        let cfg: Self = toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn task(&self) -> Result<Task, BenchError> {
        self.data.task.parse().map_err(|e: crate::datagen::DataError| BenchError::Config(e.to_string()))
    }

    pub fn subset_loss(&self, method: Method) -> Result<LossKind, BenchError> {
        let sub = if method == Method::Cio { &self.cio } else { &self.ss };
        match &sub.loss {
            Some(s) => parse_loss(s),
            None if self.task()? == Task::Classification => Ok(LossKind::Hinge),
            None => Ok(LossKind::Ols),
        }
    }

    pub fn penalized_loss(&self) -> Result<LossKind, BenchError> {
        match &self.penalized.loss {
            Some(s) => parse_loss(s),
            None if self.task()? == Task::Classification => Ok(LossKind::Logistic),
            None => Ok(LossKind::Ols),
        }
    }

    pub fn penalty(&self, method: Method) -> Option<Penalty> {
        match method {
            Method::Lasso => Some(Penalty::Lasso),
            Method::Enet => Some(Penalty::ElasticNet { alpha: self.penalized.enet_alpha }),
            Method::Mcp => Some(Penalty::Mcp { gamma: self.penalized.mcp_gamma }),
            Method::Scad => Some(Penalty::Scad { gamma: self.penalized.scad_gamma }),
            Method::Cio | Method::Ss => None,
        }
    }

    /// CIO time limit: the configured value, else 60 s (regression) or
    /// 180 s (classification).
    pub fn cio_time_limit(&self) -> Result<Duration, BenchError> {
        let secs = match self.cio.time_limit {
            Some(s) => s,
            None if self.task()? == Task::Classification => 180.0,
            None => 60.0,
        };
        Ok(Duration::from_secs_f64(secs))
    }

    /// Template for one generated dataset of `n` rows.
    pub fn synthetic_spec(&self, n: usize, seed: u64) -> Result<SyntheticSpec, BenchError> {
        let d = &self.data;
        let covariance = match d.design {
            Design::Toeplitz => Covariance::Toeplitz(d.rho),
            Design::HardMi => Covariance::HardMi,
            Design::Identity => Covariance::Identity,
        };
        let weight_scheme = match &d.weights {
            Some(w) => w.parse::<WeightScheme>().map_err(|e| BenchError::Config(e.to_string()))?,
            None if d.design == Design::HardMi => WeightScheme::UniformOverRoot,
            None => WeightScheme::SignedUnit,
        };
        Ok(SyntheticSpec { n, p: d.p, k_true: d.k_true, covariance, snr: d.snr, task: self.task()?, weight_scheme, seed })
    }

    /// Label for the `rho_or_design` column.
    pub fn design_label(&self) -> String {
        match self.data.design {
            Design::Toeplitz => format!("{}", self.data.rho),
            Design::HardMi => "hardmi".into(),
            Design::Identity => "identity".into(),
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::Config(m));
        if self.methods.is_empty() {
            return bad("methods must not be empty".into());
        }
        if self.n_grid.is_empty() {
            return bad("n_grid must not be empty".into());
        }
        if self.replications == 0 {
            return bad("replications must be at least 1".into());
        }
        if let Some(&n) = self.n_grid.iter().find(|&&n| n < 4) {
            return bad(format!("n = {n} is too small to split into train and validation"));
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        if let Some(g) = &self.k_grid {
            if g.is_empty() || g.iter().any(|&k| k == 0 || k > self.data.p) {
                return bad(format!("k_grid entries must lie in 1..={}", self.data.p));
            }
        }
        if self.data.test_size == 0 {
            return bad("data.test_size must be positive".into());
        }
        self.synthetic_spec(self.n_grid[0], 0)?
            .validate()
            .map_err(|e| BenchError::Config(e.to_string()))?;
        for sub in [&self.cio, &self.ss] {
            if sub.gamma_steps == 0 {
                return bad("gamma_steps must be at least 1".into());
            }
            if sub.gamma.is_some_and(|g| !(g > 0.0 && g.is_finite())) {
                return bad("gamma must be positive".into());
            }
            if sub.time_limit.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
                return bad("time_limit must be positive".into());
            }
            if !(sub.epsilon >= 0.0) {
                return bad("epsilon must be nonnegative".into());
            }
            if sub.t_max == 0 {
                return bad("t_max must be at least 1".into());
            }
        }
        let task = self.task()?;
        for &m in &self.methods {
            if m.is_penalized() {
                let loss = self.penalized_loss()?;
                if !matches!(loss, LossKind::Ols | LossKind::Logistic) {
                    return bad(format!("penalized methods support ols and logistic losses, not {loss}"));
                }
                if loss.is_classification() != (task == Task::Classification) {
                    return bad(format!("penalized loss {loss} does not match the {} task", self.data.task));
                }
                self.penalty(m).expect("penalized").validate().map_err(|e| BenchError::Config(e.to_string()))?;
            } else {
                let loss = self.subset_loss(m)?;
                if loss.is_classification() != (task == Task::Classification) {
                    return bad(format!("{m} loss {loss} does not match the {} task", self.data.task));
                }
            }
        }
        if self.penalized.n_lambda < 2 {
            return bad("penalized.n_lambda must be at least 2".into());
        }
        if self.penalized.lambda_ratio.is_some_and(|r| !(r > 0.0 && r < 1.0)) {
            return bad("penalized.lambda_ratio must lie in (0, 1)".into());
        }
        Ok(())
    }
}
