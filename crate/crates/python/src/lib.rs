//! Python bindings: datasets, the exact and relaxed subset solvers,
//! penalized paths and the selection metrics.

use std::time::Duration;

use nalgebra::{DMatrix, DVector};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use sparsereg::cio::{self, OaConfig};
use sparsereg::datagen::{self, Covariance, Dataset, SyntheticSpec, Task, WeightScheme};
use sparsereg::penalties::{self, CdOptions, Penalty};
use sparsereg::saddle::{self, SubgradientConfig};
use sparsereg::{metrics, LossKind, LossModel, Support};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn loss_model(name: &str) -> PyResult<LossModel> {
    name.parse::<LossKind>().map(LossModel::new).map_err(value_err)
}

fn penalty_of(name: &str, alpha: f64, concavity: Option<f64>) -> PyResult<Penalty> {
    let p = match name.parse::<Penalty>().map_err(value_err)? {
        Penalty::ElasticNet { .. } => Penalty::ElasticNet { alpha },
        Penalty::Mcp { gamma } => Penalty::Mcp { gamma: concavity.unwrap_or(gamma) },
        Penalty::Scad { gamma } => Penalty::Scad { gamma: concavity.unwrap_or(gamma) },
        Penalty::Lasso => Penalty::Lasso,
    };
    p.validate().map_err(value_err)?;
    Ok(p)
}

/// Feature matrix `x` (rows of equal length) with response `y`.
#[pyclass(name = "Dataset", module = "pysparsereg")]
struct PyDataset {
    inner: Dataset,
}

#[pymethods]
impl PyDataset {
    #[new]
    fn new(x: Vec<Vec<f64>>, y: Vec<f64>) -> PyResult<Self> {
        let n = x.len();
        let p = x.first().map_or(0, Vec::len);
        if n == 0 || p == 0 {
            return Err(PyValueError::new_err("x must be a non-empty list of non-empty rows"));
        }
        if x.iter().any(|r| r.len() != p) {
            return Err(PyValueError::new_err("rows of x differ in length"));
        }
        if y.len() != n {
            return Err(PyValueError::new_err(format!("x has {n} rows but y has {} entries", y.len())));
        }
        let m = DMatrix::from_fn(n, p, |i, j| x[i][j]);
        Ok(Self { inner: Dataset::new(m, DVector::from_vec(y)) })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.p()
    }

    #[getter]
    fn x(&self) -> Vec<Vec<f64>> {
        self.inner.x.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    #[getter]
    fn y(&self) -> Vec<f64> {
        self.inner.y.as_slice().to_vec()
    }

    #[getter]
    fn w_true(&self) -> Option<Vec<f64>> {
        self.inner.w_true.as_ref().map(|w| w.as_slice().to_vec())
    }

    #[getter]
    fn true_support(&self) -> Option<Vec<usize>> {
        self.inner.true_support()
    }

    /// Centers and scales every column to unit variance, in place.
    fn standardize(&mut self) {
        self.inner.standardize();
    }

    /// Rows `rows`, as a new dataset.
    fn select_rows(&self, rows: Vec<usize>) -> PyResult<Self> {
        if let Some(&bad) = rows.iter().find(|&&i| i >= self.inner.n()) {
            return Err(PyValueError::new_err(format!("row {bad} out of range")));
        }
        Ok(Self { inner: self.inner.select_rows(&rows) })
    }

    fn __repr__(&self) -> String {
        format!("Dataset(n={}, p={})", self.inner.n(), self.inner.p())
    }
}

/// Synthetic sample with `k_true` nonzero weights and the given SNR.
///
/// `design` is `toeplitz` (with `rho`), `hardmi` or `identity`; `task` is
/// `regression` or `classification`.
#[pyfunction]
#[pyo3(signature = (n, p, k_true, snr, rho = 0.0, design = "toeplitz", task = "regression", seed = 0))]
#[allow(clippy::too_many_arguments)]
fn sample_dataset(
    n: usize,
    p: usize,
    k_true: usize,
    snr: f64,
    rho: f64,
    design: &str,
    task: &str,
    seed: u64,
) -> PyResult<PyDataset> {
    let (covariance, weight_scheme) = match design {
        "toeplitz" => (Covariance::Toeplitz(rho), WeightScheme::SignedUnit),
        "hardmi" => (Covariance::HardMi, WeightScheme::UniformOverRoot),
        "identity" => (Covariance::Identity, WeightScheme::SignedUnit),
        other => return Err(PyValueError::new_err(format!("unknown design '{other}'"))),
    };
    let task: Task = task.parse().map_err(value_err)?;
    let spec = SyntheticSpec { n, p, k_true, covariance, snr, task, weight_scheme, seed };
    let inner = datagen::sample_dataset(&spec).map_err(value_err)?;
    Ok(PyDataset { inner })
}

#[pyclass(name = "OaResult", module = "pysparsereg", get_all)]
struct PyOaResult {
    support: Vec<usize>,
    value: f64,
    bound: f64,
    certified: bool,
    iterations: usize,
    cuts: usize,
    coefficients: Vec<f64>,
}

#[pymethods]
impl PyOaResult {
    fn __repr__(&self) -> String {
        format!(
            "OaResult(support={:?}, value={}, bound={}, certified={})",
            self.support,
            self.value,
            self.bound,
            if self.certified { "True" } else { "False" }
        )
    }
}

/// Exact `min c(s)` over supports of size at most `k` by outer approximation.
#[pyfunction]
#[pyo3(signature = (data, k, gamma, loss = "ols", time_limit = None, max_iterations = None, warm_start = None))]
fn cutting_plane_solve(
    data: &PyDataset,
    k: usize,
    gamma: f64,
    loss: &str,
    time_limit: Option<f64>,
    max_iterations: Option<usize>,
    warm_start: Option<Vec<usize>>,
) -> PyResult<PyOaResult> {
    let model = loss_model(loss)?;
    let mut cfg = OaConfig::for_loss(&model);
    if let Some(t) = time_limit {
        if !(t > 0.0 && t.is_finite()) {
            return Err(PyValueError::new_err("time_limit must be positive"));
        }
        cfg.time_limit = Duration::from_secs_f64(t);
    }
    cfg.max_iterations = max_iterations;
    let warm = warm_start.map(Support::unbudgeted);
    let res = cio::cutting_plane_solve(&data.inner, &model, k, gamma, warm.as_ref(), &cfg).map_err(value_err)?;
    Ok(PyOaResult {
        support: res.support.indices().to_vec(),
        value: res.value,
        bound: res.bound,
        certified: res.certified,
        iterations: res.iterations,
        cuts: res.cuts,
        coefficients: res.coefficients.as_slice().to_vec(),
    })
}

/// `c(s)` for one support.
#[pyfunction]
#[pyo3(signature = (data, support, gamma, loss = "ols"))]
fn support_value(data: &PyDataset, support: Vec<usize>, gamma: f64, loss: &str) -> PyResult<f64> {
    let model = loss_model(loss)?;
    cio::support_value(&Support::unbudgeted(support), &data.inner, &model, gamma).map_err(value_err)
}

/// Ridge coefficients restricted to `support`.
#[pyfunction]
#[pyo3(signature = (data, support, gamma, loss = "ols"))]
fn coefficients_from_support(data: &PyDataset, support: Vec<usize>, gamma: f64, loss: &str) -> PyResult<Vec<f64>> {
    let model = loss_model(loss)?;
    let w = cio::coefficients_from_support(&Support::unbudgeted(support), &data.inner, &model, gamma).map_err(value_err)?;
    Ok(w.as_slice().to_vec())
}

#[pyclass(name = "RelaxationResult", module = "pysparsereg", get_all)]
struct PyRelaxationResult {
    support: Vec<usize>,
    gap: f64,
    lower: f64,
    upper: f64,
    iterations: usize,
}

#[pymethods]
impl PyRelaxationResult {
    fn __repr__(&self) -> String {
        format!("RelaxationResult(support={:?}, lower={}, upper={})", self.support, self.lower, self.upper)
    }
}

fn relaxation(res: saddle::SubgradientResult) -> PyRelaxationResult {
    PyRelaxationResult {
        support: res.support.indices().to_vec(),
        gap: res.gap,
        lower: res.best_lower,
        upper: res.best_upper,
        iterations: res.iterations,
    }
}

/// Boolean relaxation with a cardinality budget, by dual sub-gradient ascent.
#[pyfunction]
#[pyo3(signature = (data, k, gamma, loss = "ols", t_max = 200))]
fn subgradient_solve(data: &PyDataset, k: usize, gamma: f64, loss: &str, t_max: usize) -> PyResult<PyRelaxationResult> {
    let model = loss_model(loss)?;
    let cfg = SubgradientConfig { t_max, ..SubgradientConfig::new(gamma) };
    saddle::subgradient_solve(&data.inner, &model, k, &cfg, None).map(relaxation).map_err(value_err)
}

/// Boolean relaxation of `min c(s) + λ|s|`.
#[pyfunction]
#[pyo3(signature = (data, lam, gamma, loss = "ols", t_max = 200))]
fn penalized_solve(data: &PyDataset, lam: f64, gamma: f64, loss: &str, t_max: usize) -> PyResult<PyRelaxationResult> {
    let model = loss_model(loss)?;
    let cfg = SubgradientConfig { t_max, ..SubgradientConfig::new(gamma) };
    saddle::penalized_solve(&data.inner, &model, lam, &cfg, None).map(relaxation).map_err(value_err)
}

#[pyclass(name = "PathPoint", module = "pysparsereg", get_all)]
struct PyPathPoint {
    lam: f64,
    intercept: f64,
    coefficients: Vec<f64>,
    support: Vec<usize>,
    objective: f64,
    converged: bool,
}

#[pymethods]
impl PyPathPoint {
    fn __repr__(&self) -> String {
        format!("PathPoint(lam={}, support={:?})", self.lam, self.support)
    }
}

fn path_point(pt: &penalties::PathPoint) -> PyPathPoint {
    PyPathPoint {
        lam: pt.lambda,
        intercept: pt.intercept,
        coefficients: pt.coefficients.as_slice().to_vec(),
        support: pt.support().indices().to_vec(),
        objective: pt.objective,
        converged: pt.converged,
    }
}

/// Coordinate-descent path for `penalty` in `lasso`, `enet`, `mcp`, `scad`.
///
/// `alpha` is the elastic-net mixing weight and `concavity` the MCP/SCAD
/// shape parameter. Without `lambdas` a default log-spaced grid is used.
#[pyfunction]
#[pyo3(signature = (data, penalty = "lasso", loss = "ols", lambdas = None, alpha = 0.5, concavity = None))]
fn fit_path(
    data: &PyDataset,
    penalty: &str,
    loss: &str,
    lambdas: Option<Vec<f64>>,
    alpha: f64,
    concavity: Option<f64>,
) -> PyResult<Vec<PyPathPoint>> {
    let penalty = penalty_of(penalty, alpha, concavity)?;
    let loss: LossKind = loss.parse().map_err(value_err)?;
    let path = penalties::fit_path(&data.inner, loss, penalty, lambdas.as_deref(), &CdOptions::default())
        .map_err(value_err)?;
    Ok(path.points.iter().map(path_point).collect())
}

/// One coordinate-descent fit at `lam`.
#[pyfunction]
#[pyo3(signature = (data, lam, penalty = "lasso", loss = "ols", alpha = 0.5, concavity = None))]
fn fit_single(
    data: &PyDataset,
    lam: f64,
    penalty: &str,
    loss: &str,
    alpha: f64,
    concavity: Option<f64>,
) -> PyResult<PyPathPoint> {
    let penalty = penalty_of(penalty, alpha, concavity)?;
    let loss: LossKind = loss.parse().map_err(value_err)?;
    let pt = penalties::fit_single(&data.inner, loss, penalty, lam, &CdOptions::default()).map_err(value_err)?;
    Ok(path_point(&pt))
}

/// Smallest `λ` with an all-zero solution.
#[pyfunction]
#[pyo3(signature = (data, penalty = "lasso", loss = "ols", alpha = 0.5))]
fn lambda_max(data: &PyDataset, penalty: &str, loss: &str, alpha: f64) -> PyResult<f64> {
    let penalty = penalty_of(penalty, alpha, None)?;
    let loss: LossKind = loss.parse().map_err(value_err)?;
    penalties::lambda_max(&data.inner, loss, penalty).map_err(value_err)
}

#[pyfunction]
fn soft_threshold(z: f64, t: f64) -> f64 {
    penalties::soft_threshold(z, t)
}

/// `argmin_w ½ν(w − z)² + P(w; λ)`.
#[pyfunction]
#[pyo3(signature = (penalty, z, lam, nu = 1.0, alpha = 0.5, concavity = None))]
fn univariate_prox(penalty: &str, z: f64, lam: f64, nu: f64, alpha: f64, concavity: Option<f64>) -> PyResult<f64> {
    let penalty = penalty_of(penalty, alpha, concavity)?;
    penalties::univariate_prox(penalty, z, lam, nu).map_err(value_err)
}

/// Fenchel conjugate `ℓ̂(y, α)`; infinite outside the domain.
#[pyfunction]
fn conjugate(loss: &str, y: f64, alpha: f64) -> PyResult<f64> {
    Ok(loss_model(loss)?.conjugate(y, alpha))
}

/// `(A, FDR, TF, FF)` of the nonzeros of `w` against those of `w_true`.
#[pyfunction]
fn selection_metrics(w: Vec<f64>, w_true: Vec<f64>) -> PyResult<(f64, f64, usize, usize)> {
    let m = metrics::selection_metrics(&w, &w_true).map_err(value_err)?;
    Ok((m.accuracy, m.fdr, m.tf, m.ff))
}

/// Area under the ROC curve for labels in {−1, +1}.
#[pyfunction]
fn auc(scores: Vec<f64>, labels: Vec<f64>) -> PyResult<f64> {
    metrics::auc(&scores, &labels).map_err(value_err)
}

/// `1 / max_i ‖xᵢ‖²`, the start of the γ schedule.
#[pyfunction]
fn gamma0(data: &PyDataset) -> PyResult<f64> {
    sparsereg::cv::gamma0(&data.inner).map_err(value_err)
}

#[pymodule]
pub fn pysparsereg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDataset>()?;
    m.add_class::<PyOaResult>()?;
    m.add_class::<PyRelaxationResult>()?;
    m.add_class::<PyPathPoint>()?;
    m.add_function(wrap_pyfunction!(sample_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(cutting_plane_solve, m)?)?;
    m.add_function(wrap_pyfunction!(support_value, m)?)?;
    m.add_function(wrap_pyfunction!(coefficients_from_support, m)?)?;
    m.add_function(wrap_pyfunction!(subgradient_solve, m)?)?;
    m.add_function(wrap_pyfunction!(penalized_solve, m)?)?;
    m.add_function(wrap_pyfunction!(fit_path, m)?)?;
    m.add_function(wrap_pyfunction!(fit_single, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_max, m)?)?;
    m.add_function(wrap_pyfunction!(soft_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(univariate_prox, m)?)?;
    m.add_function(wrap_pyfunction!(conjugate, m)?)?;
    m.add_function(wrap_pyfunction!(selection_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(auc, m)?)?;
    m.add_function(wrap_pyfunction!(gamma0, m)?)?;
    Ok(())
}
