use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use super::config::{ExperimentConfig, GammaStart, Method, Protocol, SubsetConfig};
use super::results::{aggregate, write_aggregates, write_rows, AggregateRow, ResultRow};
use super::BenchError;
use crate::cio::{coefficients_from_support, cutting_plane_solve, OaConfig};
use crate::cv::{default_k_grid, doubling, gamma0, grid_search, normalized_gamma0, sparsity_interpolate, Criterion};
use crate::datagen::{sample_dataset, Dataset, Task};
use crate::losses::LossModel;
use crate::metrics::{auc, mse_fit, support_metrics, LinearFit};
use crate::penalties::{fit_path, lambda_grid, CdOptions, PathPoint, Penalty, RegPath};
use crate::saddle::{subgradient_solve, SubgradientConfig};
use crate::support::Support;

/// A `(n, replication, method)` cell that produced no rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub n: usize,
    pub replication: usize,
    pub method: Option<Method>,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub aggregates: Vec<AggregateRow>,
    pub failures: Vec<CellFailure>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `rep` at sample size `n`. It does not depend on the
/// method, so every method sees the same data within a replication.
pub fn replication_seed(master: u64, n: usize, rep: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ n as u64) ^ rep as u64)
}

/// Train, validation and test parts of one replication.
pub struct Splits {
    pub train: Dataset,
    pub validation: Dataset,
    pub test: Dataset,
    pub truth: Support,
    pub k_true: usize,
    pub seed: u64,
}

/// Generates `n` training rows, `n/2` validation rows (a 2:1 split) and
/// `test_size` test rows from one draw.
pub fn make_splits(cfg: &ExperimentConfig, n: usize, seed: u64) -> Result<Splits, BenchError> {
    let n_val = (n / 2).max(2);
    let total = n + n_val + cfg.data.test_size;
    let spec = cfg.synthetic_spec(total, seed)?;
    let data = sample_dataset(&spec).map_err(|e| BenchError::Data(e.to_string()))?;
    let rows = |a: usize, b: usize| data.select_rows(&(a..b).collect::<Vec<_>>());
    let truth = Support::unbudgeted(data.true_support().unwrap_or_default());
    Ok(Splits {
        train: rows(0, n),
        validation: rows(n, n + n_val),
        test: rows(n + n_val, total),
        truth,
        k_true: spec.k_true,
        seed,
    })
}

/// What a penalized path is asked for.
#[derive(Debug, Clone, Copy)]
enum Target {
    Size(usize),
    Validation,
}

/// One fitted model of a method on one replication.
#[derive(Debug, Clone)]
pub struct MethodFit {
    pub k: usize,
    /// `γ` for the subset methods, `λ` for the penalized ones.
    pub param: f64,
    pub fit: LinearFit,
    /// TF/FF interpolated along a path when no point has the requested size.
    pub interpolated: Option<(f64, f64)>,
}

struct Context<'a> {
    cfg: &'a ExperimentConfig,
    task: Task,
    criterion: Criterion,
}

impl Context<'_> {
    fn score(&self, fit: &LinearFit, data: &Dataset) -> Result<f64, String> {
        match self.task {
            Task::Regression => mse_fit(fit, data).map_err(|e| e.to_string()),
            Task::Classification => {
                let s = fit.predict(&data.x);
                auc(s.as_slice(), data.y.as_slice()).map(|a| 1.0 - a).map_err(|e| e.to_string())
            }
        }
    }

    fn gammas(&self, sub: &SubsetConfig, train: &Dataset, k: usize) -> Result<Vec<f64>, String> {
        if let Some(g) = sub.gamma {
            return Ok(vec![g]);
        }
        let start = match sub.gamma_start {
            GammaStart::RowNorm => gamma0(train),
            GammaStart::Normalized => normalized_gamma0(train, k),
        }
        .map_err(|e| e.to_string())?;
        doubling(start, sub.gamma_steps).map_err(|e| e.to_string())
    }

    fn fit_subset(&self, method: Method, sp: &Splits, k_grid: &[usize]) -> Result<MethodFit, String> {
        let cfg = self.cfg;
        let sub = if method == Method::Cio { &cfg.cio } else { &cfg.ss };
        let model = LossModel::new(cfg.subset_loss(method).map_err(|e| e.to_string())?);
        let gammas = self.gammas(sub, &sp.train, k_grid[0])?;
        let mut oa = OaConfig::for_loss(&model);
        oa.time_limit = cfg.cio_time_limit().map_err(|e| e.to_string())?;
        oa.max_iterations = sub.max_iterations;
        oa.epsilon = sub.epsilon;

        let res = grid_search(&sp.train, &sp.validation, k_grid, &gammas, self.criterion, |d, k, g, warm| {
            match method {
                Method::Cio => {
                    let warm_support = warm.map(|w| w.support()).filter(|s| s.len() <= k);
                    cutting_plane_solve(d, &model, k, g, warm_support.as_ref(), &oa)
                        .map(|r| LinearFit::new(r.coefficients))
                        .map_err(|e| e.to_string())
                }
                _ => {
                    let sg = SubgradientConfig { t_max: sub.t_max, gap_tol: sub.epsilon, ..SubgradientConfig::new(g) };
                    let s = subgradient_solve(d, &model, k, &sg, None).map_err(|e| e.to_string())?;
                    coefficients_from_support(&s.support, d, &model, g).map(LinearFit::new).map_err(|e| e.to_string())
                }
            }
        })
        .map_err(|e| e.to_string())?;
        Ok(MethodFit { k: res.k, param: res.param, fit: res.fit, interpolated: None })
    }

    fn fit_path(&self, penalty: Penalty, sp: &Splits) -> Result<RegPath, String> {
        let loss = self.cfg.penalized_loss().map_err(|e| e.to_string())?;
        let pc = &self.cfg.penalized;
        let grid = lambda_grid(&sp.train, loss, penalty, Some(pc.n_lambda), pc.lambda_ratio).map_err(|e| e.to_string())?;
        fit_path(&sp.train, loss, penalty, Some(&grid), &CdOptions::default()).map_err(|e| e.to_string())
    }

    fn pick(&self, path: &RegPath, target: Target, sp: &Splits) -> Result<MethodFit, String> {
        let exact = |pt: &PathPoint| MethodFit { k: pt.support_size(), param: pt.lambda, fit: pt.fit(), interpolated: None };
        match target {
            Target::Size(k) => {
                if let Some(pt) = path.point_with_size(k) {
                    return Ok(exact(pt));
                }
                // Closest size on the path (first along the path on ties)
                // supplies the prediction metrics.
                let nearest = path
                    .points
                    .iter()
                    .min_by_key(|pt| pt.support_size().abs_diff(k))
                    .ok_or_else(|| "empty path".to_string())?;
                match sparsity_interpolate(path, k, &sp.truth) {
                    Ok(tf_ff) => Ok(MethodFit { k, param: nearest.lambda, fit: nearest.fit(), interpolated: Some(tf_ff) }),
                    Err(_) => Ok(exact(nearest)),
                }
            }
            Target::Validation => {
                let mut best: Option<(f64, usize, f64, &PathPoint)> = None;
                for pt in &path.points {
                    let Ok(score) = self.score(&pt.fit(), &sp.validation) else { continue };
                    let key = (score, pt.support_size(), pt.lambda);
                    let better = best.as_ref().is_none_or(|b| {
                        key.0.total_cmp(&b.0).then(key.1.cmp(&b.1)).then(key.2.total_cmp(&b.2)).is_lt()
                    });
                    if better {
                        best = Some((key.0, key.1, key.2, pt));
                    }
                }
                best.map(|b| exact(b.3)).ok_or_else(|| "no path point could be scored".to_string())
            }
        }
    }

    fn row(&self, method: Method, n: usize, sp: &Splits, out: &MethodFit, seconds: f64, baseline: f64) -> Result<ResultRow, String> {
        let (tf, ff) = match out.interpolated {
            Some(v) => v,
            None => {
                let m = support_metrics(&out.fit.support(), &sp.truth);
                (m.tf as f64, m.ff as f64)
            }
        };
        let accuracy = if sp.k_true > 0 { tf / sp.k_true as f64 } else { 0.0 };
        let fdr = if tf + ff > 0.0 { ff / (tf + ff) } else { 0.0 };
        let timing = self.cfg.timing;
        Ok(ResultRow {
            method: method.name().to_string(),
            n,
            p: self.cfg.data.p,
            k_true: sp.k_true,
            snr: self.cfg.data.snr,
            rho_or_design: self.cfg.design_label(),
            k: out.k,
            gamma_or_lambda: out.param,
            accuracy,
            fdr,
            tf,
            ff,
            mse_val: self.score(&out.fit, &sp.validation)?,
            mse_test: self.score(&out.fit, &sp.test)?,
            seconds: if timing { seconds } else { 0.0 },
            relative_time: if timing && baseline > 0.0 { seconds / baseline } else { 0.0 },
            seed: sp.seed,
        })
    }

    fn k_grid(&self, sp: &Splits) -> Vec<usize> {
        self.cfg
            .k_grid
            .clone()
            .unwrap_or_else(|| default_k_grid(Some(sp.k_true), sp.train.n(), sp.train.p()))
    }

    /// All rows of one method on one replication.
    fn run_method(&self, method: Method, n: usize, sp: &Splits, baseline: f64) -> Result<Vec<ResultRow>, String> {
        let outcomes = self.fits(method, sp)?;
        outcomes.iter().map(|(o, secs)| self.row(method, n, sp, o, *secs, baseline)).collect()
    }

    /// Fits of one method under the configured protocol, with their
    /// run times in seconds.
    fn fits(&self, method: Method, sp: &Splits) -> Result<Vec<(MethodFit, f64)>, String> {
        let protocol = self.cfg.protocol;
        let start = Instant::now();
        let mut outcomes: Vec<(MethodFit, f64)> = Vec::new();
        match self.cfg.penalty(method) {
            Some(penalty) => {
                let path = self.fit_path(penalty, sp)?;
                let targets: Vec<Target> = match protocol {
                    Protocol::FixedK => vec![Target::Size(sp.k_true)],
                    Protocol::CrossValidatedK => vec![Target::Validation],
                    Protocol::RocSweep => self.k_grid(sp).into_iter().map(Target::Size).collect(),
                };
                let path_secs = start.elapsed().as_secs_f64();
                for t in targets {
                    let s = Instant::now();
                    let o = self.pick(&path, t, sp)?;
                    outcomes.push((o, path_secs + s.elapsed().as_secs_f64()));
                }
            }
            None => match protocol {
                Protocol::FixedK => {
                    let o = self.fit_subset(method, sp, &[sp.k_true])?;
                    outcomes.push((o, start.elapsed().as_secs_f64()));
                }
                Protocol::CrossValidatedK => {
                    let o = self.fit_subset(method, sp, &self.k_grid(sp))?;
                    outcomes.push((o, start.elapsed().as_secs_f64()));
                }
                Protocol::RocSweep => {
                    for k in self.k_grid(sp) {
                        let s = Instant::now();
                        let o = self.fit_subset(method, sp, &[k])?;
                        outcomes.push((o, s.elapsed().as_secs_f64()));
                    }
                }
            },
        }
        Ok(outcomes)
    }
}

fn context(cfg: &ExperimentConfig) -> Result<Context<'_>, BenchError> {
    let task = cfg.task()?;
    let criterion = if task == Task::Classification { Criterion::Auc } else { Criterion::Mse };
    Ok(Context { cfg, task, criterion })
}

/// The fits `method` produces on one replication under `cfg`'s protocol, as
/// used for its result rows.
pub fn fit_method(cfg: &ExperimentConfig, method: Method, splits: &Splits) -> Result<Vec<MethodFit>, BenchError> {
    cfg.validate()?;
    let ctx = context(cfg)?;
    let fits = ctx.fits(method, splits).map_err(BenchError::Fit)?;
    Ok(fits.into_iter().map(|(f, _)| f).collect())
}

fn lasso_baseline(ctx: &Context, sp: &Splits) -> f64 {
    if !ctx.cfg.timing {
        return 0.0;
    }
    let start = Instant::now();
    match ctx.fit_path(Penalty::Lasso, sp) {
        Ok(_) => start.elapsed().as_secs_f64(),
        Err(_) => 0.0,
    }
}

type CellResult = (Vec<ResultRow>, Vec<CellFailure>);

fn run_replication(ctx: &Context, n: usize, rep: usize) -> CellResult {
    let cfg = ctx.cfg;
    let seed = replication_seed(cfg.seed, n, rep);
    let sp = match make_splits(cfg, n, seed) {
        Ok(sp) => sp,
        Err(e) => {
            return (Vec::new(), vec![CellFailure { n, replication: rep, method: None, message: e.to_string() }]);
        }
    };
    let baseline = lasso_baseline(ctx, &sp);
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &method in &cfg.methods {
        match ctx.run_method(method, n, &sp, baseline) {
            Ok(r) => rows.extend(r),
            Err(message) => failures.push(CellFailure { n, replication: rep, method: Some(method), message }),
        }
    }
    (rows, failures)
}

/// Runs every `(n, replication, method)` cell of the experiment.
///
/// Replications run concurrently; rows come back ordered by `n`, then
/// replication, then the configured method order, so the output does not
/// depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput, BenchError> {
    cfg.validate()?;
    let ctx = context(cfg)?;
    let cells: Vec<(usize, usize)> =
        cfg.n_grid.iter().flat_map(|&n| (0..cfg.replications).map(move |r| (n, r))).collect();
    let work = || cells.par_iter().map(|&(n, r)| run_replication(&ctx, n, r)).collect::<Vec<CellResult>>();
    let results = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| BenchError::Config(e.to_string()))?
            .install(work),
        None => work(),
    };
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (r, f) in results {
        rows.extend(r);
        failures.extend(f);
    }
    let aggregates = aggregate(&rows, cfg.protocol == Protocol::RocSweep);
    Ok(RunOutput { rows, aggregates, failures })
}

/// Writes `results.csv`, `aggregate.csv` and `metadata.txt` into `dir`.
pub fn write_outputs(cfg: &ExperimentConfig, out: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    std::fs::create_dir_all(dir).map_err(|e| BenchError::Io(format!("{}: {e}", dir.display())))?;
    let open = |name: &str| {
        let path = dir.join(name);
        std::fs::File::create(&path)
            .map(|f| (std::io::BufWriter::new(f), path.clone()))
            .map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))
    };
    let (f, results) = open("results.csv")?;
    write_rows(&out.rows, f)?;
    let (f, agg) = open("aggregate.csv")?;
    write_aggregates(&out.aggregates, f)?;

    let loss_of = |m: Method| -> String {
        if m.is_penalized() {
            cfg.penalized_loss().map(|l| l.to_string()).unwrap_or_default()
        } else {
            cfg.subset_loss(m).map(|l| l.to_string()).unwrap_or_default()
        }
    };
    let mut meta = String::new();
    meta.push_str(&format!("name = {}\n", cfg.name));
    meta.push_str(&format!("seed = {}\n", cfg.seed));
    meta.push_str(&format!("protocol = {:?}\n", cfg.protocol));
    meta.push_str(&format!("replications = {}\n", cfg.replications));
    meta.push_str("train_validation_split = 2:1\n");
    meta.push_str(&format!("test_size = {}\n", cfg.data.test_size));
    meta.push_str(&format!("timing = {}\n", cfg.timing));
    for &m in &cfg.methods {
        meta.push_str(&format!("loss.{m} = {}\n", loss_of(m)));
    }
    meta.push_str(&format!("failures = {}\n", out.failures.len()));
    for f in &out.failures {
        let m = f.method.map_or("data", |m| m.name());
        meta.push_str(&format!("failure n={} rep={} method={} : {}\n", f.n, f.replication, m, f.message));
    }
    let meta_path = dir.join("metadata.txt");
    std::fs::write(&meta_path, meta).map_err(|e| BenchError::Io(e.to_string()))?;
    Ok(vec![results, agg, meta_path])
}
