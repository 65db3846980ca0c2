//! `bench`: run benchmark experiments, emit plot data, fit a single model.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 some cells or
//! fits failed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sparsereg::bench::{self, emit_plot_data, read_rows_from, run_experiment, write_outputs, ExperimentConfig, Method, PlotKind};
use sparsereg::cio::{cutting_plane_solve, coefficients_from_support, OaConfig};
use sparsereg::cv::gamma0;
use sparsereg::datagen::{ingest_matrix, ResponseColumn};
use sparsereg::penalties::{fit_path, fit_single, CdOptions, Penalty};
use sparsereg::saddle::{subgradient_solve, SubgradientConfig};
use sparsereg::{LossKind, LossModel};

#[derive(Parser)]
#[command(name = "bench", version, about = "Sparse regression benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a TOML config file (or a preset name
    /// prefixed with `preset:`).
    Run {
        config: String,
        /// Override the configured output directory.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Turn a results table into per-method plot series.
    Plot {
        results: PathBuf,
        #[arg(long)]
        kind: String,
        /// Directory for the series files (defaults to the results directory).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// List built-in presets, or print one as TOML.
    Presets {
        #[arg(long)]
        show: Option<String>,
    },
    /// Fit one model on a CSV file and print its coefficients.
    Fit {
        #[arg(long)]
        method: String,
        #[arg(long)]
        data: PathBuf,
        /// Response column: a header name or a 0-based index.
        #[arg(long)]
        response: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        /// Loss: ols, logistic, hinge, l2svm, l1svr, l2svr.
        #[arg(long, default_value = "ols")]
        loss: String,
        /// Center and scale the feature columns before fitting.
        #[arg(long)]
        standardize: bool,
        /// Outer-approximation time limit in seconds.
        #[arg(long)]
        time_limit: Option<f64>,
        /// Elastic-net mixing weight on the l1 term.
        #[arg(long, default_value_t = 0.5)]
        enet_alpha: f64,
    },
}

enum Failure {
    Config(String),
    Partial(String),
}

fn config_err(e: impl std::fmt::Display) -> Failure {
    Failure::Config(e.to_string())
}

fn load_config(arg: &str) -> Result<ExperimentConfig, Failure> {
    match arg.strip_prefix("preset:") {
        Some(name) => bench::preset(name)
            .map(|p| p.config)
            .ok_or_else(|| Failure::Config(format!("unknown preset '{name}'"))),
        None => ExperimentConfig::from_path(&PathBuf::from(arg)).map_err(config_err),
    }
}

fn run(config: &str, output: Option<PathBuf>) -> Result<(), Failure> {
    let cfg = load_config(config)?;
    let out = run_experiment(&cfg).map_err(config_err)?;
    let dir = output.unwrap_or_else(|| cfg.output_dir.clone());
    let written = write_outputs(&cfg, &out, &dir).map_err(config_err)?;
    for p in written {
        println!("wrote {}", p.display());
    }
    println!("{} rows, {} failed cells", out.rows.len(), out.failures.len());
    if out.failures.is_empty() {
        Ok(())
    } else {
        for f in &out.failures {
            let m = f.method.map_or("data", |m| m.name());
            eprintln!("failed: n={} rep={} method={}: {}", f.n, f.replication, m, f.message);
        }
        Err(Failure::Partial(format!("{} cells failed", out.failures.len())))
    }
}

fn plot(results: PathBuf, kind: &str, output: Option<PathBuf>) -> Result<(), Failure> {
    let kind: PlotKind = kind.parse().map_err(config_err)?;
    let rows = read_rows_from(&results).map_err(config_err)?;
    let dir = output.unwrap_or_else(|| results.parent().map(|p| p.join("plots")).unwrap_or_else(|| "plots".into()));
    for p in emit_plot_data(&rows, kind, &dir).map_err(config_err)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn presets(show: Option<String>) -> Result<(), Failure> {
    match show {
        Some(name) => {
            let p = bench::preset(&name).ok_or_else(|| Failure::Config(format!("unknown preset '{name}'")))?;
            print!("{}", p.config.to_toml_string());
        }
        None => {
            for p in bench::presets() {
                println!("{:<32} {}", p.name, p.description);
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn fit(
    method: &str,
    data: PathBuf,
    response: &str,
    k: Option<usize>,
    lambda: Option<f64>,
    gamma: Option<f64>,
    loss: &str,
    standardize: bool,
    time_limit: Option<f64>,
    enet_alpha: f64,
) -> Result<(), Failure> {
    let method: Method = method.parse().map_err(config_err)?;
    let loss: LossKind = loss.parse().map_err(config_err)?;
    let response: ResponseColumn = response.parse().expect("infallible");
    let ds = ingest_matrix(&data, &response, standardize).map_err(config_err)?;
    let model = LossModel::new(loss);
    let print = |intercept: f64, w: &[f64]| {
        println!("feature,coefficient");
        println!("intercept,{intercept}");
        for (j, v) in w.iter().enumerate() {
            if v.abs() > sparsereg::ZERO_THRESHOLD {
                println!("{j},{v}");
            }
        }
    };

    let penalty = match method {
        Method::Lasso => Some(Penalty::Lasso),
        Method::Enet => Some(Penalty::ElasticNet { alpha: enet_alpha }),
        Method::Mcp => Some(Penalty::mcp()),
        Method::Scad => Some(Penalty::scad()),
        Method::Cio | Method::Ss => None,
    };
    if let Some(penalty) = penalty {
        match lambda {
            Some(l) => {
                let pt = fit_single(&ds, loss, penalty, l, &CdOptions::default()).map_err(config_err)?;
                if !pt.converged {
                    eprintln!("warning: not converged (achieved {:e})", pt.achieved_tol);
                }
                print(pt.intercept, pt.coefficients.as_slice());
            }
            None => {
                let path = fit_path(&ds, loss, penalty, None, &CdOptions::default()).map_err(config_err)?;
                path.write_csv(std::io::stdout().lock()).map_err(config_err)?;
            }
        }
        return Ok(());
    }

    let k = k.ok_or_else(|| Failure::Config(format!("--k is required for {method}")))?;
    let gamma = match gamma {
        Some(g) => g,
        None => gamma0(&ds).map_err(config_err)?,
    };
    let w = if method == Method::Cio {
        let mut cfg = OaConfig::for_loss(&model);
        if let Some(t) = time_limit {
            cfg.time_limit = std::time::Duration::from_secs_f64(t);
        }
        let res = cutting_plane_solve(&ds, &model, k, gamma, None, &cfg).map_err(|e| Failure::Partial(e.to_string()))?;
        eprintln!(
            "support {} value {:e} bound {:e} certified {} iterations {}",
            res.support, res.value, res.bound, res.certified, res.iterations
        );
        res.coefficients
    } else {
        let res = subgradient_solve(&ds, &model, k, &SubgradientConfig::new(gamma), None)
            .map_err(|e| Failure::Partial(e.to_string()))?;
        eprintln!("support {} gap {:e} iterations {}", res.support, res.gap, res.iterations);
        coefficients_from_support(&res.support, &ds, &model, gamma).map_err(|e| Failure::Partial(e.to_string()))?
    };
    print(0.0, w.as_slice());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run { config, output } => run(&config, output),
        Command::Plot { results, kind, output } => plot(results, &kind, output),
        Command::Presets { show } => presets(show),
        Command::Fit { method, data, response, k, lambda, gamma, loss, standardize, time_limit, enet_alpha } => {
            fit(&method, data, &response, k, lambda, gamma, &loss, standardize, time_limit, enet_alpha)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Partial(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
