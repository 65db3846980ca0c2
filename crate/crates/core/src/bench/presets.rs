//! Built-in experiment configurations.
//!
//! Regression regimes cover low and high noise, weak and strong
//! correlation, with `p` kept small enough that a full sweep runs on a
//! workstation. Classification presets use the hinge loss for the two
//! subset methods and the logistic loss for the penalized ones.

use std::path::PathBuf;

use super::config::{DataConfig, Design, ExperimentConfig, GammaStart, Method, PenalizedConfig, Protocol, SubsetConfig};

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: String,
    pub description: String,
    pub config: ExperimentConfig,
}

fn subset(time_limit: f64) -> SubsetConfig {
    SubsetConfig {
        loss: None,
        gamma_steps: 5,
        gamma_start: GammaStart::RowNorm,
        gamma: None,
        time_limit: Some(time_limit),
        max_iterations: None,
        epsilon: 1e-4,
        t_max: 200,
    }
}

fn base(name: &str, data: DataConfig, n_grid: Vec<usize>) -> ExperimentConfig {
    ExperimentConfig {
        name: name.to_string(),
        methods: Method::ALL.to_vec(),
        n_grid,
        replications: 10,
        protocol: Protocol::FixedK,
        seed: 20_240_601,
        output_dir: PathBuf::from(format!("results/{name}")),
        timing: true,
        k_grid: None,
        threads: None,
        data,
        cio: subset(10.0),
        ss: subset(10.0),
        penalized: PenalizedConfig::default(),
    }
}

fn toeplitz(p: usize, k_true: usize, rho: f64, snr: f64) -> DataConfig {
    DataConfig {
        p,
        k_true,
        design: Design::Toeplitz,
        rho,
        snr,
        task: "regression".into(),
        weights: None,
        test_size: 1000,
    }
}

pub fn presets() -> Vec<Preset> {
    let mut out = Vec::new();
    let regimes = [
        ("low-noise", 200, 10, 6.0, vec![100, 250, 500, 1000]),
        ("medium-noise", 100, 5, 1.0, vec![100, 250, 500, 1000]),
        ("high-noise", 20, 2, 0.05, vec![250, 500, 1000, 2000]),
    ];
    for (label, p, k, snr, grid) in regimes {
        for (suffix, rho) in [("", 0.2), ("-high-corr", 0.7)] {
            let name = format!("toeplitz-{label}{suffix}");
            let description = format!("Toeplitz design, rho={rho}, SNR={snr}, p={p}, k_true={k}; fixed k = k_true");
            let config = base(&name, toeplitz(p, k, rho, snr), grid.clone());
            out.push(Preset { name, description, config });
        }
    }

    let mut hard = base(
        "hardmi",
        DataConfig { design: Design::HardMi, ..toeplitz(100, 10, 0.0, 6.0) },
        vec![500, 1000, 2500, 5000],
    );
    hard.methods = vec![Method::Cio, Method::Ss, Method::Lasso, Method::Enet];
    out.push(Preset {
        name: "hardmi".into(),
        description: "Incoherence-violating design, p=100, k_true=10, SNR=6; fixed k = k_true".into(),
        config: hard,
    });

    let mut class = base(
        "classification-low-noise",
        DataConfig { task: "classification".into(), ..toeplitz(100, 10, 0.2, 6.0) },
        vec![100, 250, 500, 1000],
    );
    class.methods = vec![Method::Cio, Method::Ss, Method::Enet, Method::Mcp, Method::Scad];
    class.cio.time_limit = Some(30.0);
    out.push(Preset {
        name: "classification-low-noise".into(),
        description: "Toeplitz classification, rho=0.2, SNR=6, p=100, k_true=10; hinge for cio/ss, logistic for enet/mcp/scad".into(),
        config: class,
    });

    let mut roc = base("toeplitz-roc", toeplitz(200, 10, 0.2, 6.0), vec![500]);
    roc.protocol = Protocol::RocSweep;
    roc.k_grid = Some(vec![2, 4, 6, 8, 10, 12, 15, 20, 30]);
    out.push(Preset {
        name: "toeplitz-roc".into(),
        description: "True versus false features as k varies, Toeplitz rho=0.2, SNR=6, p=200, n=500".into(),
        config: roc,
    });

    let mut cv = base("toeplitz-cv", toeplitz(200, 10, 0.2, 6.0), vec![250, 500, 1000]);
    cv.protocol = Protocol::CrossValidatedK;
    out.push(Preset {
        name: "toeplitz-cv".into(),
        description: "Sparsity selected on the validation split, Toeplitz rho=0.2, SNR=6, p=200".into(),
        config: cv,
    });

    let mut smoke = base("ci-smoke", toeplitz(30, 3, 0.2, 6.0), vec![60, 120]);
    smoke.replications = 2;
    smoke.timing = false;
    smoke.cio.max_iterations = Some(50);
    smoke.penalized.n_lambda = 30;
    smoke.data.test_size = 200;
    out.push(Preset { name: "ci-smoke".into(), description: "Tiny deterministic run of every method".into(), config: smoke });

    out
}

pub fn preset(name: &str) -> Option<Preset> {
    presets().into_iter().find(|p| p.name == name)
}
