//! Result tables: raw rows, per-group aggregates and plot series.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::BenchError;

/// One fitted configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub method: String,
    pub n: usize,
    pub p: usize,
    pub k_true: usize,
    pub snr: f64,
    pub rho_or_design: String,
    pub k: usize,
    pub gamma_or_lambda: f64,
    #[serde(rename = "A")]
    pub accuracy: f64,
    #[serde(rename = "FDR")]
    pub fdr: f64,
    #[serde(rename = "TF")]
    pub tf: f64,
    #[serde(rename = "FF")]
    pub ff: f64,
    /// Validation MSE, or validation `1 − AUC` for classification.
    #[serde(rename = "MSE_val")]
    pub mse_val: f64,
    #[serde(rename = "MSE_test_or_1minusAUC")]
    pub mse_test: f64,
    pub seconds: f64,
    pub relative_time: f64,
    pub seed: u64,
}

/// Mean and sample standard deviation of one column within a group.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self { mean: f64::NAN, std: f64::NAN };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub method: String,
    pub n: usize,
    /// Set when rows are grouped per sparsity level.
    pub k: Option<usize>,
    pub count: usize,
    pub k_mean: f64,
    pub accuracy: Summary,
    pub fdr: Summary,
    pub tf: Summary,
    pub ff: Summary,
    pub mse_val: Summary,
    pub mse_test: Summary,
    pub seconds: Summary,
    pub relative_time: Summary,
}

/// Groups rows by `(method, n)`, or by `(method, n, k)` when `by_k`, in
/// order of first appearance.
pub fn aggregate(rows: &[ResultRow], by_k: bool) -> Vec<AggregateRow> {
    let mut order: Vec<(String, usize, Option<usize>)> = Vec::new();
    let mut groups: BTreeMap<(String, usize, Option<usize>), Vec<&ResultRow>> = BTreeMap::new();
    for r in rows {
        let key = (r.method.clone(), r.n, by_k.then_some(r.k));
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let g = &groups[&key];
            let col = |f: fn(&ResultRow) -> f64| Summary::of(&g.iter().map(|r| f(r)).collect::<Vec<_>>());
            AggregateRow {
                method: key.0.clone(),
                n: key.1,
                k: key.2,
                count: g.len(),
                k_mean: col(|r| r.k as f64).mean,
                accuracy: col(|r| r.accuracy),
                fdr: col(|r| r.fdr),
                tf: col(|r| r.tf),
                ff: col(|r| r.ff),
                mse_val: col(|r| r.mse_val),
                mse_test: col(|r| r.mse_test),
                seconds: col(|r| r.seconds),
                relative_time: col(|r| r.relative_time),
            }
        })
        .collect()
}

pub fn write_rows<W: Write>(rows: &[ResultRow], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(HEADER)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

const HEADER: [&str; 17] = [
    "method",
    "n",
    "p",
    "k_true",
    "snr",
    "rho_or_design",
    "k",
    "gamma_or_lambda",
    "A",
    "FDR",
    "TF",
    "FF",
    "MSE_val",
    "MSE_test_or_1minusAUC",
    "seconds",
    "relative_time",
    "seed",
];

pub fn read_rows<R: Read>(input: R) -> Result<Vec<ResultRow>, BenchError> {
    let mut rdr = csv::Reader::from_reader(input);
    rdr.deserialize().map(|r| r.map_err(BenchError::from)).collect()
}

pub fn read_rows_from(path: &Path) -> Result<Vec<ResultRow>, BenchError> {
    let file = std::fs::File::open(path).map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
    read_rows(file)
}

pub fn write_aggregates<W: Write>(rows: &[AggregateRow], mut out: W) -> Result<(), BenchError> {
    let cols = ["A", "FDR", "TF", "FF", "MSE_val", "MSE_test_or_1minusAUC", "seconds", "relative_time"];
    let mut header = vec!["method".to_string(), "n".into(), "k".into(), "count".into()];
    for c in cols {
        header.push(format!("{c}_mean"));
        header.push(format!("{c}_std"));
    }
    let io = |e: std::io::Error| BenchError::Io(e.to_string());
    writeln!(out, "{}", header.join(",")).map_err(io)?;
    for a in rows {
        let k = a.k.map_or_else(|| a.k_mean.to_string(), |k| k.to_string());
        let mut fields = vec![a.method.clone(), a.n.to_string(), k, a.count.to_string()];
        for s in [a.accuracy, a.fdr, a.tf, a.ff, a.mse_val, a.mse_test, a.seconds, a.relative_time] {
            fields.push(s.mean.to_string());
            fields.push(s.std.to_string());
        }
        writeln!(out, "{}", fields.join(",")).map_err(io)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    AccuracyVsN,
    FdrVsN,
    MseVsN,
    RocTfFf,
    TimeVsN,
}

impl PlotKind {
    pub const ALL: [PlotKind; 5] =
        [PlotKind::AccuracyVsN, PlotKind::FdrVsN, PlotKind::MseVsN, PlotKind::RocTfFf, PlotKind::TimeVsN];

    pub fn name(self) -> &'static str {
        match self {
            PlotKind::AccuracyVsN => "accuracy_vs_n",
            PlotKind::FdrVsN => "fdr_vs_n",
            PlotKind::MseVsN => "mse_vs_n",
            PlotKind::RocTfFf => "roc_tf_ff",
            PlotKind::TimeVsN => "time_vs_n",
        }
    }
}

impl fmt::Display for PlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlotKind {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PlotKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| BenchError::Config(format!("unknown plot kind '{s}'")))
    }
}

/// Writes one series file per method into `dir`, named `<kind>_<method>.csv`.
///
/// The `*_vs_n` kinds write `n,mean,std` rows (time adds `log10_mean`);
/// `roc_tf_ff` writes `n,k,ff,tf,ff_std,tf_std` rows sorted by `k`.
pub fn emit_plot_data(rows: &[ResultRow], kind: PlotKind, dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    if rows.is_empty() {
        return Err(BenchError::EmptyInput);
    }
    std::fs::create_dir_all(dir).map_err(|e| BenchError::Io(format!("{}: {e}", dir.display())))?;
    let by_k = kind == PlotKind::RocTfFf;
    let agg = aggregate(rows, by_k);
    let mut methods: Vec<&str> = Vec::new();
    for a in &agg {
        if !methods.contains(&a.method.as_str()) {
            methods.push(&a.method);
        }
    }
    let mut written = Vec::new();
    for m in methods {
        let mut series: Vec<&AggregateRow> = agg.iter().filter(|a| a.method == m).collect();
        let mut text = String::new();
        match kind {
            PlotKind::RocTfFf => {
                series.sort_by_key(|a| (a.n, a.k));
                text.push_str("n,k,ff,tf,ff_std,tf_std\n");
                for a in series {
                    let k = a.k.expect("grouped by k");
                    text.push_str(&format!("{},{},{},{},{},{}\n", a.n, k, a.ff.mean, a.tf.mean, a.ff.std, a.tf.std));
                }
            }
            _ => {
                series.sort_by_key(|a| a.n);
                let time = kind == PlotKind::TimeVsN;
                text.push_str(if time { "n,mean,std,log10_mean\n" } else { "n,mean,std\n" });
                for a in series {
                    let s = match kind {
                        PlotKind::AccuracyVsN => a.accuracy,
                        PlotKind::FdrVsN => a.fdr,
                        PlotKind::MseVsN => a.mse_test,
                        _ => a.relative_time,
                    };
                    if time {
                        text.push_str(&format!("{},{},{},{}\n", a.n, s.mean, s.std, s.mean.log10()));
                    } else {
                        text.push_str(&format!("{},{},{}\n", a.n, s.mean, s.std));
                    }
                }
            }
        }
        let path = dir.join(format!("{}_{}.csv", kind.name(), m));
        std::fs::write(&path, text).map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}
