//! Synthetic instances and dataset ingestion.
//!
//! Rows of `X` are i.i.d. `N(0, Σ)`; the ground truth `w_true` has exactly
//! `k_true` nonzeros; the noise vector is rescaled per realization so that
//! `‖X w_true‖₂ / ‖ε‖₂ = √snr` holds exactly, and `Y = X w_true + ε` (or its
//! sign for classification).

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("row {row} has {found} fields, expected {expected}")]
    Ragged { row: usize, found: usize, expected: usize },
    #[error("missing value at row {row}, column {col}")]
    MissingValue { row: usize, col: usize },
    #[error("non-numeric value '{value}' at row {row}, column {col}")]
    NonNumeric { row: usize, col: usize, value: String },
    #[error("response column {0} not found")]
    UnknownColumn(String),
    #[error("input table has no data rows")]
    Empty,
    #[error("invalid split: {0}")]
    InvalidSplit(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Covariance {
    /// `Σ_ij = ρ^{|i−j|}`.
    Toeplitz(f64),
    /// Unit diagonal with `θ` in the first `k_true` entries of row and column
    /// `k_true + 1`: violates the mutual-incoherence condition.
    HardMi,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Regression,
    Classification,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightScheme {
    /// `k_true` entries equal to ±1 at uniformly random positions.
    SignedUnit,
    /// The first `k_true` entries equal `1/√k_true`.
    UniformOverRoot,
}

impl fmt::Display for Covariance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Covariance::Toeplitz(rho) => write!(f, "toeplitz({rho})"),
            Covariance::HardMi => f.write_str("hardmi"),
            Covariance::Identity => f.write_str("identity"),
        }
    }
}

impl FromStr for Task {
    type Err = DataError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "regression" => Ok(Task::Regression),
            "classification" => Ok(Task::Classification),
            other => Err(DataError::InvalidSpec(format!("unknown task '{other}'"))),
        }
    }
}

impl FromStr for WeightScheme {
    type Err = DataError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "signed_unit" | "signedunit" => Ok(WeightScheme::SignedUnit),
            "uniform_over_root" | "uniformoverroot" => Ok(WeightScheme::UniformOverRoot),
            other => Err(DataError::InvalidSpec(format!("unknown weight scheme '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub n: usize,
    pub p: usize,
    pub k_true: usize,
    pub covariance: Covariance,
    pub snr: f64,
    pub task: Task,
    pub weight_scheme: WeightScheme,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Regression spec with a Toeplitz design and ±1 weights.
    pub fn toeplitz(n: usize, p: usize, k_true: usize, rho: f64, snr: f64, seed: u64) -> Self {
        Self {
            n,
            p,
            k_true,
            covariance: Covariance::Toeplitz(rho),
            snr,
            task: Task::Regression,
            weight_scheme: WeightScheme::SignedUnit,
            seed,
        }
    }

    /// The mutual-incoherence-violating design with `w_true = (1/√k, …, 1/√k, 0, …)`.
    pub fn hard_mi(n: usize, p: usize, k_true: usize, snr: f64, seed: u64) -> Self {
        Self {
            n,
            p,
            k_true,
            covariance: Covariance::HardMi,
            snr,
            task: Task::Regression,
            weight_scheme: WeightScheme::UniformOverRoot,
            seed,
        }
    }

    pub fn with_task(mut self, task: Task) -> Self {
        self.task = task;
        self
    }

    pub fn validate(&self) -> Result<(), DataError> {
        let bad = |m: String| Err(DataError::InvalidSpec(m));
        if self.n == 0 || self.p == 0 {
            return bad("n and p must be positive".into());
        }
        if self.k_true == 0 || self.k_true > self.p {
            return bad(format!("k_true = {} must lie in 1..={}", self.k_true, self.p));
        }
        if !(self.snr > 0.0 && self.snr.is_finite()) {
            return bad(format!("snr = {} must be positive", self.snr));
        }
        match self.covariance {
            Covariance::Toeplitz(rho) if !(0.0..1.0).contains(&rho) => {
                bad(format!("Toeplitz ρ = {rho} must lie in [0, 1)"))
            }
            Covariance::HardMi if self.k_true < 2 => {
                bad("the incoherence-violating design needs k_true ≥ 2".into())
            }
            Covariance::HardMi if self.k_true + 1 > self.p => {
                bad(format!("the incoherence-violating design needs p ≥ k_true + 1 = {}", self.k_true + 1))
            }
            _ => Ok(()),
        }
    }
}

/// `θ = 1/(2k) + 1/(2√k)`, the midpoint of `(1/k, 1/√k)`.
pub fn hard_mi_theta(k_true: usize) -> f64 {
    let k = k_true as f64;
    0.5 / k + 0.5 / k.sqrt()
}

/// The population covariance `Σ` of a spec.
pub fn build_covariance(spec: &SyntheticSpec) -> Result<DMatrix<f64>, DataError> {
    spec.validate()?;
    let p = spec.p;
    Ok(match spec.covariance {
        Covariance::Identity => DMatrix::identity(p, p),
        Covariance::Toeplitz(rho) => {
            DMatrix::from_fn(p, p, |i, j| rho.powi((i as i32 - j as i32).abs()))
        }
        Covariance::HardMi => {
            let k = spec.k_true;
            let theta = hard_mi_theta(k);
            let mut s = DMatrix::identity(p, p);
            for i in 0..k {
                s[(k, i)] = theta;
                s[(i, k)] = theta;
            }
            s
        }
    })
}

/// Lower Cholesky factor `L` of `Σ` (`Σ = LLᵀ`) in closed form.
///
/// Both structured covariances have sparse factors: the Toeplitz matrix is
/// the AR(1) covariance, `L_ij = ρ^{i−j}·√(1−ρ²)` below the first column;
/// the incoherence-violating matrix only couples coordinate `k` to the first
/// `k` ones. Applying `L` therefore costs `O(p)` per row.
#[derive(Debug, Clone, Copy)]
enum CholeskyFactor {
    Identity,
    Ar1 { rho: f64 },
    Star { k: usize, theta: f64 },
}

impl CholeskyFactor {
    fn of(spec: &SyntheticSpec) -> Self {
        match spec.covariance {
            Covariance::Identity => CholeskyFactor::Identity,
            Covariance::Toeplitz(0.0) => CholeskyFactor::Identity,
            Covariance::Toeplitz(rho) => CholeskyFactor::Ar1 { rho },
            Covariance::HardMi => {
                CholeskyFactor::Star { k: spec.k_true, theta: hard_mi_theta(spec.k_true) }
            }
        }
    }

    /// `x = L z`, in place.
    fn apply(&self, z: &mut [f64]) {
        match *self {
            CholeskyFactor::Identity => {}
            CholeskyFactor::Ar1 { rho } => {
                let c = (1.0 - rho * rho).sqrt();
                for j in 1..z.len() {
                    z[j] = rho * z[j - 1] + c * z[j];
                }
            }
            CholeskyFactor::Star { k, theta } => {
                let head: f64 = z[..k].iter().sum();
                let c = (1.0 - k as f64 * theta * theta).sqrt();
                z[k] = theta * head + c * z[k];
            }
        }
    }

    #[cfg(test)]
    fn dense(&self, p: usize) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(p, p);
        for j in 0..p {
            let mut e = vec![0.0; p];
            e[j] = 1.0;
            self.apply(&mut e);
            l.set_column(j, &DVector::from_vec(e));
        }
        l
    }
}

/// A design matrix with its response.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub w_true: Option<DVector<f64>>,
    /// Whether columns of `x` were centered and scaled to unit variance.
    pub standardized: bool,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>) -> Self {
        assert_eq!(x.nrows(), y.len(), "X and Y disagree on the sample count");
        Self { x, y, w_true: None, standardized: false }
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// Indices of the nonzero ground-truth coefficients.
    pub fn true_support(&self) -> Option<Vec<usize>> {
        self.w_true
            .as_ref()
            .map(|w| w.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, _)| j).collect())
    }

    /// `max_i ‖x_i‖²` over rows.
    pub fn max_row_norm_sq(&self) -> f64 {
        self.x.row_iter().map(|r| r.norm_squared()).fold(0.0, f64::max)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            x: self.x.select_rows(rows),
            y: DVector::from_iterator(rows.len(), rows.iter().map(|&i| self.y[i])),
            w_true: self.w_true.clone(),
            standardized: false,
        }
    }

    /// Centers every column and scales it to unit (population) variance.
    ///
    /// Constant columns are centered only.
    pub fn standardize(&mut self) {
        let n = self.n() as f64;
        for mut col in self.x.column_iter_mut() {
            let mean = col.sum() / n;
            col.add_scalar_mut(-mean);
            let sd = (col.norm_squared() / n).sqrt();
            if sd > 0.0 {
                col /= sd;
            }
        }
        self.standardized = true;
    }

    /// Random split into two parts, the first holding `round(frac·n)` rows.
    pub fn split(&self, frac: f64, seed: u64) -> Result<(Dataset, Dataset), DataError> {
        let n = self.n();
        let first = (frac * n as f64).round() as usize;
        if !(0.0..=1.0).contains(&frac) || first == 0 || first >= n {
            return Err(DataError::InvalidSplit(format!("fraction {frac} of {n} rows leaves an empty part")));
        }
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let (a, b) = idx.split_at(first);
        let (mut a, mut b) = (a.to_vec(), b.to_vec());
        a.sort_unstable();
        b.sort_unstable();
        Ok((self.select_rows(&a), self.select_rows(&b)))
    }

    /// 85/15 outer split into (train+validation, test), then a 2:1 inner split.
    pub fn train_validation_test(&self, seed: u64) -> Result<(Dataset, Dataset, Dataset), DataError> {
        let (rest, test) = self.split(0.85, seed)?;
        let (train, val) = rest.split(2.0 / 3.0, seed.wrapping_add(1))?;
        Ok((train, val, test))
    }

    /// Writes `x1,…,xp,y` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), DataError> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=self.p()).map(|j| format!("x{j}")).collect();
        header.push("y".into());
        w.write_record(&header)?;
        for i in 0..self.n() {
            let mut rec: Vec<String> = self.x.row(i).iter().map(|v| format!("{v:e}")).collect();
            rec.push(format!("{:e}", self.y[i]));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Realized percentage of variance explained, `‖Xw‖² / (‖Xw‖² + ‖ε‖²)`.
pub fn realized_pve(data: &Dataset) -> Option<f64> {
    let w = data.w_true.as_ref()?;
    let signal = &data.x * w;
    let noise = &data.y - &signal;
    let s = signal.norm_squared();
    Some(s / (s + noise.norm_squared()))
}

/// Draws a dataset; deterministic given `spec.seed`.
pub fn sample_dataset(spec: &SyntheticSpec) -> Result<Dataset, DataError> {
    spec.validate()?;
    let (n, p, k) = (spec.n, spec.p, spec.k_true);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let factor = CholeskyFactor::of(spec);

    let mut x = DMatrix::zeros(n, p);
    let mut row = vec![0.0; p];
    for i in 0..n {
        for z in row.iter_mut() {
            *z = rng.sample(StandardNormal);
        }
        factor.apply(&mut row);
        for (j, &v) in row.iter().enumerate() {
            x[(i, j)] = v;
        }
    }

    let mut w = DVector::zeros(p);
    match spec.weight_scheme {
        WeightScheme::SignedUnit => {
            let mut positions = index::sample(&mut rng, p, k).into_vec();
            positions.sort_unstable();
            for j in positions {
                w[j] = if rng.random::<bool>() { 1.0 } else { -1.0 };
            }
        }
        WeightScheme::UniformOverRoot => {
            let v = 1.0 / (k as f64).sqrt();
            for j in 0..k {
                w[j] = v;
            }
        }
    }

    let signal = &x * &w;
    let mut noise = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let target = signal.norm() / spec.snr.sqrt();
    let current = noise.norm();
    if current > 0.0 {
        noise *= target / current;
    }
    let mut y = signal + noise;
    if spec.task == Task::Classification {
        y.apply(|v| *v = if *v >= 0.0 { 1.0 } else { -1.0 });
    }
    Ok(Dataset { x, y, w_true: Some(w), standardized: false })
}

/// Selects the response column of an ingested table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResponseColumn {
    Index(usize),
    Name(String),
}

impl FromStr for ResponseColumn {
    type Err = std::convert::Infallible;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => ResponseColumn::Index(i),
            Err(_) => ResponseColumn::Name(s.to_string()),
        })
    }
}

fn is_missing(cell: &str) -> bool {
    matches!(cell.trim().to_ascii_lowercase().as_str(), "" | "na" | "nan" | "null" | "?")
}

/// Reads a comma-separated numeric table.
///
/// The first row is taken as a header when any of its cells is not a number.
/// Missing cells (empty, `NA`, `NaN`, `null`, `?`) are an error.
pub fn read_matrix<R: Read>(
    input: R,
    response: &ResponseColumn,
    standardize: bool,
) -> Result<Dataset, DataError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(input);
    let mut records = Vec::new();
    for rec in reader.records() {
        records.push(rec?);
    }
    let first = records.first().ok_or(DataError::Empty)?;
    let width = first.len();
    let header: Option<Vec<String>> = if first.iter().any(|c| !is_missing(c) && c.trim().parse::<f64>().is_err()) {
        Some(first.iter().map(|c| c.trim().to_string()).collect())
    } else {
        None
    };
    let body = if header.is_some() { &records[1..] } else { &records[..] };
    if body.is_empty() {
        return Err(DataError::Empty);
    }
    let resp = match response {
        ResponseColumn::Index(i) if *i < width => *i,
        ResponseColumn::Index(i) => return Err(DataError::UnknownColumn(i.to_string())),
        ResponseColumn::Name(name) => header
            .as_ref()
            .and_then(|h| h.iter().position(|c| c == name))
            .ok_or_else(|| DataError::UnknownColumn(name.clone()))?,
    };
    let (n, p) = (body.len(), width - 1);
    let mut x = DMatrix::zeros(n, p);
    let mut y = DVector::zeros(n);
    let row_offset = usize::from(header.is_some());
    for (i, rec) in body.iter().enumerate() {
        let row = i + row_offset;
        if rec.len() != width {
            return Err(DataError::Ragged { row, found: rec.len(), expected: width });
        }
        for (col, cell) in rec.iter().enumerate() {
            if is_missing(cell) {
                return Err(DataError::MissingValue { row, col });
            }
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| DataError::NonNumeric { row, col, value: cell.to_string() })?;
            match col.cmp(&resp) {
                std::cmp::Ordering::Equal => y[i] = v,
                std::cmp::Ordering::Less => x[(i, col)] = v,
                std::cmp::Ordering::Greater => x[(i, col - 1)] = v,
            }
        }
    }
    let mut data = Dataset::new(x, y);
    if standardize {
        data.standardize();
    }
    Ok(data)
}

/// [`read_matrix`] on a file.
pub fn ingest_matrix(
    path: impl AsRef<Path>,
    response: &ResponseColumn,
    standardize: bool,
) -> Result<Dataset, DataError> {
    let file = std::fs::File::open(path)?;
    read_matrix(std::io::BufReader::new(file), response, standardize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toeplitz_examples() {
        let spec = SyntheticSpec::toeplitz(10, 4, 2, 0.0, 1.0, 0);
        assert_eq!(build_covariance(&spec).unwrap(), DMatrix::identity(4, 4));
        let spec = SyntheticSpec::toeplitz(10, 4, 2, 0.7, 1.0, 0);
        let s = build_covariance(&spec).unwrap();
        assert!((s[(0, 2)] - 0.49).abs() < 1e-15);
    }

    #[test]
    fn hard_mi_theta_examples() {
        assert_eq!(hard_mi_theta(4), 0.375);
        for k in 2..200 {
            let t = hard_mi_theta(k);
            let kf = k as f64;
            assert!(t > 1.0 / kf && t < 1.0 / kf.sqrt(), "k = {k}");
        }
    }

    #[test]
    fn hard_mi_needs_two_features() {
        let spec = SyntheticSpec::hard_mi(10, 5, 1, 6.0, 0);
        assert!(matches!(build_covariance(&spec), Err(DataError::InvalidSpec(_))));
        let spec = SyntheticSpec::hard_mi(10, 4, 4, 6.0, 0);
        assert!(build_covariance(&spec).is_err());
    }

    #[test]
    fn hard_mi_layout() {
        let spec = SyntheticSpec::hard_mi(10, 6, 3, 6.0, 0);
        let s = build_covariance(&spec).unwrap();
        let t = hard_mi_theta(3);
        for i in 0..6 {
            for j in 0..6 {
                let expected = if i == j {
                    1.0
                } else if (i == 3 && j < 3) || (j == 3 && i < 3) {
                    t
                } else {
                    0.0
                };
                assert_eq!(s[(i, j)], expected, "({i},{j})");
            }
        }
    }

    #[test]
    fn closed_form_factors_match_cholesky() {
        for spec in [
            SyntheticSpec::toeplitz(1, 7, 2, 0.6, 1.0, 0),
            SyntheticSpec::hard_mi(1, 9, 5, 1.0, 0),
            SyntheticSpec { covariance: Covariance::Identity, ..SyntheticSpec::toeplitz(1, 3, 1, 0.0, 1.0, 0) },
        ] {
            let sigma = build_covariance(&spec).unwrap();
            let chol = sigma.clone().cholesky().expect("Σ is positive definite");
            let l = CholeskyFactor::of(&spec).dense(spec.p);
            assert!((&l - chol.l()).amax() < 1e-12, "{:?}", spec.covariance);
            assert!((&l * l.transpose() - sigma).amax() < 1e-12);
        }
    }

    #[test]
    fn empirical_covariance_matches() {
        let spec = SyntheticSpec::toeplitz(50_000, 5, 2, 0.5, 1.0, 7);
        let data = sample_dataset(&spec).unwrap();
        let emp = data.x.tr_mul(&data.x) / spec.n as f64;
        let sigma = build_covariance(&spec).unwrap();
        assert!((emp - sigma).amax() < 0.02);
    }

    #[test]
    fn snr_rescaling_is_exact() {
        for snr in [6.0, 1.0, 0.05] {
            let data = sample_dataset(&SyntheticSpec::toeplitz(200, 30, 5, 0.2, snr, 3)).unwrap();
            let w = data.w_true.as_ref().unwrap();
            let signal = &data.x * w;
            let noise = &data.y - &signal;
            let ratio = signal.norm() / noise.norm();
            assert!((ratio - snr.sqrt()).abs() < 1e-12 * snr.sqrt().max(1.0), "snr {snr}: {ratio}");
        }
        let data = sample_dataset(&SyntheticSpec::toeplitz(500, 20, 4, 0.2, 6.0, 11)).unwrap();
        assert!((realized_pve(&data).unwrap() - 6.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn ground_truth_shape() {
        let data = sample_dataset(&SyntheticSpec::toeplitz(20, 50, 7, 0.2, 6.0, 5)).unwrap();
        let w = data.w_true.unwrap();
        assert_eq!(w.iter().filter(|v| **v != 0.0).count(), 7);
        assert!(w.iter().all(|v| [0.0, 1.0, -1.0].contains(v)));

        let data = sample_dataset(&SyntheticSpec::hard_mi(20, 12, 4, 6.0, 5)).unwrap();
        let w = data.w_true.unwrap();
        assert!(w.iter().take(4).all(|v| *v == 0.5));
        assert!(w.iter().skip(4).all(|v| *v == 0.0));
    }

    #[test]
    fn classification_labels_are_signs() {
        let spec = SyntheticSpec::toeplitz(100, 10, 3, 0.2, 1.0, 2).with_task(Task::Classification);
        let data = sample_dataset(&spec).unwrap();
        assert!(data.y.iter().all(|v| *v == 1.0 || *v == -1.0));
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = SyntheticSpec::toeplitz(30, 12, 3, 0.7, 2.0, 99);
        let a = sample_dataset(&spec).unwrap();
        let b = sample_dataset(&spec).unwrap();
        assert_eq!(a, b);
        let c = sample_dataset(&SyntheticSpec { seed: 100, ..spec }).unwrap();
        assert_ne!(a.x, c.x);
    }

    #[test]
    fn ingest_small_table() {
        let data = read_matrix("a,b\n1,2\n3,4\n5,6\n".as_bytes(), &ResponseColumn::Name("b".into()), false).unwrap();
        assert_eq!((data.n(), data.p()), (3, 1));
        assert_eq!(data.y.as_slice(), &[2.0, 4.0, 6.0]);
        assert!(!data.standardized);
        let data = read_matrix("1,2\n3,4\n5,6\n".as_bytes(), &ResponseColumn::Index(0), false).unwrap();
        assert_eq!(data.y.as_slice(), &[1.0, 3.0, 5.0]);
        assert_eq!(data.x.column(0).as_slice(), &[2.0, 4.0, 6.0]);
    }

    #[test]
    fn ingest_errors() {
        let r = ResponseColumn::Index(1);
        assert!(matches!(
            read_matrix("1,2\n3,\n".as_bytes(), &r, false),
            Err(DataError::MissingValue { row: 1, col: 1 })
        ));
        assert!(matches!(read_matrix("1,2\n3,NA\n".as_bytes(), &r, false), Err(DataError::MissingValue { .. })));
        assert!(matches!(read_matrix("1,2\n3,4,5\n".as_bytes(), &r, false), Err(DataError::Ragged { .. })));
        assert!(matches!(read_matrix("1,2\n3,abc\n".as_bytes(), &r, false), Err(DataError::NonNumeric { .. })));
        assert!(matches!(
            read_matrix("a,b\n1,2\n".as_bytes(), &ResponseColumn::Name("z".into()), false),
            Err(DataError::UnknownColumn(_))
        ));
    }

    #[test]
    fn standardization() {
        let table = "x1,x2,y\n1,10,0\n2,13,1\n4,11,0\n7,19,1\n";
        let data = read_matrix(table.as_bytes(), &ResponseColumn::Name("y".into()), true).unwrap();
        assert!(data.standardized);
        for col in data.x.column_iter() {
            let n = col.len() as f64;
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            assert!(mean.abs() <= 1e-12);
            assert!((var - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn csv_round_trip() {
        let data = sample_dataset(&SyntheticSpec::toeplitz(6, 3, 1, 0.2, 1.0, 4)).unwrap();
        let mut buf = Vec::new();
        data.write_csv(&mut buf).unwrap();
        let back = read_matrix(buf.as_slice(), &ResponseColumn::Name("y".into()), false).unwrap();
        assert_eq!(back.x, data.x);
        assert_eq!(back.y, data.y);
    }

    #[test]
    fn splits_partition_rows() {
        let data = sample_dataset(&SyntheticSpec::toeplitz(100, 3, 1, 0.2, 1.0, 4)).unwrap();
        let (tr, va, te) = data.train_validation_test(1).unwrap();
        assert_eq!(te.n(), 15);
        assert_eq!(tr.n() + va.n(), 85);
        assert_eq!(tr.n(), 57);
    }
}
