//! Learning-curve experiments with synthetic targets.
//!
//! Each replicate draws one test set shared by every kernel and sample size;
//! each `(n, replicate)` draws one training set shared by every kernel. The
//! regularization `λ` is chosen on the test set among grid values
//! `λ ≥ λ_min`, once per `λ_min`.

use std::str::FromStr;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::regress::dataset::SphereDataset;
use crate::regress::features::{rf_features, Activation};
use crate::regress::ridge::{argmin, filter_grid, lambda_sweep, log_grid, mean_squared_error, solve_shifted};
use crate::regress::target::TargetSpec;

const STREAM_TEST: u64 = 1;
const STREAM_TRAIN: u64 = 2;
const STREAM_FEATURES: u64 = 3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one experiment cell, hashed from the master seed and the cell coordinates.
pub fn cell_seed(master: u64, coords: &[u64]) -> u64 {
    coords.iter().fold(splitmix64(master), |h, &c| splitmix64(h ^ splitmix64(c)))
}

/// One learning-curve entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub kernel: String,
    pub n: usize,
    pub lambda_min: f64,
    pub seed: u64,
    pub lambda: f64,
    pub test_mse: f64,
}

/// Rows ordered by kernel (in configuration order), `n`, replicate and `λ_min`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveTable {
    pub rows: Vec<CurveRow>,
}

impl CurveTable {
    /// Columns `kernel,n,lambda_min,seed,lambda,test_mse`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).expect("row serializes");
        }
        String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.rows).expect("rows serialize")
    }

    pub fn from_csv(text: &str) -> Result<CurveTable> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let rows = r.deserialize().collect::<std::result::Result<Vec<CurveRow>, _>>()?;
        Ok(CurveTable { rows })
    }

    /// Mean test error over replicates, or `None` when no row matches.
    pub fn mean_mse(&self, kernel: &str, n: usize, lambda_min: f64) -> Option<f64> {
        let v: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.kernel == kernel && r.n == n && r.lambda_min == lambda_min)
            .map(|r| r.test_mse)
            .collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }

    pub fn kernels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.kernel) {
                out.push(r.kernel.clone());
            }
        }
        out
    }
}

/// Sample sizes, regularization grid and replication shared by both experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    pub target: TargetSpec,
    pub n_grid: Vec<usize>,
    pub lambda_grid: Vec<f64>,
    pub lambda_mins: Vec<f64>,
    pub test_size: usize,
    pub replicates: usize,
    pub seed: u64,
}

impl Protocol {
    /// `n ∈ {64, ..., 4096}`, 20 values of `λ` log-spaced over `[1e-10, 1]`,
    /// `λ_min ∈ {1e-10, 1e-5}`, 10 000 test points, 5 replicates.
    pub fn standard(target: TargetSpec) -> Protocol {
        Protocol {
            target,
            n_grid: (6..=12).map(|p| 1usize << p).collect(),
            lambda_grid: log_grid(1e-10, 1.0, 20).expect("valid grid"),
            lambda_mins: vec![1e-10, 1e-5],
            test_size: 10_000,
            replicates: 5,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() || self.n_grid.contains(&0) {
            return Err(Error::Domain("sample sizes must be positive".into()));
        }
        if self.test_size == 0 || self.replicates == 0 {
            return Err(Error::Domain("test size and replicates must be positive".into()));
        }
        if self.lambda_grid.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::Domain("lambda grid must be positive".into()));
        }
        for &m in &self.lambda_mins {
            filter_grid(&self.lambda_grid, m)?;
        }
        Ok(())
    }

    fn replicate_seed(&self, r: usize) -> u64 {
        cell_seed(self.seed, &[r as u64])
    }

    fn test_set(&self, rep_seed: u64) -> Result<SphereDataset> {
        SphereDataset::synthetic(&self.target, self.test_size, cell_seed(rep_seed, &[STREAM_TEST]))
    }

    fn train_set(&self, rep_seed: u64, n: usize) -> Result<SphereDataset> {
        SphereDataset::synthetic(&self.target, n, cell_seed(rep_seed, &[STREAM_TRAIN, n as u64]))
    }

    /// One row per `λ_min`, selecting from per-λ errors over the full grid.
    fn select_rows(&self, label: &str, n: usize, rep_seed: u64, errors: &[f64]) -> Vec<CurveRow> {
        self.lambda_mins
            .iter()
            .map(|&lambda_min| {
                let idx: Vec<usize> =
                    (0..self.lambda_grid.len()).filter(|&i| self.lambda_grid[i] >= lambda_min * (1.0 - 1e-12)).collect();
                let sub: Vec<f64> = idx.iter().map(|&i| errors[i]).collect();
                let best = idx[argmin(&sub)];
                CurveRow {
                    kernel: label.to_string(),
                    n,
                    lambda_min,
                    seed: rep_seed,
                    lambda: self.lambda_grid[best],
                    test_mse: errors[best],
                }
            })
            .collect()
    }

    /// Runs `cell(label_index, n, replicate seed, train, test)` and sorts the rows.
    fn run(
        &self,
        labels: &[String],
        mut cell: impl FnMut(usize, usize, u64, &SphereDataset, &SphereDataset) -> Result<Vec<f64>>,
    ) -> Result<CurveTable> {
        self.validate()?;
        let mut keyed = Vec::new();
        for r in 0..self.replicates {
            let rep_seed = self.replicate_seed(r);
            let test = self.test_set(rep_seed)?;
            for (ni, &n) in self.n_grid.iter().enumerate() {
                let train = self.train_set(rep_seed, n)?;
                for (ki, label) in labels.iter().enumerate() {
                    let errors = cell(ki, n, rep_seed, &train, &test)?;
                    for row in self.select_rows(label, n, rep_seed, &errors) {
                        keyed.push(((ki, ni, r), row));
                    }
                }
            }
        }
        keyed.sort_by_key(|(k, _)| *k);
        Ok(CurveTable { rows: keyed.into_iter().map(|(_, row)| row).collect() })
    }
}

/// Kernel ridge regression learning curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrrExperiment {
    pub kernels: Vec<KernelSpec>,
    pub protocol: Protocol,
}

pub fn experiment_synthetic(cfg: &KrrExperiment) -> Result<CurveTable> {
    if cfg.kernels.is_empty() {
        return Err(Error::Domain("no kernels given".into()));
    }
    for k in &cfg.kernels {
        k.validate()?;
    }
    let labels: Vec<String> = cfg.kernels.iter().map(|k| k.to_string()).collect();
    let grid = &cfg.protocol.lambda_grid;
    cfg.protocol.run(&labels, |ki, _, _, train, test| lambda_sweep(&cfg.kernels[ki], train, test, grid))
}

/// Number of random features as a function of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WidthSchedule {
    /// `m = ⌈√n⌉`.
    Sqrt,
    /// `m = n`.
    Linear,
}

impl WidthSchedule {
    pub fn width(self, n: usize) -> usize {
        match self {
            WidthSchedule::Sqrt => {
                let r = n.isqrt();
                if r * r == n {
                    r
                } else {
                    r + 1
                }
            }
            WidthSchedule::Linear => n,
        }
    }
}

impl FromStr for WidthSchedule {
    type Err = Error;
    fn from_str(s: &str) -> Result<WidthSchedule> {
        match s {
            "sqrt" => Ok(WidthSchedule::Sqrt),
            "linear" | "n" => Ok(WidthSchedule::Linear),
            _ => Err(Error::Parse(format!("width schedule must be sqrt or linear, got `{s}`"))),
        }
    }
}

/// Random-feature ridge regression learning curves; every layer gets `m` features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfExperiment {
    pub depths: Vec<usize>,
    pub activation: Activation,
    pub schedule: WidthSchedule,
    pub protocol: Protocol,
}

impl RfExperiment {
    pub fn label(&self, depth: usize) -> String {
        let m = match self.schedule {
            WidthSchedule::Sqrt => "sqrt",
            WidthSchedule::Linear => "n",
        };
        format!("rf-features:depth={depth},act={},m={m}", self.activation)
    }
}

pub fn experiment_random_features(cfg: &RfExperiment) -> Result<CurveTable> {
    if cfg.depths.is_empty() || cfg.depths.iter().any(|&l| l == 0 || l > 2) {
        return Err(Error::Domain(format!("feature depths must be 1 or 2, got {:?}", cfg.depths)));
    }
    let labels: Vec<String> = cfg.depths.iter().map(|&l| cfg.label(l)).collect();
    let grid = &cfg.protocol.lambda_grid;
    cfg.protocol.run(&labels, |ki, n, rep_seed, train, test| {
        let depth = cfg.depths[ki];
        let widths = vec![cfg.schedule.width(n); depth];
        let seed = cell_seed(rep_seed, &[STREAM_FEATURES, depth as u64, n as u64]);
        let f = rf_features(&train.x, &widths, cfg.activation, seed)?;
        let f_test = rf_features(&test.x, &widths, cfg.activation, seed)?;
        let y = train.labels()?;
        let yv = Mat::from_fn(y.len(), 1, |i, _| y[i]);
        let gram = f.transpose() * &f;
        let rhs = f.transpose() * &yv;
        let y_test = test.labels()?;
        grid.iter()
            .map(|&lambda| {
                let s = solve_shifted(gram.as_ref(), rhs.as_ref(), n as f64 * lambda)?;
                let pred = &f_test * &s.solution;
                let p: Vec<f64> = (0..pred.nrows()).map(|i| pred[(i, 0)]).collect();
                Ok(mean_squared_error(&p, y_test))
            })
            .collect()
    })
}
