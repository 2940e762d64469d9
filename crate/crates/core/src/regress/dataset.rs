//! Point sets on the sphere and CSV ingestion.

use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regress::target::{target_eval, TargetSpec};
use crate::sphharm::sample_sphere;

/// Rows of a dataset are accepted as unit vectors within this distance.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Synthetic { seed: u64, target: String },
    Ingested { path: String },
}

/// `n` points in `R^d` with optional labels.
///
/// Rows are meant to lie on S^{d-1}. Ingestion without normalization may
/// leave them off the sphere; [`gram_matrix`](crate::regress::gram_matrix)
/// rejects such rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereDataset {
    pub d: usize,
    pub x: Vec<Vec<f64>>,
    pub y: Option<Vec<f64>>,
    pub provenance: Provenance,
}

impl SphereDataset {
    pub fn new(x: Vec<Vec<f64>>, y: Option<Vec<f64>>, provenance: Provenance) -> Result<SphereDataset> {
        let d = x.first().map(Vec::len).ok_or_else(|| Error::Data("dataset needs at least one row".into()))?;
        if let Some(row) = x.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: row.len() });
        }
        if let Some(y) = &y {
            if y.len() != x.len() {
                return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
            }
            if let Some(i) = y.iter().position(|v| !v.is_finite()) {
                return Err(Error::Data(format!("label {i} is not finite")));
            }
        }
        Ok(SphereDataset { d, x, y, provenance })
    }

    /// `n` uniform points labelled by `target`.
    pub fn synthetic(target: &TargetSpec, n: usize, seed: u64) -> Result<SphereDataset> {
        let x = sample_sphere(target.d(), n, seed)?;
        let y = target_eval(target, &x)?;
        SphereDataset::new(x, Some(y), Provenance::Synthetic { seed, target: target.kind.to_string() })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn labels(&self) -> Result<&[f64]> {
        self.y.as_deref().ok_or_else(|| Error::Data("dataset has no labels".into()))
    }

    /// Index of the first row whose norm is off by more than [`NORM_TOLERANCE`].
    pub fn first_off_sphere(&self) -> Option<usize> {
        first_off_sphere(&self.x)
    }

    /// Rows and labels permuted together, deterministic in `seed`.
    pub fn shuffled(&self, seed: u64) -> SphereDataset {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        SphereDataset {
            d: self.d,
            x: order.iter().map(|&i| self.x[i].clone()).collect(),
            y: self.y.as_ref().map(|y| order.iter().map(|&i| y[i]).collect()),
            provenance: self.provenance.clone(),
        }
    }
}

pub(crate) fn first_off_sphere(x: &[Vec<f64>]) -> Option<usize> {
    x.iter().position(|r| (r.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs() > NORM_TOLERANCE)
}

/// Which CSV column holds the labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
}

/// A column index when the text is an integer, a header name otherwise.
impl FromStr for LabelColumn {
    type Err = Error;
    fn from_str(s: &str) -> Result<LabelColumn> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty label column".into()));
        }
        Ok(s.parse().map(LabelColumn::Index).unwrap_or_else(|_| LabelColumn::Name(s.to_string())))
    }
}

/// Read a rectangular numeric CSV. The first row is a header when any of its
/// cells fails to parse as a number. The label column is removed from the
/// features; with `normalize` each feature row is scaled to unit norm.
pub fn ingest_csv(path: &Path, normalize: bool, label_column: Option<&LabelColumn>) -> Result<SphereDataset> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
    let mut records = reader.records().peekable();
    let mut header: Option<Vec<String>> = None;
    if let Some(Ok(first)) = records.peek() {
        if first.iter().any(|c| c.parse::<f64>().is_err()) {
            header = Some(first.iter().map(str::to_string).collect());
            records.next();
        }
    }
    let label_idx = match label_column {
        None => None,
        Some(LabelColumn::Index(i)) => Some(*i),
        Some(LabelColumn::Name(name)) => Some(
            header
                .as_ref()
                .and_then(|h| h.iter().position(|c| c == name))
                .ok_or_else(|| Error::Data(format!("label column `{name}` not found")))?,
        ),
    };
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (row, record) in records.enumerate() {
        let record = record?;
        let line = row + 1 + usize::from(header.is_some());
        if let Some(i) = label_idx {
            if i >= record.len() {
                return Err(Error::Data(format!("label column {i} missing on line {line}")));
            }
        }
        let mut features = Vec::with_capacity(record.len());
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::Data(format!("non-numeric cell `{cell}` on line {line}, column {j}")))?;
            if Some(j) == label_idx {
                y.push(v);
            } else {
                features.push(v);
            }
        }
        let norm = features.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Data(format!("zero-norm row on line {line}")));
        }
        if normalize {
            features.iter_mut().for_each(|v| *v /= norm);
        }
        x.push(features);
    }
    let provenance = Provenance::Ingested { path: path.display().to_string() };
    SphereDataset::new(x, label_idx.map(|_| y), provenance)
}
