//! Kernel ridge regression.
//!
//! With `n` training points the estimator solves
//! ```text
//! (K + nλ I) α = y,    f̂(x) = Σ_i α_i κ(x_iᵀ x)
//! ```

use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef, Side};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::regress::dataset::SphereDataset;
use crate::regress::gram::gram_matrix;

/// Relative residual every solve must reach.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
const JITTER_STEPS: usize = 3;
const REFINE_STEPS: usize = 4;
/// Test points per block when predicting.
const PREDICT_BLOCK: usize = 1024;

/// Solution of a shifted symmetric system.
#[derive(Debug, Clone)]
pub struct ShiftedSolve {
    pub solution: Mat<f64>,
    /// Largest column-wise `‖(A + sI)x - b‖ / ‖b‖`.
    pub residual: f64,
    /// Diagonal jitter needed for the factorization to succeed.
    pub jitter: f64,
}

fn frobenius(m: MatRef<'_, f64>, col: usize) -> f64 {
    (0..m.nrows()).map(|i| m[(i, col)] * m[(i, col)]).sum::<f64>().sqrt()
}

fn shifted_residual(a: MatRef<'_, f64>, shift: f64, x: &Mat<f64>, b: MatRef<'_, f64>) -> Mat<f64> {
    let mut r = b.to_owned() - a * x;
    for j in 0..x.ncols() {
        for i in 0..x.nrows() {
            r[(i, j)] -= shift * x[(i, j)];
        }
    }
    r
}

/// Solve `(A + shift·I) X = B` for symmetric positive semidefinite `A`.
///
/// Cholesky is tried on `A + shift·I`, then with added diagonal jitter
/// `1e-12·trace/n`, ten and a hundred times that. The solution is refined
/// against the unjittered system until every column reaches
/// [`RESIDUAL_TOLERANCE`].
pub fn solve_shifted(a: MatRef<'_, f64>, b: MatRef<'_, f64>, shift: f64) -> Result<ShiftedSolve> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.ncols() });
    }
    if b.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.nrows() });
    }
    if !(shift.is_finite() && shift >= 0.0) {
        return Err(Error::Domain(format!("shift must be finite and nonnegative, got {shift}")));
    }
    let trace: f64 = (0..n).map(|i| a[(i, i)]).sum();
    let base = 1e-12 * trace.abs().max(f64::MIN_POSITIVE) / n.max(1) as f64;
    let b_norms: Vec<f64> = (0..b.ncols()).map(|j| frobenius(b, j)).collect();
    let jitters = std::iter::once(0.0).chain((0..JITTER_STEPS).map(|i| base * 10f64.powi(i as i32)));
    for jitter in jitters {
        let mut m = a.to_owned();
        for i in 0..n {
            m[(i, i)] += shift + jitter;
        }
        let Ok(llt) = m.llt(Side::Lower) else { continue };
        let mut x = llt.solve(b);
        let mut residual = f64::INFINITY;
        for _ in 0..=REFINE_STEPS {
            let r = shifted_residual(a, shift, &x, b);
            residual = (0..r.ncols())
                .map(|j| if b_norms[j] == 0.0 { frobenius(r.as_ref(), j) } else { frobenius(r.as_ref(), j) / b_norms[j] })
                .fold(0.0, f64::max);
            if residual <= RESIDUAL_TOLERANCE * 1e-2 {
                break;
            }
            x += llt.solve(&r);
        }
        if residual <= RESIDUAL_TOLERANCE {
            return Ok(ShiftedSolve { solution: x, residual, jitter });
        }
    }
    Err(Error::Conditioning(n))
}

/// Dual coefficients `α` of `(K + nλI)α = y` and the achieved relative residual.
pub fn krr_solve(k: MatRef<'_, f64>, y: &[f64], lambda: f64) -> Result<(Vec<f64>, f64)> {
    check_lambda(lambda)?;
    let n = k.nrows();
    let rhs = Mat::from_fn(y.len(), 1, |i, _| y[i]);
    let s = solve_shifted(k, rhs.as_ref(), n as f64 * lambda)?;
    Ok(((0..n).map(|i| s.solution[(i, 0)]).collect(), s.residual))
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("lambda must be positive and finite, got {lambda}")))
    }
}

/// A fitted kernel ridge estimator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RidgeModel {
    pub kernel: KernelSpec,
    pub lambda: f64,
    pub alpha: Vec<f64>,
    pub train_x: Vec<Vec<f64>>,
    pub residual: f64,
}

impl RidgeModel {
    pub fn predict(&self, x: &[Vec<f64>]) -> Result<Vec<f64>> {
        let alpha = Mat::from_fn(self.alpha.len(), 1, |i, _| self.alpha[i]);
        let p = predict_many(&self.kernel, &self.train_x, alpha.as_ref(), x)?;
        Ok((0..x.len()).map(|i| p[(i, 0)]).collect())
    }
}

/// Fit kernel ridge regression on a labelled dataset.
pub fn krr_fit(spec: &KernelSpec, train: &SphereDataset, lambda: f64) -> Result<RidgeModel> {
    let y = train.labels()?;
    let k = gram_matrix(spec, &train.x, &train.x)?;
    let (alpha, residual) = krr_solve(k.as_ref(), y, lambda)?;
    Ok(RidgeModel { kernel: spec.clone(), lambda, alpha, train_x: train.x.clone(), residual })
}

/// Predictions `K(x, train) · α` for every column of `alphas`, in blocks of test points.
pub fn predict_many(
    spec: &KernelSpec,
    train_x: &[Vec<f64>],
    alphas: MatRef<'_, f64>,
    x: &[Vec<f64>],
) -> Result<Mat<f64>> {
    let mut out = Mat::<f64>::zeros(x.len(), alphas.ncols());
    for start in (0..x.len()).step_by(PREDICT_BLOCK) {
        let end = (start + PREDICT_BLOCK).min(x.len());
        let kb = gram_matrix(spec, &x[start..end], train_x)?;
        let pb = &kb * alphas;
        out.as_mut().subrows_mut(start, end - start).copy_from(&pb);
    }
    Ok(out)
}

pub fn mean_squared_error(pred: &[f64], truth: &[f64]) -> f64 {
    pred.iter().zip(truth).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / truth.len() as f64
}

/// `count` points log-spaced over `[lo, hi]`, endpoints included.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && count >= 1) || (count == 1 && lo != hi) {
        return Err(Error::Domain(format!("bad grid [{lo}, {hi}] with {count} points")));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..count)
        .map(|i| match i {
            0 => lo,
            i if i == count - 1 => hi,
            i => (a + (b - a) * i as f64 / (count - 1) as f64).exp(),
        })
        .collect())
}

/// Grid values at or above `lambda_min` (up to rounding of the grid itself).
pub fn filter_grid(grid: &[f64], lambda_min: f64) -> Result<Vec<f64>> {
    let kept: Vec<f64> = grid.iter().copied().filter(|&l| l >= lambda_min * (1.0 - 1e-12)).collect();
    if kept.is_empty() {
        return Err(Error::EmptyGrid(lambda_min));
    }
    Ok(kept)
}

/// Test mean squared error for each `λ` of `grid`, sharing one Gram matrix.
pub fn lambda_sweep(spec: &KernelSpec, train: &SphereDataset, test: &SphereDataset, grid: &[f64]) -> Result<Vec<f64>> {
    let y = train.labels()?;
    let y_test = test.labels()?;
    let k = gram_matrix(spec, &train.x, &train.x)?;
    let n = train.len();
    let mut alphas = Mat::<f64>::zeros(n, grid.len());
    for (j, &lambda) in grid.iter().enumerate() {
        let (alpha, _) = krr_solve(k.as_ref(), y, lambda)?;
        for (i, a) in alpha.into_iter().enumerate() {
            alphas[(i, j)] = a;
        }
    }
    let pred = predict_many(spec, &train.x, alphas.as_ref(), &test.x)?;
    Ok((0..grid.len())
        .map(|j| {
            let p: Vec<f64> = (0..test.len()).map(|i| pred[(i, j)]).collect();
            mean_squared_error(&p, y_test)
        })
        .collect())
}

/// Index of the smallest error; ties go to the earlier grid entry.
pub(crate) fn argmin(errors: &[f64]) -> usize {
    errors
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, be), (i, &e)| if e < be { (i, e) } else { (bi, be) })
        .0
}

/// The `λ ≥ λ_min` of the grid with the smallest validation error, and that error.
pub fn model_select(
    train: &SphereDataset,
    validation: &SphereDataset,
    spec: &KernelSpec,
    lambda_grid: &[f64],
    lambda_min: f64,
) -> Result<(f64, f64)> {
    let grid = filter_grid(lambda_grid, lambda_min)?;
    let errors = lambda_sweep(spec, train, validation, &grid)?;
    let best = argmin(&errors);
    Ok((grid[best], errors[best]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regress::dataset::Provenance;
    use crate::regress::target::{TargetKind, TargetSpec};

    fn dataset(x: Vec<Vec<f64>>, y: Vec<f64>) -> SphereDataset {
        SphereDataset::new(x, Some(y), Provenance::Ingested { path: "mem".into() }).unwrap()
    }

    #[test]
    fn antipodal_pair_by_hand() {
        // K = [[1, -1], [-1, 1]]; with s = 2λ, (K + sI)α = (1, -1) gives α = (1, -1)/(2 + s).
        let lambda = 0.1;
        let ds = dataset(vec![vec![1.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0]], vec![1.0, -1.0]);
        let m = krr_fit(&KernelSpec::Linear, &ds, lambda).unwrap();
        let want = 1.0 / (2.0 + 2.0 * lambda);
        assert!((m.alpha[0] - want).abs() < 1e-15 && (m.alpha[1] + want).abs() < 1e-15);
        assert!(m.residual <= RESIDUAL_TOLERANCE);
    }

    #[test]
    fn large_lambda_shrinks_alpha() {
        let target = TargetSpec::along_first_axis(TargetKind::DoubleExp, 4).unwrap();
        let ds = SphereDataset::synthetic(&target, 50, 1).unwrap();
        let lambda = 1e4;
        let m = krr_fit(&KernelSpec::ArcCos1, &ds, lambda).unwrap();
        let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!(norm(&m.alpha) <= norm(ds.labels().unwrap()) / (50.0 * lambda) * (1.0 + 1e-12));
    }

    #[test]
    fn tiny_lambda_interpolates() {
        let target = TargetSpec::along_first_axis(TargetKind::DoubleExp, 4).unwrap();
        let ds = SphereDataset::synthetic(&target, 60, 2).unwrap();
        let m = krr_fit(&KernelSpec::Laplace { c: 1.0 }, &ds, 1e-12).unwrap();
        let p = m.predict(&ds.x).unwrap();
        for (a, b) in p.iter().zip(ds.labels().unwrap()) {
            assert!((a - b).abs() < 1e-4);
        }
    }

    #[test]
    fn singular_gram_gets_jitter() {
        // duplicated points make K singular; a zero shift needs jitter
        let x = vec![vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let k = gram_matrix(&KernelSpec::Linear, &x, &x).unwrap();
        let b = Mat::from_fn(3, 1, |i, _| [1.0, 1.0, 2.0][i]);
        let s = solve_shifted(k.as_ref(), b.as_ref(), 0.0).unwrap();
        assert!(s.jitter > 0.0 && s.residual <= RESIDUAL_TOLERANCE);
        let inconsistent = Mat::from_fn(3, 1, |i, _| [1.0, -1.0, 2.0][i]);
        assert!(matches!(solve_shifted(k.as_ref(), inconsistent.as_ref(), 0.0), Err(Error::Conditioning(3))));
    }

    #[test]
    fn grid_selection() {
        let target = TargetSpec::along_first_axis(TargetKind::DoubleExp, 4).unwrap();
        let train = SphereDataset::synthetic(&target, 40, 3).unwrap();
        let val = SphereDataset::synthetic(&target, 200, 4).unwrap();
        let spec = KernelSpec::ArcCos1;
        assert!(matches!(model_select(&train, &val, &spec, &[1e-8, 1e-7], 1e-5), Err(Error::EmptyGrid(_))));
        let (l, e) = model_select(&train, &val, &spec, &[1e-3], 1e-5).unwrap();
        assert_eq!(l, 1e-3);
        assert!(e.is_finite());
        let grid = log_grid(1e-10, 1.0, 20).unwrap();
        assert_eq!((grid[0], grid[19]), (1e-10, 1.0));
        assert_eq!(filter_grid(&grid, 1e-5).unwrap().len(), 10);
    }
}
