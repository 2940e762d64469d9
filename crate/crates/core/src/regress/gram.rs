//! Kernel matrices between point sets.

use faer::Mat;

use crate::error::{Error, Result};
use crate::kernels::{eval_arg, KernelSpec};
use crate::regress::dataset::first_off_sphere;
use crate::sphharm::DotArg;

fn check_points(a: &[Vec<f64>], d: usize, name: &str) -> Result<()> {
    if let Some(row) = a.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: row.len() });
    }
    if let Some(i) = first_off_sphere(a) {
        return Err(Error::Data(format!("row {i} of {name} is not a unit vector")));
    }
    Ok(())
}

/// `κ(aᵀb)` for a pair of unit vectors.
pub(crate) fn pair_value(spec: &KernelSpec, a: &[f64], b: &[f64]) -> f64 {
    let u: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    eval_arg(spec, &DotArg::new(u.clamp(-1.0, 1.0)).expect("clamped dot product"))
}

/// `G[i][j] = κ(a_iᵀ b_j)`. When `a` and `b` are the same slice only the lower
/// triangle is evaluated and mirrored.
pub fn gram_matrix(spec: &KernelSpec, a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<Mat<f64>> {
    spec.validate()?;
    let d = a.first().or(b.first()).map_or(0, Vec::len);
    check_points(a, d, "A")?;
    check_points(b, d, "B")?;
    if std::ptr::eq(a, b) {
        let n = a.len();
        let mut g = Mat::<f64>::zeros(n, n);
        for j in 0..n {
            for i in j..n {
                let v = pair_value(spec, &a[i], &a[j]);
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        return Ok(g);
    }
    Ok(Mat::from_fn(a.len(), b.len(), |i, j| pair_value(spec, &a[i], &b[j])))
}
