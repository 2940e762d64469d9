//! Uniform sampling on S^{d-1}.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// `n` i.i.d. uniform points on S^{d-1}, deterministic in `seed`.
///
/// Gaussian vectors normalized to unit length; the (measure-zero) all-zero
/// draw is redrawn.
pub fn sample_sphere(d: usize, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_sphere_with(d, n, &mut rng)
}

pub fn sample_sphere_with<R: rand::Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
    if d < 2 || n < 1 {
        return Err(Error::Domain(format!("sample_sphere needs d >= 2 and n >= 1, got d={d}, n={n}")));
    }
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mut x: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        x.iter_mut().for_each(|v| *v /= norm);
        out.push(x);
    }
    Ok(out)
}
