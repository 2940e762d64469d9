//! Random ReLU and step features.
//!
//! Layer `ℓ` maps its input `h` to `√(2/m_ℓ) σ(W_ℓ h)` with `W_ℓ` standard
//! normal. One layer approximates `κ1` (ReLU) or `κ0` (step); before a second
//! layer the first-layer output is rescaled to unit norm.

use std::fmt;
use std::str::FromStr;

use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regress::ridge::{check_lambda, solve_shifted};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Step,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Step => {
                if z >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Activation::Relu => "relu",
            Activation::Step => "step",
        })
    }
}

impl FromStr for Activation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Activation> {
        match s {
            "relu" => Ok(Activation::Relu),
            "step" => Ok(Activation::Step),
            _ => Err(Error::Parse(format!("activation must be relu or step, got `{s}`"))),
        }
    }
}

/// Gaussian weight matrices, row-major, one per layer.
fn layer_weights(d: usize, widths: &[usize], seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fan_in = d;
    widths
        .iter()
        .map(|&m| {
            let w = (0..m * fan_in).map(|_| StandardNormal.sample(&mut rng)).collect();
            fan_in = m;
            w
        })
        .collect()
}

fn check_widths(widths: &[usize]) -> Result<()> {
    if widths.is_empty() || widths.len() > 2 || widths.contains(&0) {
        return Err(Error::Domain(format!("need one or two positive widths, got {widths:?}")));
    }
    Ok(())
}

/// Feature matrix (`n × m_last`) of the rows of `x`. The weights depend only
/// on `seed`, `widths` and the input dimension.
pub fn rf_features(x: &[Vec<f64>], widths: &[usize], activation: Activation, seed: u64) -> Result<Mat<f64>> {
    check_widths(widths)?;
    let d = x.first().map_or(0, Vec::len);
    if let Some(r) = x.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: r.len() });
    }
    let weights = layer_weights(d, widths, seed);
    let m_last = *widths.last().expect("checked");
    let mut out = Mat::<f64>::zeros(x.len(), m_last);
    let mut h = Vec::new();
    for (i, row) in x.iter().enumerate() {
        h.clear();
        h.extend_from_slice(row);
        for (l, (w, &m)) in weights.iter().zip(widths).enumerate() {
            if l > 0 {
                let norm = h.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > 0.0 {
                    h.iter_mut().for_each(|v| *v /= norm);
                }
            }
            let scale = (2.0 / m as f64).sqrt();
            let fan_in = h.len();
            h = (0..m)
                .map(|j| {
                    let z: f64 = w[j * fan_in..(j + 1) * fan_in].iter().zip(&h).map(|(a, b)| a * b).sum();
                    scale * activation.apply(z)
                })
                .collect();
        }
        for (j, v) in h.iter().enumerate() {
            out[(i, j)] = *v;
        }
    }
    Ok(out)
}

/// Ridge regression on random features.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RfModel {
    pub widths: Vec<usize>,
    pub activation: Activation,
    pub seed: u64,
    pub lambda: f64,
    pub weights: Vec<f64>,
}

impl RfModel {
    pub fn depth(&self) -> usize {
        self.widths.len()
    }

    /// Minimizes `(1/n)‖Fβ - y‖² + λ‖β‖²`, i.e. `(FᵀF + nλI)β = Fᵀy`.
    pub fn fit(
        x: &[Vec<f64>],
        y: &[f64],
        widths: &[usize],
        activation: Activation,
        seed: u64,
        lambda: f64,
    ) -> Result<RfModel> {
        check_lambda(lambda)?;
        if y.len() != x.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
        }
        let f = rf_features(x, widths, activation, seed)?;
        let yv = Mat::from_fn(y.len(), 1, |i, _| y[i]);
        let gram = f.transpose() * &f;
        let rhs = f.transpose() * &yv;
        let s = solve_shifted(gram.as_ref(), rhs.as_ref(), x.len() as f64 * lambda)?;
        let weights = (0..s.solution.nrows()).map(|i| s.solution[(i, 0)]).collect();
        Ok(RfModel { widths: widths.to_vec(), activation, seed, lambda, weights })
    }

    pub fn predict(&self, x: &[Vec<f64>]) -> Result<Vec<f64>> {
        let f = rf_features(x, &self.widths, self.activation, self.seed)?;
        Ok((0..f.nrows()).map(|i| (0..f.ncols()).map(|j| f[(i, j)] * self.weights[j]).sum()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{kernel_eval, KernelSpec};
    use crate::sphharm::sample_sphere;

    fn mean_deviation(spec: &KernelSpec, m: usize, act: Activation, seed: u64) -> f64 {
        let x = sample_sphere(3, 200, 5).unwrap();
        let f = rf_features(&x, &[m], act, seed).unwrap();
        let mut total = 0.0;
        for p in 0..100 {
            let (a, b) = (2 * p, 2 * p + 1);
            let emp: f64 = (0..m).map(|j| f[(a, j)] * f[(b, j)]).sum();
            let u: f64 = x[a].iter().zip(&x[b]).map(|(s, t)| s * t).sum();
            total += (emp - kernel_eval(spec, u.clamp(-1.0, 1.0)).unwrap()).abs();
        }
        total / 100.0
    }

    #[test]
    fn relu_features_approach_kappa1() {
        let x = sample_sphere(3, 20, 9).unwrap();
        let m = 100_000;
        let f = rf_features(&x, &[m], Activation::Relu, 1).unwrap();
        for p in 0..10 {
            let (a, b) = (2 * p, 2 * p + 1);
            let emp: f64 = (0..m).map(|j| f[(a, j)] * f[(b, j)]).sum();
            let u: f64 = x[a].iter().zip(&x[b]).map(|(s, t)| s * t).sum();
            assert!((emp - kernel_eval(&KernelSpec::ArcCos1, u).unwrap()).abs() <= 0.01);
        }
    }

    #[test]
    fn step_features_approach_kappa0() {
        assert!(mean_deviation(&KernelSpec::ArcCos0, 20_000, Activation::Step, 3) < 0.02);
    }

    #[test]
    fn deviation_halves_when_width_quadruples() {
        let seeds = 0..8u64;
        let avg = |m| seeds.clone().map(|s| mean_deviation(&KernelSpec::ArcCos1, m, Activation::Relu, s)).sum::<f64>() / 8.0;
        let ratio = avg(2_000) / avg(8_000);
        assert!((ratio / 2.0 - 1.0).abs() <= 0.3, "{ratio}");
    }

    #[test]
    fn deterministic_and_row_local() {
        let x = sample_sphere(4, 6, 2).unwrap();
        let a = rf_features(&x, &[16, 8], Activation::Relu, 11).unwrap();
        let b = rf_features(&x[3..], &[16, 8], Activation::Relu, 11).unwrap();
        for j in 0..8 {
            assert_eq!(a[(3, j)].to_bits(), b[(0, j)].to_bits());
        }
        assert!(rf_features(&x, &[], Activation::Relu, 1).is_err());
        assert!(rf_features(&x, &[4, 4, 4], Activation::Relu, 1).is_err());
    }

    #[test]
    fn fit_predicts_training_target() {
        let x = sample_sphere(4, 400, 1).unwrap();
        let y: Vec<f64> = x.iter().map(|r| r[0].max(0.0)).collect();
        let m = RfModel::fit(&x, &y, &[200], Activation::Relu, 4, 1e-6).unwrap();
        let p = m.predict(&x).unwrap();
        let mse = p.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / 400.0;
        assert!(mse < 1e-3, "{mse}");
    }
}
