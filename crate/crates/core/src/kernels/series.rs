//! Truncated Taylor series at 0, `κ(u) = Σ_{n≤N} b_n u^n`.
//!
//! Every series-capable family has nonnegative coefficients, so the truncation
//! error on [-1, 1] is bounded by the tail mass `κ(1) - Σ b_n`.
//!
//! Deep compositions are built with the derivative identities
//! ```text
//! (κ0 ∘ g)' = g' / (π √(1 - g²)),   (κ1 ∘ g)' = (κ0 ∘ g) g'
//! ```
//! which cost O(N²) per layer and only ever add nonnegative terms.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernels::spec::{ntk_value_at_one, KernelSpec};

/// Default truncation order.
pub const DEFAULT_SERIES_ORDER: usize = 4000;

const NEGATIVE_SLACK: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    pub coeffs: Vec<f64>,
    /// `κ(1)` when known exactly.
    pub value_at_one: Option<f64>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<f64>, value_at_one: Option<f64>) -> PowerSeries {
        PowerSeries { coeffs, value_at_one }
    }

    /// `1`, as a series of length `len`.
    pub fn unit(len: usize) -> PowerSeries {
        let mut c = vec![0.0; len.max(1)];
        c[0] = 1.0;
        PowerSeries::new(c, Some(1.0))
    }

    /// `u`, as a series of length `len`.
    pub fn identity(len: usize) -> PowerSeries {
        let mut c = vec![0.0; len.max(2)];
        c[1] = 1.0;
        PowerSeries::new(c, Some(1.0))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest stored power.
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn partial_sum(&self) -> f64 {
        self.coeffs.iter().rev().sum()
    }

    /// `κ(1) - Σ b_n`, when `κ(1)` is known.
    pub fn truncation_tail_mass(&self) -> Option<f64> {
        self.value_at_one.map(|k| (k - self.partial_sum()).max(0.0))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|&b| b >= -NEGATIVE_SLACK)
    }

    /// Horner evaluation of the truncated series.
    pub fn eval(&self, u: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &b| acc * u + b)
    }

    fn scaled(mut self, factor: f64) -> PowerSeries {
        for b in &mut self.coeffs {
            *b *= factor;
        }
        self.value_at_one = self.value_at_one.map(|v| v * factor);
        self
    }

    fn derivative(&self) -> Vec<f64> {
        self.coeffs.iter().enumerate().skip(1).map(|(n, &b)| n as f64 * b).collect()
    }
}

/// Series of `κ0(u) = 1/2 + arcsin(u)/π` and of `κ1`, its antiderivative with
/// `κ1(0) = 1/π`, both through `u^{n_max}`.
pub fn arccos_series(n_max: usize) -> Result<(PowerSeries, PowerSeries)> {
    if n_max < 1 {
        return Err(Error::Domain("arccos_series needs n_max >= 1".into()));
    }
    let len = n_max + 1;
    let mut k0 = vec![0.0; len];
    k0[0] = 0.5;
    // arcsin u = Σ a_m u^{2m+1}/(2m+1),  a_m = C(2m, m)/4^m
    let mut a = 1.0;
    let mut m = 0usize;
    while 2 * m + 1 < len {
        if m > 0 {
            a *= (2 * m - 1) as f64 / (2 * m) as f64;
        }
        k0[2 * m + 1] = a / (PI * (2 * m + 1) as f64);
        m += 1;
    }
    let mut k1 = vec![0.0; len];
    k1[0] = 1.0 / PI;
    for n in 1..len {
        k1[n] = k0[n - 1] / n as f64;
    }
    Ok((PowerSeries::new(k0, Some(1.0)), PowerSeries::new(k1, Some(1.0))))
}

fn convolve(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    let nz_b: Vec<(usize, f64)> = b.iter().copied().enumerate().filter(|(_, x)| *x != 0.0).collect();
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == 0.0 {
            continue;
        }
        for &(j, y) in &nz_b {
            if i + j >= len {
                break;
            }
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficient convolution, truncated at the longer input's length.
pub fn series_product(a: &PowerSeries, b: &PowerSeries) -> PowerSeries {
    let len = a.len().max(b.len());
    let value = match (a.value_at_one, b.value_at_one) {
        (Some(x), Some(y)) => Some(x * y),
        _ => None,
    };
    PowerSeries::new(convolve(&a.coeffs, &b.coeffs, len), value)
}

/// `Σ_i outer_i · inner(u)^i` by Horner accumulation over the outer
/// coefficients, truncated at the longer input's length.
///
/// The inner series must be nonnegative with `inner(1) <= 1`; then the result
/// is nonnegative and `outer`'s tail mass bounds the truncation error at `u = 1`.
/// Cost grows like `len(outer) · len²`; [`kernel_series`] uses the O(len²)
/// derivative identities instead.
pub fn series_compose(outer: &PowerSeries, inner: &PowerSeries) -> Result<PowerSeries> {
    check_inner(inner)?;
    let len = outer.len().max(inner.len());
    let mut acc = vec![0.0; len];
    for &b in outer.coeffs.iter().rev() {
        acc = convolve(&acc, &inner.coeffs, len);
        acc[0] += b;
    }
    let value = match (outer.value_at_one, inner.value_at_one) {
        (Some(v), Some(w)) if (w - 1.0).abs() <= 1e-12 => Some(v),
        _ => None,
    };
    Ok(PowerSeries::new(acc, value))
}

fn check_inner(inner: &PowerSeries) -> Result<()> {
    if !inner.is_nonnegative() {
        return Err(Error::UnsupportedComposition);
    }
    if inner.partial_sum() > 1.0 + 1e-12 {
        return Err(Error::UnsupportedComposition);
    }
    Ok(())
}

/// `(1 - q_0)^{-1/2}`-type power: coefficients of `q^α` for a series with
/// `q_0 > 0`, by the recurrence `r_n = (1/(n q_0)) Σ_{j=1}^{n} ((α+1) j - n) q_j r_{n-j}`.
fn series_power(q: &[f64], alpha: f64, len: usize) -> Vec<f64> {
    let mut r = vec![0.0; len];
    r[0] = q[0].powf(alpha);
    for n in 1..len {
        let mut s = 0.0;
        for j in 1..=n.min(q.len() - 1) {
            s += ((alpha + 1.0) * j as f64 - n as f64) * q[j] * r[n - j];
        }
        r[n] = s / (n as f64 * q[0]);
    }
    r
}

fn antiderivative(deriv: &[f64], constant: f64, len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    out[0] = constant;
    for (n, o) in out.iter_mut().enumerate().skip(1) {
        *o = deriv.get(n - 1).copied().unwrap_or(0.0) / n as f64;
    }
    out
}

/// `κ0 ∘ g` through `(κ0 ∘ g)' = g' (1 - g²)^{-1/2} / π`. Requires `g(0) < 1`.
pub fn compose_kappa0(g: &PowerSeries) -> Result<PowerSeries> {
    check_inner(g)?;
    let len = g.len();
    let g0 = g.coeffs[0];
    if g0 >= 1.0 {
        return Err(Error::UnsupportedComposition);
    }
    let mut q: Vec<f64> = convolve(&g.coeffs, &g.coeffs, len).iter().map(|x| -x).collect();
    q[0] = (1.0 - g0) * (1.0 + g0);
    let r = series_power(&q, -0.5, len);
    let dh = convolve(&g.derivative(), &r, len);
    let mut h = antiderivative(&dh, 0.5 + g0.asin() / PI, len);
    for b in h.iter_mut().skip(1) {
        *b /= PI;
    }
    let value = g.value_at_one.filter(|v| (v - 1.0).abs() <= 1e-12).map(|_| 1.0);
    Ok(PowerSeries::new(h, value))
}

/// `κ1 ∘ g` through `(κ1 ∘ g)' = (κ0 ∘ g) g'`.
pub fn compose_kappa1(g: &PowerSeries) -> Result<PowerSeries> {
    let k0g = compose_kappa0(g)?;
    let len = g.len();
    let g0 = g.coeffs[0];
    let dh = convolve(&k0g.coeffs, &g.derivative(), len);
    let c0 = (g0 * (PI - g0.acos()) + ((1.0 - g0) * (1.0 + g0)).sqrt()) / PI;
    Ok(PowerSeries::new(antiderivative(&dh, c0, len), k0g.value_at_one))
}

/// Taylor series of `κ` through `u^{n_max}`.
pub fn kernel_series(spec: &KernelSpec, n_max: usize) -> Result<PowerSeries> {
    spec.validate()?;
    if n_max < 1 {
        return Err(Error::Domain("series order must be >= 1".into()));
    }
    let len = n_max + 1;
    let series = match spec {
        KernelSpec::ArcCos0 => arccos_series(n_max)?.0,
        KernelSpec::ArcCos1 => arccos_series(n_max)?.1,
        KernelSpec::DeepRf { depth } => {
            let mut g = PowerSeries::identity(len);
            for _ in 1..*depth {
                g = compose_kappa1(&g)?;
            }
            g
        }
        KernelSpec::DeepStep { depth } => {
            let mut g = PowerSeries::identity(len);
            for _ in 1..*depth {
                g = compose_kappa0(&g)?;
            }
            g
        }
        KernelSpec::DeepNtk { depth, bias, normalized } => {
            let b = if *bias { 1.0 } else { 0.0 };
            let mut k = PowerSeries::identity(len);
            let mut theta = k.clone();
            theta.coeffs[0] += b;
            for layer in 2..=*depth {
                let next = compose_kappa1(&k)?;
                let gate = compose_kappa0(&k)?;
                let mut t = convolve(&theta.coeffs, &gate.coeffs, len);
                for (x, y) in t.iter_mut().zip(&next.coeffs) {
                    *x += y;
                }
                if layer < *depth {
                    t[0] += b;
                }
                theta = PowerSeries::new(t, None);
                k = next;
            }
            let total = ntk_value_at_one(*depth, *bias);
            theta.value_at_one = Some(total);
            if *normalized {
                theta.scaled(1.0 / total)
            } else {
                theta
            }
        }
        KernelSpec::GaussianSphere { c } => {
            let mut coeffs = vec![0.0; len];
            let mut term = (-c).exp();
            for (n, b) in coeffs.iter_mut().enumerate() {
                *b = term;
                term *= c / (n + 1) as f64;
            }
            PowerSeries::new(coeffs, Some(1.0))
        }
        KernelSpec::Linear => PowerSeries::identity(len),
        KernelSpec::CustomSeries(b) => {
            let mut coeffs = b.clone();
            coeffs.resize(len.max(b.len()), 0.0);
            coeffs.truncate(len);
            PowerSeries::new(coeffs, Some(b.iter().sum()))
        }
        KernelSpec::Laplace { .. } | KernelSpec::GenExp { .. } => {
            return Err(Error::SeriesUnsupported { family: spec.family().to_string() });
        }
    };
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::eval::kernel_eval;

    #[test]
    fn arccos_leading_coefficients() {
        let (k0, k1) = arccos_series(10).unwrap();
        assert_eq!(k0.coeffs[0], 0.5);
        assert!((k0.coeffs[1] - 1.0 / PI).abs() < 1e-16);
        assert_eq!(k0.coeffs[2], 0.0);
        assert!((k0.coeffs[3] - 1.0 / (6.0 * PI)).abs() < 1e-16);
        assert!((k1.coeffs[0] - 1.0 / PI).abs() < 1e-16);
        assert_eq!(k1.coeffs[1], 0.5);
        assert!((k1.coeffs[2] - 1.0 / (2.0 * PI)).abs() < 1e-16);
    }

    #[test]
    fn arccos_partial_sums_approach_one_from_below() {
        let (k0, k1) = arccos_series(4000).unwrap();
        let eps = 1.0 - k1.partial_sum();
        assert!(eps > 0.0 && eps < 2e-5, "{eps}");
        assert!(k0.partial_sum() < 1.0);
        assert!(k0.is_nonnegative() && k1.is_nonnegative());
        assert!((k1.truncation_tail_mass().unwrap() - eps).abs() < 1e-15);
    }

    #[test]
    fn product_identities() {
        let a = PowerSeries::new(vec![0.3, 0.2, 0.5], Some(1.0));
        assert_eq!(series_product(&a, &PowerSeries::unit(1)).coeffs, a.coeffs);
        let u = PowerSeries::identity(3);
        assert_eq!(series_product(&u, &u).coeffs, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn two_layer_ntk_from_product() {
        let (k0, k1) = arccos_series(4000).unwrap();
        let prod = series_product(&PowerSeries::identity(2), &k0);
        let ntk = PowerSeries::new(prod.coeffs.iter().zip(&k1.coeffs).map(|(a, b)| a + b).collect(), None);
        let spec = KernelSpec::DeepNtk { depth: 2, bias: false, normalized: false };
        assert!((ntk.eval(0.3) - kernel_eval(&spec, 0.3).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn compose_identities() {
        let inner = PowerSeries::new(vec![0.1, 0.4, 0.3], Some(0.8));
        let same = series_compose(&PowerSeries::identity(2), &inner).unwrap();
        assert_eq!(same.coeffs, inner.coeffs);
        let constant = series_compose(&PowerSeries::unit(1), &inner).unwrap();
        assert_eq!(constant.coeffs, vec![1.0, 0.0, 0.0]);
        let negative = PowerSeries::new(vec![0.1, -0.4], None);
        assert_eq!(series_compose(&inner, &negative), Err(Error::UnsupportedComposition));
    }

    #[test]
    fn horner_compose_matches_recursive_evaluation() {
        let (_, k1) = arccos_series(150).unwrap();
        let rf3 = series_compose(&k1, &k1).unwrap();
        let want = kernel_eval(&KernelSpec::DeepRf { depth: 3 }, 0.5).unwrap();
        assert!((rf3.eval(0.5) - want).abs() < 1e-6);
        // and the fast route agrees with Horner coefficient by coefficient
        let fast = compose_kappa1(&k1).unwrap();
        for (a, b) in fast.coeffs.iter().zip(&rf3.coeffs).take(60) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300) + 1e-17, "{a} vs {b}");
        }
    }

    #[test]
    fn fast_compose_reproduces_base_series() {
        let (k0, k1) = arccos_series(300).unwrap();
        let id = PowerSeries::identity(301);
        let a = compose_kappa0(&id).unwrap();
        let b = compose_kappa1(&id).unwrap();
        for n in 0..=300 {
            assert!((a.coeffs[n] - k0.coeffs[n]).abs() <= 1e-14 * k0.coeffs[n] + 1e-18);
            assert!((b.coeffs[n] - k1.coeffs[n]).abs() <= 1e-14 * k1.coeffs[n] + 1e-18);
        }
    }

    #[test]
    fn family_series_examples() {
        let lin = kernel_series(&KernelSpec::Linear, 10).unwrap();
        assert_eq!(lin.coeffs[1], 1.0);
        assert_eq!(lin.coeffs.iter().sum::<f64>(), 1.0);
        let g = kernel_series(&KernelSpec::GaussianSphere { c: 2.0 }, 10).unwrap();
        assert!((g.coeffs[3] - (-2f64).exp() * 8.0 / 6.0).abs() < 1e-16);
        let rf = kernel_series(&KernelSpec::DeepRf { depth: 3 }, 4000).unwrap();
        let want = kernel_eval(&KernelSpec::DeepRf { depth: 3 }, 0.9).unwrap();
        assert!((rf.eval(0.9) - want).abs() < 1e-5);
        assert!(matches!(
            kernel_series(&KernelSpec::Laplace { c: 1.0 }, 10),
            Err(Error::SeriesUnsupported { .. })
        ));
    }

    #[test]
    fn series_agree_with_evaluation_within_tail_mass() {
        let specs = [
            KernelSpec::ArcCos0,
            KernelSpec::ArcCos1,
            KernelSpec::DeepRf { depth: 4 },
            KernelSpec::DeepStep { depth: 3 },
            KernelSpec::DeepNtk { depth: 3, bias: false, normalized: true },
            KernelSpec::DeepNtk { depth: 4, bias: true, normalized: false },
            KernelSpec::GaussianSphere { c: 1.0 },
            KernelSpec::CustomSeries(vec![0.25, 0.5, 0.25]),
        ];
        for spec in &specs {
            let s = kernel_series(spec, 2000).unwrap();
            assert!(s.is_nonnegative(), "{spec}");
            let tail = s.truncation_tail_mass().unwrap();
            assert!(s.partial_sum() <= spec.value_at_one() + 1e-12);
            for i in 0..=100 {
                let u = -0.99 + 0.0198 * i as f64;
                let err = (s.eval(u) - kernel_eval(spec, u).unwrap()).abs();
                assert!(err <= tail + 1e-13, "{spec} at {u}: {err} > {tail}");
            }
        }
    }
}
