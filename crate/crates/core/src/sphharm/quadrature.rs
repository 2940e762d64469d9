//! Quadrature against the weight `(1 - t²)^{(d-3)/2}` on [-1, 1].
//!
//! Two shapes of rule are produced:
//!
//! * a plain Gauss–Jacobi rule (Golub–Welsch), exact for polynomials of
//!   degree `2n - 1`, used for polynomial self-tests;
//! * a desingularized rule that splits [-1, 1] at 0 and substitutes
//!   `t = 1 - s^p` on the right half and `t = -1 + s^p` on the left half,
//!   with Gauss–Legendre in `s ∈ (0, 1)`. Integrands with terms
//!   `(1 ∓ t)^{j/p}` become analytic in `s`, which restores spectral
//!   convergence for the arc-cosine, Laplace and step kernels.
//!
//! Every node also carries its distances to both endpoints, computed from `s`
//! without cancellation (see [`DotArg`]).

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::sphharm::gamma::log_gamma_signed;
use crate::sphharm::legendre::{check_dim, UNIT_SLACK};
use crate::sphharm::NeumaierSum;

/// A point of [-1, 1] together with `1 - u` and `1 + u`.
///
/// Kernels with square-root behaviour at the endpoints read the complements
/// directly instead of recomputing them from `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DotArg {
    pub u: f64,
    pub one_minus: f64,
    pub one_plus: f64,
}

impl DotArg {
    /// Wrap a plain inner product; values within `1e-12` outside [-1, 1] are clamped.
    pub fn new(u: f64) -> Result<DotArg> {
        if !u.is_finite() || u.abs() > 1.0 + UNIT_SLACK {
            return Err(Error::Domain(format!("|u| <= 1 required, got {u}")));
        }
        let u = u.clamp(-1.0, 1.0);
        Ok(DotArg { u, one_minus: 1.0 - u, one_plus: 1.0 + u })
    }

    /// The point `1 - gap`.
    pub fn below_one(gap: f64) -> DotArg {
        DotArg { u: 1.0 - gap, one_minus: gap, one_plus: 2.0 - gap }
    }

    /// The point `-1 + gap`.
    pub fn above_minus_one(gap: f64) -> DotArg {
        DotArg { u: -1.0 + gap, one_minus: 2.0 - gap, one_plus: gap }
    }

    /// `1 - u²` computed as a product of the complements.
    pub fn one_minus_sq(&self) -> f64 {
        self.one_minus * self.one_plus
    }

    pub fn negate(&self) -> DotArg {
        DotArg { u: -self.u, one_minus: self.one_plus, one_plus: self.one_minus }
    }
}

/// Nodes and weights integrating `f(t) (1 - t²)^{(d-3)/2}` over [-1, 1].
///
/// The weight function is folded into `weights`, so `Σ weights[i] f(nodes[i])`
/// approximates the weighted integral for both rule shapes.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub args: Vec<DotArg>,
    pub weight_exponent: f64,
    /// `Some(p)` when the `t = ±(1 - s^p)` substitution was applied.
    pub half_interval_substitution: Option<u32>,
    /// Polynomial degree integrated exactly (plain rules) or the matching
    /// nominal degree of the per-half Gauss–Legendre rule.
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i f(t_i)` with compensated summation in node order.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let mut acc = NeumaierSum::default();
        for (t, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(*t));
        }
        acc.total()
    }

    /// Same as [`integrate`](Self::integrate) but the integrand sees the
    /// cancellation-free endpoint distances.
    pub fn integrate_args<F: FnMut(&DotArg) -> f64>(&self, mut f: F) -> f64 {
        let mut acc = NeumaierSum::default();
        for (a, w) in self.args.iter().zip(&self.weights) {
            acc.add(w * f(a));
        }
        acc.total()
    }
}

/// Gauss–Legendre nodes and weights on (0, 1), nodes ascending.
///
/// Newton iteration is run on the angle `θ` with `x = cos θ`, so nodes close
/// to the endpoints keep full relative accuracy after mapping to `s = cos²(θ/2)`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    let mut s = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for i in 1..=n {
        let mut theta = std::f64::consts::PI * (i as f64 - 0.25) / (nf + 0.5);
        let mut dp = 0.0;
        for _ in 0..100 {
            let x = theta.cos();
            let (p, p_prev) = legendre_pair(n, x);
            let sin = theta.sin();
            // (1 - x²) P_n'(x) = n (P_{n-1}(x) - x P_n(x))
            dp = nf * (p_prev - x * p) / (sin * sin);
            let step = p / (sin * dp);
            theta += step;
            if step.abs() < 1e-16 * theta.max(1.0) {
                break;
            }
        }
        let x = theta.cos();
        let (p, p_prev) = legendre_pair(n, x);
        let sin = theta.sin();
        dp = if p.is_finite() { nf * (p_prev - x * p) / (sin * sin) } else { dp };
        let weight = 2.0 / (sin * sin * dp * dp);
        let half = (theta / 2.0).cos();
        s.push(half * half);
        w.push(weight / 2.0);
    }
    // θ increasing means x decreasing and s decreasing; flip to ascending.
    s.reverse();
    w.reverse();
    (s, w)
}

fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// Gauss–Jacobi rule for `(1 - t²)^{(d-3)/2}` or its desingularized variant
/// with the square-root substitution `t = ±(1 - s²)`.
pub fn jacobi_quadrature(d: usize, n_nodes: usize, desingularize: bool) -> Result<QuadratureRule> {
    if desingularize {
        desingularized_rule(d, n_nodes, 2)
    } else {
        plain_rule(d, n_nodes)
    }
}

/// Plain Gauss–Jacobi rule with `n_nodes` nodes, exact to degree `2 n_nodes - 1`.
pub fn plain_rule(d: usize, n_nodes: usize) -> Result<QuadratureRule> {
    check_dim(d)?;
    if n_nodes < 2 {
        return Err(Error::Domain(format!("quadrature needs at least 2 nodes, got {n_nodes}")));
    }
    let a = (d as f64 - 3.0) / 2.0;
    let (nodes, weights) = if d == 3 {
        let (s, w) = gauss_legendre_unit(n_nodes);
        let nodes: Vec<f64> = s.iter().map(|s| 2.0 * s - 1.0).collect();
        let weights: Vec<f64> = w.iter().map(|w| 2.0 * w).collect();
        (nodes, weights)
    } else {
        golub_welsch_gegenbauer(a, n_nodes)?
    };
    let args = nodes.iter().map(|&t| DotArg { u: t, one_minus: 1.0 - t, one_plus: 1.0 + t }).collect();
    Ok(QuadratureRule {
        nodes,
        weights,
        args,
        weight_exponent: a,
        half_interval_substitution: None,
        degree: 2 * n_nodes - 1,
    })
}

/// Symmetric Jacobi matrix of the monic Gegenbauer recurrence with `λ = a + 1/2`:
/// ```text
/// β_n = n (n + 2λ - 1) / (4 (n + λ) (n + λ - 1))
/// ```
fn golub_welsch_gegenbauer(a: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let lambda = a + 0.5;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        let k = i as f64;
        let beta = k * (k + 2.0 * lambda - 1.0) / (4.0 * (k + lambda) * (k + lambda - 1.0));
        let off = beta.sqrt();
        jac[(i, i - 1)] = off;
        jac[(i - 1, i)] = off;
    }
    // μ_0 = ∫ (1 - t²)^a dt = √π Γ(a + 1) / Γ(a + 3/2)
    let mass = (0.5 * std::f64::consts::PI.ln() + log_gamma_signed(a + 1.0)?.log_abs
        - log_gamma_signed(a + 1.5)?.log_abs)
        .exp();
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let v0 = eig.eigenvectors[(0, j)];
            (x, mass * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    // Symmetrize so odd integrands cancel exactly.
    let m = pairs.len();
    for i in 0..m / 2 {
        let (xl, wl) = pairs[i];
        let (xr, wr) = pairs[m - 1 - i];
        let x = 0.5 * (xr - xl);
        let w = 0.5 * (wl + wr);
        pairs[i] = (-x, w);
        pairs[m - 1 - i] = (x, w);
    }
    if m % 2 == 1 {
        pairs[m / 2].0 = 0.0;
    }
    Ok(pairs.into_iter().unzip())
}

/// Desingularized rule: `n_half` Gauss–Legendre nodes on each half of [-1, 1]
/// under `t = 1 - s^p` (right) and `t = -1 + s^p` (left).
///
/// Folded weight for a node with Gauss–Legendre weight `ω` at `s`:
/// ```text
/// ω · p s^{p-1} · (s^p (2 - s^p))^{(d-3)/2}
/// ```
pub fn desingularized_rule(d: usize, n_half: usize, power: u32) -> Result<QuadratureRule> {
    check_dim(d)?;
    if n_half < 2 {
        return Err(Error::Domain(format!("quadrature needs at least 2 nodes, got {n_half}")));
    }
    if power == 0 {
        return Err(Error::Domain("substitution power must be positive".into()));
    }
    let a = (d as f64 - 3.0) / 2.0;
    let p = power as f64;
    let (s, w) = gauss_legendre_unit(n_half);
    let half: Vec<(f64, f64)> = s
        .iter()
        .zip(&w)
        .map(|(&s, &w)| {
            let gap = s.powi(power as i32);
            let jac = p * s.powi(power as i32 - 1);
            let weight = if a == 0.0 { 1.0 } else { (gap * (2.0 - gap)).powf(a) };
            (gap, w * jac * weight)
        })
        .collect();

    let mut args = Vec::with_capacity(2 * n_half);
    let mut weights = Vec::with_capacity(2 * n_half);
    for &(gap, wt) in &half {
        args.push(DotArg::above_minus_one(gap));
        weights.push(wt);
    }
    for &(gap, wt) in half.iter().rev() {
        args.push(DotArg::below_one(gap));
        weights.push(wt);
    }
    let nodes = args.iter().map(|a| a.u).collect();
    Ok(QuadratureRule {
        nodes,
        weights,
        args,
        weight_exponent: a,
        half_interval_substitution: Some(power),
        degree: 2 * n_half - 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (s, w) = gauss_legendre_unit(12);
        for deg in 0..24 {
            let q: f64 = s.iter().zip(&w).map(|(s, w)| w * s.powi(deg)).sum();
            assert!((q - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "deg {deg}");
        }
        assert!(s.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn large_gauss_legendre_is_accurate() {
        let (s, w) = gauss_legendre_unit(2000);
        let total: f64 = w.iter().sum();
        assert!((total - 1.0).abs() < 1e-13);
        let q: f64 = s.iter().zip(&w).map(|(s, w)| w * (3.0 * s).cos()).sum();
        assert!((q - (3.0f64).sin() / 3.0).abs() < 1e-13);
        assert!(s[0] > 0.0 && s[s.len() - 1] < 1.0);
    }

    #[test]
    fn spec_examples() {
        let rule = jacobi_quadrature(3, 64, false).unwrap();
        assert!((rule.integrate(|_| 1.0) - 2.0).abs() < 1e-13);
        assert!((rule.integrate(|t| t * t) - 2.0 / 3.0).abs() < 1e-13);
        let rule = jacobi_quadrature(3, 64, true).unwrap();
        assert!((rule.integrate_args(|a| a.one_minus_sq().sqrt()) - PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn plain_rule_is_exact_for_weighted_monomials() {
        // ∫ t^{2m} (1-t²)^a dt = Γ(m + 1/2) Γ(a + 1) / Γ(m + a + 3/2)
        for d in 3..=7 {
            let rule = plain_rule(d, 20).unwrap();
            let a = (d as f64 - 3.0) / 2.0;
            assert!(rule.nodes.windows(2).all(|p| p[0] < p[1]));
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            for m in 0..20 {
                let exact = (log_gamma_signed(m as f64 + 0.5).unwrap().log_abs
                    + log_gamma_signed(a + 1.0).unwrap().log_abs
                    - log_gamma_signed(m as f64 + a + 1.5).unwrap().log_abs)
                    .exp();
                let q = rule.integrate(|t| t.powi(2 * m));
                assert!((q - exact).abs() <= 1e-12 * exact, "d={d} m={m}: {q} vs {exact}");
                let odd = rule.integrate(|t| t.powi(2 * m + 1));
                assert!(odd.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn desingularized_rule_handles_half_powers() {
        // ∫ (1 - t)^{1/2} dt over [-1, 1] = (2/3) 2^{3/2}
        let rule = desingularized_rule(3, 40, 2).unwrap();
        let q = rule.integrate_args(|a| a.one_minus.sqrt());
        assert!((q - 2.0 / 3.0 * 2f64.powf(1.5)).abs() < 1e-14);
        assert!(rule.nodes.windows(2).all(|p| p[0] < p[1]));

        // quarter powers need p = 4: ∫ (1 - t)^{1/4} dt = (4/5) 2^{5/4}
        let rule = desingularized_rule(3, 40, 4).unwrap();
        let q = rule.integrate_args(|a| a.one_minus.powf(0.25));
        assert!((q - 0.8 * 2f64.powf(1.25)).abs() < 1e-13);
    }

    #[test]
    fn desingularized_rule_includes_weight() {
        // d = 4: ∫ (1 - t²)^{1/2} dt = π / 2
        let rule = desingularized_rule(4, 30, 2).unwrap();
        assert!((rule.integrate(|_| 1.0) - PI / 2.0).abs() < 1e-14);
        // d = 5: ∫ (1 - t²) dt = 4/3
        let rule = desingularized_rule(5, 30, 2).unwrap();
        assert!((rule.integrate(|_| 1.0) - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_tiny_rules() {
        assert!(jacobi_quadrature(3, 1, false).is_err());
        assert!(jacobi_quadrature(2, 10, true).is_err());
    }

    #[test]
    fn dot_arg_complements() {
        let a = DotArg::below_one(1e-20);
        assert_eq!(a.u, 1.0);
        assert_eq!(a.one_minus, 1e-20);
        let b = a.negate();
        assert_eq!(b.one_plus, 1e-20);
        assert!(DotArg::new(1.0 + 1e-13).is_ok());
        assert!(DotArg::new(1.01).is_err());
    }
}
