//! Pointwise evaluation of every kernel family.
//!
//! Compositions such as `κ1 ∘ κ1 ∘ κ1` are evaluated on [`DotArg`] values, so
//! each layer sees its argument's distance to `±1` without cancellation. This
//! keeps endpoint behaviour like `κ0(1 - t) ≈ 1 - (√2/π) √t` accurate down to
//! `t ~ 1e-300`, which the desingularized quadrature relies on.

use std::f64::consts::PI;

use crate::error::Result;
use crate::kernels::spec::{ntk_value_at_one, KernelSpec};
use crate::sphharm::DotArg;

/// Angle `θ = arccos(u)` read from the nearer complement.
fn angle(a: &DotArg) -> f64 {
    if a.u >= 0.0 {
        2.0 * (0.5 * a.one_minus).sqrt().asin()
    } else {
        PI - 2.0 * (0.5 * a.one_plus).sqrt().asin()
    }
}

/// `sin x - x cos x`, by its Taylor series when `x` is small.
fn sin_minus_x_cos(x: f64) -> f64 {
    if x < 0.5 {
        // Σ_{j≥1} (-1)^{j+1} 2j x^{2j+1} / (2j+1)!
        let x2 = x * x;
        let mut term = x * x2 / 6.0; // x³/3!
        let mut sum = 0.0;
        for j in 1..12 {
            let jf = j as f64;
            sum += 2.0 * jf * term;
            term *= -x2 / ((2.0 * jf + 2.0) * (2.0 * jf + 3.0));
        }
        sum
    } else {
        x.sin() - x * x.cos()
    }
}

/// `κ0(u) = 1 - θ/π` together with its complements.
pub fn kappa0_arg(a: &DotArg) -> DotArg {
    let theta = angle(a);
    let one_minus = theta / PI;
    // θ near π: π - θ is computed directly from 1 + u.
    let value = if a.u >= 0.0 { 1.0 - one_minus } else { 2.0 * (0.5 * a.one_plus).sqrt().asin() / PI };
    DotArg { u: value, one_minus, one_plus: 1.0 + value }
}

/// `κ1(u) = (u (π - θ) + sin θ) / π` together with its complements.
///
/// Near `u = 1`: `1 - κ1 = (1 - u) - (sin θ - θ cos θ)/π`.
/// Near `u = -1`, with `ε = π - θ`: `κ1 = (sin ε - ε cos ε)/π`.
pub fn kappa1_arg(a: &DotArg) -> DotArg {
    if a.u >= 0.0 {
        let theta = angle(a);
        let one_minus = a.one_minus - sin_minus_x_cos(theta) / PI;
        DotArg { u: 1.0 - one_minus, one_minus, one_plus: 2.0 - one_minus }
    } else {
        let eps = 2.0 * (0.5 * a.one_plus).sqrt().asin();
        let value = sin_minus_x_cos(eps) / PI;
        DotArg { u: value, one_minus: 1.0 - value, one_plus: 1.0 + value }
    }
}

/// `κ0(u) = (π - arccos u)/π`.
pub fn kappa0_eval(u: f64) -> Result<f64> {
    Ok(kappa0_arg(&DotArg::new(u)?).u)
}

/// `κ1(u) = (u (π - arccos u) + √(1 - u²))/π`.
pub fn kappa1_eval(u: f64) -> Result<f64> {
    Ok(kappa1_arg(&DotArg::new(u)?).u)
}

/// `κ^ℓ = κ1 ∘ ... ∘ κ1` applied `depth - 1` times.
pub(crate) fn deep_rf_arg(a: &DotArg, depth: usize) -> DotArg {
    (1..depth).fold(*a, |x, _| kappa1_arg(&x))
}

/// ReLU NTK by the layer recursion
/// ```text
/// Θ^1 = u (+1 with bias),   Θ^ℓ = Θ^{ℓ-1} κ0(κ^{ℓ-1}) + κ^ℓ (+1 with bias, ℓ < L)
/// ```
/// with `κ^1 = u`, `κ^ℓ = κ1(κ^{ℓ-1})`. Unnormalized.
pub(crate) fn ntk_raw(a: &DotArg, depth: usize, bias: bool) -> f64 {
    let b = if bias { 1.0 } else { 0.0 };
    let mut theta = a.u + b;
    let mut k = *a;
    for layer in 2..=depth {
        let next = kappa1_arg(&k);
        theta = theta * kappa0_arg(&k).u + next.u;
        if layer < depth {
            theta += b;
        }
        k = next;
    }
    theta
}

/// Evaluate `κ` at a point carrying its endpoint complements.
pub fn eval_arg(spec: &KernelSpec, a: &DotArg) -> f64 {
    match spec {
        KernelSpec::ArcCos0 => kappa0_arg(a).u,
        KernelSpec::ArcCos1 => kappa1_arg(a).u,
        KernelSpec::DeepRf { depth } => deep_rf_arg(a, *depth).u,
        KernelSpec::DeepStep { depth } => (1..*depth).fold(*a, |x, _| kappa0_arg(&x)).u,
        KernelSpec::DeepNtk { depth, bias, normalized } => {
            let v = ntk_raw(a, *depth, *bias);
            if *normalized {
                v / ntk_value_at_one(*depth, *bias)
            } else {
                v
            }
        }
        KernelSpec::Laplace { c } => (-c * a.one_minus.sqrt()).exp(),
        KernelSpec::GenExp { c, gamma } => (-c * a.one_minus.powf(*gamma)).exp(),
        KernelSpec::GaussianSphere { c } => (-c * a.one_minus).exp(),
        KernelSpec::Linear => a.u,
        KernelSpec::CustomSeries(b) => b.iter().rev().fold(0.0, |acc, &x| acc * a.u + x),
    }
}

/// `κ(u)` for a plain inner product; `|u|` may exceed 1 by at most `1e-12`.
pub fn kernel_eval(spec: &KernelSpec, u: f64) -> Result<f64> {
    Ok(eval_arg(spec, &DotArg::new(u)?))
}

/// Smooth families extended past [-1, 1], for finite differences at the endpoints.
pub(crate) fn eval_smooth_unchecked(spec: &KernelSpec, u: f64) -> Option<f64> {
    match spec {
        KernelSpec::GaussianSphere { c } => Some((-c * (1.0 - u)).exp()),
        KernelSpec::Linear => Some(u),
        KernelSpec::CustomSeries(b) => Some(b.iter().rev().fold(0.0, |acc, &x| acc * u + x)),
        _ => None,
    }
}
