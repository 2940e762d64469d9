//! Leading non-integer terms of `κ` at `u = ±1` and the decay they predict.
//!
//! ```text
//! κ(1 - t)  = p_{+1}(t) + c_+ t^ν + ...
//! κ(-1 + t) = p_{-1}(t) + c_- t^ν + ...
//! ```
//! Then for large `k`, with `C(d, ν)` from [`asymptotic_constant`]:
//! ```text
//! μ_k ≈ (c_+ + c_-) C(d, ν) / 2^{ν+1} · k^{-d-2ν+1}   (k even)
//! μ_k ≈ (c_+ - c_-) C(d, ν) / 2^{ν+1} · k^{-d-2ν+1}   (k odd)
//! ```

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernels::eval::{kappa0_arg, kappa1_arg};
use crate::kernels::spec::{ntk_value_at_one, KernelSpec};
use crate::spectrum::{asymptotic_constant, Parity};
use crate::sphharm::DotArg;

/// `√2/π`, the `t^{1/2}` coefficient of `1 - κ0(1 - t)`.
pub const KAPPA0_ENDPOINT: f64 = std::f64::consts::SQRT_2 / PI;
/// `2√2/(3π)`, the `t^{3/2}` coefficient of `κ1(1 - t)` and `κ1(-1 + t)`.
pub const KAPPA1_ENDPOINT: f64 = 2.0 * std::f64::consts::SQRT_2 / (3.0 * PI);

#[derive(Debug, Clone, PartialEq)]
pub struct EndpointExpansion {
    pub nu: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    /// Degree of the polynomial parts `p_{±1}` preceding `t^ν`.
    pub poly_degree_hint: usize,
    /// `κ` is C^∞ on [-1, 1]; `nu`, `c_plus` and `c_minus` are meaningless.
    pub super_smooth: bool,
}

impl EndpointExpansion {
    fn new(nu: f64, c_plus: f64, c_minus: f64) -> EndpointExpansion {
        EndpointExpansion { nu, c_plus, c_minus, poly_degree_hint: nu.floor() as usize, super_smooth: false }
    }

    fn smooth() -> EndpointExpansion {
        EndpointExpansion { nu: f64::INFINITY, c_plus: 0.0, c_minus: 0.0, poly_degree_hint: 0, super_smooth: true }
    }

    /// Power `p` of the `t = ±(1 - s^p)` substitution that makes `t^ν` (and
    /// its integer multiples) polynomial in `s`: the smallest even `p <= 64`
    /// with `p ν` an integer, else the smallest even `p` with `p ν >= 8`.
    pub fn substitution_power(&self) -> u32 {
        if self.super_smooth {
            return 2;
        }
        for p in (2..=64u32).step_by(2) {
            let x = p as f64 * self.nu;
            if (x - x.round()).abs() < 1e-9 {
                return p;
            }
        }
        let mut p = 2u32;
        while (p as f64) * self.nu < 8.0 && p < 64 {
            p += 2;
        }
        p
    }
}

/// Expansion of `κ` at both endpoints for every family with a known form.
pub fn endpoint_expansion(spec: &KernelSpec) -> Result<EndpointExpansion> {
    spec.validate()?;
    let c0 = KAPPA0_ENDPOINT;
    let c1 = KAPPA1_ENDPOINT;
    let exp = match spec {
        KernelSpec::ArcCos0 => EndpointExpansion::new(0.5, -c0, c0),
        KernelSpec::ArcCos1 => EndpointExpansion::new(1.5, c1, c1),
        KernelSpec::DeepRf { depth } => {
            let (_, c_minus) = deep_rf_minus(*depth);
            EndpointExpansion::new(1.5, (*depth - 1) as f64 * c1, c_minus)
        }
        KernelSpec::DeepNtk { depth, bias, normalized } => {
            let (c_plus, c_minus) = ntk_constants(*depth, *bias);
            let scale = if *normalized { 1.0 / ntk_value_at_one(*depth, *bias) } else { 1.0 };
            EndpointExpansion::new(0.5, c_plus * scale, c_minus * scale)
        }
        KernelSpec::Laplace { c } => EndpointExpansion::new(0.5, -c, 0.0),
        KernelSpec::GenExp { c, gamma } => EndpointExpansion::new(*gamma, -c, 0.0),
        KernelSpec::DeepStep { depth } => {
            // κ0 applied L - 1 times: 1 - c0^{Σ_{j=0}^{L-2} 2^{-j}} t^{2^{-(L-1)}}
            let steps = *depth - 1;
            let power: f64 = (0..steps).map(|j| 0.5f64.powi(j as i32)).sum();
            let nu = 0.5f64.powi(steps as i32);
            let c_minus = if *depth == 2 { c0 } else { 0.0 };
            EndpointExpansion::new(nu, -c0.powf(power), c_minus)
        }
        KernelSpec::GaussianSphere { .. } | KernelSpec::Linear => EndpointExpansion::smooth(),
        KernelSpec::CustomSeries(_) => return Err(Error::ExpansionUnknown(spec.to_string())),
    };
    Ok(exp)
}

/// `(b_L, c_L)` with `κ^L(-1 + t) = b_L + c_L t^{3/2} + ...`:
/// ```text
/// b_2 = 0,  c_2 = 2√2/(3π),  b_ℓ = κ1(b_{ℓ-1}),  c_ℓ = κ0(b_{ℓ-1}) c_{ℓ-1}
/// ```
/// using `κ1' = κ0`.
pub fn deep_rf_minus(depth: usize) -> (f64, f64) {
    let mut b = DotArg { u: 0.0, one_minus: 1.0, one_plus: 1.0 };
    let mut c = KAPPA1_ENDPOINT;
    for _ in 3..=depth {
        c *= kappa0_arg(&b).u;
        b = kappa1_arg(&b);
    }
    (b.u, c)
}

/// Unnormalized `t^{1/2}` coefficients of the NTK at `+1` and `-1`.
///
/// Writing `Θ^ℓ(1 - t) = A_ℓ - B_ℓ √t + O(t)` and
/// `Θ^ℓ(-1 + t) = α_ℓ + β_ℓ √t + O(t)`, the layer recursion gives
/// ```text
/// A_ℓ = A_{ℓ-1} + 1 (+1),   B_ℓ = B_{ℓ-1} + (√2/π) A_{ℓ-1}
/// α_ℓ = α_{ℓ-1} v_{ℓ-1} + b_ℓ (+1),   β_ℓ = β_{ℓ-1} v_{ℓ-1} + α_{ℓ-1} s_{ℓ-1}
/// ```
/// where `κ0(κ^{ℓ-1}(-1 + t)) = v_{ℓ-1} + s_{ℓ-1} √t + ...`: `(0, √2/π)` for
/// `ℓ = 2`, `(κ0(b_{ℓ-1}), 0)` afterwards. The `(+1)` terms are the biases of
/// hidden layers.
pub fn ntk_constants(depth: usize, bias: bool) -> (f64, f64) {
    let c = KAPPA0_ENDPOINT;
    let extra = if bias { 1.0 } else { 0.0 };
    let (mut a, mut b) = (1.0 + extra, 0.0);
    let (mut alpha, mut beta) = (-1.0 + extra, 0.0);
    // κ^{ℓ-1}(-1) for ℓ = 2 is -1
    let mut k_prev = DotArg { u: -1.0, one_minus: 2.0, one_plus: 0.0 };
    for layer in 2..=depth {
        let hidden = if layer < depth { extra } else { 0.0 };
        b += c * a;
        a += 1.0 + hidden;
        let k_next = kappa1_arg(&k_prev);
        let (v, s) = if layer == 2 { (0.0, c) } else { (kappa0_arg(&k_prev).u, 0.0) };
        beta = beta * v + alpha * s;
        alpha = alpha * v + k_next.u + hidden;
        k_prev = k_next;
    }
    (-b, beta)
}

/// Asymptotic law `μ_k ≈ const · k^{exponent}` for each parity.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayPrediction {
    /// `-(d + 2ν - 1)`; `-∞` for super-polynomial decay.
    pub exponent: f64,
    pub const_even: f64,
    pub const_odd: f64,
    /// Parity whose leading term cancels (`|c_+| = |c_-|`).
    pub vanishing_parity: Option<Parity>,
    pub super_polynomial: bool,
    pub expansion: EndpointExpansion,
}

impl DecayPrediction {
    pub fn constant(&self, parity: Parity) -> f64 {
        match parity {
            Parity::Even => self.const_even,
            Parity::Odd => self.const_odd,
        }
    }

    /// Predicted `μ_k` for large `k`.
    pub fn predict(&self, k: usize) -> f64 {
        if self.super_polynomial {
            return 0.0;
        }
        self.constant(Parity::of(k)) * (k as f64).powf(self.exponent)
    }
}

/// Decay law for `κ` in dimension `d`.
pub fn decay_prediction(spec: &KernelSpec, d: usize) -> Result<DecayPrediction> {
    crate::sphharm::SphereGeometry::new(d)?;
    let expansion = endpoint_expansion(spec)?;
    if expansion.super_smooth {
        return Ok(DecayPrediction {
            exponent: f64::NEG_INFINITY,
            const_even: 0.0,
            const_odd: 0.0,
            vanishing_parity: None,
            super_polynomial: true,
            expansion,
        });
    }
    let nu = expansion.nu;
    let scale = asymptotic_constant(d, nu)? / 2f64.powf(nu + 1.0);
    let (cp, cm) = (expansion.c_plus, expansion.c_minus);
    let tol = 1e-12 * cp.abs().max(cm.abs());
    let vanishing_parity = if (cp + cm).abs() <= tol {
        Some(Parity::Even)
    } else if (cp - cm).abs() <= tol {
        Some(Parity::Odd)
    } else {
        None
    };
    let zero_if = |p: Parity, v: f64| if vanishing_parity == Some(p) { 0.0 } else { v };
    Ok(DecayPrediction {
        exponent: -(d as f64 + 2.0 * nu - 1.0),
        const_even: zero_if(Parity::Even, (cp + cm) * scale),
        const_odd: zero_if(Parity::Odd, (cp - cm) * scale),
        vanishing_parity,
        super_polynomial: false,
        expansion,
    })
}
