//! Structural invariants of the Legendre machinery, kernels, spectra and
//! regression routines, checked on random and exhaustive inputs.

use std::sync::OnceLock;

use faer::Side;
use proptest::prelude::*;

use sphere_kernels::kernels::{decay_prediction, deep_rf_minus, kernel_eval, kernel_series, KernelSpec, PowerSeries, KAPPA1_ENDPOINT};
use sphere_kernels::regress::{
    gram_matrix, krr_fit, krr_solve, Provenance, SphereDataset, TargetKind, TargetSpec, RESIDUAL_TOLERANCE,
};
use sphere_kernels::spectrum::{
    compute_spectrum, fit_decay, mu_quadrature, mu_series, trace_partial_sums, Parity, Route, SpectrumOptions,
};
use sphere_kernels::sphharm::{
    legendre_batch, legendre_norm_sq, monomial_legendre_table, n_harmonics_f64, plain_rule, sample_sphere,
};

fn specs(list: &[&str]) -> Vec<KernelSpec> {
    list.iter().map(|s| s.parse().unwrap()).collect()
}

const ALL_FAMILIES: &[&str] = &[
    "arccos0",
    "arccos1",
    "rf:L=3",
    "rf:L=5",
    "ntk:L=2",
    "ntk:L=3",
    "ntk:L=4",
    "ntk:L=3,norm=0",
    "ntk:L=2,bias=1",
    "laplace:c=1",
    "laplace:c=2.5",
    "genexp:c=1,g=0.75",
    "genexp:c=0.5,g=1.5",
    "step:L=2",
    "step:L=3",
    "gauss:c=1",
    "linear",
    "series:b=0.25/0.5/0/0.25",
];

/// Every family except GenExp with `γ > 1`, which is not positive definite on the sphere.
fn positive_definite_families() -> Vec<KernelSpec> {
    specs(ALL_FAMILIES)
        .into_iter()
        .filter(|k| !matches!(k, KernelSpec::GenExp { gamma, .. } if *gamma > 1.0))
        .collect()
}

fn series_families() -> Vec<KernelSpec> {
    specs(ALL_FAMILIES).into_iter().filter(KernelSpec::is_series_capable).collect()
}

fn long_series() -> &'static [(KernelSpec, PowerSeries)] {
    static CACHE: OnceLock<Vec<(KernelSpec, PowerSeries)>> = OnceLock::new();
    CACHE.get_or_init(|| series_families().into_iter().map(|k| {
        let s = kernel_series(&k, 4000).unwrap();
        (k, s)
    }).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn legendre_bounded_by_one(d in 3usize..6, t in -1.0f64..=1.0) {
        let p = legendre_batch(d, 80, t).unwrap();
        for v in &p {
            prop_assert!(v.abs() <= 1.0 + 1e-12);
        }
        let one = legendre_batch(d, 80, 1.0).unwrap();
        for v in &one {
            prop_assert!((v - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn legendre_ode_residual(d in 3usize..6, k in 1usize..40, t in -0.9f64..0.9) {
        let h = 1e-5;
        let p = |x: f64| legendre_batch(d, k, x).unwrap()[k];
        let d1 = (p(t + h) - p(t - h)) / (2.0 * h);
        let d2 = (p(t + h) - 2.0 * p(t) + p(t - h)) / (h * h);
        let r = (1.0 - t * t) * d2 + (1.0 - d as f64) * t * d1 + (k * (k + d - 2)) as f64 * p(t);
        prop_assert!(r.abs() <= 1e-4 * (k * k) as f64, "residual {r}");
    }

    #[test]
    fn monomials_reconstructed(d in 3usize..6, n in 0usize..=30, t in -1.0f64..=1.0) {
        let table = monomial_legendre_table(d, 30, 30).unwrap();
        let p = legendre_batch(d, 30, t).unwrap();
        let s: f64 = (0..=n).map(|k| table.get(n, k) * n_harmonics_f64(d, k) * p[k]).sum();
        prop_assert!((s - t.powi(n as i32)).abs() <= 1e-10);
    }

    #[test]
    fn nonnegative_series_kernels_are_nondecreasing_on_unit_interval(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        for spec in series_families() {
            let s = kernel_series(&spec, 64).unwrap();
            if s.is_nonnegative() {
                prop_assert!(kernel_eval(&spec, lo).unwrap() <= kernel_eval(&spec, hi).unwrap() + 1e-14, "{spec}");
            }
        }
    }

    #[test]
    fn composed_arc_cosine_kernels_are_nondecreasing(a in -1.0f64..=1.0, b in -1.0f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        for spec in specs(&["arccos0", "arccos1", "rf:L=3", "rf:L=5", "step:L=3"]) {
            prop_assert!(kernel_eval(&spec, lo).unwrap() <= kernel_eval(&spec, hi).unwrap() + 1e-14, "{spec}");
        }
    }

    #[test]
    fn series_matches_evaluation_within_tail_mass(i in 0usize..=100) {
        let t = -0.99 + 1.98 * i as f64 / 100.0;
        for (spec, s) in long_series() {
            let gap = (s.eval(t) - kernel_eval(spec, t).unwrap()).abs();
            prop_assert!(gap <= s.truncation_tail_mass().unwrap_or(0.0) + 1e-12, "{} at {t}: {gap}", spec);
        }
    }

    #[test]
    fn krr_residual_after_every_fit(seed in 0u64..1000, log_lambda in -10.0f64..0.0, n in 8usize..80) {
        let target = TargetSpec::along_first_axis(TargetKind::IndicatorCap { threshold: 0.7 }, 4).unwrap();
        let ds = SphereDataset::synthetic(&target, n, seed).unwrap();
        for spec in specs(&["ntk:L=2,bias=1", "rf:L=3", "laplace:c=1"]) {
            let k = gram_matrix(&spec, &ds.x, &ds.x).unwrap();
            let lambda = 10f64.powf(log_lambda);
            let (alpha, residual) = krr_solve(k.as_ref(), ds.labels().unwrap(), lambda).unwrap();
            prop_assert!(residual <= RESIDUAL_TOLERANCE);
            let y = ds.labels().unwrap();
            let mut worst: f64 = 0.0;
            for i in 0..n {
                let row: f64 = (0..n).map(|j| k[(i, j)] * alpha[j]).sum::<f64>() + n as f64 * lambda * alpha[i];
                worst += (row - y[i]).powi(2);
            }
            let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            prop_assert!(worst.sqrt() <= RESIDUAL_TOLERANCE * ynorm.max(1.0));
        }
    }
}

#[test]
fn ntk_dips_below_zero_on_the_negative_side() {
    // (u κ0(u) + κ1(u)) / 2 vanishes at u = -1 and is negative just inside.
    let ntk = KernelSpec::DeepNtk { depth: 2, bias: false, normalized: true };
    assert!(kernel_series(&ntk, 64).unwrap().is_nonnegative());
    assert_eq!(kernel_eval(&ntk, -1.0).unwrap(), 0.0);
    assert!(kernel_eval(&ntk, -0.8).unwrap() < -0.06);
}

#[test]
fn legendre_orthogonality() {
    for d in 3..6 {
        let rule = plain_rule(d, 64).unwrap();
        for j in 0..=40 {
            for k in j..=40 {
                let v = rule.integrate(|t| {
                    let p = legendre_batch(d, 40, t).unwrap();
                    p[j] * p[k]
                });
                if j == k {
                    let norm = legendre_norm_sq(d, k).unwrap();
                    assert!((v - norm).abs() <= 1e-10 * norm, "d={d} k={k}");
                } else {
                    assert!(v.abs() <= 1e-10, "d={d} j={j} k={k}: {v}");
                }
            }
        }
    }
}

#[test]
fn addition_formula_by_monte_carlo() {
    let d = 3;
    let n = 1_000_000;
    let w = sample_sphere(d, n, 2024).unwrap();
    let xy = sample_sphere(d, 2, 7).unwrap();
    let (x, y) = (&xy[0], &xy[1]);
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(s, t)| s * t).sum::<f64>().clamp(-1.0, 1.0);
    let pxy = legendre_batch(d, 4, dot(x, y)).unwrap();
    let mut sums = [[0.0f64; 5]; 5];
    let mut squares = [[0.0f64; 5]; 5];
    for wi in &w {
        let px = legendre_batch(d, 4, dot(wi, x)).unwrap();
        let py = legendre_batch(d, 4, dot(wi, y)).unwrap();
        for j in 0..5 {
            for k in 0..5 {
                let v = px[j] * py[k];
                sums[j][k] += v;
                squares[j][k] += v * v;
            }
        }
    }
    for j in 0..5 {
        for k in 0..5 {
            let mean = sums[j][k] / n as f64;
            let se = ((squares[j][k] / n as f64 - mean * mean) / n as f64).sqrt();
            let want = if j == k { pxy[k] / n_harmonics_f64(d, k) } else { 0.0 };
            assert!((mean - want).abs() <= 5.0 * se.max(1e-12), "j={j} k={k}: {mean} vs {want} (se {se})");
        }
    }
}

#[test]
fn deep_rf_minus_constant_strictly_inside() {
    for depth in 3..12 {
        let (_, c) = deep_rf_minus(depth);
        assert!(c > 0.0 && c < KAPPA1_ENDPOINT, "L={depth}: {c}");
    }
}

#[test]
fn ntk_depth_identity() {
    for depth in 2..=8 {
        let spec = KernelSpec::DeepNtk { depth, bias: false, normalized: false };
        assert_eq!(kernel_eval(&spec, 1.0).unwrap(), depth as f64);
    }
}

#[test]
fn dual_routes_agree() {
    let opts = SpectrumOptions::default();
    for spec in series_families() {
        for d in 3..6 {
            let s = mu_series(&spec, d, 30, opts.series_order, true).unwrap();
            let q = mu_quadrature(&spec, d, 30, None).unwrap();
            for k in 0..=30 {
                let tol = (1e-4 * q.mu[k].abs()).max(1e-8);
                assert!((s.mu[k] - q.mu[k]).abs() <= tol, "{spec} d={d} k={k}: {} vs {}", s.mu[k], q.mu[k]);
            }
        }
    }
}

#[test]
fn spectra_nonnegative_and_traces_bounded() {
    for spec in positive_definite_families() {
        for d in 3..6 {
            let s = mu_quadrature(&spec, d, 80, None).unwrap();
            for (k, m) in s.mu.iter().enumerate() {
                assert!(*m >= -1e-10, "{spec} d={d} k={k}: {m}");
            }
            let trace = trace_partial_sums(&s);
            assert!(trace.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{spec} d={d}");
            assert!(*trace.last().unwrap() <= spec.value_at_one() * (1.0 + 1e-10), "{spec} d={d}");
        }
    }
}

/// `Σ_{k>K} C k^e N(d, k)` from the predicted law, summed far enough that the rest is negligible.
fn predicted_tail(p: &sphere_kernels::DecayPrediction, d: usize, k_from: usize) -> f64 {
    if p.super_polynomial {
        return 0.0;
    }
    (k_from + 1..=4_000_000).map(|k| p.predict(k) * n_harmonics_f64(d, k)).sum()
}

#[test]
fn trace_nearly_complete_for_fast_decay() {
    for spec in specs(ALL_FAMILIES) {
        let Ok(p) = decay_prediction(&spec, 3) else { continue };
        if p.exponent > -3.0 {
            continue;
        }
        let s = mu_quadrature(&spec, 3, 400, None).unwrap();
        let defect = spec.value_at_one() - *trace_partial_sums(&s).last().unwrap();
        let tail = predicted_tail(&p, 3, 400);
        if tail < 1e-3 * spec.value_at_one() {
            assert!(defect <= 1e-3 * spec.value_at_one(), "{spec}: defect {defect}");
        } else {
            // slow tails (Laplace with c >= 1) stay above 1e-3 but follow the predicted law
            assert!((defect / tail - 1.0).abs() <= 0.2, "{spec}: defect {defect}, predicted {tail}");
        }
    }
}

#[test]
fn parity_structure_of_shallow_and_deep_kernels() {
    let a1 = mu_quadrature(&KernelSpec::ArcCos1, 3, 80, None).unwrap();
    for k in (3..=80).step_by(2) {
        assert!(a1.mu[k].abs() <= 1e-10, "k={k}");
    }
    let a0 = mu_quadrature(&KernelSpec::ArcCos0, 3, 81, None).unwrap();
    let ratios: Vec<f64> = (5..=40).map(|m| a0.mu[2 * m].abs() / a0.mu[2 * m + 1]).collect();
    assert!(ratios.iter().all(|r| *r < 1e-10), "{ratios:?}");
    for spec in specs(&["rf:L=3", "rf:L=4", "ntk:L=3", "ntk:L=4"]) {
        let p = decay_prediction(&spec, 3).unwrap();
        let s = mu_quadrature(&spec, 3, 61, None).unwrap();
        for k in 15..=61 {
            assert!(s.mu[k] >= 0.5 * p.predict(k), "{spec} k={k}");
        }
    }
}

#[test]
fn predicted_constants_match() {
    let cases = [
        ("arccos0", Some(Parity::Odd)),
        ("arccos1", Some(Parity::Even)),
        ("laplace:c=1", None),
        ("ntk:L=2", Some(Parity::Even)),
        ("ntk:L=3", None),
        ("ntk:L=4", None),
    ];
    for (text, only) in cases {
        let spec: KernelSpec = text.parse().unwrap();
        let p = decay_prediction(&spec, 3).unwrap();
        let s = compute_spectrum(&spec, 3, 80, Route::Quadrature, &SpectrumOptions::default()).unwrap();
        for parity in [Parity::Even, Parity::Odd] {
            if only.is_some_and(|o| o != parity) {
                continue;
            }
            let ks: Vec<usize> = (0..=80).rev().filter(|k| parity.matches(*k)).take(10).collect();
            let r = ks.iter().map(|&k| s.mu[k] / p.predict(k)).sum::<f64>() / ks.len() as f64;
            assert!((0.7..=1.3).contains(&r), "{text} {parity}: {r}");
        }
    }
}

#[test]
fn laplace_and_ntk_slopes_agree() {
    let opts = SpectrumOptions::default();
    for c in [0.5, 1.0, 2.0] {
        let lap = compute_spectrum(&KernelSpec::Laplace { c }, 3, 61, Route::Quadrature, &opts).unwrap();
        for depth in 3..=4 {
            let ntk = compute_spectrum(&KernelSpec::DeepNtk { depth, bias: false, normalized: true }, 3, 61, Route::Quadrature, &opts)
                .unwrap();
            for parity in [Parity::Even, Parity::Odd] {
                let a = fit_decay(&lap, parity, 15, 61).unwrap().slope;
                let b = fit_decay(&ntk, parity, 15, 61).unwrap().slope;
                assert!((a - b).abs() <= 0.15, "c={c} L={depth} {parity}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn gram_matrices_symmetric_psd() {
    for d in [3, 4] {
        let x = sample_sphere(d, 200, 10 + d as u64).unwrap();
        for spec in positive_definite_families() {
            let g = gram_matrix(&spec, &x, &x).unwrap();
            for i in 0..200 {
                for j in 0..i {
                    assert_eq!(g[(i, j)], g[(j, i)]);
                }
            }
            let trace: f64 = (0..200).map(|i| g[(i, i)]).sum();
            let eig = g.self_adjoint_eigenvalues(Side::Lower).unwrap();
            assert!(eig[0] >= -1e-8 * trace / 200.0, "{spec} d={d}: {}", eig[0]);
        }
    }
}

#[test]
fn genexp_above_one_has_negative_eigenvalues() {
    // e^{-c (1 - u)^γ} = e^{-c 2^{-γ} ‖x - y‖^{2γ}} on the sphere, positive definite only for γ <= 1
    let spec: KernelSpec = "genexp:c=0.5,g=1.5".parse().unwrap();
    let s = mu_quadrature(&spec, 3, 10, None).unwrap();
    assert!(s.mu[3] < -1e-3, "{}", s.mu[3]);
    let x = sample_sphere(3, 200, 13).unwrap();
    let eig = gram_matrix(&spec, &x, &x).unwrap().self_adjoint_eigenvalues(Side::Lower).unwrap();
    assert!(eig[0] < -1e-3);
}

#[test]
fn even_kernel_gives_even_predictions_on_symmetric_designs() {
    let target = TargetSpec::along_first_axis(TargetKind::DoubleExp, 4).unwrap();
    let half = sample_sphere(4, 100, 5).unwrap();
    let x: Vec<Vec<f64>> = half.iter().cloned().chain(half.iter().map(|r| r.iter().map(|v| -v).collect())).collect();
    let y = sphere_kernels::regress::target_eval(&target, &x).unwrap();
    let ds = SphereDataset::new(x, Some(y), Provenance::Synthetic { seed: 5, target: "f2".into() }).unwrap();
    let model = krr_fit(&KernelSpec::ArcCos1, &ds, 1e-4).unwrap();
    let probe = sample_sphere(4, 300, 6).unwrap();
    let neg: Vec<Vec<f64>> = probe.iter().map(|r| r.iter().map(|v| -v).collect()).collect();
    let a = model.predict(&probe).unwrap();
    let b = model.predict(&neg).unwrap();
    let worst = a.iter().zip(&b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-6, "{worst}");
}
