//! Subcommand implementations; each returns the text of its single output.

use serde::Serialize;
use serde_json::json;

use sphere_kernels::kernels::{decay_prediction, kernel_eval, KernelSpec};
use sphere_kernels::regress::{
    experiment_random_features, experiment_synthetic, log_grid, Activation, CurveTable, KrrExperiment, Protocol,
    RfExperiment, TargetKind, TargetSpec, WidthSchedule,
};
use sphere_kernels::spectrum::{
    compute_spectrum, fit_decay, mercer_reconstruct, trace_partial_sums, Parity, Route, Spectrum, SpectrumOptions,
};
use sphere_kernels::{Error, SphereGeometry};

use crate::config::{parse_list, parse_range, Settings};
use crate::{CliError, Format};

/// Slope below which a super-polynomial family passes the decay check.
pub const SUPER_POLY_SLOPE: f64 = -8.0;

fn kernel(settings: &mut Settings, flag: Option<String>) -> Result<KernelSpec, CliError> {
    let text: String = settings.require("kernel", flag)?;
    let spec: KernelSpec = text.parse()?;
    spec.validate()?;
    Ok(spec)
}

fn dimension(settings: &mut Settings, flag: Option<usize>, default: usize) -> Result<usize, CliError> {
    let d = settings.get_or("d", flag, default)?;
    SphereGeometry::new(d)?;
    Ok(d)
}

fn route(settings: &mut Settings, flag: Option<String>) -> Result<Route, CliError> {
    let text = settings.get_or("route", flag, "auto".to_string())?;
    Ok(text.parse()?)
}

fn json_only(format: Format, command: &str) -> Result<(), CliError> {
    match format {
        Format::Json => Ok(()),
        Format::Csv => Err(CliError::usage(format!("{command} writes JSON only"))),
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub struct SpectrumInput {
    pub kernel: Option<String>,
    pub d: Option<usize>,
    pub kmax: Option<usize>,
    pub route: Option<String>,
    pub series_order: Option<usize>,
    pub nodes: Option<usize>,
}

fn options(settings: &mut Settings, series_order: Option<usize>, nodes: Option<usize>) -> Result<SpectrumOptions, CliError> {
    let default = SpectrumOptions::default();
    Ok(SpectrumOptions {
        series_order: settings.get_or("series-order", series_order, default.series_order)?,
        nodes_per_half: settings.get("nodes", nodes)?,
        ..default
    })
}

fn positive_kmax(kmax: usize) -> Result<usize, CliError> {
    if kmax == 0 {
        return Err(CliError::usage("kmax must be at least 1".into()));
    }
    Ok(kmax)
}

pub fn spectrum(input: SpectrumInput, settings: &mut Settings, format: Format) -> Result<String, CliError> {
    let spec = kernel(settings, input.kernel)?;
    let d = dimension(settings, input.d, 3)?;
    let kmax = positive_kmax(settings.get_or("kmax", input.kmax, 50usize)?)?;
    let route = route(settings, input.route)?;
    let opts = options(settings, input.series_order, input.nodes)?;
    settings.finish()?;
    let s = compute_spectrum(&spec, d, kmax, route, &opts)?;
    Ok(match format {
        Format::Csv => s.to_csv(),
        Format::Json => {
            let mut t = s.to_json();
            t.push('\n');
            t
        }
    })
}

pub struct DecayInput {
    pub kernel: Option<String>,
    pub d: Option<usize>,
    pub kmax: Option<usize>,
    pub route: Option<String>,
    pub fit_range: Option<String>,
    pub tolerance: Option<f64>,
}

#[derive(Serialize)]
struct ParityReport {
    parity: Parity,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r_squared: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    predicted_constant: Option<f64>,
    /// `μ_k / (C k^e)` at the largest `k` of the range and averaged over the range.
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio_last: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pass: Option<bool>,
}

pub fn decay(input: DecayInput, settings: &mut Settings, format: Format) -> Result<String, CliError> {
    json_only(format, "decay")?;
    let spec = kernel(settings, input.kernel)?;
    let d = dimension(settings, input.d, 3)?;
    let (lo, hi) = parse_range(&settings.get_or("fit-range", input.fit_range, "15:61".to_string())?)?;
    let kmax = settings.get_or("kmax", input.kmax, hi)?;
    if kmax < hi {
        return Err(CliError::usage(format!("kmax {kmax} is below the fit range end {hi}")));
    }
    let route = route(settings, input.route)?;
    let tolerance = settings.get_or("tolerance", input.tolerance, 0.2)?;
    let opts = options(settings, None, None)?;
    settings.finish()?;
    let prediction = match decay_prediction(&spec, d) {
        Ok(p) => Some(p),
        Err(Error::ExpansionUnknown(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let s = compute_spectrum(&spec, d, kmax, route, &opts)?;
    let mut parities = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        parities.push(parity_report(&s, parity, lo, hi, prediction.as_ref(), tolerance)?);
    }
    let checked: Vec<bool> = parities.iter().filter_map(|p| p.pass).collect();
    let pass = (!checked.is_empty() && prediction.is_some()).then(|| checked.iter().all(|&b| b));
    let predicted = prediction.as_ref().map(|p| {
        json!({
            "exponent": (!p.super_polynomial).then_some(p.exponent),
            "super_polynomial": p.super_polynomial,
            "const_even": (!p.super_polynomial).then_some(p.const_even),
            "const_odd": (!p.super_polynomial).then_some(p.const_odd),
            "vanishing_parity": p.vanishing_parity,
        })
    });
    Ok(pretty(&json!({
        "kernel": spec.to_string(),
        "d": d,
        "method": s.method,
        "fit_range": [lo, hi],
        "tolerance": tolerance,
        "predicted": predicted,
        "parities": parities,
        "pass": pass,
    })))
}

fn parity_report(
    s: &Spectrum,
    parity: Parity,
    lo: usize,
    hi: usize,
    prediction: Option<&sphere_kernels::DecayPrediction>,
    tolerance: f64,
) -> Result<ParityReport, CliError> {
    let fit = match fit_decay(s, parity, lo, hi) {
        Ok(f) => f,
        Err(Error::Fit { .. }) => {
            return Ok(ParityReport {
                parity,
                status: "parity-vanishing",
                slope: None,
                r_squared: None,
                predicted_constant: None,
                ratio_last: None,
                ratio_mean: None,
                pass: None,
            })
        }
        Err(e) => return Err(e.into()),
    };
    let mut report = ParityReport {
        parity,
        status: "fitted",
        slope: Some(fit.slope),
        r_squared: Some(fit.r_squared),
        predicted_constant: None,
        ratio_last: None,
        ratio_mean: None,
        pass: None,
    };
    if let Some(p) = prediction {
        if p.super_polynomial {
            report.pass = Some(fit.slope <= SUPER_POLY_SLOPE);
        } else {
            let c = p.constant(parity);
            let ks: Vec<usize> = (lo..=hi).filter(|&k| k > 0 && parity.matches(k)).collect();
            let ratio = |k: usize| s.mu[k] / p.predict(k);
            report.predicted_constant = Some(c);
            if c != 0.0 {
                report.ratio_last = ks.last().map(|&k| ratio(k));
                report.ratio_mean = Some(ks.iter().map(|&k| ratio(k)).sum::<f64>() / ks.len() as f64);
            }
            report.pass = Some((fit.slope - p.exponent).abs() <= tolerance);
        }
    }
    Ok(report)
}

pub struct PredictInput {
    pub kernel: Option<String>,
    pub d: Option<usize>,
    pub kmax: Option<usize>,
}

pub fn predict(input: PredictInput, settings: &mut Settings, format: Format) -> Result<String, CliError> {
    json_only(format, "predict")?;
    let spec = kernel(settings, input.kernel)?;
    let d = dimension(settings, input.d, 3)?;
    let kmax = settings.get("kmax", input.kmax)?;
    settings.finish()?;
    let p = decay_prediction(&spec, d)?;
    let e = &p.expansion;
    let expansion = (!e.super_smooth).then(|| json!({ "nu": e.nu, "c_plus": e.c_plus, "c_minus": e.c_minus }));
    let mu: Option<Vec<f64>> = kmax.map(|k| (1..=k).map(|k| p.predict(k)).collect());
    Ok(pretty(&json!({
        "kernel": spec.to_string(),
        "d": d,
        "super_polynomial": p.super_polynomial,
        "exponent": (!p.super_polynomial).then_some(p.exponent),
        "const_even": (!p.super_polynomial).then_some(p.const_even),
        "const_odd": (!p.super_polynomial).then_some(p.const_odd),
        "vanishing_parity": p.vanishing_parity,
        "expansion": expansion,
        "predicted_mu_from_k1": mu,
    })))
}

pub struct MercerInput {
    pub kernel: Option<String>,
    pub d: Option<usize>,
    pub kmax: Option<usize>,
    pub route: Option<String>,
    pub t_max: Option<f64>,
    pub grid: Option<usize>,
}

pub fn mercer(input: MercerInput, settings: &mut Settings, format: Format) -> Result<String, CliError> {
    json_only(format, "mercer")?;
    let spec = kernel(settings, input.kernel)?;
    let d = dimension(settings, input.d, 3)?;
    let kmax = positive_kmax(settings.get_or("kmax", input.kmax, 400usize)?)?;
    let route = route(settings, input.route)?;
    let t_max = settings.get_or("t-max", input.t_max, 0.9)?;
    let grid = settings.get_or("grid", input.grid, 181usize)?;
    let opts = options(settings, None, None)?;
    settings.finish()?;
    if !(0.0..=1.0).contains(&t_max) || grid < 2 {
        return Err(CliError::usage("need 0 <= t-max <= 1 and at least 2 grid points".into()));
    }
    let s = compute_spectrum(&spec, d, kmax, route, &opts)?;
    let mut max_error: f64 = 0.0;
    let mut worst_t = -t_max;
    for i in 0..grid {
        let t = -t_max + 2.0 * t_max * i as f64 / (grid - 1) as f64;
        let err = (mercer_reconstruct(&s, t)? - kernel_eval(&spec, t)?).abs();
        if err > max_error {
            max_error = err;
            worst_t = t;
        }
    }
    let trace = *trace_partial_sums(&s).last().expect("nonempty spectrum");
    let at_one = spec.value_at_one();
    Ok(pretty(&json!({
        "kernel": spec.to_string(),
        "d": d,
        "kmax": kmax,
        "method": s.method,
        "grid": { "t_max": t_max, "points": grid },
        "max_error": max_error,
        "worst_t": worst_t,
        "trace": trace,
        "kappa_at_one": at_one,
        "trace_defect": at_one - trace,
        "trace_fraction": trace / at_one,
    })))
}

pub struct ProtocolInput {
    pub target: Option<String>,
    pub d: Option<usize>,
    pub n: Option<String>,
    pub lambda_grid: Option<String>,
    pub lambda_min: Option<String>,
    pub test_size: Option<usize>,
    pub replicates: Option<usize>,
}

fn protocol(input: ProtocolInput, settings: &mut Settings, seed: u64, default_target: &str) -> Result<Protocol, CliError> {
    let kind: TargetKind = settings.get_or("target", input.target, default_target.to_string())?.parse()?;
    let d = settings.get_or("d", input.d, 4usize)?;
    let target = TargetSpec::along_first_axis(kind, d)?;
    let mut p = Protocol::standard(target);
    if let Some(n) = settings.get::<String>("n", input.n)? {
        p.n_grid = parse_list(&n, "sample size")?;
    }
    if let Some(g) = settings.get::<String>("lambda-grid", input.lambda_grid)? {
        let parts: Vec<&str> = g.split(':').collect();
        let [lo, hi, count] = parts[..] else {
            return Err(CliError::usage(format!("lambda grid must look like lo:hi:count, got `{g}`")));
        };
        let bad = || CliError::usage(format!("bad lambda grid `{g}`"));
        p.lambda_grid = log_grid(
            lo.parse().map_err(|_| bad())?,
            hi.parse().map_err(|_| bad())?,
            count.parse().map_err(|_| bad())?,
        )?;
    }
    if let Some(m) = settings.get::<String>("lambda-min", input.lambda_min)? {
        p.lambda_mins = parse_list(&m, "lambda_min")?;
    }
    p.test_size = settings.get_or("test-size", input.test_size, p.test_size)?;
    p.replicates = settings.get_or("replicates", input.replicates, p.replicates)?;
    p.seed = seed;
    Ok(p)
}

fn table(t: &CurveTable, format: Format) -> String {
    match format {
        Format::Csv => t.to_csv(),
        Format::Json => {
            let mut s = t.to_json();
            s.push('\n');
            s
        }
    }
}

pub fn krr(
    kernels: Option<String>,
    input: ProtocolInput,
    settings: &mut Settings,
    seed: u64,
    format: Format,
) -> Result<String, CliError> {
    let text: String = settings.require("kernels", kernels)?;
    let kernels = text
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<KernelSpec>().and_then(|k| k.validate().map(|_| k)))
        .collect::<Result<Vec<_>, _>>()?;
    let protocol = protocol(input, settings, seed, "f1")?;
    settings.finish()?;
    let t = experiment_synthetic(&KrrExperiment { kernels, protocol })?;
    Ok(table(&t, format))
}

pub struct RfInput {
    pub depths: Option<String>,
    pub activation: Option<String>,
    pub schedule: Option<String>,
}

pub fn rf(rf: RfInput, input: ProtocolInput, settings: &mut Settings, seed: u64, format: Format) -> Result<String, CliError> {
    let depths = parse_list(&settings.get_or("depths", rf.depths, "1,2".to_string())?, "depth")?;
    let activation: Activation = settings.get_or("activation", rf.activation, "relu".to_string())?.parse()?;
    let schedule: WidthSchedule = settings.get_or("schedule", rf.schedule, "sqrt".to_string())?.parse()?;
    let protocol = protocol(input, settings, seed, "f2")?;
    settings.finish()?;
    let t = experiment_random_features(&RfExperiment { depths, activation, schedule, protocol })?;
    Ok(table(&t, format))
}
