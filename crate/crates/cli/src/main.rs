//! `sphk`: spectra, decay checks, Mercer reconstructions and regression
//! experiments for dot-product kernels on the sphere.
//!
//! Exit status is 0 on success, 2 for usage or configuration errors and 3 for
//! numerical failures. Errors are printed as one `code: message` line.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::Settings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Format, String> {
        Format::from_str_value(s)
    }
}

impl Format {
    fn from_str_value(s: &str) -> Result<Format, String> {
        <Format as ValueEnum>::from_str(s, false).map_err(|_| format!("format must be csv or json, got `{s}`"))
    }
}

/// A failure reported on stderr as `code: message`.
#[derive(Debug)]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub status: u8,
}

impl CliError {
    pub fn usage(message: String) -> CliError {
        CliError { code: "usage".into(), message, status: 2 }
    }
}

impl From<sphere_kernels::Error> for CliError {
    fn from(e: sphere_kernels::Error) -> CliError {
        CliError { code: e.code().into(), message: e.to_string(), status: if e.is_numerical() { 3 } else { 2 } }
    }
}

#[derive(Parser)]
#[command(name = "sphk", version, about = "Eigenvalue spectra of dot-product kernels on the sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Master seed for the regression experiments.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues μ_0..μ_kmax (CSV `k,mu,parity` or JSON).
    Spectrum {
        /// Kernel spec, e.g. `ntk:L=3`, `rf:L=4`, `laplace:c=1`, `genexp:c=1,g=0.75`.
        kernel: Option<String>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        kmax: Option<usize>,
        /// series, quadrature or auto.
        #[arg(long)]
        route: Option<String>,
        #[arg(long)]
        series_order: Option<usize>,
        /// Quadrature nodes per half interval.
        #[arg(long)]
        nodes: Option<usize>,
    },
    /// Fitted decay exponents per parity against the predicted law (JSON).
    Decay {
        kernel: Option<String>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long)]
        route: Option<String>,
        /// Same-parity range `a:b` of the log-log fit.
        #[arg(long)]
        fit_range: Option<String>,
        /// Allowed distance between fitted and predicted exponent.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Predicted decay exponent and constants from the endpoint expansions (JSON).
    Predict {
        kernel: Option<String>,
        #[arg(long)]
        d: Option<usize>,
        /// Also list the predicted μ_k for k = 1..kmax.
        #[arg(long)]
        kmax: Option<usize>,
    },
    /// Mercer reconstruction error on [-t_max, t_max] and the trace defect (JSON).
    Mercer {
        kernel: Option<String>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long)]
        route: Option<String>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Kernel ridge regression learning curves.
    Krr {
        /// Kernel specs separated by `;`.
        #[arg(long)]
        kernels: Option<String>,
        #[command(flatten)]
        protocol: ProtocolArgs,
    },
    /// Random-feature ridge regression learning curves.
    Rf {
        /// Comma-separated depths, each 1 or 2.
        #[arg(long)]
        depths: Option<String>,
        /// relu or step.
        #[arg(long)]
        activation: Option<String>,
        /// Features per layer: sqrt (m = ⌈√n⌉) or linear (m = n).
        #[arg(long)]
        schedule: Option<String>,
        #[command(flatten)]
        protocol: ProtocolArgs,
    },
}

#[derive(Args)]
struct ProtocolArgs {
    /// f1 (cap, optional `:t=`), f2 (double-exp) or `poly:c=...`.
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    d: Option<usize>,
    /// Comma-separated sample sizes.
    #[arg(long)]
    n: Option<String>,
    /// `lo:hi:count`, log-spaced.
    #[arg(long)]
    lambda_grid: Option<String>,
    /// Comma-separated floors on the regularization grid.
    #[arg(long)]
    lambda_min: Option<String>,
    #[arg(long)]
    test_size: Option<usize>,
    #[arg(long)]
    replicates: Option<usize>,
}

impl From<ProtocolArgs> for commands::ProtocolInput {
    fn from(a: ProtocolArgs) -> Self {
        commands::ProtocolInput {
            target: a.target,
            d: a.d,
            n: a.n,
            lambda_grid: a.lambda_grid,
            lambda_min: a.lambda_min,
            test_size: a.test_size,
            replicates: a.replicates,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut settings = Settings::load(cli.global.config.as_deref())?;
    let out: Option<PathBuf> = settings.get("out", cli.global.out)?;
    let seed = settings.get_or("seed", cli.global.seed, 0u64)?;
    let default_format = match cli.command {
        Command::Spectrum { .. } | Command::Krr { .. } | Command::Rf { .. } => Format::Csv,
        _ => Format::Json,
    };
    let format = settings.get_or("format", cli.global.format, default_format)?;
    let text = match cli.command {
        Command::Spectrum { kernel, d, kmax, route, series_order, nodes } => commands::spectrum(
            commands::SpectrumInput { kernel, d, kmax, route, series_order, nodes },
            &mut settings,
            format,
        )?,
        Command::Decay { kernel, d, kmax, route, fit_range, tolerance } => commands::decay(
            commands::DecayInput { kernel, d, kmax, route, fit_range, tolerance },
            &mut settings,
            format,
        )?,
        Command::Predict { kernel, d, kmax } => {
            commands::predict(commands::PredictInput { kernel, d, kmax }, &mut settings, format)?
        }
        Command::Mercer { kernel, d, kmax, route, t_max, grid } => commands::mercer(
            commands::MercerInput { kernel, d, kmax, route, t_max, grid },
            &mut settings,
            format,
        )?,
        Command::Krr { kernels, protocol } => commands::krr(kernels, protocol.into(), &mut settings, seed, format)?,
        Command::Rf { depths, activation, schedule, protocol } => commands::rf(
            commands::RfInput { depths, activation, schedule },
            protocol.into(),
            &mut settings,
            seed,
            format,
        )?,
    };
    let written = match out {
        Some(path) => std::fs::write(&path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    written.map_err(|e| CliError { code: "io".into(), message: e.to_string(), status: 2 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("usage: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}: {}", e.code, e.message.replace('\n', " "));
            ExitCode::from(e.status)
        }
    }
}
