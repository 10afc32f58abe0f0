use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use odemimo_cli::config::{resolve, ExperimentKind, Overrides};

/// Gradient-flow MMSE detection experiments.
///
/// Every subcommand draws its channel and trials from the master --seed,
/// writes a CSV (plus a .summary.txt echo of all effective parameters),
/// and exits 0 on success, 2 on configuration errors, 3 on numerical
/// failures. Settings resolve as CLI > config file > defaults.
#[derive(Parser)]
#[command(name = "odemimo", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form MSE curves for a list of regularization constants.
    #[command(name = "analytic-mse")]
    AnalyticMse(SpecArgs),
    /// Flow MSE theory against Monte Carlo emulation on one channel.
    Simulate(SpecArgs),
    /// Time-dependent-schedule MSE theory against Monte Carlo emulation.
    Tode(SpecArgs),
    /// Integrated-MSE grid search over schedule candidates.
    #[command(name = "grid-search")]
    GridSearch(SpecArgs),
    /// Stabilized-descent iterates against the MSE-at-mapped-time theory.
    Rkcd(SpecArgs),
    /// Iterative detectors racing toward the exact-MMSE floor.
    Race(SpecArgs),
    /// Emulation accuracy across integration step sizes.
    #[command(name = "delta-study")]
    DeltaStudy(SpecArgs),
    /// Symbol error rate across SNR for the detector family.
    Ser(SpecArgs),
}

impl Command {
    fn kind(&self) -> ExperimentKind {
        match self {
            Command::AnalyticMse(_) => ExperimentKind::EtaSweep,
            Command::Simulate(_) => ExperimentKind::AnalyticVsSim,
            Command::Tode(_) => ExperimentKind::TodeVsOde,
            Command::GridSearch(_) => ExperimentKind::GridSearch,
            Command::Rkcd(_) => ExperimentKind::MseVsTk,
            Command::Race(_) => ExperimentKind::DetectorRace,
            Command::DeltaStudy(_) => ExperimentKind::DeltaStudy,
            Command::Ser(_) => ExperimentKind::SerVsSnr,
        }
    }

    fn args(&self) -> &SpecArgs {
        match self {
            Command::AnalyticMse(a)
            | Command::Simulate(a)
            | Command::Tode(a)
            | Command::GridSearch(a)
            | Command::Rkcd(a)
            | Command::Race(a)
            | Command::DeltaStudy(a)
            | Command::Ser(a) => a,
        }
    }
}

#[derive(Args)]
struct SpecArgs {
    /// Flat key-value config file (one `key = value` per line).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; echoed into every output row.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Monte Carlo trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Worker threads (0 = library default); results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Transmit antennas.
    #[arg(long)]
    n: Option<usize>,
    /// Receive antennas.
    #[arg(long)]
    m: Option<usize>,
    /// Noise variance.
    #[arg(long)]
    sigma2: Option<f64>,
    /// qpsk, 16qam, or 64qam.
    #[arg(long)]
    modulation: Option<String>,
    /// iid or kronecker.
    #[arg(long)]
    channel: Option<String>,
    /// Per-element variance of the iid channel.
    #[arg(long)]
    variance: Option<f64>,
    /// Exponential correlation coefficient of the kronecker channel.
    #[arg(long)]
    rho: Option<f64>,
    /// Regularization constant (default: matched to sigma2).
    #[arg(long)]
    eta: Option<f64>,
    /// Schedule for tode: constant, inverse-decay, or exp-decay.
    #[arg(long)]
    reg: Option<String>,
    /// Inverse-decay rate.
    #[arg(long)]
    alpha: Option<f64>,
    /// Exp-decay amplitude.
    #[arg(long)]
    beta: Option<f64>,
    /// Exp-decay rate.
    #[arg(long)]
    gamma: Option<f64>,
    /// Euler step size.
    #[arg(long)]
    delta: Option<f64>,
    /// Emulation horizon.
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    /// Spacing of recorded times.
    #[arg(long = "record-dt")]
    record_dt: Option<f64>,
    /// Absolute tolerance of the inner quadrature.
    #[arg(long = "quad-tol")]
    quad_tol: Option<f64>,
    /// Damping constant of the stabilized detector.
    #[arg(long = "eps-damp")]
    eps_damp: Option<f64>,
    /// Iteration budget of the discrete detectors.
    #[arg(long)]
    iters: Option<usize>,
    /// Explicit step size for the stabilized detector.
    #[arg(long)]
    h: Option<f64>,
    /// Horizon T of the integrated-MSE functional.
    #[arg(long)]
    horizon: Option<f64>,
    /// Comma-separated regularization constants (analytic-mse).
    #[arg(long, value_delimiter = ',')]
    etas: Option<Vec<f64>>,
    /// Comma-separated inverse-decay candidates (grid-search).
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Comma-separated step sizes (delta-study).
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
    /// Comma-separated solvers from euler, rkcd, exact-mmse.
    #[arg(long, value_delimiter = ',')]
    solvers: Option<Vec<String>>,
    /// Comma-separated SNR points in dB (ser).
    #[arg(long, value_delimiter = ',')]
    snrs: Option<Vec<f64>>,
    /// matched-filter or zero.
    #[arg(long)]
    init: Option<String>,
}

impl SpecArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            kind: None,
            n: self.n,
            m: self.m,
            sigma2: self.sigma2,
            modulation: None, // parsed below to surface errors uniformly
            channel_kind: self.channel.clone(),
            variance: self.variance,
            rho: self.rho,
            eta: self.eta,
            reg_kind: None,
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            delta: self.delta,
            t_max: self.t_max,
            record_dt: self.record_dt,
            trials: self.trials,
            seed: self.seed,
            out: self.out.clone(),
            threads: self.threads,
            quad_tol: self.quad_tol,
            eps_damp: self.eps_damp,
            iters: self.iters,
            h: self.h,
            horizon: self.horizon,
            etas: self.etas.clone(),
            alphas: self.alphas.clone(),
            deltas: self.deltas.clone(),
            solvers: self.solvers.clone(),
            snrs: self.snrs.clone(),
            init: self.init.clone(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let kind = cli.command.kind();
    let args = cli.command.args();

    let run = || -> Result<odemimo_cli::RunOutput, odemimo_cli::HarnessError> {
        let mut overrides = args.overrides();
        if let Some(text) = &args.modulation {
            overrides.modulation = Some(
                text.parse()
                    .map_err(|e: odemimo::Error| odemimo_cli::HarnessError::Config(e.to_string()))?,
            );
        }
        if let Some(text) = &args.reg {
            overrides.reg_kind = Some(odemimo_cli::config::RegKind::parse(text)?);
        }
        let spec = resolve(kind, args.config.as_deref(), &overrides)?;
        odemimo_cli::run(&spec)
    };

    match run() {
        Ok(output) => {
            print!("{}", output.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
