use std::path::PathBuf;
use std::process::ExitCode;

use alcove::{Family, Weight};
use alcove_cli::{run, Command, Format, RunConfig};
use clap::{Args, Parser, Subcommand};

/// Fusion coefficients, alcove random walks and their asymptotics.
#[derive(Parser)]
#[command(name = "alcove", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// JSON run configuration; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for reports when --output is not given.
    #[arg(long, global = true, env = "ALCOVE_OUT_DIR")]
    out_dir: Option<PathBuf>,

    #[command(flatten)]
    params: Params,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Fusion table N_{λ,γ,n}^β for n up to --n.
    Fusion,
    /// Transition kernel q_γ on the level-k alcove.
    Kernel,
    /// Eigenpairs of the kernel.
    Spectrum,
    /// Invariant probability measure and lattice index.
    Measure,
    /// Walk or path counts next to fusion counts and asymptotics.
    Count,
    /// Long-time estimate of N_{λ,γ,n}^β.
    Asymptotics,
    /// Sample a trajectory at level ⌊√n⌋ (requires --seed).
    Simulate,
    /// Convolution measure of ξ and γ.
    Convolve,
    /// Fit of the Brownian exponent.
    Fit,
    /// Run the invariant checks.
    Verify,
}

#[derive(Args)]
struct Params {
    #[arg(long, global = true)]
    family: Option<Family>,
    #[arg(long, global = true)]
    rank: Option<usize>,
    #[arg(long, global = true)]
    level: Option<i64>,
    /// Weight in fundamental-weight coordinates, e.g. 1,0,2.
    #[arg(long, global = true)]
    gamma: Option<Weight>,
    #[arg(long, global = true)]
    lambda: Option<Weight>,
    #[arg(long, global = true)]
    beta: Option<Weight>,
    #[arg(long, global = true)]
    xi: Option<Weight>,
    #[arg(long, global = true)]
    n: Option<u64>,
    /// Time horizon (simulate, fit).
    #[arg(long, global = true)]
    t: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long, global = true)]
    bins: Option<usize>,
    /// Test weight for fit; repeat for several.
    #[arg(long = "sigma", global = true)]
    sigmas: Vec<Weight>,
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

impl From<Params> for RunConfig {
    fn from(p: Params) -> Self {
        RunConfig {
            family: p.family,
            rank: p.rank,
            level: p.level,
            gamma: p.gamma,
            lambda: p.lambda,
            beta: p.beta,
            xi: p.xi,
            n: p.n,
            t: p.t,
            seed: p.seed,
            tolerance: p.tolerance,
            bins: p.bins,
            sigmas: (!p.sigmas.is_empty()).then_some(p.sigmas),
            output: p.output,
            format: p.format,
        }
    }
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Fusion => Command::Fusion,
            Cmd::Kernel => Command::Kernel,
            Cmd::Spectrum => Command::Spectrum,
            Cmd::Measure => Command::Measure,
            Cmd::Count => Command::Count,
            Cmd::Asymptotics => Command::Asymptotics,
            Cmd::Simulate => Command::Simulate,
            Cmd::Convolve => Command::Convolve,
            Cmd::Fit => Command::Fit,
            Cmd::Verify => Command::Verify,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let base = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: config {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => RunConfig::default(),
    };
    let cfg = base.overridden_by(cli.params.into());
    match run(cli.command.into(), &cfg, cli.out_dir.as_deref()) {
        Ok(Some(path)) => {
            eprintln!("wrote {}", path.display());
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
