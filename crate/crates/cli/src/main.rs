use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ionframe::bench::PANEL_NAMES;
use ionframe::tomography::{MotionalState, Regime, Slice};
use num_complex::Complex64 as C64;

mod commands;
mod config;

use config::Settings;

/// Exit status for bad flags, config files or inputs.
const USAGE: u8 = 2;

/// Trapped-ion effective Hamiltonians: fidelity panels and dephased Wigner
/// tomography.
///
/// All rates are in units of the trap frequency. Exit status is 0 when every
/// criterion passes, 1 when one fails and 2 on a usage or config error.
#[derive(Parser, Debug)]
#[command(name = "ionframe", version, about, long_about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fidelity of the effective models against the full Hamiltonian.
    Fidelity(FidelityArgs),
    /// Wigner slices reconstructed from simulated sideband data.
    Wigner(WignerArgs),
    /// Fitted displaced populations at one phase-space point.
    Qfit(QfitArgs),
}

#[derive(Args, Debug)]
struct Shared {
    /// Settings file with `key = value` lines (omega, delta, eta, gamma,
    /// cutoff, tmax, samples, kmax). Flags take precedence.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Lamb-Dicke parameter
    #[arg(long)]
    eta: Option<f64>,

    /// Fock space cutoff
    #[arg(long)]
    cutoff: Option<usize>,

    /// Time span (nu t for fidelity, Omega t for tomography)
    #[arg(long)]
    tmax: Option<f64>,

    /// Number of time samples
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args, Debug)]
struct FidelityArgs {
    /// Built-in parameter set; explicit flags and config values override it
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PANEL_NAMES))]
    panel: Option<String>,

    /// Rabi frequency
    #[arg(long)]
    omega: Option<f64>,

    /// Laser detuning
    #[arg(long)]
    delta: Option<f64>,

    /// Output file stem (defaults to the panel name or "custom")
    #[arg(long)]
    name: Option<String>,

    /// Criteria file replacing the built-in checks
    #[arg(long, value_name = "FILE")]
    criteria: Option<PathBuf>,

    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,

    #[command(flatten)]
    shared: Shared,
}

#[derive(Args, Debug)]
struct WignerArgs {
    /// Motional state, e.g. cat:2, number:1, coherent:1+0.5i
    #[arg(long, value_parser = parse_state)]
    state: MotionalState,

    /// Dephasing rates, comma separated
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<f64>>,

    #[arg(long, value_enum, default_value_t = RegimeArg::Both)]
    regime: RegimeArg,

    #[arg(long, value_enum, default_value_t = SliceArg::Both)]
    slice: SliceArg,

    /// Number of displaced populations fitted
    #[arg(long)]
    kmax: Option<usize>,

    /// Slices cover [-extent, extent]
    #[arg(long, default_value_t = 3.5)]
    extent: f64,

    /// Points per slice
    #[arg(long, default_value_t = 41)]
    points: usize,

    /// Output file stem
    #[arg(long, default_value = "wigner")]
    name: String,

    /// Criteria file replacing the built-in checks
    #[arg(long, value_name = "FILE")]
    criteria: Option<PathBuf>,

    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,

    #[command(flatten)]
    shared: Shared,
}

#[derive(Args, Debug)]
struct QfitArgs {
    /// Motional state, e.g. cat:2, number:1, coherent:1
    #[arg(long, value_parser = parse_state)]
    state: MotionalState,

    /// Phase-space point, e.g. 0, 1.5, 0.5-1i
    #[arg(long, value_parser = parse_complex, default_value = "0")]
    alpha: C64,

    /// Dephasing rate
    #[arg(long)]
    gamma: Option<f64>,

    #[arg(long, value_enum, default_value_t = RegimeArg::Fast)]
    regime: RegimeArg,

    /// Number of displaced populations fitted
    #[arg(long)]
    kmax: Option<usize>,

    #[command(flatten)]
    shared: Shared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RegimeArg {
    Slow,
    Fast,
    Both,
}

impl RegimeArg {
    fn regimes(self) -> Vec<Regime> {
        match self {
            RegimeArg::Slow => vec![Regime::Slow],
            RegimeArg::Fast => vec![Regime::Fast],
            RegimeArg::Both => Regime::BOTH.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SliceArg {
    Re,
    Im,
    Both,
}

impl SliceArg {
    fn slices(self) -> Vec<Slice> {
        match self {
            SliceArg::Re => vec![Slice::Real],
            SliceArg::Im => vec![Slice::Imag],
            SliceArg::Both => Slice::BOTH.to_vec(),
        }
    }
}

fn parse_state(s: &str) -> Result<MotionalState, String> {
    s.parse().map_err(|e: ionframe::Error| e.to_string())
}

fn parse_complex(s: &str) -> Result<C64, String> {
    s.trim().parse().map_err(|_| format!("'{s}' is not a complex number"))
}

impl Shared {
    fn settings(&self) -> Settings {
        Settings {
            eta: self.eta,
            cutoff: self.cutoff,
            tmax: self.tmax,
            samples: self.samples,
            ..Default::default()
        }
    }

    /// Flags over the config file.
    fn resolve(&self, flags: Settings) -> anyhow::Result<Settings> {
        let file = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        Ok(flags.over(self.settings()).over(file))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Fidelity(args) => commands::fidelity(args),
        Command::Wigner(args) => commands::wigner(args),
        Command::Qfit(args) => commands::qfit(args),
    };
    match outcome {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE)
        }
    }
}
