use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "sgo",
    version,
    about = "Plate resonance, coupled-oscillator beats and time-spectral cards"
)]
pub struct Cli {
    /// Directory under which run directories are created [env: SGO_OUTPUT_ROOT, default: ./runs].
    #[arg(long, global = true)]
    pub out_root: Option<PathBuf>,
    /// Exact run directory to write (must not exist or be empty).
    #[arg(long, global = true)]
    pub run_dir: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

/// Where the configuration comes from. Sections of later sources replace
/// those of earlier ones: profiles in order, then the file.
#[derive(Debug, Clone, Default, Args)]
pub struct Source {
    /// Built-in profile (paper-2015, twin, pulsation); repeatable.
    #[arg(long = "profile")]
    pub profiles: Vec<String>,
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// Active-zone and complement eigenfrequencies and a residual sweep.
    Dispersion(DispersionArgs),
    /// Tune the outer radius or the compression to a target frequency.
    Tune(TuneArgs),
    /// Scan the compression and compare active and complement frequencies.
    Scan(ScanArgs),
    /// Normal modes, energy exchange and transfer of a coupled system.
    Beats(BeatsArgs),
    /// Transfer coefficient over a detuning grid.
    Transfer(TransferArgs),
    /// Time-spectral card of a record or of the synthetic signal.
    Card(CardArgs),
    /// Write the synthetic signal of the [synth] section.
    Synth(SynthArgs),
    /// Diagnostic Bessel table (p, z, Jp, Jp', Ip, Ip').
    DumpSpecfun(DumpArgs),
    /// Re-run the job recorded in a manifest and compare output hashes.
    #[serde(skip)]
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Dispersion(_) => "dispersion",
            Command::Tune(_) => "tune",
            Command::Scan(_) => "scan",
            Command::Beats(_) => "beats",
            Command::Transfer(_) => "transfer",
            Command::Card(_) => "card",
            Command::Synth(_) => "synth",
            Command::DumpSpecfun(_) => "dump-specfun",
            Command::Replay(_) => "replay",
        }
    }

    pub fn source(&self) -> Option<&Source> {
        match self {
            Command::Dispersion(a) => Some(&a.source),
            Command::Tune(a) => Some(&a.source),
            Command::Scan(a) => Some(&a.source),
            Command::Beats(a) => Some(&a.source),
            Command::Transfer(a) => Some(&a.source),
            Command::Card(a) => Some(&a.source),
            Command::Synth(a) => Some(&a.source),
            Command::DumpSpecfun(_) | Command::Replay(_) => None,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DispersionArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub source: Source,
    /// Number of active-zone eigenfrequencies.
    #[arg(long, default_value_t = 3)]
    pub count: usize,
    /// Points of the residual sweep over 1e-5 .. 1e-2 Hz.
    #[arg(long, default_value_t = 200)]
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TunedParam {
    OuterRadius,
    Tension,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TuneArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub source: Source,
    /// Target frequency (Hz); plate.resonance_nu when absent.
    #[arg(long)]
    pub target_nu: Option<f64>,
    /// Root index of the complement mode.
    #[arg(long, default_value_t = 1)]
    pub mode_l: usize,
    #[arg(long, value_enum, default_value_t = TunedParam::OuterRadius)]
    pub param: TunedParam,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ScanArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub source: Source,
    /// Explicit compression grid (Pa), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub q1: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub q1_min: f64,
    #[arg(long, default_value_t = 3e9)]
    pub q1_max: f64,
    #[arg(long, default_value_t = 31)]
    pub q1_steps: usize,
    /// Complement root index used when the outer radius is tuned.
    #[arg(long, default_value_t = 1)]
    pub mode_l: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BeatsArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub source: Source,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TransferArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub source: Source,
    /// Relative detunings, comma separated; beats.detunings when absent.
    #[arg(long, value_delimiter = ',')]
    pub detunings: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CardArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub source: Source,
    /// CSV record (t_seconds, displacement_m); overrides card.input.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Skip the SVG rendering.
    #[arg(long)]
    pub no_svg: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SynthArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub source: Source,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DumpArgs {
    /// Orders, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.5, 1.0, 2.0, 3.5])]
    pub orders: Vec<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub z_min: f64,
    #[arg(long, default_value_t = 40.0)]
    pub z_max: f64,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// manifest.json of an earlier run.
    pub manifest: PathBuf,
}
