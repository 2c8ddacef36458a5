mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Feasible-subspace QAOA+ toolkit for sequential-coefficient constraints.
#[derive(Parser)]
#[command(name = "seqmix", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the mixing-family conditions for an instance.
    Validate(ValidateArgs),
    /// Run one QAOA+ circuit and write the final state.
    Simulate(SimulateArgs),
    /// Optimize Δt, optionally followed by Chebyshev refinement.
    Optimize(OptimizeArgs),
    /// Depth sweep p = 2, 4, 8, … until Pr_opt reaches the bar.
    Sweep(SweepArgs),
    /// Low-lying spectrum along the schedule and the adiabatic timescale.
    Spectrum(SpectrumArgs),
    /// Emit one circuit per merge operator of the family.
    Compile(CompileArgs),
    /// Reproduce the eight-variable benchmark pipeline.
    Casestudy(CasestudyArgs),
}

#[derive(Args)]
pub struct Common {
    /// Instance JSON file.
    #[arg(long)]
    pub instance: PathBuf,
    /// min, max, mu-max:<mu>, or file:<path>.
    #[arg(long, default_value = "min")]
    pub family: String,
    /// Output directory.
    #[arg(long, default_value = "seqmix-out")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum MixerArg {
    Seq,
    Sim,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum OrderingArg {
    Canonical,
    Reversed,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Dt,
    Chebyshev,
}

#[derive(Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Also write basis and qubit interaction graphs in DOT format.
    #[arg(long)]
    pub dot: bool,
    /// Check condition (a) on S^(b) only instead of all 2^N states.
    #[arg(long)]
    pub subspace_only: bool,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    /// simple or chebyshev:<file>.
    #[arg(long, default_value = "simple")]
    pub schedule: String,
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Explicit angle file; overrides the schedule.
    #[arg(long)]
    pub angles: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "seq")]
    pub mixer: MixerArg,
    #[arg(long, value_enum, default_value = "canonical")]
    pub ordering: OrderingArg,
}

#[derive(Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub p: usize,
    #[arg(long, value_enum, default_value = "dt")]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value = "seq")]
    pub mixer: MixerArg,
    #[arg(long, value_enum, default_value = "canonical")]
    pub ordering: OrderingArg,
    /// Chebyshev order per schedule component.
    #[arg(long, default_value_t = seqmix::schedules::DEFAULT_ORDER)]
    pub order: usize,
    /// Write the per-iteration trace CSV.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 512)]
    pub p_max: usize,
    #[arg(long, default_value_t = 64)]
    pub p_max_chebyshev: usize,
    #[arg(long, value_enum, default_value = "seq")]
    pub mixer: MixerArg,
    #[arg(long, default_value_t = seqmix::schedules::DEFAULT_ORDER)]
    pub order: usize,
}

#[derive(Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value = "simple")]
    pub schedule: String,
    /// Single point instead of the full grid.
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long, default_value_t = seqmix::spectral::DEFAULT_LEVELS)]
    pub levels: usize,
    /// Compute through negative β instead of failing (diagnostic only).
    #[arg(long)]
    pub allow_negative_beta: bool,
}

#[derive(Args)]
pub struct CompileArgs {
    #[command(flatten)]
    pub common: Common,
    /// Rotation angle θ in exp(-iθM).
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    /// Compare each circuit against the dense exponential.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Args)]
pub struct CasestudyArgs {
    #[arg(long, default_value = "seqmix-out")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "seq")]
    pub mixer: MixerArg,
    #[arg(long, default_value_t = seqmix::schedules::DEFAULT_ORDER)]
    pub order: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate(a) => commands::validate(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Optimize(a) => commands::optimize(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Compile(a) => commands::compile(a),
        Command::Casestudy(a) => commands::casestudy(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(commands::Failure::Condition(msg)) => {
            eprintln!("condition failed: {msg}");
            ExitCode::from(1)
        }
        Err(commands::Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
