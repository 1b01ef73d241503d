use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::config::{Command, ExperimentConfig, OutputFormat};
use super::CliError;
use crate::protocol::Strategy;

#[derive(Debug, Parser)]
#[command(name = "switchtest", version, about = "SWAP/SWITCH test simulator for comparing quantum evolutions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Run the two-state test on every probe and report a verdict.
    Compare(CommonArgs),
    /// Report process fidelity and per-probe fidelities.
    Fidelity(CommonArgs),
    /// Check the magic-probe, AM-GM and process-fidelity claims.
    Claims(CommonArgs),
    /// Hong-Ou-Mandel coincidence statistics for a single pure probe.
    Hom(CommonArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum StrategyArg {
    Fixed,
    Sequential,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// First operator: gate token (I, X, Z, H, RZ(t), CNOT, tensor:H,I, ...) or matrix file.
    #[arg(long, default_value = "I")]
    pub u1: String,
    /// Second operator, same syntax as --u1.
    #[arg(long, default_value = "I")]
    pub u2: String,
    /// Hilbert-space dimension of each operator.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Probe set: basis | mixed | haar:N | magic | entangled.
    #[arg(long, default_value = "basis")]
    pub probes: String,
    /// Shots per probe.
    #[arg(long, default_value_t = 1000)]
    pub shots: u64,
    #[arg(long, env = "SWITCHTEST_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "fixed")]
    pub strategy: StrategyArg,
    /// Confidence parameter; intervals have level 1 - epsilon.
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
}

impl Cli {
    pub fn into_config(self) -> Result<ExperimentConfig, CliError> {
        let (command, a) = match self.command {
            Sub::Compare(a) => (Command::Compare, a),
            Sub::Fidelity(a) => (Command::Fidelity, a),
            Sub::Claims(a) => (Command::Claims, a),
            Sub::Hom(a) => (Command::Hom, a),
        };
        let cfg = ExperimentConfig {
            command,
            u1: a.u1,
            u2: a.u2,
            dim: a.dim,
            probes: a.probes,
            shots: a.shots,
            seed: a.seed,
            strategy: match a.strategy {
                StrategyArg::Fixed => Strategy::Fixed,
                StrategyArg::Sequential => Strategy::Sequential,
            },
            epsilon: a.epsilon,
            out: a.out,
            format: match a.format {
                FormatArg::Json => OutputFormat::Json,
                FormatArg::Csv => OutputFormat::Csv,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
