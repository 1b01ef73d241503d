use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::gates::{resolve_gate, GateSpec};
use crate::probes::{ProbeLabel, ProbeSet};
use crate::protocol::Strategy;
use crate::qmath::{UnitaryOp, MAX_DIM};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Compare,
    Fidelity,
    Claims,
    Hom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub u1: String,
    pub u2: String,
    pub dim: usize,
    pub probes: String,
    pub shots: u64,
    pub seed: u64,
    pub strategy: Strategy,
    pub epsilon: f64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl ExperimentConfig {
    /// Defaults for `command` with both operators the identity on a qubit.
    pub fn new(command: Command) -> Self {
        ExperimentConfig {
            command,
            u1: "I".into(),
            u2: "I".into(),
            dim: 2,
            probes: "basis".into(),
            shots: 1000,
            seed: 0,
            strategy: Strategy::Fixed,
            epsilon: 0.01,
            out: None,
            format: OutputFormat::Json,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.shots == 0 {
            return Err(CliError::ConfigInvalid("--shots must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(CliError::ConfigInvalid(format!(
                "--epsilon must lie in (0, 0.5), got {}",
                self.epsilon
            )));
        }
        if self.dim == 0 || self.dim > MAX_DIM {
            return Err(CliError::ConfigInvalid(format!(
                "--dim must lie in [1, {MAX_DIM}], got {}",
                self.dim
            )));
        }
        Ok(())
    }

    pub fn operators(&self) -> Result<(UnitaryOp, UnitaryOp), CliError> {
        let u1 = resolve_gate(&GateSpec::parse(&self.u1, self.dim)?)?;
        let u2 = resolve_gate(&GateSpec::parse(&self.u2, self.dim)?)?;
        Ok((u1, u2))
    }

    pub fn probe_set(&self) -> Result<ProbeSet, CliError> {
        let label = ProbeLabel::parse(&self.probes, self.seed)
            .map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
        Ok(ProbeSet::build(label, self.dim)?)
    }
}
