//! Result envelope written by every subcommand.

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::protocol::{ClaimReport, Verdict};

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultEnvelope {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub analytic: AnalyticBlock,
    pub empirical: Option<EmpiricalBlock>,
    pub hom: Option<HomBlock>,
    pub claims: Vec<ClaimReport>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticBlock {
    pub dim: usize,
    pub probe_set: String,
    /// `|tr(U1†U2)|²/d²`.
    pub f_pro_closed: f64,
    /// Operator-basis sum; omitted above the size where it is tractable.
    pub f_pro_sum: Option<f64>,
    /// Expected probe fidelity over Haar-random pure probes.
    pub haar_average_fidelity: f64,
    /// Mean of the per-probe fidelities, absent for the magic mixture.
    pub f_bar: Option<f64>,
    /// Magic-probe test value `[re, im]`.
    pub magic_value: Option<[f64; 2]>,
    pub probes: Vec<ProbeAnalytic>,
}

/// Fidelity the two-state test sees on probe `i`, so `p_exact = (1 + f_i)/2`.
/// For pure probes `f_i = |<u_i|U1†U2|u_i>|²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeAnalytic {
    pub probe_index: usize,
    pub f_i: f64,
    pub p_exact: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalRow {
    pub probe_index: usize,
    pub p_exact: f64,
    pub shots: u64,
    pub passes: u64,
    pub p_hat: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalBlock {
    pub rows: Vec<EmpiricalRow>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomBlock {
    pub probe_index: usize,
    /// `(1 − tr ρσ)/2` for `ρ = U1|φ><φ|U1†`, `σ = U2|φ><φ|U2†`.
    pub coincidence: f64,
    pub pass_probability: f64,
    /// Two-state SWITCH test pass probability on `|φ>|φ>`.
    pub two_state_pass_probability: f64,
    pub shots: u64,
    pub coincidences: u64,
    pub coincidence_rate: f64,
    pub hoeffding_radius: f64,
    pub within_bound: bool,
}
