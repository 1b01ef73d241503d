//! Closed-form pass probabilities and fidelities.
//!
//! These are the oracles the circuit simulations are checked against and the
//! targets the sampled estimates converge to. Operators are unitary and
//! channels are unitary conjugations.

use serde::{Deserialize, Serialize};

use crate::circuits::clamp_probability;
use crate::error::{check_dim, Error, Result};
use crate::gates;
use crate::qmath::{trace_of_product, QuantumState, UnitaryOp, C64};

/// Tolerance for the imaginary residue of a trace that must be real.
const REAL_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub d: usize,
    pub f_pro: f64,
    pub f_bar: f64,
    pub per_probe: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepeatedTestReport {
    /// `Π_i (1+F_i)/2`: one test per probe.
    pub p_r: f64,
    /// `((1+F̄)/2)^N`: the same number of tests on the uniform mixture.
    pub p_m: f64,
    pub n: usize,
    /// `1 − P_R/P_M`, computed in log space.
    pub relative_gap: f64,
}

/// SWAP-test pass probability: `(1+|<ψ|φ>|²)/2`, or `(1+tr(ρσ))/2`.
pub fn swap_prob(phi: &QuantumState, psi: &QuantumState) -> Result<f64> {
    check_dim(phi.dim(), psi.dim())?;
    clamp_probability((1.0 + phi.overlap(psi)?) / 2.0, "swap_prob")
}

/// `tr(U2 ρ U1†)`, which reduces to `<φ|U1† U2|φ>` for a pure probe.
pub fn switch_trace(u1: &UnitaryOp, u2: &UnitaryOp, probe: &QuantumState) -> Result<C64> {
    check_dim(u1.dim(), u2.dim())?;
    check_dim(u1.dim(), probe.dim())?;
    if let Some(phi) = probe.amplitudes() {
        let a = u1.matrix().apply(phi);
        let b = u2.matrix().apply(phi);
        return Ok(a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum());
    }
    let lhs = u2.matrix().matmul(&probe.density());
    Ok(trace_of_product(&lhs, &u1.matrix().dagger()))
}

/// Single-state SWITCH pass probability `(1 + Re tr(U2 ρ U1†))/2`.
pub fn single_switch_prob(u1: &UnitaryOp, u2: &UnitaryOp, probe: &QuantumState) -> Result<f64> {
    let t = switch_trace(u1, u2, probe)?;
    clamp_probability((1.0 + t.re) / 2.0, "single_switch_prob")
}

/// `|<φ|U1† U2|φ>|²` for a pure probe.
pub fn probe_fidelity(u1: &UnitaryOp, u2: &UnitaryOp, phi: &QuantumState) -> Result<f64> {
    if !phi.is_pure() {
        return Err(Error::NotPure);
    }
    Ok(switch_trace(u1, u2, phi)?.norm_sqr())
}

/// Two-state test pass probability on `|φ>|φ>`: `(1+|<φ|U1†U2|φ>|²)/2`.
pub fn two_state_prob(u1: &UnitaryOp, u2: &UnitaryOp, phi: &QuantumState) -> Result<f64> {
    let f = probe_fidelity(u1, u2, phi)?;
    clamp_probability((1.0 + f) / 2.0, "two_state_prob")
}

pub fn average_fidelity(u1: &UnitaryOp, u2: &UnitaryOp, probes: &[QuantumState]) -> Result<FidelityReport> {
    if probes.is_empty() {
        return Err(Error::EmptyProbeSet);
    }
    check_dim(u1.dim(), u2.dim())?;
    let per_probe = probes
        .iter()
        .map(|p| probe_fidelity(u1, u2, p).and_then(|f| clamp_probability(f, "F_i")))
        .collect::<Result<Vec<_>>>()?;
    let f_bar = per_probe.iter().sum::<f64>() / per_probe.len() as f64;
    Ok(FidelityReport {
        d: u1.dim(),
        f_pro: process_fidelity_closed(u1, u2)?,
        f_bar,
        per_probe,
    })
}

/// Process fidelity as the operator-basis sum
/// `(1/d³) Σ_j tr(U1 U_j† U1† · U2 U_j U2†)` over the Heisenberg-Weyl basis.
pub fn process_fidelity_sum(u1: &UnitaryOp, u2: &UnitaryOp) -> Result<f64> {
    check_dim(u1.dim(), u2.dim())?;
    let d = u1.dim();
    if d == 1 {
        return Ok(1.0);
    }
    let (a, a_dag) = (u1.matrix(), u1.matrix().dagger());
    let (b, b_dag) = (u2.matrix(), u2.matrix().dagger());
    let mut total = C64::new(0.0, 0.0);
    for basis in gates::heisenberg_weyl(d)? {
        let ideal = a.matmul(&basis.matrix().dagger()).matmul(&a_dag);
        let actual = b.matmul(basis.matrix()).matmul(&b_dag);
        total += trace_of_product(&ideal, &actual);
    }
    let total = total / (d as f64).powi(3);
    if total.im.abs() > REAL_TOL {
        return Err(Error::Consistency(format!(
            "process fidelity has imaginary residue {:.3e}",
            total.im
        )));
    }
    clamp_probability(total.re, "process fidelity")
}

/// `|tr(U1† U2)|² / d²`.
pub fn process_fidelity_closed(u1: &UnitaryOp, u2: &UnitaryOp) -> Result<f64> {
    check_dim(u1.dim(), u2.dim())?;
    let d = u1.dim() as f64;
    let t = trace_of_product(&u1.matrix().dagger(), u2.matrix());
    clamp_probability(t.norm_sqr() / (d * d), "process fidelity")
}

/// Mean of `|<φ|U1†U2|φ>|²` over Haar-random `φ`: `(d·F_pro + 1)/(d + 1)`.
pub fn haar_average_fidelity(u1: &UnitaryOp, u2: &UnitaryOp) -> Result<f64> {
    let d = u1.dim() as f64;
    Ok((d * process_fidelity_closed(u1, u2)? + 1.0) / (d + 1.0))
}

pub fn repeated_test_probs(fidelities: &[f64]) -> Result<RepeatedTestReport> {
    if fidelities.is_empty() {
        return Err(Error::EmptyList);
    }
    if let Some(&f) = fidelities.iter().find(|f| !(0.0..=1.0).contains(*f)) {
        return Err(Error::OutOfRange {
            what: "per-probe fidelity must lie in [0, 1]",
            value: f,
        });
    }
    let n = fidelities.len();
    let probs: Vec<f64> = fidelities.iter().map(|f| (1.0 + f) / 2.0).collect();
    let mean = probs.iter().sum::<f64>() / n as f64;
    let p_r = probs.iter().product::<f64>();
    let p_m = mean.powi(n as i32);
    let log_ratio = probs.iter().map(|p| p.ln()).sum::<f64>() - n as f64 * mean.ln();
    Ok(RepeatedTestReport {
        p_r,
        p_m,
        n,
        relative_gap: -log_ratio.exp_m1(),
    })
}

/// `re² + im²` from the in-phase and quadrature single-state passes.
pub fn overlap_from_two_passes(re_estimate: f64, im_estimate: f64) -> Result<f64> {
    for v in [re_estimate, im_estimate] {
        if !(-1.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange {
                what: "quadrature estimate must lie in [-1, 1]",
                value: v,
            });
        }
    }
    Ok(re_estimate * re_estimate + im_estimate * im_estimate)
}
