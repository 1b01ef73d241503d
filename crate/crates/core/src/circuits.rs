//! Exact simulation of the ancilla-interferometer test circuits.
//!
//! Every test has the same skeleton: an ancilla prepared in `|0>`, a
//! Hadamard, a controlled operation on the data registers, a second Hadamard
//! and a measurement of the ancilla. Outcome 0 is a pass. The joint state is
//! evolved by the full circuit matrix; pure inputs stay on the state-vector
//! path, anything mixed goes through density-matrix conjugation.

use crate::error::{check_dim, Error, Result};
use crate::gates;
use crate::probes::AffineStateMix;
use crate::qmath::{ComplexMatrix, QuantumState, StateKind, UnitaryOp, C64, ZERO};

/// Branch probabilities at or below this are treated as empty.
pub const BRANCH_TOL: f64 = 1e-12;

/// Slack allowed on a probability before it is reported as inconsistent.
pub const PROB_SLACK: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct CircuitResult {
    /// Probability that the ancilla reads 0.
    pub p_pass: f64,
    /// Data registers conditioned on a pass; absent when `p_pass` is zero.
    pub post_state_pass: Option<QuantumState>,
    /// Data registers conditioned on a failure; absent when `p_pass` is one.
    pub post_state_fail: Option<QuantumState>,
}

impl CircuitResult {
    pub fn p_fail(&self) -> f64 {
        1.0 - self.p_pass
    }
}

pub(crate) fn clamp_probability(p: f64, what: &str) -> Result<f64> {
    if !p.is_finite() || !(-PROB_SLACK..=1.0 + PROB_SLACK).contains(&p) {
        return Err(Error::Consistency(format!("{what} = {p} is not a probability")));
    }
    Ok(p.clamp(0.0, 1.0))
}

fn condition_pure(dims: &[usize], amps: &[C64], p: f64) -> Result<Option<QuantumState>> {
    if p <= BRANCH_TOL {
        return Ok(None);
    }
    QuantumState::pure_normalized(dims.to_vec(), amps.to_vec()).map(Some)
}

fn condition_mixed(dims: &[usize], block: ComplexMatrix, p: f64) -> Result<Option<QuantumState>> {
    if p <= BRANCH_TOL {
        return Ok(None);
    }
    let rho = block.add(&block.dagger()).scale(C64::new(0.5 / p, 0.0));
    match QuantumState::mixed(dims.to_vec(), rho) {
        Ok(s) => Ok(Some(s)),
        // Renormalizing a near-empty branch amplifies rounding noise.
        Err(_) if p <= 1e-9 => Ok(None),
        Err(e) => Err(Error::Consistency(format!("conditioned state invalid: {e}"))),
    }
}

/// `H · controlled · H` on the ancilla, applied to `|0> ⊗ data`.
fn run_interferometer(controlled: &UnitaryOp, data: &QuantumState) -> Result<CircuitResult> {
    let n = data.dim();
    check_dim(2 * n, controlled.dim())?;
    let hh = gates::hadamard().tensor(&UnitaryOp::identity(n))?;
    let circuit = hh.compose(controlled)?.compose(&hh)?;
    let joint = QuantumState::basis(2, 0)?.tensor(data)?;
    let out = joint.evolve(&circuit)?;
    let dims = data.dims();

    match out.kind() {
        StateKind::Pure(amps) => {
            let (pass, fail) = amps.split_at(n);
            let p_raw: f64 = pass.iter().map(|z| z.norm_sqr()).sum();
            let p_pass = clamp_probability(p_raw, "p_pass")?;
            Ok(CircuitResult {
                p_pass,
                post_state_pass: condition_pure(dims, pass, p_pass)?,
                post_state_fail: condition_pure(dims, fail, 1.0 - p_pass)?,
            })
        }
        StateKind::Mixed(rho) => {
            let pass = rho.block(0, 0, n, n);
            let fail = rho.block(n, n, n, n);
            let p_pass = clamp_probability(pass.trace()?.re, "p_pass")?;
            Ok(CircuitResult {
                p_pass,
                post_state_pass: condition_mixed(dims, pass, p_pass)?,
                post_state_fail: condition_mixed(dims, fail, 1.0 - p_pass)?,
            })
        }
    }
}

/// Controlled-SWAP interferometer on `phi ⊗ psi`.
pub fn swap_test(phi: &QuantumState, psi: &QuantumState) -> Result<CircuitResult> {
    check_dim(phi.dim(), psi.dim())?;
    let d = phi.dim();
    run_interferometer(&gates::controlled_swap(d)?, &phi.tensor(psi)?)
}

/// Ancilla-controlled choice between `u1` and `u2` acting on a single probe.
pub fn single_switch_test(u1: &UnitaryOp, u2: &UnitaryOp, probe: &QuantumState) -> Result<CircuitResult> {
    check_dim(u1.dim(), u2.dim())?;
    check_dim(u1.dim(), probe.dim())?;
    run_interferometer(&gates::switch_gate(u1, u2)?, probe)
}

/// `U1 ⊗ U2` on `phi ⊗ psi`, followed by the SWAP-test interferometer.
pub fn modified_swap_test(
    u1: &UnitaryOp,
    u2: &UnitaryOp,
    phi: &QuantumState,
    psi: &QuantumState,
) -> Result<CircuitResult> {
    check_dim(u1.dim(), u2.dim())?;
    check_dim(u1.dim(), phi.dim())?;
    check_dim(u1.dim(), psi.dim())?;
    let data = phi.tensor(psi)?.evolve(&u1.tensor(u2)?)?;
    run_interferometer(&gates::controlled_swap(u1.dim())?, &data)
}

/// Ancilla-controlled choice between `U1⊗U2` and `U2⊗U1` on a two-register probe.
pub fn two_state_switch_test(
    u1: &UnitaryOp,
    u2: &UnitaryOp,
    joint_probe: &QuantumState,
) -> Result<CircuitResult> {
    check_dim(u1.dim(), u2.dim())?;
    let d = u1.dim();
    check_dim(d * d, joint_probe.dim())?;
    if joint_probe.dims().len() > 2 {
        return Err(Error::InvalidState(format!(
            "expected two registers, found dims {:?}",
            joint_probe.dims()
        )));
    }
    run_interferometer(&gates::two_state_switch_gate(u1, u2)?, joint_probe)
}

/// Prepares the two-register probe the entangling circuit builds from a
/// single-register state: `CX (v ⊗ |0>)`.
pub fn cx_doubled(v: &QuantumState) -> Result<QuantumState> {
    let d = v.dim();
    let zero = QuantumState::basis(d, 0)?;
    let joint = v.tensor(&zero)?;
    joint.evolve(&gates::generalized_cx(d)?)
}

/// Complex value of the two-state test extended over an affine mixture.
///
/// Each component is simulated separately (single-register components are
/// first doubled through the generalized CX). The pass probability of a
/// normalized input is `1/2 + (1/2)·F`; the mixture keeps the constant term
/// and combines the fidelity part with the weights:
/// `1/2 + Σ_k w_k (p_k − 1/2)`.
pub fn magic_probe_value(u1: &UnitaryOp, u2: &UnitaryOp, probe: &AffineStateMix) -> Result<C64> {
    check_dim(u1.dim(), u2.dim())?;
    check_dim(u1.dim(), probe.register_dim())?;
    let mut acc = ZERO;
    for (w, v) in probe.components() {
        let joint = match v.dims().len() {
            1 => cx_doubled(v)?,
            _ => v.clone(),
        };
        let p = two_state_switch_test(u1, u2, &joint)?.p_pass;
        acc += w * (p - 0.5);
    }
    Ok(C64::new(0.5, 0.0) + acc)
}

/// Real part of [`magic_probe_value`]. Not clamped: a non-physical mixture
/// can land outside `[0, 1]`.
pub fn magic_probe_test(u1: &UnitaryOp, u2: &UnitaryOp, probe: &AffineStateMix) -> Result<f64> {
    Ok(magic_probe_value(u1, u2, probe)?.re)
}

/// Probability of a coincidence when two photons with internal states `rho`
/// and `sigma` meet at a balanced beamsplitter: `(1 − tr(ρσ))/2`.
pub fn hom_coincidence(rho: &QuantumState, sigma: &QuantumState) -> Result<f64> {
    check_dim(rho.dim(), sigma.dim())?;
    let overlap = rho.overlap(sigma)?;
    clamp_probability((1.0 - overlap) / 2.0, "coincidence probability")
}

/// Complement of [`hom_coincidence`]: the SWAP/SWITCH pass probability.
pub fn hom_pass_probability(rho: &QuantumState, sigma: &QuantumState) -> Result<f64> {
    Ok(1.0 - hom_coincidence(rho, sigma)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{clock, generalized_cx, shift};
    use crate::qmath::{random_pure_state, random_unitary, ONE};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn plus() -> QuantumState {
        QuantumState::pure(vec![2], vec![C64::new(FRAC_1_SQRT_2, 0.0); 2]).unwrap()
    }

    fn random_mixed(d: usize, seed: u64) -> QuantumState {
        let a = random_unitary(d, seed).unwrap();
        let weights: Vec<f64> = (0..d).map(|k| (k as f64 + 1.0).powi(2)).collect();
        let total: f64 = weights.iter().sum();
        let diag: Vec<C64> = weights.iter().map(|w| C64::new(w / total, 0.0)).collect();
        let rho = a
            .matrix()
            .matmul(&ComplexMatrix::from_diag(&diag))
            .matmul(&a.matrix().dagger());
        QuantumState::mixed(vec![d], rho).unwrap()
    }

    #[test]
    fn swap_test_cases() {
        for seed in 0..5 {
            let phi = random_pure_state(3, seed).unwrap();
            assert!((swap_test(&phi, &phi).unwrap().p_pass - 1.0).abs() < 1e-12);
        }
        let r = swap_test(&QuantumState::basis(2, 0).unwrap(), &QuantumState::basis(2, 1).unwrap()).unwrap();
        assert!((r.p_pass - 0.5).abs() < 1e-15);

        let rho = random_mixed(2, 3);
        let sigma = random_mixed(2, 4);
        let oracle = {
            let (a, b) = (rho.density(), sigma.density());
            let mut t = ZERO;
            for i in 0..2 {
                for j in 0..2 {
                    t += a[(i, j)] * b[(j, i)];
                }
            }
            (1.0 + t.re) / 2.0
        };
        let r = swap_test(&rho, &sigma).unwrap();
        assert!((r.p_pass - oracle).abs() < 1e-12);
        assert!(r.post_state_pass.is_some() && r.post_state_fail.is_some());
    }

    #[test]
    fn swap_test_is_symmetric() {
        for seed in 0..20 {
            let phi = random_pure_state(4, seed).unwrap();
            let psi = random_pure_state(4, seed + 100).unwrap();
            let a = swap_test(&phi, &psi).unwrap().p_pass;
            let b = swap_test(&psi, &phi).unwrap().p_pass;
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn swap_test_dimension_mismatch() {
        let a = QuantumState::basis(2, 0).unwrap();
        let b = QuantumState::basis(3, 0).unwrap();
        assert!(matches!(swap_test(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn single_switch_cases() {
        let u = random_unitary(3, 1).unwrap();
        let probe = random_pure_state(3, 2).unwrap();
        let r = single_switch_test(&u, &u, &probe).unwrap();
        assert!((r.p_pass - 1.0).abs() < 1e-12);
        assert!(r.post_state_fail.is_none());

        let iu = u.scaled(C64::new(0.0, 1.0)).unwrap();
        assert!((single_switch_test(&u, &iu, &probe).unwrap().p_pass - 0.5).abs() < 1e-12);

        let cnot = generalized_cx(2).unwrap();
        let id4 = UnitaryOp::identity(4);
        let zero_zero = QuantumState::basis(4, 0).unwrap();
        assert!((single_switch_test(&cnot, &id4, &zero_zero).unwrap().p_pass - 1.0).abs() < 1e-15);

        let mixed = random_mixed(3, 5);
        let r = single_switch_test(&u, &random_unitary(3, 9).unwrap(), &mixed).unwrap();
        assert!((0.0..=1.0).contains(&r.p_pass));

        assert!(single_switch_test(&u, &u, &QuantumState::basis(2, 0).unwrap()).is_err());
    }

    #[test]
    fn single_switch_depends_on_global_phase() {
        let id = UnitaryOp::identity(2);
        for alpha in [0.0, PI / 2.0, PI] {
            let r = single_switch_test(&id, &id.with_phase(alpha), &plus()).unwrap();
            assert!((r.p_pass - (1.0 + alpha.cos()) / 2.0).abs() < 1e-12);
        }
        let r = single_switch_test(&id, &id.with_phase(PI), &plus()).unwrap();
        assert!(r.p_pass.abs() < 1e-15);
        assert!(r.post_state_pass.is_none());
    }

    #[test]
    fn modified_swap_cases() {
        let u = random_unitary(3, 4).unwrap();
        let phi = random_pure_state(3, 5).unwrap();
        assert!((modified_swap_test(&u, &u, &phi, &phi).unwrap().p_pass - 1.0).abs() < 1e-12);

        let r = modified_swap_test(&UnitaryOp::identity(2), &clock(2), &plus(), &plus()).unwrap();
        assert!((r.p_pass - 0.5).abs() < 1e-12);
    }

    #[test]
    fn two_state_switch_cases() {
        let u1 = random_unitary(3, 7).unwrap();
        let u2 = random_unitary(3, 8).unwrap();
        let phi = random_pure_state(3, 9).unwrap();
        let pp = phi.tensor(&phi).unwrap();
        let a = two_state_switch_test(&u1, &u2, &pp).unwrap().p_pass;
        let b = modified_swap_test(&u1, &u2, &phi, &phi).unwrap().p_pass;
        assert!((a - b).abs() < 1e-12);
        assert!((0.5 - 1e-12..=1.0 + 1e-12).contains(&a));
        assert!((two_state_switch_test(&u1, &u1, &pp).unwrap().p_pass - 1.0).abs() < 1e-12);
        assert!(two_state_switch_test(&u1, &u2, &phi).is_err());
    }

    #[test]
    fn cx_doubling_of_basis_and_superposition() {
        let k = QuantumState::basis(3, 2).unwrap();
        let kk = cx_doubled(&k).unwrap();
        assert_eq!(kk.amplitudes().unwrap(), k.tensor(&k).unwrap().amplitudes().unwrap());
        // a superposition is copied into a correlated state, not |v>|v>
        let p = cx_doubled(&plus()).unwrap();
        let h = FRAC_1_SQRT_2;
        let expected = [C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)];
        for (a, b) in p.amplitudes().unwrap().iter().zip(expected) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn hom_cases() {
        let phi = random_pure_state(2, 1).unwrap();
        assert!(hom_coincidence(&phi, &phi).unwrap().abs() < 1e-12);
        let zero = QuantumState::basis(2, 0).unwrap();
        let one = QuantumState::basis(2, 1).unwrap();
        assert!((hom_coincidence(&zero, &one).unwrap() - 0.5).abs() < 1e-15);
        let x = shift(2);
        let out = zero.evolve(&x).unwrap();
        assert!((hom_pass_probability(&zero, &out).unwrap() - 0.5).abs() < 1e-15);
        assert!(hom_coincidence(&zero, &QuantumState::basis(3, 0).unwrap()).is_err());
    }

    #[test]
    fn conditioned_states_are_valid() {
        for seed in 0..20 {
            let d = 2 + (seed as usize % 3);
            let u1 = random_unitary(d, seed).unwrap();
            let u2 = random_unitary(d, seed + 50).unwrap();
            let phi = random_mixed(d, seed + 80);
            let r = single_switch_test(&u1, &u2, &phi).unwrap();
            for (p, s) in [(r.p_pass, &r.post_state_pass), (1.0 - r.p_pass, &r.post_state_fail)] {
                if p > 1e-9 {
                    let s = s.as_ref().expect("branch state present");
                    assert!(QuantumState::mixed(s.dims().to_vec(), s.density()).is_ok());
                }
            }
            let tr: C64 = r.post_state_pass.unwrap().density().trace().unwrap();
            assert!((tr - ONE).norm() < 1e-10);
        }
    }
}
