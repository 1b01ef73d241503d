//! Sampling, discrimination verdicts and claim checks.
//!
//! Each probe gets its own random stream derived from `(seed, probe_index)`,
//! so results do not depend on the order or parallelism of evaluation.

use rand::distr::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::analytic;
use crate::circuits;
use crate::error::{check_dim, Error, Result};
use crate::gates;
use crate::probes::{self, ProbeSet};
use crate::qmath::{random_unitary, ComplexMatrix, QuantumState, UnitaryOp, C64, ONE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Fixed,
    Sequential,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    CertainlyDifferent,
    ConsistentWithEqual,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub probe_index: usize,
    pub shots: u64,
    pub passes: u64,
    pub p_hat: f64,
}

impl ShotRecord {
    fn new(probe_index: usize, shots: u64, passes: u64) -> Self {
        ShotRecord {
            probe_index,
            shots,
            passes,
            p_hat: passes as f64 / shots as f64,
        }
    }

    pub fn failures(&self) -> u64 {
        self.shots - self.passes
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.low <= x && x <= self.high
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub decision: Decision,
    /// First probe on which a failure was observed.
    pub witness_probe: Option<usize>,
    pub f_bar_estimate: f64,
    pub f_bar_interval: Interval,
    pub confidence: f64,
    pub total_shots: u64,
    pub records: Vec<ShotRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub claim_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
    pub holds_at: f64,
    pub holds: bool,
    /// For inequality claims: whether the two sides coincide.
    pub equality: Option<bool>,
}

impl ClaimReport {
    fn equality(claim_id: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let abs_diff = (lhs - rhs).abs();
        ClaimReport {
            claim_id: claim_id.to_string(),
            lhs,
            rhs,
            abs_diff,
            holds_at: tol,
            holds: abs_diff <= tol,
            equality: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscriminationOptions {
    pub shots_per_probe: u64,
    pub seed: u64,
    pub strategy: Strategy,
    /// The interval has confidence level `1 − epsilon`.
    pub epsilon: f64,
}

impl Default for DiscriminationOptions {
    fn default() -> Self {
        DiscriminationOptions {
            shots_per_probe: 1000,
            seed: 0,
            strategy: Strategy::Fixed,
            epsilon: 0.01,
        }
    }
}

/// Seeded, splittable stream for probe `stream` under `seed`.
pub fn probe_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// splitmix64 finalizer over a combination of `seed` and two indices.
pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed
        ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ b.wrapping_mul(0xC2B2_AE3D_27D4_EB4F).rotate_left(17);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: "pass probability must lie in [0, 1]",
            value: p,
        })
    }
}

fn check_shots(shots: u64) -> Result<()> {
    if shots == 0 {
        Err(Error::OutOfRange {
            what: "shot count must be positive",
            value: 0.0,
        })
    } else {
        Ok(())
    }
}

fn check_epsilon(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 0.5 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: "epsilon must lie in (0, 0.5)",
            value: eps,
        })
    }
}

/// Samples up to `shots` ancilla outcomes; with `stop_on_failure` the run
/// ends at the first failed shot.
fn sample(p: f64, shots: u64, rng: &mut ChaCha8Rng, stop_on_failure: bool, probe_index: usize) -> Result<ShotRecord> {
    check_probability(p)?;
    check_shots(shots)?;
    let coin = Bernoulli::new(p).map_err(|_| Error::OutOfRange {
        what: "pass probability must lie in [0, 1]",
        value: p,
    })?;
    let mut passes = 0;
    let mut run = 0;
    while run < shots {
        run += 1;
        if coin.sample(rng) {
            passes += 1;
        } else if stop_on_failure {
            break;
        }
    }
    Ok(ShotRecord::new(probe_index, run, passes))
}

/// `shots` Bernoulli(`p_pass`) outcomes from stream 0 of `seed`.
pub fn run_shots(p_pass: f64, shots: u64, seed: u64) -> Result<ShotRecord> {
    sample(p_pass, shots, &mut probe_rng(seed, 0), false, 0)
}

/// Hoeffding radius: `P(|p̂ − p| ≥ r) ≤ ε` for `r = sqrt(ln(2/ε) / (2n))`.
pub fn hoeffding_radius(shots: u64, epsilon: f64) -> f64 {
    ((2.0 / epsilon).ln() / (2.0 * shots as f64)).sqrt()
}

/// Solves `I_x(a, b) = q` for `x` by bisection.
fn beta_quantile(q: f64, a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if beta_reg(a, b, mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Two-sided Clopper-Pearson interval at level `1 − epsilon`.
pub fn clopper_pearson(passes: u64, shots: u64, epsilon: f64) -> Interval {
    let (x, n) = (passes as f64, shots as f64);
    let low = if passes == 0 {
        0.0
    } else {
        beta_quantile(epsilon / 2.0, x, n - x + 1.0)
    };
    let high = if passes == shots {
        1.0
    } else {
        beta_quantile(1.0 - epsilon / 2.0, x + 1.0, n - x)
    };
    Interval { low, high }
}

fn to_fidelity(p: f64) -> f64 {
    (2.0 * p - 1.0).max(0.0)
}

/// Exact two-state test pass probability for each probe of the set.
pub fn probe_pass_probabilities(u1: &UnitaryOp, u2: &UnitaryOp, probes: &ProbeSet) -> Result<Vec<f64>> {
    check_dim(u1.dim(), u2.dim())?;
    check_dim(u1.dim(), probes.dim)?;
    probes
        .joint_probes()?
        .iter()
        .map(|j| circuits::two_state_switch_test(u1, u2, j).map(|r| r.p_pass))
        .collect()
}

/// Two-state SWITCH test on every probe. The operators are declared
/// different as soon as any shot fails; otherwise the pooled pass rate gives
/// an estimate of F̄ with a Clopper-Pearson interval.
pub fn discriminate(
    u1: &UnitaryOp,
    u2: &UnitaryOp,
    probes: &ProbeSet,
    opts: &DiscriminationOptions,
) -> Result<Verdict> {
    check_shots(opts.shots_per_probe)?;
    check_epsilon(opts.epsilon)?;
    let exact = probe_pass_probabilities(u1, u2, probes)?;
    discriminate_with_probabilities(&exact, opts)
}

/// [`discriminate`] given the exact per-probe pass probabilities.
pub fn discriminate_with_probabilities(exact: &[f64], opts: &DiscriminationOptions) -> Result<Verdict> {
    if exact.is_empty() {
        return Err(Error::EmptyProbeSet);
    }
    check_shots(opts.shots_per_probe)?;
    check_epsilon(opts.epsilon)?;
    let shots = opts.shots_per_probe;
    let records = match opts.strategy {
        Strategy::Fixed => exact
            .par_iter()
            .enumerate()
            .map(|(i, &p)| sample(p, shots, &mut probe_rng(opts.seed, i as u64), false, i))
            .collect::<Result<Vec<_>>>()?,
        Strategy::Sequential => {
            let mut out = Vec::new();
            for (i, &p) in exact.iter().enumerate() {
                let rec = sample(p, shots, &mut probe_rng(opts.seed, i as u64), true, i)?;
                let failed = rec.failures() > 0;
                out.push(rec);
                if failed {
                    break;
                }
            }
            out
        }
    };
    Ok(assemble_verdict(records, opts.epsilon))
}

fn assemble_verdict(records: Vec<ShotRecord>, epsilon: f64) -> Verdict {
    let witness_probe = records.iter().find(|r| r.failures() > 0).map(|r| r.probe_index);
    let total_shots: u64 = records.iter().map(|r| r.shots).sum();
    let passes: u64 = records.iter().map(|r| r.passes).sum();
    let p_interval = clopper_pearson(passes, total_shots, epsilon);
    let f_bar_estimate = to_fidelity(passes as f64 / total_shots as f64);
    let f_bar_interval = Interval {
        low: to_fidelity(p_interval.low).min(f_bar_estimate),
        high: to_fidelity(p_interval.high).max(f_bar_estimate),
    };
    Verdict {
        decision: if witness_probe.is_some() {
            Decision::CertainlyDifferent
        } else {
            Decision::ConsistentWithEqual
        },
        witness_probe,
        f_bar_estimate,
        f_bar_interval,
        confidence: 1.0 - epsilon,
        total_shots,
        records,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapEstimate {
    pub re: f64,
    pub im: f64,
    /// Reconstructed `|<φ|U1†U2|φ>|²`.
    pub overlap: f64,
    pub interval: Interval,
    pub in_phase: ShotRecord,
    pub quadrature: ShotRecord,
}

fn square_range(iv: Interval) -> (f64, f64) {
    let lo = if iv.low <= 0.0 && iv.high >= 0.0 {
        0.0
    } else {
        iv.low.abs().min(iv.high.abs()).powi(2)
    };
    (lo, iv.low.abs().max(iv.high.abs()).powi(2))
}

/// Exact in-phase and quadrature parts of `<φ|U1†U2|φ>` read off the two
/// single-state passes `(U1, U2)` and `(iU1, U2)`.
pub fn two_pass_exact(u1: &UnitaryOp, u2: &UnitaryOp, phi: &QuantumState) -> Result<(f64, f64)> {
    let iu1 = u1.scaled(C64::new(0.0, 1.0))?;
    let p1 = circuits::single_switch_test(u1, u2, phi)?.p_pass;
    let p2 = circuits::single_switch_test(&iu1, u2, phi)?.p_pass;
    Ok((2.0 * p1 - 1.0, 2.0 * p2 - 1.0))
}

/// Sampled version of [`two_pass_exact`], combined into an overlap estimate.
pub fn two_pass_overlap(
    u1: &UnitaryOp,
    u2: &UnitaryOp,
    phi: &QuantumState,
    shots: u64,
    seed: u64,
    epsilon: f64,
) -> Result<OverlapEstimate> {
    if !phi.is_pure() {
        return Err(Error::NotPure);
    }
    check_epsilon(epsilon)?;
    let iu1 = u1.scaled(C64::new(0.0, 1.0))?;
    let p1 = circuits::single_switch_test(u1, u2, phi)?.p_pass;
    let p2 = circuits::single_switch_test(&iu1, u2, phi)?.p_pass;
    let in_phase = sample(p1, shots, &mut probe_rng(seed, 0), false, 0)?;
    let quadrature = sample(p2, shots, &mut probe_rng(seed, 1), false, 1)?;
    let re = 2.0 * in_phase.p_hat - 1.0;
    let im = 2.0 * quadrature.p_hat - 1.0;
    let overlap = analytic::overlap_from_two_passes(re, im)?.min(1.0);

    let to_quadrature = |iv: Interval| Interval {
        low: 2.0 * iv.low - 1.0,
        high: 2.0 * iv.high - 1.0,
    };
    let re_iv = to_quadrature(clopper_pearson(in_phase.passes, shots, epsilon / 2.0));
    let im_iv = to_quadrature(clopper_pearson(quadrature.passes, shots, epsilon / 2.0));
    let (re_lo, re_hi) = square_range(re_iv);
    let (im_lo, im_hi) = square_range(im_iv);
    let interval = Interval {
        low: (re_lo + im_lo).min(overlap),
        high: (re_hi + im_hi).clamp(overlap, 1.0),
    };
    Ok(OverlapEstimate {
        re,
        im,
        overlap,
        interval,
        in_phase,
        quadrature,
    })
}

/// Compares `P_R = Π(1+F_i)/2` against `P_M = ((1+F̄)/2)^N`.
pub fn check_am_gm(fidelities: &[f64]) -> Result<ClaimReport> {
    let r = analytic::repeated_test_probs(fidelities)?;
    let tol = 1e-12;
    Ok(ClaimReport {
        claim_id: "am_gm_repeated_vs_mixed".into(),
        lhs: r.p_r,
        rhs: r.p_m,
        abs_diff: (r.p_r - r.p_m).abs(),
        holds_at: tol,
        holds: r.p_r <= r.p_m + tol,
        equality: Some(r.relative_gap <= tol),
    })
}

/// `(1 + Re Σ_k w_k F_k)/2` over the single-register magic components,
/// with `F_k = |<v_k|U1†U2|v_k>|²`. Independent of any circuit simulation.
pub fn magic_weight_arithmetic(u1: &UnitaryOp, u2: &UnitaryOp) -> Result<f64> {
    check_dim(u1.dim(), u2.dim())?;
    let m = probes::magic_state(u1.dim())?;
    let mut acc = C64::new(0.0, 0.0);
    for (w, v) in m.components() {
        acc += w * analytic::probe_fidelity(u1, u2, v)?;
    }
    Ok((1.0 + acc.re) / 2.0)
}

/// Compares the magic-probe test value (doubled components, simulated one
/// by one) against `(1 + F_pro)/2`. The report records the gap; it does not
/// assume the two agree.
pub fn check_magic_claim(u1: &UnitaryOp, u2: &UnitaryOp) -> Result<ClaimReport> {
    check_dim(u1.dim(), u2.dim())?;
    let doubled = probes::magic_squared_probe(&probes::magic_state(u1.dim())?)?;
    let lhs = circuits::magic_probe_test(u1, u2, &doubled)?;
    let rhs = (1.0 + analytic::process_fidelity_closed(u1, u2)?) / 2.0;
    Ok(ClaimReport::equality("magic_probe_success", lhs, rhs, 1e-10))
}

/// Same comparison with each component prepared by the generalized CX,
/// `CX(|v> ⊗ |0>)`, as the entangling circuit would.
pub fn check_magic_claim_cx_route(u1: &UnitaryOp, u2: &UnitaryOp) -> Result<ClaimReport> {
    check_dim(u1.dim(), u2.dim())?;
    let m = probes::magic_state(u1.dim())?;
    let lhs = circuits::magic_probe_test(u1, u2, &m)?;
    let rhs = (1.0 + analytic::process_fidelity_closed(u1, u2)?) / 2.0;
    Ok(ClaimReport::equality("magic_probe_success_cx_route", lhs, rhs, 1e-10))
}

/// Operator-basis sum against the closed form `|tr(U1†U2)|²/d²`.
pub fn check_process_fidelity_identity(u1: &UnitaryOp, u2: &UnitaryOp) -> Result<ClaimReport> {
    let lhs = analytic::process_fidelity_sum(u1, u2)?;
    let rhs = analytic::process_fidelity_closed(u1, u2)?;
    Ok(ClaimReport::equality("process_fidelity_sum_vs_closed", lhs, rhs, 1e-10))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: f64,
    pub f_pro: f64,
    pub theta: f64,
    pub trials: u64,
    pub detections: u64,
    pub detection_rate: f64,
    /// Binomial standard error of `detection_rate`.
    pub std_error: f64,
    /// `1 − ((1+F_pro)/2)^{d³}`.
    pub predicted_rate: f64,
}

fn family_fidelity(theta: f64, d: usize) -> f64 {
    let z = C64::from_polar(1.0, theta) + (d as f64 - 1.0);
    z.norm_sqr() / (d * d) as f64
}

/// `R(θ) = W diag(e^{iθ}, 1, …, 1) W†`, `W` the DFT; every computational
/// basis state has `|<k|R|k>|² = |tr R|²/d²`.
pub fn fourier_phase_rotation(d: usize, theta: f64) -> Result<UnitaryOp> {
    let w = gates::fourier(d);
    let mut diag = vec![ONE; d];
    diag[0] = C64::from_polar(1.0, theta);
    let m = w
        .matrix()
        .matmul(&ComplexMatrix::from_diag(&diag))
        .matmul(&w.matrix().dagger());
    UnitaryOp::new(m)
}

/// A partner `u2` for `u1` with `F_pro(u1, u2) = 1 − δ`, and the angle used
/// (NaN when the shift operator stands in for δ = 1).
pub fn sweep_partner(u1: &UnitaryOp, delta: f64) -> Result<(UnitaryOp, f64)> {
    let d = u1.dim();
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::OutOfRange {
            what: "delta must lie in [0, 1]",
            value: delta,
        });
    }
    let target = 1.0 - delta;
    let floor = family_fidelity(std::f64::consts::PI, d);
    if target < floor - 1e-12 {
        if delta == 1.0 {
            return Ok((u1.compose(&gates::shift(d))?, f64::NAN));
        }
        return Err(Error::OutOfRange {
            what: "delta not reachable by the phase-rotation family at this dimension",
            value: delta,
        });
    }
    let (mut lo, mut hi) = (0.0, std::f64::consts::PI);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if family_fidelity(mid, d) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    Ok((u1.compose(&fourier_phase_rotation(d, theta)?)?, theta))
}

/// Detection rate of the fixed-budget basis-probe protocol with `d³` total
/// shots, as a function of the process-fidelity gap δ.
pub fn discrimination_sweep(d: usize, delta_grid: &[f64], trials: u64, seed: u64) -> Result<Vec<SweepRow>> {
    if trials == 0 {
        return Err(Error::OutOfRange {
            what: "trial count must be positive",
            value: 0.0,
        });
    }
    let u1 = random_unitary(d, seed)?;
    let basis = probes::basis_probes(d)?;
    let shots_per_probe = (d * d) as u64;
    let total = (d * d * d) as i32;
    delta_grid
        .iter()
        .enumerate()
        .map(|(di, &delta)| {
            let (u2, theta) = sweep_partner(&u1, delta)?;
            let f_pro = analytic::process_fidelity_closed(&u1, &u2)?;
            let exact = probe_pass_probabilities(&u1, &u2, &basis)?;
            let detections = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let opts = DiscriminationOptions {
                        shots_per_probe,
                        seed: derive_seed(seed, di as u64, t),
                        strategy: Strategy::Fixed,
                        epsilon: 0.01,
                    };
                    discriminate_with_probabilities(&exact, &opts)
                        .map(|v| u64::from(v.decision == Decision::CertainlyDifferent))
                })
                .sum::<Result<u64>>()?;
            let rate = detections as f64 / trials as f64;
            Ok(SweepRow {
                delta,
                f_pro,
                theta,
                trials,
                detections,
                detection_rate: rate,
                std_error: (rate * (1.0 - rate) / trials as f64).sqrt(),
                predicted_rate: 1.0 - ((1.0 + f_pro) / 2.0).powi(total),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{generalized_cx, rz, shift};
    use crate::probes::{ProbeLabel, ProbeSet};
    use std::f64::consts::PI;

    #[test]
    fn run_shots_edge_cases() {
        let r = run_shots(1.0, 500, 3).unwrap();
        assert_eq!((r.passes, r.shots), (500, 500));
        let r = run_shots(0.0, 500, 3).unwrap();
        assert_eq!(r.passes, 0);
        assert!(matches!(run_shots(1.5, 10, 0), Err(Error::OutOfRange { .. })));
        assert!(run_shots(0.5, 0, 0).is_err());
        assert_eq!(run_shots(0.3, 100, 9).unwrap(), run_shots(0.3, 100, 9).unwrap());
    }

    #[test]
    fn run_shots_concentrates() {
        // Hoeffding at ε = 1e-3 and n = 1e4 gives ≈ 0.0195
        let r = hoeffding_radius(10_000, 1e-3);
        assert!((r - 0.0195).abs() < 1e-4);
        for seed in 0..100 {
            let rec = run_shots(0.75, 10_000, seed).unwrap();
            assert!((rec.p_hat - 0.75).abs() < 0.02);
            assert_eq!(rec.p_hat, rec.passes as f64 / rec.shots as f64);
        }
    }

    #[test]
    fn clopper_pearson_known_values() {
        // x = 0: upper bound 1 − (ε/2)^{1/n}
        let iv = clopper_pearson(0, 10, 0.05);
        assert_eq!(iv.low, 0.0);
        assert!((iv.high - (1.0 - 0.025f64.powf(0.1))).abs() < 1e-10);
        let iv = clopper_pearson(10, 10, 0.05);
        assert!((iv.low - 0.025f64.powf(0.1)).abs() < 1e-10);
        assert_eq!(iv.high, 1.0);
        // x = 5, n = 10, 95%: (0.187086, 0.812914)
        let iv = clopper_pearson(5, 10, 0.05);
        assert!((iv.low - 0.187086).abs() < 1e-6);
        assert!((iv.high - 0.812914).abs() < 1e-6);
    }

    #[test]
    fn equal_operators_are_consistent() {
        let u = random_unitary(3, 4).unwrap();
        let basis = probes::basis_probes(3).unwrap();
        for strategy in [Strategy::Fixed, Strategy::Sequential] {
            let v = discriminate(
                &u,
                &u,
                &basis,
                &DiscriminationOptions {
                    shots_per_probe: 200,
                    seed: 1,
                    strategy,
                    epsilon: 0.01,
                },
            )
            .unwrap();
            assert_eq!(v.decision, Decision::ConsistentWithEqual);
            assert!(v.f_bar_interval.contains(1.0));
            assert_eq!(v.witness_probe, None);
            assert_eq!(v.total_shots, 600);
        }
    }

    #[test]
    fn cnot_versus_identity_is_always_caught() {
        let cnot = generalized_cx(2).unwrap();
        let id = UnitaryOp::identity(4);
        let basis = probes::basis_probes(4).unwrap();
        for seed in 0..100 {
            let opts = DiscriminationOptions {
                shots_per_probe: 100,
                seed,
                ..Default::default()
            };
            let v = discriminate(&cnot, &id, &basis, &opts).unwrap();
            assert_eq!(v.decision, Decision::CertainlyDifferent);
            assert!(matches!(v.witness_probe, Some(2) | Some(3)));
            // |00> and |01> never fail
            assert_eq!(v.records[0].failures(), 0);
            assert_eq!(v.records[1].failures(), 0);
        }
    }

    #[test]
    fn sequential_stops_at_first_failure() {
        let cnot = generalized_cx(2).unwrap();
        let id = UnitaryOp::identity(4);
        let basis = probes::basis_probes(4).unwrap();
        let opts = DiscriminationOptions {
            shots_per_probe: 100,
            seed: 5,
            strategy: Strategy::Sequential,
            epsilon: 0.01,
        };
        let v = discriminate(&cnot, &id, &basis, &opts).unwrap();
        assert_eq!(v.decision, Decision::CertainlyDifferent);
        assert_eq!(v.records.len(), 3);
        assert_eq!(v.records[2].failures(), 1);
        assert!(v.records[2].shots <= 100);
    }

    #[test]
    fn small_rotation_interval_excludes_one() {
        let id = UnitaryOp::identity(2);
        let u2 = rz(0.2);
        // basis probes are eigenstates of RZ: no failure is ever possible
        let basis = probes::basis_probes(2).unwrap();
        let opts = DiscriminationOptions {
            shots_per_probe: 50_000,
            seed: 2,
            ..Default::default()
        };
        let v = discriminate(&id, &u2, &basis, &opts).unwrap();
        assert_eq!(v.decision, Decision::ConsistentWithEqual);
        assert!(v.f_bar_interval.contains(1.0));

        // ρ⊗ρ with ρ = I/2 passes with probability (1 + F_pro)/2
        let mixed = ProbeSet::build(ProbeLabel::Mixed, 2).unwrap();
        let opts = DiscriminationOptions {
            shots_per_probe: 100_000,
            seed: 2,
            ..Default::default()
        };
        let v = discriminate(&id, &u2, &mixed, &opts).unwrap();
        let truth = 0.1f64.cos().powi(2);
        assert!((truth - 0.99003).abs() < 1e-5);
        assert!(v.f_bar_interval.high < 1.0);
        assert!(v.f_bar_interval.contains(truth));
    }

    #[test]
    fn magic_probes_cannot_be_sampled() {
        let id = UnitaryOp::identity(2);
        let magic = ProbeSet::build(ProbeLabel::Magic, 2).unwrap();
        assert!(matches!(
            discriminate(&id, &id, &magic, &DiscriminationOptions::default()),
            Err(Error::NonPhysicalProbe(_))
        ));
    }

    #[test]
    fn equal_operators_never_certainly_different() {
        let basis = probes::basis_probes(2).unwrap();
        for seed in 0..1000u64 {
            let u = random_unitary(2, seed).unwrap();
            let opts = DiscriminationOptions {
                shots_per_probe: 20,
                seed,
                ..Default::default()
            };
            let v = discriminate(&u, &u, &basis, &opts).unwrap();
            assert_eq!(v.decision, Decision::ConsistentWithEqual);
        }
    }

    #[test]
    fn strategies_agree_without_failures() {
        let u1 = UnitaryOp::identity(2);
        let u2 = rz(0.05);
        let mixed = ProbeSet::build(ProbeLabel::Haar { n: 4, seed: 3 }, 2).unwrap();
        for seed in 0..50 {
            let mk = |strategy| DiscriminationOptions {
                shots_per_probe: 10,
                seed,
                strategy,
                epsilon: 0.05,
            };
            let a = discriminate(&u1, &u2, &mixed, &mk(Strategy::Fixed)).unwrap();
            let b = discriminate(&u1, &u2, &mixed, &mk(Strategy::Sequential)).unwrap();
            if a.decision == Decision::ConsistentWithEqual || b.decision == Decision::ConsistentWithEqual {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn verdicts_are_schedule_independent() {
        let cnot = generalized_cx(2).unwrap();
        let id = UnitaryOp::identity(4);
        let basis = probes::basis_probes(4).unwrap();
        let opts = DiscriminationOptions {
            shots_per_probe: 64,
            seed: 77,
            ..Default::default()
        };
        let parallel = discriminate(&cnot, &id, &basis, &opts).unwrap();
        let exact = probe_pass_probabilities(&cnot, &id, &basis).unwrap();
        let serial: Vec<ShotRecord> = exact
            .iter()
            .enumerate()
            .rev()
            .map(|(i, &p)| sample(p, 64, &mut probe_rng(77, i as u64), false, i).unwrap())
            .collect();
        let mut serial = serial;
        serial.reverse();
        assert_eq!(parallel.records, serial);
    }

    #[test]
    fn two_pass_cases() {
        let u = random_unitary(2, 1).unwrap();
        let phi = crate::qmath::random_pure_state(2, 2).unwrap();
        let est = two_pass_overlap(&u, &u, &phi, 2000, 3, 0.01).unwrap();
        assert!(est.overlap > 0.99 && est.interval.contains(1.0));

        let (re, im) = two_pass_exact(&u, &u.with_phase(PI / 2.0), &phi).unwrap();
        assert!(re.abs() < 1e-12 && (im - 1.0).abs() < 1e-12);
        assert!((analytic::overlap_from_two_passes(re, im).unwrap() - 1.0).abs() < 1e-12);

        for seed in 0..5 {
            let u1 = random_unitary(3, seed).unwrap();
            let u2 = random_unitary(3, seed + 10).unwrap();
            let phi = crate::qmath::random_pure_state(3, seed + 20).unwrap();
            let est = two_pass_overlap(&u1, &u2, &phi, 100_000, seed, 0.01).unwrap();
            let truth = analytic::probe_fidelity(&u1, &u2, &phi).unwrap();
            assert!(est.interval.contains(truth), "{est:?} vs {truth}");
        }
        let mm = probes::maximally_mixed(2).unwrap();
        assert!(matches!(two_pass_overlap(&u, &u, &mm, 10, 0, 0.01), Err(Error::NotPure)));
    }

    #[test]
    fn am_gm_report_cases() {
        let r = check_am_gm(&[1.0, 1.0, 1.0]).unwrap();
        assert!(r.holds && r.equality == Some(true));
        let r = check_am_gm(&[1.0, 0.0]).unwrap();
        assert!((r.lhs - 0.5).abs() < 1e-15 && (r.rhs - 0.5625).abs() < 1e-15);
        assert!(r.holds && r.equality == Some(false));
    }

    #[test]
    fn magic_claim_identity_pair() {
        let id = UnitaryOp::identity(2);
        let r = check_magic_claim(&id, &id).unwrap();
        assert!((r.lhs - 0.625).abs() < 1e-12);
        assert_eq!(r.rhs, 1.0);
        assert!((r.abs_diff - 0.375).abs() < 1e-12);
        assert!(!r.holds);
        assert_eq!(r, check_magic_claim(&id, &id).unwrap());
        assert!((magic_weight_arithmetic(&id, &id).unwrap() - 0.625).abs() < 1e-12);

        let rx = check_magic_claim(&id, &shift(2)).unwrap();
        assert!((rx.rhs - 0.5).abs() < 1e-15);
        assert!((rx.lhs - magic_weight_arithmetic(&id, &shift(2)).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn sweep_partner_hits_target_fidelity() {
        for d in [2usize, 3] {
            let u1 = random_unitary(d, 8).unwrap();
            for delta in [0.0, 0.1, 0.3, 0.5] {
                let (u2, _) = sweep_partner(&u1, delta).unwrap();
                let f = analytic::process_fidelity_closed(&u1, &u2).unwrap();
                assert!((f - (1.0 - delta)).abs() < 1e-12);
                // basis probes each see F_i = F_pro
                let rep = analytic::average_fidelity(&u1, &u2, probes::basis_probes(d).unwrap().states().unwrap()).unwrap();
                for fi in rep.per_probe {
                    assert!((fi - f).abs() < 1e-12);
                }
            }
            let (u2, _) = sweep_partner(&u1, 1.0).unwrap();
            assert!(analytic::process_fidelity_closed(&u1, &u2).unwrap() < 1e-12);
        }
        let u1 = random_unitary(4, 1).unwrap();
        assert!(sweep_partner(&u1, 0.9).is_err());
        assert!(sweep_partner(&u1, -0.1).is_err());
    }

    #[test]
    fn sweep_basic_rows() {
        let rows = discrimination_sweep(2, &[0.0, 1.0], 400, 5).unwrap();
        assert_eq!(rows[0].detections, 0);
        assert!(rows[1].detection_rate >= 1.0 - 0.75f64.powi(8) - 0.03);
        assert_eq!(rows, discrimination_sweep(2, &[0.0, 1.0], 400, 5).unwrap());
    }
}
