use super::config::{Command, ExperimentConfig};
use super::envelope::*;
use super::CliError;
use crate::analytic;
use crate::circuits;
use crate::probes::{self, ProbeSet};
use crate::protocol::{self, DiscriminationOptions};
use crate::qmath::UnitaryOp;

/// Largest dimension for which the operator-basis sum is evaluated.
const SUM_DIM_LIMIT: usize = 32;

pub fn execute(cfg: &ExperimentConfig) -> Result<ResultEnvelope, CliError> {
    cfg.validate()?;
    match cfg.command {
        Command::Compare => cmd_compare(cfg),
        Command::Fidelity => cmd_fidelity(cfg),
        Command::Claims => cmd_claims(cfg),
        Command::Hom => cmd_hom(cfg),
    }
}

struct Setup {
    u1: UnitaryOp,
    u2: UnitaryOp,
    probes: ProbeSet,
    analytic: AnalyticBlock,
    notes: Vec<String>,
}

fn setup(cfg: &ExperimentConfig) -> Result<Setup, CliError> {
    let (u1, u2) = cfg.operators()?;
    let probes = cfg.probe_set()?;
    let mut notes = Vec::new();
    let d = cfg.dim;
    let f_pro_closed = analytic::process_fidelity_closed(&u1, &u2)?;
    let f_pro_sum = if d <= SUM_DIM_LIMIT {
        Some(analytic::process_fidelity_sum(&u1, &u2)?)
    } else {
        notes.push(format!("operator-basis sum skipped above dimension {SUM_DIM_LIMIT}"));
        None
    };

    let (per_probe, f_bar, magic_value) = match probes.mix() {
        Some(m) => {
            let doubled = probes::magic_squared_probe(m)?;
            let v = circuits::magic_probe_value(&u1, &u2, &doubled)?;
            notes.push("magic mixture is not a physical input; no per-probe probabilities".into());
            (Vec::new(), None, Some([v.re, v.im]))
        }
        None => {
            let exact = protocol::probe_pass_probabilities(&u1, &u2, &probes)?;
            let direct = match probes.pure_states() {
                Some(states) => Some(analytic::average_fidelity(&u1, &u2, states)?.per_probe),
                None => None,
            };
            let rows: Vec<ProbeAnalytic> = exact
                .iter()
                .enumerate()
                .map(|(i, &p)| ProbeAnalytic {
                    probe_index: i,
                    f_i: direct
                        .as_ref()
                        .map_or((2.0 * p - 1.0).clamp(0.0, 1.0), |f| f[i]),
                    p_exact: p,
                })
                .collect();
            let f_bar = rows.iter().map(|r| r.f_i).sum::<f64>() / rows.len() as f64;
            (rows, Some(f_bar), None)
        }
    };
    if let Some(fb) = f_bar {
        if (fb - f_pro_closed).abs() > 1e-12 {
            notes.push(format!(
                "average fidelity over `{}` probes ({fb:.6}) differs from process fidelity ({f_pro_closed:.6})",
                probes.label
            ));
        }
    }

    let analytic = AnalyticBlock {
        dim: d,
        probe_set: probes.label.to_string(),
        f_pro_closed,
        f_pro_sum,
        haar_average_fidelity: analytic::haar_average_fidelity(&u1, &u2)?,
        f_bar,
        magic_value,
        probes: per_probe,
    };
    Ok(Setup {
        u1,
        u2,
        probes,
        analytic,
        notes,
    })
}

fn envelope(cfg: &ExperimentConfig, s: Setup) -> ResultEnvelope {
    ResultEnvelope {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        seed: cfg.seed,
        config: cfg.clone(),
        analytic: s.analytic,
        empirical: None,
        hom: None,
        claims: Vec::new(),
        notes: s.notes,
    }
}

pub fn cmd_compare(cfg: &ExperimentConfig) -> Result<ResultEnvelope, CliError> {
    let s = setup(cfg)?;
    if s.analytic.probes.is_empty() {
        return Err(CliError::ConfigInvalid(format!(
            "probe set `{}` cannot be sampled",
            s.analytic.probe_set
        )));
    }
    let exact: Vec<f64> = s.analytic.probes.iter().map(|p| p.p_exact).collect();
    let opts = DiscriminationOptions {
        shots_per_probe: cfg.shots,
        seed: cfg.seed,
        strategy: cfg.strategy,
        epsilon: cfg.epsilon,
    };
    let verdict = protocol::discriminate_with_probabilities(&exact, &opts)?;
    let rows = verdict
        .records
        .iter()
        .map(|r| EmpiricalRow {
            probe_index: r.probe_index,
            p_exact: exact[r.probe_index],
            shots: r.shots,
            passes: r.passes,
            p_hat: r.p_hat,
        })
        .collect();
    let mut env = envelope(cfg, s);
    env.empirical = Some(EmpiricalBlock { rows, verdict });
    Ok(env)
}

pub fn cmd_fidelity(cfg: &ExperimentConfig) -> Result<ResultEnvelope, CliError> {
    Ok(envelope(cfg, setup(cfg)?))
}

pub fn cmd_claims(cfg: &ExperimentConfig) -> Result<ResultEnvelope, CliError> {
    let s = setup(cfg)?;
    let fidelities: Vec<f64> = if s.analytic.probes.is_empty() {
        let basis = probes::basis_probes(cfg.dim)?;
        let states = basis.states().unwrap_or_default();
        analytic::average_fidelity(&s.u1, &s.u2, states)?.per_probe
    } else {
        s.analytic.probes.iter().map(|p| p.f_i).collect()
    };
    let mut claims = vec![
        protocol::check_magic_claim(&s.u1, &s.u2)?,
        protocol::check_magic_claim_cx_route(&s.u1, &s.u2)?,
        protocol::check_am_gm(&fidelities)?,
    ];
    if cfg.dim <= SUM_DIM_LIMIT {
        claims.push(protocol::check_process_fidelity_identity(&s.u1, &s.u2)?);
    }
    let mut env = envelope(cfg, s);
    env.claims = claims;
    Ok(env)
}

pub fn cmd_hom(cfg: &ExperimentConfig) -> Result<ResultEnvelope, CliError> {
    let s = setup(cfg)?;
    let phi = s
        .probes
        .pure_states()
        .and_then(|p| p.first())
        .cloned()
        .ok_or_else(|| {
            CliError::ConfigInvalid(format!(
                "hom needs a pure single-register probe, `{}` has none",
                s.analytic.probe_set
            ))
        })?;
    let rho = phi.evolve(&s.u1)?;
    let sigma = phi.evolve(&s.u2)?;
    let coincidence = circuits::hom_coincidence(&rho, &sigma)?;
    let pass_probability = circuits::hom_pass_probability(&rho, &sigma)?;
    let two_state = circuits::two_state_switch_test(&s.u1, &s.u2, &phi.tensor(&phi)?)?.p_pass;
    let rec = protocol::run_shots(coincidence, cfg.shots, cfg.seed)?;
    let radius = protocol::hoeffding_radius(cfg.shots, cfg.epsilon);
    let hom = HomBlock {
        probe_index: 0,
        coincidence,
        pass_probability,
        two_state_pass_probability: two_state,
        shots: rec.shots,
        coincidences: rec.passes,
        coincidence_rate: rec.p_hat,
        hoeffding_radius: radius,
        within_bound: (rec.p_hat - coincidence).abs() < radius,
    };
    let mut env = envelope(cfg, s);
    env.hom = Some(hom);
    Ok(env)
}
