//! Probe-state families for the operator tests.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gates;
use crate::qmath::{
    hermitian_eigen, random_pure_state_with, ComplexMatrix, QuantumState, UnitaryOp, C64, ONE, VALIDATION_TOL,
    ZERO,
};

/// Weighted combination `Σ_k w_k |v_k><v_k|` of pure states, with weights
/// that may be negative or complex. Components live either on one
/// `d`-level register or on two (the doubled form `|v>|v>`).
#[derive(Clone, Debug, PartialEq)]
pub struct AffineStateMix {
    dim: usize,
    components: Vec<(C64, QuantumState)>,
}

impl AffineStateMix {
    pub fn new(dim: usize, components: Vec<(C64, QuantumState)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyProbeSet);
        }
        let registers = components[0].1.dims().len();
        for (w, s) in &components {
            if !w.re.is_finite() || !w.im.is_finite() {
                return Err(Error::NonFinite);
            }
            if !s.is_pure() {
                return Err(Error::NotPure);
            }
            let expected = vec![dim; registers];
            if registers > 2 || s.dims() != expected.as_slice() {
                return Err(Error::InvalidState(format!(
                    "component dims {:?} do not match register dimension {dim}",
                    s.dims()
                )));
            }
        }
        Ok(AffineStateMix { dim, components })
    }

    /// Dimension of a single register.
    pub fn register_dim(&self) -> usize {
        self.dim
    }

    pub fn registers(&self) -> usize {
        self.components[0].1.dims().len()
    }

    pub fn components(&self) -> impl Iterator<Item = (C64, &QuantumState)> {
        self.components.iter().map(|(w, s)| (*w, s))
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn weight_sum(&self) -> C64 {
        self.components.iter().map(|(w, _)| w).sum()
    }

    pub fn scaled(&self, z: C64) -> Self {
        AffineStateMix {
            dim: self.dim,
            components: self.components.iter().map(|(w, s)| (w * z, s.clone())).collect(),
        }
    }

    /// The flattened operator `Σ_k w_k |v_k><v_k|`.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let n = self.components[0].1.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for (w, s) in &self.components {
            m = m.add(&s.density().scale(*w));
        }
        m
    }

    pub fn is_convex(&self) -> bool {
        self.components
            .iter()
            .all(|(w, _)| w.im.abs() <= VALIDATION_TOL && w.re >= -VALIDATION_TOL)
            && (self.weight_sum() - ONE).norm() <= VALIDATION_TOL
    }

    /// The density matrix this mixture describes, when it is a convex one.
    pub fn to_density(&self) -> Result<QuantumState> {
        if !self.is_convex() {
            return Err(Error::NonPhysicalProbe(format!(
                "weights sum to {} and are not all nonnegative reals",
                self.weight_sum()
            )));
        }
        QuantumState::mixed(self.components[0].1.dims().to_vec(), self.to_matrix())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeLabel {
    Basis,
    Mixed,
    Haar { n: usize, seed: u64 },
    Magic,
    Entangled,
}

impl ProbeLabel {
    /// Parses the command-line token (`basis`, `mixed`, `haar:N`, `magic`,
    /// `entangled`); Haar probes take their seed from `seed`.
    pub fn parse(token: &str, seed: u64) -> Result<Self> {
        let t = token.trim().to_ascii_lowercase();
        match t.as_str() {
            "basis" => Ok(ProbeLabel::Basis),
            "mixed" => Ok(ProbeLabel::Mixed),
            "magic" => Ok(ProbeLabel::Magic),
            "entangled" => Ok(ProbeLabel::Entangled),
            _ => {
                let n = t
                    .strip_prefix("haar:")
                    .and_then(|n| n.parse::<usize>().ok())
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| Error::Parse(format!("unknown probe set `{token}`")))?;
                Ok(ProbeLabel::Haar { n, seed })
            }
        }
    }
}

impl fmt::Display for ProbeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbeLabel::Basis => write!(f, "basis"),
            ProbeLabel::Mixed => write!(f, "mixed"),
            ProbeLabel::Haar { n, .. } => write!(f, "haar:{n}"),
            ProbeLabel::Magic => write!(f, "magic"),
            ProbeLabel::Entangled => write!(f, "entangled"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProbeContents {
    States(Vec<QuantumState>),
    Mix(AffineStateMix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeSet {
    pub label: ProbeLabel,
    pub dim: usize,
    pub contents: ProbeContents,
}

impl ProbeSet {
    pub fn build(label: ProbeLabel, d: usize) -> Result<Self> {
        match label {
            ProbeLabel::Basis => basis_probes(d),
            ProbeLabel::Haar { n, seed } => haar_probes(n, d, seed),
            ProbeLabel::Mixed => Ok(ProbeSet {
                label,
                dim: d,
                contents: ProbeContents::States(vec![maximally_mixed(d)?]),
            }),
            ProbeLabel::Entangled => Ok(ProbeSet {
                label,
                dim: d,
                contents: ProbeContents::States(vec![entangled_probe(d)?]),
            }),
            ProbeLabel::Magic => Ok(ProbeSet {
                label,
                dim: d,
                contents: ProbeContents::Mix(magic_state(d)?),
            }),
        }
    }

    pub fn states(&self) -> Option<&[QuantumState]> {
        match &self.contents {
            ProbeContents::States(s) => Some(s),
            ProbeContents::Mix(_) => None,
        }
    }

    pub fn mix(&self) -> Option<&AffineStateMix> {
        match &self.contents {
            ProbeContents::Mix(m) => Some(m),
            ProbeContents::States(_) => None,
        }
    }

    pub fn len(&self) -> usize {
        match &self.contents {
            ProbeContents::States(s) => s.len(),
            ProbeContents::Mix(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Single-register pure probes, the ones per-probe fidelities are defined for.
    pub fn pure_states(&self) -> Option<&[QuantumState]> {
        self.states()
            .filter(|s| s.iter().all(|p| p.is_pure() && p.dims().len() == 1))
    }

    /// Two-register inputs for the two-state test, one per probe: `|u>|u>`
    /// for pure probes, `ρ ⊗ ρ` for a mixed single-register probe, and
    /// two-register probes as given. The magic mixture has no physical input.
    pub fn joint_probes(&self) -> Result<Vec<QuantumState>> {
        let states = self
            .states()
            .ok_or_else(|| Error::NonPhysicalProbe(self.label.to_string()))?;
        if states.is_empty() {
            return Err(Error::EmptyProbeSet);
        }
        states
            .iter()
            .map(|s| match s.dims().len() {
                1 => s.tensor(s),
                _ => Ok(s.clone()),
            })
            .collect()
    }
}

/// The `d` computational basis states.
pub fn basis_probes(d: usize) -> Result<ProbeSet> {
    if d < 2 {
        return Err(Error::BadDimension {
            name: "basis".into(),
            dim: d,
        });
    }
    let states = (0..d).map(|k| QuantumState::basis(d, k)).collect::<Result<_>>()?;
    Ok(ProbeSet {
        label: ProbeLabel::Basis,
        dim: d,
        contents: ProbeContents::States(states),
    })
}

/// `I/d`.
pub fn maximally_mixed(d: usize) -> Result<QuantumState> {
    if d < 2 {
        return Err(Error::BadDimension {
            name: "mixed".into(),
            dim: d,
        });
    }
    QuantumState::mixed(
        vec![d],
        ComplexMatrix::identity(d).scale(C64::new(1.0 / d as f64, 0.0)),
    )
}

/// `I/d` written as the uniform mixture of basis states.
pub fn maximally_mixed_mix(d: usize) -> Result<AffineStateMix> {
    let w = C64::new(1.0 / d as f64, 0.0);
    let comps = (0..d)
        .map(|k| Ok((w, QuantumState::basis(d, k)?)))
        .collect::<Result<_>>()?;
    AffineStateMix::new(d, comps)
}

/// `(1/d) Σ_k |k>|k><k|<k|` on two `d`-level registers.
pub fn entangled_probe(d: usize) -> Result<QuantumState> {
    if d < 2 {
        return Err(Error::BadDimension {
            name: "entangled".into(),
            dim: d,
        });
    }
    let n = d * d;
    let mut rho = ComplexMatrix::zeros(n, n);
    for k in 0..d {
        rho[(k * d + k, k * d + k)] = C64::new(1.0 / d as f64, 0.0);
    }
    QuantumState::mixed(vec![d, d], rho)
}

/// First component with non-negligible modulus made real and positive.
fn fix_phase(v: &mut [C64]) {
    if let Some(z) = v.iter().copied().find(|z| z.norm() > 1e-12) {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

fn is_diagonal(m: &ComplexMatrix) -> bool {
    (0..m.rows()).all(|r| (0..m.cols()).all(|c| r == c || m[(r, c)] == ZERO))
}

/// Orthonormal eigenbasis of a unitary (hence normal) operator, with its
/// unit-modulus eigenvalues. Diagonal operators decompose in the
/// computational basis; others through a generic Hermitian combination of
/// their real and imaginary parts, which share the eigenvectors.
pub fn unitary_eigensystem(u: &UnitaryOp) -> Result<Vec<(C64, Vec<C64>)>> {
    let m = u.matrix();
    let d = u.dim();
    if is_diagonal(m) {
        return Ok((0..d)
            .map(|k| {
                let mut v = vec![ZERO; d];
                v[k] = ONE;
                (m[(k, k)], v)
            })
            .collect());
    }
    // 0.618... keeps distinct roots of unity apart after the projection.
    let mix = (5f64.sqrt() - 1.0) / 2.0;
    let re_part = m.add(&m.dagger()).scale(C64::new(0.5, 0.0));
    let im_part = m.sub(&m.dagger()).scale(C64::new(0.0, -0.5));
    let h = re_part.add(&im_part.scale(C64::new(mix, 0.0)));
    let (_, vecs) = hermitian_eigen(&h);
    let mut out = Vec::with_capacity(d);
    for c in 0..d {
        let mut v: Vec<C64> = (0..d).map(|r| vecs[(r, c)]).collect();
        fix_phase(&mut v);
        let uv = m.apply(&v);
        let alpha: C64 = v.iter().zip(&uv).map(|(a, b)| a.conj() * b).sum();
        let residual = uv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - alpha * b).norm())
            .fold(0.0, f64::max);
        if residual > VALIDATION_TOL {
            return Err(Error::Consistency(format!(
                "eigenvector residual {residual:.3e} exceeds tolerance"
            )));
        }
        out.push((alpha, v));
    }
    Ok(out)
}

/// The operator mixture `(1/d³) Σ_i U_i` over the Heisenberg-Weyl basis,
/// expanded into `d³` weighted eigenvector components `α_{i,j}/d³ |u_{ij}>`.
pub fn magic_state(d: usize) -> Result<AffineStateMix> {
    let norm = (d as f64).powi(3);
    let mut comps = Vec::with_capacity(d * d * d);
    for u in gates::heisenberg_weyl(d)? {
        for (alpha, v) in unitary_eigensystem(&u)? {
            comps.push((alpha / norm, QuantumState::pure(vec![d], v)?));
        }
    }
    AffineStateMix::new(d, comps)
}

/// Doubles every component, `|v><v| ↦ |v>|v><v|<v|`, keeping the weights.
pub fn magic_squared_probe(m: &AffineStateMix) -> Result<AffineStateMix> {
    if m.registers() != 1 {
        return Err(Error::InvalidState("mixture is already doubled".into()));
    }
    let comps = m
        .components()
        .map(|(w, v)| Ok((w, v.tensor(v)?)))
        .collect::<Result<_>>()?;
    AffineStateMix::new(m.register_dim(), comps)
}

/// `n` Haar-random pure states drawn from one seeded stream.
pub fn haar_probes(n: usize, d: usize, seed: u64) -> Result<ProbeSet> {
    if n == 0 {
        return Err(Error::EmptyProbeSet);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states = (0..n)
        .map(|_| random_pure_state_with(d, &mut rng))
        .collect::<Result<_>>()?;
    Ok(ProbeSet {
        label: ProbeLabel::Haar { n, seed },
        dim: d,
        contents: ProbeContents::States(states),
    })
}
