//! Named gates and the controlled constructions used by the test circuits.
//!
//! Register ordering is big-endian throughout: in `|c>|x>|y>` the ancilla `c`
//! is the most significant index.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::path::PathBuf;

use crate::error::{check_dim, Error, Result};
use crate::qmath::{ComplexMatrix, UnitaryOp, C64, ONE, ZERO};

fn unitary(m: ComplexMatrix) -> UnitaryOp {
    UnitaryOp::new(m).expect("gate constructors build exact unitaries")
}

fn require(name: &str, dim: usize, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::BadDimension {
            name: name.to_string(),
            dim,
        })
    }
}

pub fn hadamard() -> UnitaryOp {
    let h = FRAC_1_SQRT_2;
    unitary(ComplexMatrix::from_real(2, 2, &[h, h, h, -h]).unwrap())
}

/// Generalized shift `X|k> = |k+1 mod d>`.
pub fn shift(d: usize) -> UnitaryOp {
    unitary(ComplexMatrix::from_fn(d, d, |r, c| {
        if r == (c + 1) % d {
            ONE
        } else {
            ZERO
        }
    }))
}

/// Generalized clock `Z|k> = ω^k |k>`, `ω = e^{2πi/d}`.
pub fn clock(d: usize) -> UnitaryOp {
    let diag: Vec<C64> = (0..d)
        .map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64))
        .collect();
    unitary(ComplexMatrix::from_diag(&diag))
}

pub fn pauli_y() -> UnitaryOp {
    unitary(ComplexMatrix::new(2, 2, vec![ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO]).unwrap())
}

pub fn phase_s() -> UnitaryOp {
    unitary(ComplexMatrix::from_diag(&[ONE, C64::new(0.0, 1.0)]))
}

/// `RZ(θ) = diag(e^{-iθ/2}, e^{iθ/2})`.
pub fn rz(theta: f64) -> UnitaryOp {
    unitary(ComplexMatrix::from_diag(&[
        C64::from_polar(1.0, -theta / 2.0),
        C64::from_polar(1.0, theta / 2.0),
    ]))
}

/// Unitary discrete Fourier transform, `W[j,k] = ω^{jk}/√d`.
pub fn fourier(d: usize) -> UnitaryOp {
    let s = 1.0 / (d as f64).sqrt();
    unitary(ComplexMatrix::from_fn(d, d, |j, k| {
        C64::from_polar(s, 2.0 * PI * ((j * k) % d) as f64 / d as f64)
    }))
}

/// SWAP of two `d`-level registers.
pub fn swap(d: usize) -> UnitaryOp {
    let n = d * d;
    unitary(ComplexMatrix::from_fn(n, n, |r, c| {
        let (x, y) = (c / d, c % d);
        if r == y * d + x {
            ONE
        } else {
            ZERO
        }
    }))
}

/// `|0><0| ⊗ on_zero + |1><1| ⊗ on_one`.
pub fn controlled_pair(on_zero: &UnitaryOp, on_one: &UnitaryOp) -> Result<UnitaryOp> {
    check_dim(on_zero.dim(), on_one.dim())?;
    let n = on_zero.dim();
    let mut m = ComplexMatrix::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            m[(r, c)] = on_zero.matrix()[(r, c)];
            m[(n + r, n + c)] = on_one.matrix()[(r, c)];
        }
    }
    UnitaryOp::new(m)
}

/// Controlled SWAP on an ancilla plus two `d`-level registers (dimension `2d²`).
pub fn controlled_swap(d: usize) -> Result<UnitaryOp> {
    require("CSWAP", d, d >= 2)?;
    controlled_pair(&UnitaryOp::identity(d * d), &swap(d))
}

/// Applies `u1` when the ancilla is `|0>` and `u2` when it is `|1>`.
pub fn switch_gate(u1: &UnitaryOp, u2: &UnitaryOp) -> Result<UnitaryOp> {
    controlled_pair(u1, u2)
}

/// `|0><0| ⊗ U1⊗U2 + |1><1| ⊗ U2⊗U1` over two `d`-level registers.
pub fn two_state_switch_gate(u1: &UnitaryOp, u2: &UnitaryOp) -> Result<UnitaryOp> {
    check_dim(u1.dim(), u2.dim())?;
    controlled_pair(&u1.tensor(u2)?, &u2.tensor(u1)?)
}

/// `CX|x>|y> = |x>|x+y mod d>`.
pub fn generalized_cx(d: usize) -> Result<UnitaryOp> {
    require("CX", d, d >= 2)?;
    let n = d * d;
    Ok(unitary(ComplexMatrix::from_fn(n, n, |r, c| {
        let (x, y) = (c / d, c % d);
        if r == x * d + (x + y) % d {
            ONE
        } else {
            ZERO
        }
    })))
}

/// `X^a Z^b`.
pub fn weyl_element(d: usize, a: usize, b: usize) -> Result<UnitaryOp> {
    require("HW", d, d >= 2 && a < d && b < d)?;
    let x = shift(d).into_matrix();
    let z = clock(d).into_matrix();
    let mut m = ComplexMatrix::identity(d);
    for _ in 0..a {
        m = m.matmul(&x);
    }
    for _ in 0..b {
        m = m.matmul(&z);
    }
    UnitaryOp::new(m)
}

/// The `d²` Heisenberg-Weyl operators, element `a·d + b` being `X^a Z^b`.
pub fn heisenberg_weyl(d: usize) -> Result<Vec<UnitaryOp>> {
    require("HW", d, d >= 2)?;
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            out.push(weyl_element(d, a, b)?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateName {
    I,
    X,
    Y,
    Z,
    H,
    S,
    Rz,
    Cnot,
    Swap,
    Hw,
    Custom(PathBuf),
    Tensor(Vec<GateSpec>),
}

/// A gate in the command-line mini-language, resolved at a total operator
/// dimension `dim`.
///
/// Grammar: `NAME`, `NAME(arg, ...)`, or `tensor:F1,F2,...` where each factor
/// may carry an explicit `@dim` suffix. Anything that looks like a path
/// (`CUSTOM(path)`, or a token containing `/` or ending in `.json`) is read as
/// a matrix file. Names are case-insensitive; angles are in radians.
#[derive(Clone, Debug, PartialEq)]
pub struct GateSpec {
    pub name: GateName,
    pub dim: usize,
    pub params: Vec<f64>,
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(s[start..].trim());
    parts
}

fn integer_root(n: usize, k: u32) -> Option<usize> {
    let guess = (n as f64).powf(1.0 / k as f64).round() as usize;
    (guess.saturating_sub(1)..=guess + 1).find(|&r| r > 0 && r.checked_pow(k) == Some(n))
}

fn looks_like_path(s: &str) -> bool {
    s.contains('/') || s.to_ascii_lowercase().ends_with(".json")
}

impl GateSpec {
    pub fn new(name: GateName, dim: usize) -> Self {
        GateSpec {
            name,
            dim,
            params: Vec::new(),
        }
    }

    pub fn parse(token: &str, dim: usize) -> Result<Self> {
        let token = token.trim();
        if token.is_empty() {
            return Err(Error::UnknownGate(String::new()));
        }
        if let Some(rest) = token
            .get(..7)
            .filter(|p| p.eq_ignore_ascii_case("tensor:"))
            .map(|_| &token[7..])
        {
            return Self::parse_tensor(rest, dim);
        }
        if looks_like_path(token) && !token.to_ascii_lowercase().starts_with("custom(") {
            return Ok(GateSpec::new(GateName::Custom(PathBuf::from(token)), dim));
        }

        let (head, args) = match token.find('(') {
            Some(open) => {
                if !token.ends_with(')') {
                    return Err(Error::BadParameter(format!("unbalanced parentheses in `{token}`")));
                }
                (&token[..open], Some(&token[open + 1..token.len() - 1]))
            }
            None => (token, None),
        };
        let head_lc = head.trim().to_ascii_lowercase();
        if head_lc == "custom" {
            let path = args.unwrap_or("").trim();
            if path.is_empty() {
                return Err(Error::BadParameter("CUSTOM needs a file path".into()));
            }
            return Ok(GateSpec::new(GateName::Custom(PathBuf::from(path)), dim));
        }
        let name = match head_lc.as_str() {
            "i" | "id" => GateName::I,
            "x" => GateName::X,
            "y" => GateName::Y,
            "z" => GateName::Z,
            "h" => GateName::H,
            "s" => GateName::S,
            "rz" => GateName::Rz,
            "cnot" | "cx" => GateName::Cnot,
            "swap" => GateName::Swap,
            "hw" => GateName::Hw,
            _ => return Err(Error::UnknownGate(token.to_string())),
        };
        let params = match args {
            None => Vec::new(),
            Some(a) => split_top_level(a)
                .into_iter()
                .map(|p| {
                    p.parse::<f64>()
                        .map_err(|_| Error::BadParameter(format!("`{p}` is not a number")))
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let expected = match name {
            GateName::Rz => 1,
            GateName::Hw => 2,
            _ => 0,
        };
        if params.len() != expected {
            return Err(Error::BadParameter(format!(
                "`{head}` takes {expected} parameter(s), got {}",
                params.len()
            )));
        }
        Ok(GateSpec { name, dim, params })
    }

    fn parse_tensor(body: &str, dim: usize) -> Result<Self> {
        let raw = split_top_level(body);
        if raw.iter().any(|f| f.is_empty()) {
            return Err(Error::BadParameter("empty tensor factor".into()));
        }
        let k = raw.len() as u32;
        let default_dim = integer_root(dim, k);
        let mut factors = Vec::with_capacity(raw.len());
        for f in raw {
            let (tok, fdim) = match f.rsplit_once('@') {
                Some((t, d)) => {
                    let d = d
                        .trim()
                        .parse::<usize>()
                        .map_err(|_| Error::BadParameter(format!("bad factor dimension in `{f}`")))?;
                    (t, d)
                }
                None => (
                    f,
                    default_dim.ok_or_else(|| Error::BadDimension {
                        name: format!("tensor:{body}"),
                        dim,
                    })?,
                ),
            };
            factors.push(GateSpec::parse(tok, fdim)?);
        }
        let product: usize = factors.iter().map(|f| f.dim).product();
        if product != dim {
            return Err(Error::BadDimension {
                name: format!("tensor:{body}"),
                dim,
            });
        }
        Ok(GateSpec::new(GateName::Tensor(factors), dim))
    }
}

impl fmt::Display for GateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match &self.name {
            GateName::I => "I",
            GateName::X => "X",
            GateName::Y => "Y",
            GateName::Z => "Z",
            GateName::H => "H",
            GateName::S => "S",
            GateName::Rz => "RZ",
            GateName::Cnot => "CNOT",
            GateName::Swap => "SWAP",
            GateName::Hw => "HW",
            GateName::Custom(p) => return write!(f, "CUSTOM({})", p.display()),
            GateName::Tensor(fs) => {
                let parts: Vec<String> = fs.iter().map(|g| format!("{g}@{}", g.dim)).collect();
                return write!(f, "tensor:{}", parts.join(","));
            }
        };
        if self.params.is_empty() {
            write!(f, "{name}")
        } else {
            let ps: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
            write!(f, "{name}({})", ps.join(","))
        }
    }
}

fn as_index(v: f64, d: usize) -> Result<usize> {
    if v.fract() != 0.0 || v < 0.0 || v >= d as f64 {
        return Err(Error::BadParameter(format!("HW index {v} must be an integer in [0, {d})")));
    }
    Ok(v as usize)
}

pub fn resolve_gate(spec: &GateSpec) -> Result<UnitaryOp> {
    let d = spec.dim;
    let label = spec.to_string();
    if d == 0 {
        return Err(Error::BadDimension { name: label, dim: d });
    }
    match &spec.name {
        GateName::I => Ok(UnitaryOp::identity(d)),
        GateName::X => {
            require(&label, d, d >= 2)?;
            Ok(shift(d))
        }
        GateName::Z => {
            require(&label, d, d >= 2)?;
            Ok(clock(d))
        }
        GateName::Y => {
            require(&label, d, d == 2)?;
            Ok(pauli_y())
        }
        GateName::H => {
            require(&label, d, d == 2)?;
            Ok(hadamard())
        }
        GateName::S => {
            require(&label, d, d == 2)?;
            Ok(phase_s())
        }
        GateName::Rz => {
            require(&label, d, d == 2)?;
            let theta = spec.params[0];
            if !theta.is_finite() {
                return Err(Error::BadParameter(format!("angle {theta}")));
            }
            Ok(rz(theta))
        }
        GateName::Cnot => {
            let n = integer_root(d, 2).filter(|&n| n >= 2);
            let n = n.ok_or(Error::BadDimension { name: label, dim: d })?;
            generalized_cx(n)
        }
        GateName::Swap => {
            let n = integer_root(d, 2).filter(|&n| n >= 2);
            let n = n.ok_or(Error::BadDimension { name: label, dim: d })?;
            Ok(swap(n))
        }
        GateName::Hw => {
            require(&label, d, d >= 2)?;
            weyl_element(d, as_index(spec.params[0], d)?, as_index(spec.params[1], d)?)
        }
        GateName::Custom(path) => {
            let u = crate::cli::matrix_file::read_unitary(path)?;
            check_dim(d, u.dim())?;
            Ok(u)
        }
        GateName::Tensor(factors) => {
            let mut acc = UnitaryOp::identity(1);
            for f in factors {
                acc = acc.tensor(&resolve_gate(f)?)?;
            }
            check_dim(d, acc.dim())?;
            Ok(acc)
        }
    }
}
