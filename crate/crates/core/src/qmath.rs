//! Dense complex linear algebra and the validated state/operator types.
//!
//! Everything is row-major and dense. The circuits in this crate never need
//! more than a few hundred basis states, so there is no sparse path; anything
//! above [`MAX_DIM`] is rejected at construction time.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Largest total Hilbert-space dimension accepted by the validated types.
pub const MAX_DIM: usize = 4096;

/// Tolerance for unitarity, hermiticity, trace and normalization checks.
pub const VALIDATION_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::BadShape {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![ONE; n])
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (k, &z) in diag.iter().enumerate() {
            m[(k, k)] = z;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Real-valued convenience constructor, mostly for tests and literals.
    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(rows, cols, values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// `|v><v|` for a column vector `v`.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), v.len(), |r, c| v[r] * v[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn trace(&self) -> Result<C64> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((0..self.rows).map(|k| self[(k, k)]).sum())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (r1, c1, r2, c2) = (self.rows, self.cols, other.rows, other.cols);
        let mut out = Self::zeros(r1 * r2, c1 * c2);
        for i in 0..r1 {
            for j in 0..c1 {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..r2 {
                    let row = (i * r2 + k) * out.cols + j * c2;
                    let src = &other.data[k * c2..(k + 1) * c2];
                    for (dst, &b) in out.data[row..row + c2].iter_mut().zip(src) {
                        *dst = a * b;
                    }
                }
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let src = &other.data[k * other.cols..(k + 1) * other.cols];
                for (dst, &b) in out_row.iter_mut().zip(src) {
                    *dst += a * b;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        self.data
            .chunks(self.cols)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scale(&self, z: C64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a * z).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    /// Copy of the `nr x nc` block whose top-left corner is `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |r, c| self[(r0 + r, c0 + c)])
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.dagger()) <= tol
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.data.chunks(self.cols) {
            let cells: Vec<String> = row
                .iter()
                .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
                .collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Kronecker product.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Conjugate transpose.
pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    a.dagger()
}

pub fn mat_trace(a: &ComplexMatrix) -> Result<C64> {
    a.trace()
}

fn check_cap(dim: usize) -> Result<()> {
    if dim > MAX_DIM {
        Err(Error::DimensionTooLarge(dim))
    } else {
        Ok(())
    }
}

/// A square matrix that has passed the unitarity check.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOp {
    matrix: ComplexMatrix,
}

impl UnitaryOp {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NonSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        check_cap(matrix.rows())?;
        let dev = matrix
            .dagger()
            .matmul(&matrix)
            .max_abs_diff(&ComplexMatrix::identity(matrix.rows()));
        if dev > VALIDATION_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(UnitaryOp { matrix })
    }

    pub fn identity(d: usize) -> Self {
        UnitaryOp {
            matrix: ComplexMatrix::identity(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dagger(&self) -> Self {
        UnitaryOp {
            matrix: self.matrix.dagger(),
        }
    }

    /// Operator product `self · other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(UnitaryOp {
            matrix: self.matrix.matmul(&other.matrix),
        })
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        check_cap(self.dim() * other.dim())?;
        Ok(UnitaryOp {
            matrix: self.matrix.kron(&other.matrix),
        })
    }

    /// `e^{iα} U`.
    pub fn with_phase(&self, alpha: f64) -> Self {
        UnitaryOp {
            matrix: self.matrix.scale(C64::from_polar(1.0, alpha)),
        }
    }

    /// Multiply by an arbitrary unit-modulus scalar, e.g. `i` for the
    /// quadrature pass of the single-state test.
    pub fn scaled(&self, z: C64) -> Result<Self> {
        if (z.norm() - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::NotUnitary((z.norm() - 1.0).abs()));
        }
        Ok(UnitaryOp {
            matrix: self.matrix.scale(z),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateKind {
    Pure(Vec<C64>),
    Mixed(ComplexMatrix),
}

/// A normalized pure vector or a valid density matrix over one or more
/// registers. The register dimensions multiply to the total dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    dims: Vec<usize>,
    kind: StateKind,
}

fn total_dim(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidState(format!("bad register dims {dims:?}")));
    }
    let total = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
    let total = total.ok_or(Error::DimensionTooLarge(usize::MAX))?;
    check_cap(total)?;
    Ok(total)
}

fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

impl QuantumState {
    pub fn pure(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        let total = total_dim(&dims)?;
        check_dim(total, amplitudes.len())?;
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = norm_sqr(&amplitudes);
        if (n - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::InvalidState(format!("norm^2 = {n}")));
        }
        Ok(QuantumState {
            dims,
            kind: StateKind::Pure(amplitudes),
        })
    }

    /// Normalizes `amplitudes` before validating.
    pub fn pure_normalized(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm_sqr(&amplitudes).sqrt();
        if n.is_nan() || n <= 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::pure(dims, amplitudes.into_iter().map(|z| z / n).collect())
    }

    pub fn mixed(dims: Vec<usize>, rho: ComplexMatrix) -> Result<Self> {
        let total = total_dim(&dims)?;
        if !rho.is_square() {
            return Err(Error::NonSquare {
                rows: rho.rows(),
                cols: rho.cols(),
            });
        }
        check_dim(total, rho.rows())?;
        if !rho.is_hermitian(VALIDATION_TOL) {
            return Err(Error::InvalidState("density matrix is not Hermitian".into()));
        }
        let tr = rho.trace()?;
        if (tr - ONE).norm() > VALIDATION_TOL {
            return Err(Error::InvalidState(format!("trace = {tr}")));
        }
        let (evals, _) = hermitian_eigen(&rho);
        if let Some(&min) = evals.iter().min_by(|a, b| a.total_cmp(b)) {
            if min < -VALIDATION_TOL {
                return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
            }
        }
        Ok(QuantumState {
            dims,
            kind: StateKind::Mixed(rho),
        })
    }

    /// Computational basis state `|k>` of a single `d`-level register.
    pub fn basis(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(Error::InvalidState(format!("basis index {k} >= {d}")));
        }
        let mut v = vec![ZERO; d];
        v[k] = ONE;
        Self::pure(vec![d], v)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn kind(&self) -> &StateKind {
        &self.kind
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.kind, StateKind::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&[C64]> {
        match &self.kind {
            StateKind::Pure(v) => Some(v),
            StateKind::Mixed(_) => None,
        }
    }

    pub fn density(&self) -> ComplexMatrix {
        match &self.kind {
            StateKind::Pure(v) => ComplexMatrix::outer(v),
            StateKind::Mixed(m) => m.clone(),
        }
    }

    /// Joint state `self ⊗ other`; registers are concatenated.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        total_dim(&dims)?;
        let kind = match (&self.kind, &other.kind) {
            (StateKind::Pure(a), StateKind::Pure(b)) => StateKind::Pure(
                a.iter()
                    .flat_map(|x| b.iter().map(move |y| x * y))
                    .collect(),
            ),
            _ => StateKind::Mixed(self.density().kron(&other.density())),
        };
        Ok(QuantumState { dims, kind })
    }

    /// `U|v>` or `U ρ U†`. The result is valid by construction.
    pub fn evolve(&self, u: &UnitaryOp) -> Result<Self> {
        check_dim(self.dim(), u.dim())?;
        let kind = match &self.kind {
            StateKind::Pure(v) => StateKind::Pure(u.matrix().apply(v)),
            StateKind::Mixed(rho) => {
                StateKind::Mixed(u.matrix().matmul(rho).matmul(&u.matrix().dagger()))
            }
        };
        Ok(QuantumState {
            dims: self.dims.clone(),
            kind,
        })
    }

    /// `<self|other>` for two pure states.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        check_dim(self.dim(), other.dim())?;
        match (&self.kind, &other.kind) {
            (StateKind::Pure(a), StateKind::Pure(b)) => {
                Ok(a.iter().zip(b).map(|(x, y)| x.conj() * y).sum())
            }
            _ => Err(Error::NotPure),
        }
    }

    /// `tr(ρσ)`, real for Hermitian arguments.
    pub fn overlap(&self, other: &Self) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        if let (StateKind::Pure(_), StateKind::Pure(_)) = (&self.kind, &other.kind) {
            return Ok(self.inner(other)?.norm_sqr());
        }
        Ok(trace_of_product(&self.density(), &other.density()).re)
    }

    pub fn purity(&self) -> f64 {
        match &self.kind {
            StateKind::Pure(_) => 1.0,
            StateKind::Mixed(m) => trace_of_product(m, m).re,
        }
    }

    /// Reduced density matrix of register `keep` of a two-register state.
    pub fn reduced(&self, keep: usize) -> Result<Self> {
        if self.dims.len() != 2 || keep > 1 {
            return Err(Error::InvalidState(
                "partial trace needs a two-register state".into(),
            ));
        }
        let (da, db) = (self.dims[0], self.dims[1]);
        let rho = self.density();
        let out = if keep == 0 {
            ComplexMatrix::from_fn(da, da, |i, j| {
                (0..db).map(|k| rho[(i * db + k, j * db + k)]).sum()
            })
        } else {
            ComplexMatrix::from_fn(db, db, |i, j| {
                (0..da).map(|k| rho[(k * db + i, k * db + j)]).sum()
            })
        };
        let d = out.rows();
        Self::mixed(vec![d], out)
    }
}

/// `tr(AB)` without forming the product.
pub fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    assert_eq!(a.cols(), b.rows());
    assert_eq!(a.rows(), b.cols());
    let mut acc = ZERO;
    for i in 0..a.rows() {
        for k in 0..a.cols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Eigenvalues (ascending) and column eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let eig = nalgebra::SymmetricEigen::new(m.to_nalgebra());
    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

fn complex_gaussian<R: Rng>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random unitary drawn from `rng`: QR of a complex Ginibre matrix with
/// the phases of `diag(R)` pushed into `Q`.
pub fn random_unitary_with<R: Rng>(d: usize, rng: &mut R) -> Result<UnitaryOp> {
    if d == 0 {
        return Err(Error::InvalidState("dimension must be positive".into()));
    }
    check_cap(d)?;
    let g = DMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = ComplexMatrix::from_nalgebra(&q);
    for c in 0..d {
        let rc = r[(c, c)];
        let phase = if rc.norm() > 0.0 { rc / rc.norm() } else { ONE };
        for row in 0..d {
            q[(row, c)] *= phase;
        }
    }
    UnitaryOp::new(q)
}

pub fn random_unitary(d: usize, seed: u64) -> Result<UnitaryOp> {
    random_unitary_with(d, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Haar-random pure state drawn from `rng` (normalized complex Gaussian vector).
pub fn random_pure_state_with<R: Rng>(d: usize, rng: &mut R) -> Result<QuantumState> {
    if d == 0 {
        return Err(Error::InvalidState("dimension must be positive".into()));
    }
    let v: Vec<C64> = (0..d).map(|_| complex_gaussian(rng)).collect();
    QuantumState::pure_normalized(vec![d], v)
}

pub fn random_pure_state(d: usize, seed: u64) -> Result<QuantumState> {
    random_pure_state_with(d, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rz(theta: f64) -> ComplexMatrix {
        ComplexMatrix::from_diag(&[
            C64::from_polar(1.0, -theta / 2.0),
            C64::from_polar(1.0, theta / 2.0),
        ])
    }

    fn random_matrix(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ComplexMatrix::from_fn(n, n, |_, _| complex_gaussian(&mut rng))
    }

    fn random_density(n: usize, seed: u64) -> ComplexMatrix {
        let a = random_matrix(n, seed);
        let p = a.matmul(&a.dagger());
        let tr = p.trace().unwrap();
        p.scale(tr.inv())
    }

    #[test]
    fn identity_tensor_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn controlled_x_block_structure() {
        let p0 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let p1 = ComplexMatrix::from_real(2, 2, &[0.0, 0.0, 0.0, 1.0]).unwrap();
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let cnot = tensor(&p0, &ComplexMatrix::identity(2)).add(&tensor(&p1, &x));
        let explicit = ComplexMatrix::from_real(
            4,
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, 1.0, 0.0,
            ],
        )
        .unwrap();
        assert_eq!(cnot, explicit);
    }

    #[test]
    fn tensor_trace_is_product_of_traces() {
        let a = random_matrix(3, 1);
        let b = random_matrix(3, 2);
        let lhs = mat_trace(&tensor(&a, &b)).unwrap();
        // direct oracle: sum of a_ii b_jj
        let mut rhs = ZERO;
        for i in 0..3 {
            for j in 0..3 {
                rhs += a[(i, i)] * b[(j, j)];
            }
        }
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn dagger_cases() {
        let i3 = ComplexMatrix::identity(3);
        assert_eq!(dagger(&i3), i3);
        let a = random_matrix(4, 9);
        assert_eq!(dagger(&dagger(&a)), a);
        assert!(dagger(&rz(0.7)).max_abs_diff(&rz(-0.7)) < 1e-15);
    }

    #[test]
    fn trace_cases() {
        assert_eq!(mat_trace(&ComplexMatrix::identity(5)).unwrap(), C64::new(5.0, 0.0));
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(mat_trace(&x).unwrap(), ZERO);
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(mat_trace(&rect), Err(Error::NonSquare { .. })));

        let rho = random_density(2, 3);
        let sigma = random_density(2, 4);
        let prod = mat_trace(&rho.matmul(&sigma)).unwrap();
        let mut oracle = ZERO;
        for i in 0..2 {
            for j in 0..2 {
                oracle += rho[(i, j)] * sigma[(j, i)];
            }
        }
        assert!((prod - oracle).norm() < 1e-14);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            ComplexMatrix::new(2, 2, vec![ONE; 3]),
            Err(Error::BadShape { .. })
        ));
        assert!(matches!(
            ComplexMatrix::new(1, 1, vec![C64::new(f64::NAN, 0.0)]),
            Err(Error::NonFinite)
        ));
        let not_unitary = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(UnitaryOp::new(not_unitary), Err(Error::NotUnitary(_))));
        assert!(matches!(
            UnitaryOp::new(ComplexMatrix::identity(MAX_DIM + 1)),
            Err(Error::DimensionTooLarge(_))
        ));
        let unnormalized = QuantumState::pure(vec![2], vec![ONE, ONE]);
        assert!(unnormalized.is_err());
        let negative = ComplexMatrix::from_real(2, 2, &[1.5, 0.0, 0.0, -0.5]).unwrap();
        assert!(QuantumState::mixed(vec![2], negative).is_err());
    }

    #[test]
    fn random_unitary_is_unitary_and_deterministic() {
        for seed in 0..100 {
            let u = random_unitary(2, seed).unwrap();
            let dev = u
                .matrix()
                .dagger()
                .matmul(u.matrix())
                .max_abs_diff(&ComplexMatrix::identity(2));
            assert!(dev < 1e-10);
        }
        assert_eq!(random_unitary(3, 42).unwrap(), random_unitary(3, 42).unwrap());
        assert_ne!(random_unitary(3, 42).unwrap(), random_unitary(3, 43).unwrap());
    }

    #[test]
    fn haar_second_moment_of_trace() {
        // ∫ |tr U|² dU = 1 for every d.
        let n = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let samples: Vec<f64> = (0..n)
            .map(|_| {
                let u = random_unitary_with(2, &mut rng).unwrap();
                u.matrix().trace().unwrap().norm_sqr()
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn random_pure_state_marginal() {
        let s = random_pure_state(5, 11).unwrap();
        let norm: f64 = s.amplitudes().unwrap().iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-10);
        assert_eq!(random_pure_state(5, 11).unwrap(), s);

        let n = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let samples: Vec<f64> = (0..n)
            .map(|_| random_pure_state_with(2, &mut rng).unwrap().amplitudes().unwrap()[0].norm_sqr())
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        // |<0|φ>|² is uniform on [0,1] at d = 2: variance 1/12
        let se = (1.0 / 12.0 / n as f64).sqrt();
        assert!((mean - 0.5).abs() < 3.0 * se);
    }

    #[test]
    fn reduced_state_of_product() {
        let a = random_pure_state(2, 1).unwrap();
        let b = random_pure_state(3, 2).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert!(ab.reduced(0).unwrap().density().max_abs_diff(&a.density()) < 1e-12);
        assert!(ab.reduced(1).unwrap().density().max_abs_diff(&b.density()) < 1e-12);
    }

    fn int_matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
        prop::collection::vec((-5i32..=5, -5i32..=5), n * n).prop_map(move |v| {
            ComplexMatrix::new(
                n,
                n,
                v.into_iter().map(|(a, b)| C64::new(a as f64, b as f64)).collect(),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn tensor_is_associative(a in int_matrix(2), b in int_matrix(2), c in int_matrix(3)) {
            prop_assert_eq!(tensor(&tensor(&a, &b), &c), tensor(&a, &tensor(&b, &c)));
        }

        #[test]
        fn trace_is_cyclic(s1 in any::<u64>(), s2 in any::<u64>(), n in 1usize..6) {
            let a = random_matrix(n, s1);
            let b = random_matrix(n, s2);
            let ab = mat_trace(&a.matmul(&b)).unwrap();
            let ba = mat_trace(&b.matmul(&a)).unwrap();
            prop_assert!((ab - ba).norm() < 1e-10);
        }

        #[test]
        fn conjugated_state_stays_valid(su in any::<u64>(), sr in any::<u64>(), n in 2usize..5) {
            let u = random_unitary(n, su).unwrap();
            let rho = QuantumState::mixed(vec![n], random_density(n, sr)).unwrap();
            let out = rho.evolve(&u).unwrap();
            prop_assert!(QuantumState::mixed(vec![n], out.density()).is_ok());
        }
    }
}
