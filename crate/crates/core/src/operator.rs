//! Dense complex operators and states on a register of qubits.
//!
//! Every operator here is an explicit `2ⁿ × 2ⁿ` matrix. This is the ground
//! truth the rest of the crate is checked against, so the routines favour
//! clarity and exactness over speed. Registers beyond roughly 12 qubits are
//! out of reach.

use std::fmt;

use log::warn;
use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<C64>;
pub type Vector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Numerical thresholds used by validation and spectral grouping.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Largest allowed `|M − M†|` entry, relative to `max(1, max |M|)`.
    pub hermitian: f64,
    /// Largest allowed `|M†M − I|` entry.
    pub unitary: f64,
    /// Largest allowed `| ‖ψ‖ − 1 |`.
    pub normalization: f64,
    /// Eigenphases within this distance of −π are moved to +π.
    pub branch: f64,
    /// Trace and positivity slack for density matrices.
    pub density: f64,
    /// Eigenvalues closer than this are treated as one level.
    pub degeneracy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-12,
            unitary: 1e-10,
            normalization: 1e-12,
            branch: 1e-12,
            density: 1e-10,
            degeneracy: 1e-9,
        }
    }
}

pub(crate) fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

pub(crate) fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest entrywise `|a − b|`.
pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub(crate) fn hermitian_defect(m: &Matrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub(crate) fn hermitize(m: &Matrix) -> Matrix {
    (m + m.adjoint()).scale(0.5)
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &Matrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    if hermitian_defect(m) <= 1e-12 * max_abs(m).max(1.0) {
        let eig = SymmetricEigen::new(hermitize(m));
        return eig.eigenvalues.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0f64, |acc, v| acc.max(*v))
}

/// Ascending eigenvalues and matching eigenvector columns of a Hermitian matrix.
pub(crate) fn eigh(m: &Matrix) -> (Vec<f64>, Matrix) {
    let eig = SymmetricEigen::new(hermitize(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = Matrix::zeros(m.nrows(), m.ncols());
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Ascending eigenvalues only.
pub(crate) fn eigvalsh(m: &Matrix) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(hermitize(m)).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `V · diag(f(λ)) · V†` for a Hermitian matrix with eigenpairs `(λ, V)`.
pub(crate) fn spectral_map(values: &[f64], vectors: &Matrix, f: impl Fn(f64) -> C64) -> Matrix {
    let mut scaled = vectors.clone();
    for (j, &lam) in values.iter().enumerate() {
        let c = f(lam);
        scaled.column_mut(j).scale_mut_complex(c);
    }
    &scaled * vectors.adjoint()
}

trait ScaleComplex {
    fn scale_mut_complex(&mut self, c: C64);
}

impl<S> ScaleComplex for nalgebra::Matrix<C64, nalgebra::Dyn, nalgebra::U1, S>
where
    S: nalgebra::StorageMut<C64, nalgebra::Dyn, nalgebra::U1>,
{
    fn scale_mut_complex(&mut self, c: C64) {
        for z in self.iter_mut() {
            *z *= c;
        }
    }
}

/// `exp(−i·H·t)` for Hermitian `H`.
pub(crate) fn propagator(h: &Matrix, t: f64) -> Matrix {
    let (values, vectors) = eigh(h);
    spectral_map(&values, &vectors, |lam| C64::from_polar(1.0, -lam * t))
}

/// A `2ⁿ × 2ⁿ` complex matrix acting on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    matrix: Matrix,
    qubits: usize,
}

impl DenseOperator {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        let qubits = qubits_for_dim(matrix.nrows())?;
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("operator"));
        }
        Ok(Self { matrix, qubits })
    }

    /// Builds an operator and checks that it is Hermitian.
    pub fn hermitian(matrix: Matrix) -> Result<Self> {
        let op = Self::new(matrix)?;
        op.require_hermitian(&Tolerances::default())?;
        Ok(op)
    }

    /// Builds an operator and checks that it is unitary.
    pub fn unitary(matrix: Matrix) -> Result<Self> {
        let op = Self::new(matrix)?;
        op.require_unitary(&Tolerances::default())?;
        Ok(op)
    }

    pub(crate) fn from_matrix_unchecked(matrix: Matrix) -> Self {
        let qubits = matrix.nrows().trailing_zeros() as usize;
        Self { matrix, qubits }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let d = rows.len();
        Self::new(Matrix::from_fn(d, d, |r, c| C64::new(rows[r][c], 0.0)))
    }

    pub fn identity(qubits: usize) -> Self {
        let d = 1 << qubits;
        Self { matrix: Matrix::identity(d, d), qubits }
    }

    pub fn zeros(qubits: usize) -> Self {
        let d = 1 << qubits;
        Self { matrix: Matrix::zeros(d, d), qubits }
    }

    /// Diagonal operator from real entries.
    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        let d = entries.len();
        Self::new(Matrix::from_fn(d, d, |r, c| if r == c { C64::new(entries[r], 0.0) } else { ZERO }))
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(state: &QuantumState) -> Self {
        let v = state.amplitudes();
        Self { matrix: v * v.adjoint(), qubits: state.qubits() }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.matrix)
    }

    pub fn unitary_defect(&self) -> f64 {
        let d = self.dim();
        max_abs_diff(&(self.matrix.adjoint() * &self.matrix), &Matrix::identity(d, d))
    }

    pub fn is_hermitian(&self, tol: &Tolerances) -> bool {
        self.hermitian_defect() <= tol.hermitian * max_abs(&self.matrix).max(1.0)
    }

    pub fn is_unitary(&self, tol: &Tolerances) -> bool {
        self.unitary_defect() <= tol.unitary
    }

    pub fn require_hermitian(&self, tol: &Tolerances) -> Result<()> {
        if self.is_hermitian(tol) {
            Ok(())
        } else {
            Err(Error::NotHermitian(self.hermitian_defect()))
        }
    }

    pub fn require_unitary(&self, tol: &Tolerances) -> Result<()> {
        if self.is_unitary(tol) {
            Ok(())
        } else {
            Err(Error::NotUnitary(self.unitary_defect()))
        }
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint(), qubits: self.qubits }
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn spectral_norm(&self) -> f64 {
        spectral_norm(&self.matrix)
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(self.qubits, other.qubits, "operators act on different registers");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same(other);
        Self { matrix: &self.matrix + &other.matrix, qubits: self.qubits }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_same(other);
        Self { matrix: &self.matrix - &other.matrix, qubits: self.qubits }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_same(other);
        Self { matrix: &self.matrix * &other.matrix, qubits: self.qubits }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { matrix: self.matrix.scale(c), qubits: self.qubits }
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        self.check_same(u);
        Self { matrix: hermitize_if(&(&u.matrix * &self.matrix * u.matrix.adjoint()), self), qubits: self.qubits }
    }

    /// `self ⊗ low`, where `low` occupies the least-significant qubits.
    pub fn kron_above(&self, low: &Self) -> Self {
        Self { matrix: self.matrix.kronecker(&low.matrix), qubits: self.qubits + low.qubits }
    }

    pub fn apply(&self, state: &QuantumState) -> Result<QuantumState> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: state.dim() });
        }
        Ok(QuantumState::from_vector_unchecked(&self.matrix * state.amplitudes()))
    }

    /// `⟨ψ|M|ψ⟩` (real part).
    pub fn expectation(&self, state: &QuantumState) -> f64 {
        let v = state.amplitudes();
        (v.adjoint() * &self.matrix * v)[(0, 0)].re
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }
}

fn hermitize_if(m: &Matrix, original: &DenseOperator) -> Matrix {
    if original.hermitian_defect() == 0.0 {
        hermitize(m)
    } else {
        m.clone()
    }
}

impl fmt::Display for DenseOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                let z = self.matrix[(r, c)];
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A normalized state vector, little-endian in the qubit index.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    amplitudes: Vector,
    qubits: usize,
}

impl QuantumState {
    /// Checks the length is a power of two and the norm is 1.
    pub fn new(amplitudes: Vector) -> Result<Self> {
        Self::with_tolerance(amplitudes, &Tolerances::default())
    }

    pub fn with_tolerance(amplitudes: Vector, tol: &Tolerances) -> Result<Self> {
        let qubits = qubits_for_dim(amplitudes.len())?;
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("state"));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > tol.normalization {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes, qubits })
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalize(amplitudes: Vector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Self::new(amplitudes.unscale(norm))
    }

    pub(crate) fn from_vector_unchecked(amplitudes: Vector) -> Self {
        let qubits = amplitudes.len().trailing_zeros() as usize;
        Self { amplitudes, qubits }
    }

    pub fn from_complex(amps: &[C64]) -> Result<Self> {
        Self::normalize(Vector::from_column_slice(amps))
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::normalize(Vector::from_iterator(amps.len(), amps.iter().map(|&a| C64::new(a, 0.0))))
    }

    pub fn basis(qubits: usize, index: usize) -> Self {
        let mut v = Vector::zeros(1 << qubits);
        v[index] = ONE;
        Self { amplitudes: v, qubits }
    }

    /// `|0…0⟩`.
    pub fn zero(qubits: usize) -> Self {
        Self::basis(qubits, 0)
    }

    /// Basis state from a ket label such as `"10"`, written qubit n … qubit 1.
    pub fn ket(label: &str) -> Result<Self> {
        let bits: Vec<char> = label.chars().collect();
        let n = bits.len();
        let mut index = 0usize;
        for (pos, ch) in bits.iter().enumerate() {
            let bit = match ch {
                '0' => 0,
                '1' => 1,
                other => return Err(Error::Parse { line: 0, message: format!("bad ket symbol `{other}`") }),
            };
            index |= bit << (n - 1 - pos);
        }
        Ok(Self::basis(n, index))
    }

    /// `(|0…0⟩ + |1…1⟩)/√2`, or the minus combination.
    pub fn ghz(qubits: usize, plus: bool) -> Self {
        let mut v = Vector::zeros(1 << qubits);
        let a = std::f64::consts::FRAC_1_SQRT_2;
        v[0] = C64::new(a, 0.0);
        v[(1 << qubits) - 1] = C64::new(if plus { a } else { -a }, 0.0);
        Self { amplitudes: v, qubits }
    }

    pub fn amplitudes(&self) -> &Vector {
        &self.amplitudes
    }

    pub fn into_vector(self) -> Vector {
        self.amplitudes
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `self ⊗ low`, with `low` on the least-significant qubits.
    pub fn kron_above(&self, low: &Self) -> Self {
        Self { amplitudes: self.amplitudes.kronecker(&low.amplitudes), qubits: self.qubits + low.qubits }
    }

    pub fn density(&self) -> DenseOperator {
        DenseOperator::projector(self)
    }

    pub fn with_phase(&self, phase: f64) -> Self {
        Self { amplitudes: self.amplitudes.map(|z| z * C64::from_polar(1.0, phase)), qubits: self.qubits }
    }
}

/// Eigenvalues in ascending order with an orthonormal eigenvector frame.
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
    pub degeneracy_tol: f64,
}

impl SpectrumReport {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `E₁ − E₀` (zero for a degenerate ground state).
    pub fn gap(&self) -> f64 {
        if self.eigenvalues.len() < 2 {
            return 0.0;
        }
        self.eigenvalues[1] - self.eigenvalues[0]
    }

    /// Gap to the first eigenvalue above the ground level.
    pub fn level_gap(&self) -> f64 {
        let e0 = self.eigenvalues[0];
        self.eigenvalues
            .iter()
            .find(|&&e| e - e0 > self.degeneracy_tol)
            .map_or(0.0, |&e| e - e0)
    }

    pub fn ground_degeneracy(&self) -> usize {
        let e0 = self.eigenvalues[0];
        self.eigenvalues.iter().take_while(|&&e| e - e0 <= self.degeneracy_tol).count()
    }

    pub fn state(&self, level: usize) -> QuantumState {
        QuantumState::from_vector_unchecked(self.eigenvectors.column(level).into_owned())
    }

    pub fn ground_state(&self) -> QuantumState {
        self.state(0)
    }

    /// Distinct eigenvalues with their multiplicities.
    pub fn levels(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &e in &self.eigenvalues {
            match out.last_mut() {
                Some((rep, count)) if (e - *rep).abs() <= self.degeneracy_tol => *count += 1,
                _ => out.push((e, 1)),
            }
        }
        out
    }

    /// Largest `‖A v_j − E_j v_j‖`.
    pub fn residual(&self, op: &DenseOperator) -> f64 {
        (0..self.eigenvalues.len())
            .map(|j| {
                let v = self.eigenvectors.column(j);
                (op.matrix() * v - v * C64::new(self.eigenvalues[j], 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `V · diag(E) · V†`.
    pub fn reconstruct(&self) -> Matrix {
        spectral_map(&self.eigenvalues, &self.eigenvectors, |e| C64::new(e, 0.0))
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues.
pub fn eig_hermitian(op: &DenseOperator) -> Result<SpectrumReport> {
    eig_hermitian_with(op, &Tolerances::default())
}

pub fn eig_hermitian_with(op: &DenseOperator, tol: &Tolerances) -> Result<SpectrumReport> {
    op.require_hermitian(tol)?;
    let (eigenvalues, eigenvectors) = eigh(op.matrix());
    Ok(SpectrumReport { eigenvalues, eigenvectors, degeneracy_tol: tol.degeneracy })
}

/// `exp(i·s·K)` for Hermitian `K`.
pub fn unitary_exp(k: &DenseOperator, s: f64) -> Result<DenseOperator> {
    k.require_hermitian(&Tolerances::default())?;
    let (values, vectors) = eigh(k.matrix());
    Ok(DenseOperator::from_matrix_unchecked(spectral_map(&values, &vectors, |lam| C64::from_polar(1.0, s * lam))))
}

/// `exp(−i·H·t)` for Hermitian `H`.
pub fn time_evolution(h: &DenseOperator, t: f64) -> Result<DenseOperator> {
    unitary_exp(h, -t)
}

/// Hermitian `K` with `exp(iK) = U` and eigenvalues in `(−π, π]`.
pub fn principal_log(u: &DenseOperator) -> Result<DenseOperator> {
    principal_log_with(u, &Tolerances::default())
}

pub fn principal_log_with(u: &DenseOperator, tol: &Tolerances) -> Result<DenseOperator> {
    u.require_unitary(tol)?;
    let d = u.dim();
    let schur = Schur::new(u.matrix().clone());
    let (q, t) = schur.unpack();
    let mut phases = Vec::with_capacity(d);
    for j in 0..d {
        let lambda = t[(j, j)];
        let mut theta = lambda.arg();
        if theta <= -std::f64::consts::PI + tol.branch {
            warn!("eigenphase {theta} at the −π branch cut mapped to +π");
            theta = std::f64::consts::PI;
        }
        phases.push(theta);
    }
    // U is normal, so its Schur form is diagonal up to rounding.
    let mut off = 0.0f64;
    for r in 0..d {
        for c in (r + 1)..d {
            off = off.max(t[(r, c)].norm());
        }
    }
    if off > 1e3 * tol.unitary.max(1e-12) {
        return Err(Error::NotUnitary(off));
    }
    let k = spectral_map(&phases, &q, |p| C64::new(p, 0.0));
    Ok(DenseOperator::from_matrix_unchecked(hermitize(&k)))
}

fn validate_targets(targets: &[usize], n: usize) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t == 0 || t > n {
            return Err(Error::QubitOutOfRange { index: t, qubits: n });
        }
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateQubit(t));
        }
    }
    Ok(())
}

/// Lifts a `k`-qubit operator onto qubits `targets` (1-based) of an
/// `n`-qubit register. Bit `j` of the gate's local index is qubit
/// `targets[j]`.
pub fn kron_lift(gate: &DenseOperator, targets: &[usize], n: usize) -> Result<DenseOperator> {
    validate_targets(targets, n)?;
    if gate.qubits() != targets.len() {
        return Err(Error::DimensionMismatch { expected: 1 << targets.len(), found: gate.dim() });
    }
    Ok(DenseOperator::from_matrix_unchecked(lift_matrix(gate.matrix(), targets, n)))
}

pub(crate) fn lift_matrix(gate: &Matrix, targets: &[usize], n: usize) -> Matrix {
    let d = 1usize << n;
    let k = targets.len();
    let mask: usize = targets.iter().map(|&t| 1usize << (t - 1)).sum();
    let mut out = Matrix::zeros(d, d);
    for col in 0..d {
        let base = col & !mask;
        let local_col = local_index(col, targets);
        for local_row in 0..(1usize << k) {
            let g = gate[(local_row, local_col)];
            if g == ZERO {
                continue;
            }
            out[(base | spread_index(local_row, targets), col)] = g;
        }
    }
    out
}

pub(crate) fn local_index(global: usize, targets: &[usize]) -> usize {
    targets.iter().enumerate().map(|(j, &t)| ((global >> (t - 1)) & 1) << j).sum()
}

pub(crate) fn spread_index(local: usize, targets: &[usize]) -> usize {
    targets.iter().enumerate().map(|(j, &t)| ((local >> j) & 1) << (t - 1)).sum()
}

/// Checks `ρ` is a density matrix: Hermitian, trace 1, positive semidefinite.
pub fn validate_density(rho: &DenseOperator, tol: &Tolerances) -> Result<()> {
    if !rho.is_hermitian(tol) {
        return Err(Error::InvalidDensityMatrix(format!("not Hermitian ({:e})", rho.hermitian_defect())));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol.density || tr.im.abs() > tol.density {
        return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
    }
    let min = eigvalsh(rho.matrix())[0];
    if min < -tol.density {
        return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:e}")));
    }
    Ok(())
}

/// Reduced density matrix on the qubits in `keep` (1-based). Kept qubits
/// are renumbered in ascending order.
pub fn partial_trace(rho: &DenseOperator, keep: &[usize]) -> Result<DenseOperator> {
    validate_density(rho, &Tolerances::default())?;
    partial_trace_unchecked(rho, keep)
}

pub(crate) fn partial_trace_unchecked(rho: &DenseOperator, keep: &[usize]) -> Result<DenseOperator> {
    let n = rho.qubits();
    validate_targets(keep, n)?;
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    let traced: Vec<usize> = (1..=n).filter(|q| !kept.contains(q)).collect();
    let dk = 1usize << kept.len();
    let dt = 1usize << traced.len();
    let m = rho.matrix();
    let mut out = Matrix::zeros(dk, dk);
    for e in 0..dt {
        let env = spread_index(e, &traced);
        for r in 0..dk {
            let gr = env | spread_index(r, &kept);
            for c in 0..dk {
                out[(r, c)] += m[(gr, spread_index(c, &kept) | env)];
            }
        }
    }
    Ok(DenseOperator::from_matrix_unchecked(out))
}

/// Reduced density matrix of a pure state on the qubits in `keep`.
pub fn reduce_pure(state: &QuantumState, keep: &[usize]) -> Result<DenseOperator> {
    let n = state.qubits();
    validate_targets(keep, n)?;
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    let traced: Vec<usize> = (1..=n).filter(|q| !kept.contains(q)).collect();
    let dk = 1usize << kept.len();
    let dt = 1usize << traced.len();
    // Rows: kept index, columns: traced index.
    let amps = state.amplitudes();
    let psi = Matrix::from_fn(dk, dt, |r, e| amps[spread_index(r, &kept) | spread_index(e, &traced)]);
    Ok(DenseOperator::from_matrix_unchecked(&psi * psi.adjoint()))
}

/// Seeded random matrices and states for property tests and suites.
pub mod random {
    use super::*;

    pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    }

    /// Haar-random unitary via QR of a complex Ginibre matrix.
    pub fn unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
        let g = Matrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
        let qr = g.qr();
        let (mut q, r) = qr.unpack();
        for j in 0..dim {
            let d = r[(j, j)];
            let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
        q
    }

    /// GUE-style Hermitian matrix with unit-variance entries.
    pub fn hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
        let g = Matrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
        hermitize(&g)
    }

    pub fn state<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> QuantumState {
        let d = 1 << qubits;
        let v = Vector::from_fn(d, |_, _| complex_gaussian(rng));
        QuantumState::normalize(v).expect("gaussian vector is nonzero")
    }

    /// Random density matrix of full rank (Ginibre ensemble).
    pub fn density<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> Matrix {
        let d = 1 << qubits;
        let g = Matrix::from_fn(d, d, |_, _| complex_gaussian(rng));
        let w = &g * g.adjoint();
        let tr = w.trace().re;
        w.unscale(tr)
    }
}
