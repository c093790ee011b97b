//! Gate-by-gate conjugated schedules.
//!
//! Gate `U_i` is replaced by the path `Ũ_i(s) = exp(isK_i)`, `K_i = −i log U_i`,
//! and the Hamiltonian is carried along it:
//! `H(s) = Ũ_i(s) H^{(i−1)} Ũ_i(s)†` with `H^{(i)} = U_i H^{(i−1)} U_i†`.
//! Every point of the path is unitarily equivalent to `H0`, so the spectrum
//! (and in particular the gap) never changes unless an eigenvalue trajectory
//! `f(n, s)` is supplied to reshape it.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::operator::{
    eigh, hermitize, kron_lift, principal_log, spectral_map, DenseOperator, Matrix, QuantumState, Tolerances,
};
use crate::pauli::{pauli_decompose, PauliSum};
use crate::C64;

/// `f(level, global s, E_level) → energy`.
pub type EigenTrajectory = Arc<dyn Fn(usize, f64, f64) -> f64 + Send + Sync>;

/// One gate's worth of schedule.
#[derive(Clone, Debug)]
pub struct Segment {
    /// `None` for the placeholder segment of an empty circuit.
    pub gate: Option<Gate>,
    /// `H^{(i−1)}`.
    pub base: DenseOperator,
    /// `K_i`, with `exp(iK_i) = U_i`.
    pub generator: DenseOperator,
    base_energies: Vec<f64>,
    base_vectors: Matrix,
    gen_phases: Vec<f64>,
    gen_vectors: Matrix,
    /// `W† V`, the base eigenframe expressed in the generator's eigenbasis.
    overlap: Matrix,
}

impl Segment {
    fn new(gate: Option<Gate>, base: DenseOperator, generator: DenseOperator) -> Self {
        let (base_energies, base_vectors) = eigh(base.matrix());
        let (gen_phases, gen_vectors) = eigh(generator.matrix());
        let overlap = gen_vectors.adjoint() * &base_vectors;
        Self { gate, base, generator, base_energies, base_vectors, gen_phases, gen_vectors, overlap }
    }

    /// `Ũ(s) = exp(isK)`.
    pub fn interpolant(&self, s: f64) -> Matrix {
        spectral_map(&self.gen_phases, &self.gen_vectors, |k| C64::from_polar(1.0, s * k))
    }

    /// `Ũ(s)·V`: columns are the instantaneous eigenvectors at local `s`.
    pub fn frame(&self, s: f64) -> Matrix {
        let mut rotated = self.overlap.clone();
        for (r, &k) in self.gen_phases.iter().enumerate() {
            let ph = C64::from_polar(1.0, s * k);
            for c in 0..rotated.ncols() {
                rotated[(r, c)] *= ph;
            }
        }
        &self.gen_vectors * rotated
    }

    pub fn base_energies(&self) -> &[f64] {
        &self.base_energies
    }

    pub fn base_vectors(&self) -> &Matrix {
        &self.base_vectors
    }

    /// `V(s) = Ũ(s) H^{(i−1)} Ũ(s)† − H^{(i−1)}`.
    pub fn perturbation(&self, s: f64) -> DenseOperator {
        let u = self.interpolant(s);
        let m = hermitize(&(&u * self.base.matrix() * u.adjoint())) - self.base.matrix();
        DenseOperator::from_matrix_unchecked(m)
    }
}

/// A piecewise schedule over global `s ∈ [0, 1]`, one equal share per segment.
#[derive(Clone)]
pub struct Schedule {
    qubits: usize,
    h0: PauliSum,
    segments: Vec<Segment>,
    final_hamiltonian: DenseOperator,
    trajectory: Option<EigenTrajectory>,
}

impl fmt::Debug for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Schedule")
            .field("qubits", &self.qubits)
            .field("segments", &self.segments.len())
            .field("custom_trajectory", &self.trajectory.is_some())
            .finish()
    }
}

/// Gate's lifted generator `−i log U` on an `n`-qubit register.
pub fn gate_generator(gate: &Gate, n: usize) -> Result<DenseOperator> {
    let local = DenseOperator::unitary(gate.local_matrix())?;
    kron_lift(&principal_log(&local)?, &gate.targets(), n)
}

/// `Ũ(s) (Σ∥ h_j) Ũ(s)† − Σ∥ h_j`, where `Σ∥` keeps the Pauli terms of
/// `hprev` that touch the gate's qubits.
pub fn step_perturbation(hprev: &DenseOperator, gate: &Gate, s: f64) -> Result<DenseOperator> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::OutOfRange(format!("s = {s} not in [0, 1]")));
    }
    let pauli = pauli_decompose(hprev)?;
    let targets = gate.targets();
    let overlapping = pauli.filter(|t| t.support().iter().any(|q| targets.contains(q))).to_dense();
    let k = gate_generator(gate, hprev.qubits())?;
    let u = crate::operator::unitary_exp(&k, s)?;
    Ok(overlapping.conjugate_by(&u).sub(&overlapping))
}

/// Builds the schedule for `circuit` starting from `h0`. The ground state of
/// `h0` must be unique.
pub fn assemble_schedule(circuit: &Circuit, h0: &PauliSum) -> Result<Schedule> {
    let n = circuit.qubits();
    if h0.qubits() != n {
        return Err(Error::DimensionMismatch { expected: n, found: h0.qubits() });
    }
    let h0_dense = h0.to_dense();
    let (energies, _) = eigh(h0_dense.matrix());
    let gap = energies.get(1).map_or(f64::INFINITY, |e1| e1 - energies[0]);
    if gap <= 1e-8 {
        return Err(Error::DegenerateGround(gap));
    }
    let mut segments = Vec::with_capacity(circuit.depth().max(1));
    let mut current = h0_dense.clone();
    for gate in circuit.gates() {
        let k = gate_generator(gate, n)?;
        let seg = Segment::new(Some(gate.clone()), current.clone(), k);
        let u1 = seg.interpolant(1.0);
        current = DenseOperator::from_matrix_unchecked(hermitize(&(&u1 * current.matrix() * u1.adjoint())));
        segments.push(seg);
    }
    if segments.is_empty() {
        segments.push(Segment::new(None, h0_dense, DenseOperator::zeros(n)));
    }
    Ok(Schedule { qubits: n, h0: h0.clone(), segments, final_hamiltonian: current, trajectory: None })
}

impl Schedule {
    /// Replaces the default trajectory `f(n, s) = E_n`.
    pub fn with_trajectory(mut self, f: EigenTrajectory) -> Self {
        self.trajectory = Some(f);
        self
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn h0(&self) -> &PauliSum {
        &self.h0
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn final_hamiltonian(&self) -> &DenseOperator {
        &self.final_hamiltonian
    }

    pub fn has_custom_trajectory(&self) -> bool {
        self.trajectory.is_some()
    }

    /// Maps global `s` to `(segment, local s)`.
    pub fn locate(&self, s: f64) -> (usize, f64) {
        let l = self.segments.len();
        let x = s.clamp(0.0, 1.0) * l as f64;
        let i = (x.floor() as usize).min(l - 1);
        (i, x - i as f64)
    }

    /// Energies `f(n, s)` assigned to the transported base eigenvectors.
    pub fn level_energies(&self, s: f64) -> Vec<f64> {
        let (i, _) = self.locate(s);
        let base = &self.segments[i].base_energies;
        match &self.trajectory {
            None => base.clone(),
            Some(f) => base.iter().enumerate().map(|(n, &e)| f(n, s, e)).collect(),
        }
    }

    /// Instantaneous eigenframe and energies at global `s`.
    pub fn eigensystem(&self, s: f64) -> (Vec<f64>, Matrix) {
        let (i, local) = self.locate(s);
        (self.level_energies(s), self.segments[i].frame(local))
    }

    /// `H(s)` at global `s`.
    pub fn hamiltonian(&self, s: f64) -> DenseOperator {
        let (energies, frame) = self.eigensystem(s);
        let m = spectral_map(&energies, &frame, |e| C64::new(e, 0.0));
        DenseOperator::from_matrix_unchecked(hermitize(&m))
    }

    /// `exp(−i H(s) dt)`, assembled from the transported eigenframe.
    pub fn propagator(&self, s: f64, dt: f64) -> Matrix {
        let (energies, frame) = self.eigensystem(s);
        spectral_map(&energies, &frame, |e| C64::from_polar(1.0, -e * dt))
    }

    /// The transported level with the lowest `f(n, s)`.
    pub fn ground_state(&self, s: f64) -> QuantumState {
        let (energies, frame) = self.eigensystem(s);
        let k = (0..energies.len()).min_by(|&a, &b| energies[a].total_cmp(&energies[b])).unwrap_or(0);
        QuantumState::from_vector_unchecked(frame.column(k).into_owned())
    }

    pub fn initial_ground_state(&self) -> QuantumState {
        self.ground_state(0.0)
    }

    /// Pauli expansion of `H^{(i)}`, `i = 0..=L`.
    pub fn base_pauli(&self, i: usize) -> Result<PauliSum> {
        let op = if i < self.segments.len() { &self.segments[i].base } else { &self.final_hamiltonian };
        let mut p = pauli_decompose(op)?;
        p.prune(1e-10);
        Ok(p)
    }

    /// JSON-friendly snapshot with Pauli expansions of bases and generators.
    pub fn export(&self) -> Result<ScheduleExport> {
        let segments = self
            .segments
            .iter()
            .enumerate()
            .map(|(i, seg)| {
                let mut generator = pauli_decompose(&seg.generator)?;
                generator.prune(1e-10);
                Ok(SegmentExport {
                    gate: seg.gate.as_ref().map_or_else(|| "I".to_string(), |g| g.to_string()),
                    base: pauli_terms(&self.base_pauli(i)?),
                    generator: pauli_terms(&generator),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ScheduleExport {
            qubits: self.qubits,
            segments,
            final_hamiltonian: pauli_terms(&self.base_pauli(self.segments.len())?),
        })
    }
}

fn pauli_terms(p: &PauliSum) -> Vec<(String, f64)> {
    p.terms().iter().map(|t| (t.label(), t.coefficient)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SegmentExport {
    pub gate: String,
    pub base: Vec<(String, f64)>,
    pub generator: Vec<(String, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScheduleExport {
    pub qubits: usize,
    pub segments: Vec<SegmentExport>,
    pub final_hamiltonian: Vec<(String, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapPoint {
    pub s: f64,
    pub gap: f64,
}

/// Sampled `E₁ − E₀` along a schedule, measured by diagonalising `H(s)`.
#[derive(Clone, Debug, Serialize)]
pub struct GapProfile {
    pub points: Vec<GapPoint>,
    pub min: f64,
    pub max: f64,
}

pub fn gap_profile(schedule: &Schedule, samples_per_segment: usize) -> Result<GapProfile> {
    if samples_per_segment < 2 {
        return Err(Error::OutOfRange("need at least 2 samples per segment".into()));
    }
    let l = schedule.segments().len();
    let mut points = Vec::with_capacity(l * samples_per_segment);
    for i in 0..l {
        for j in 0..samples_per_segment {
            let local = j as f64 / (samples_per_segment - 1) as f64;
            let s = ((i as f64 + local) / l as f64).min(1.0);
            let h = schedule.hamiltonian(s);
            let spec = crate::operator::eig_hermitian_with(&h, &Tolerances { hermitian: 1e-9, ..Default::default() })?;
            points.push(GapPoint { s, gap: spec.gap() });
        }
    }
    let min = points.iter().map(|p| p.gap).fold(f64::INFINITY, f64::min);
    let max = points.iter().map(|p| p.gap).fold(f64::NEG_INFINITY, f64::max);
    Ok(GapProfile { points, min, max })
}

/// Locality of `H^{(0)}, …, H^{(L)}`.
pub fn locality_growth(schedule: &Schedule) -> Result<Vec<usize>> {
    let l = if schedule.segments()[0].gate.is_none() { 0 } else { schedule.segments().len() };
    (0..=l).map(|i| Ok(schedule.base_pauli(i)?.locality())).collect()
}
