//! Geometric phases, the phase-cancelling partially adiabatic gate and the
//! holonomic CNOT.
//!
//! Open-path phases are computed in a fixed gauge: the eigenvector at `s = 0`
//! is whatever the eigensolver returns (or a supplied vector), and the final
//! vector is pinned to a caller-supplied reference. Interior phases drop out of
//! the overlap product `∏⟨n_k|n_{k+1}⟩`, so only the two anchors matter.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::propagate_with;
use crate::operator::{eigh, principal_log, spectral_map, spectral_norm, DenseOperator, Matrix, QuantumState, Vector, ONE};
use crate::pauli::PauliSum;
use crate::C64;

/// Closest spacing to a neighbouring level below which a path is rejected.
pub const CROSSING_TOL: f64 = 1e-10;

/// Wraps an angle into `(−π, π]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let mut w = phi.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// `−arg ∏_k ⟨v_k|v_{k+1}⟩` over a discretized path of unit vectors.
pub fn transport_phase(path: &[Vector]) -> f64 {
    let product = path.windows(2).fold(ONE, |acc, w| {
        let o = w[0].dotc(&w[1]);
        acc * o / o.norm()
    });
    -product.arg()
}

fn level_gap(values: &[f64], level: usize) -> f64 {
    let below = level.checked_sub(1).map_or(f64::INFINITY, |k| values[level] - values[k]);
    let above = values.get(level + 1).map_or(f64::INFINITY, |e| e - values[level]);
    below.min(above)
}

/// Geometric phase of eigenlevel `level` of `H(s)`, `s ∈ [0, 1]`, by discrete
/// parallel transport over `steps` intervals.
///
/// The final vector is `end_gauge` if given (it must be an eigenvector of
/// `H(1)` for that level); otherwise a closed path (`H(1) = H(0)`) reuses the
/// initial vector, and an open path falls back to the eigensolver's phase.
pub fn geometric_phase<F>(h: F, level: usize, steps: usize, end_gauge: Option<&Vector>) -> Result<f64>
where
    F: Fn(f64) -> Matrix,
{
    if steps == 0 {
        return Err(Error::OutOfRange("steps must be positive".into()));
    }
    let h0 = h(0.0);
    let h1 = h(1.0);
    let dim = h0.nrows();
    if level >= dim {
        return Err(Error::OutOfRange(format!("level {level} of a {dim}-dimensional space")));
    }
    let mut path = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let s = k as f64 / steps as f64;
        let (values, vectors) = eigh(&if k == 0 { h0.clone() } else if k == steps { h1.clone() } else { h(s) });
        let gap = level_gap(&values, level);
        if gap < CROSSING_TOL {
            return Err(Error::LevelCrossing { s, gap });
        }
        path.push(vectors.column(level).into_owned());
    }
    if let Some(end) = end_gauge {
        let o = path[steps].dotc(end).norm();
        if (o - end.norm()).abs() > 1e-6 {
            return Err(Error::Constraint(format!("end gauge has overlap {o} with the final eigenvector")));
        }
        path[steps] = end.clone() / C64::new(end.norm(), 0.0);
    } else if crate::operator::max_abs_diff(&h0, &h1) < 1e-12 {
        path[steps] = path[0].clone();
    }
    Ok(transport_phase(&path))
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelPhase {
    pub level: usize,
    pub energy: f64,
    /// `−∫E_n dt`.
    pub dynamical: f64,
    pub geometric: f64,
    /// Sum of both, wrapped into `(−π, π]`.
    pub total: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseReport {
    pub total_time: f64,
    pub levels: Vec<LevelPhase>,
}

/// Dense matrix as separate real and imaginary row lists.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatrixExport {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&Matrix> for MatrixExport {
    fn from(m: &Matrix) -> Self {
        let rows = |f: fn(&C64) -> f64| (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect()).collect();
        MatrixExport { re: rows(|z| z.re), im: rows(|z| z.im) }
    }
}

/// `exp(isK)` with the eigendecomposition of `K` computed once.
#[derive(Clone, Debug)]
struct Rotation {
    values: Vec<f64>,
    vectors: Matrix,
}

impl Rotation {
    fn new(k: &Matrix) -> Self {
        let (values, vectors) = eigh(k);
        Rotation { values, vectors }
    }

    fn at(&self, s: f64) -> Matrix {
        spectral_map(&self.values, &self.vectors, |lam| C64::from_polar(1.0, s * lam))
    }
}

/// Rate profile for the rotation `U(t) = exp(iθ(t/T)K)`.
pub type Rate = fn(f64) -> f64;

pub fn linear_rate(x: f64) -> f64 {
    x
}

/// `x − sin(2πx)/2π`, which starts and stops with zero velocity.
pub fn smooth_rate(x: f64) -> f64 {
    x - (2.0 * PI * x).sin() / (2.0 * PI)
}

/// The four-step gate: prepare in `H0`, rotate with `½(I + U(t)H0U(t)†)`, then
/// hold `U(½(I − H0) + G/T)U†` for the same time so that every eigenstate
/// ends with the same phase `e^{−iT}`.
#[derive(Clone, Debug)]
pub struct PhaseCancellation {
    pub h0: DenseOperator,
    pub gate: DenseOperator,
    /// `K` with `exp(iK) = U`.
    pub generator: DenseOperator,
    pub energies: Vec<f64>,
    pub basis: Matrix,
    pub gammas: Vec<f64>,
    pub total_time: f64,
    rotation: Rotation,
}

/// Transport steps used for the geometric phases of the rotation step.
pub const PHASE_STEPS: usize = 4000;

impl PhaseCancellation {
    pub fn new(h0: &PauliSum, gate: &DenseOperator, total_time: f64) -> Result<Self> {
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(Error::OutOfRange(format!("T = {total_time}")));
        }
        if h0.locality() > 1 {
            return Err(Error::Locality { expected: 1, found: h0.locality() });
        }
        if h0.qubits() != gate.qubits() {
            return Err(Error::DimensionMismatch { expected: h0.qubits(), found: gate.qubits() });
        }
        let h0 = h0.to_dense();
        let norm = h0.spectral_norm();
        if norm > 1.0 + 1e-12 {
            return Err(Error::OutOfRange(format!("‖H0‖ = {norm} exceeds 1")));
        }
        let (energies, basis) = eigh(h0.matrix());
        let min_split = energies.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        if min_split < 1e-9 {
            return Err(Error::DegenerateGround(min_split));
        }
        let generator = principal_log(gate)?;
        let rotation = Rotation::new(generator.matrix());
        let mut plan = PhaseCancellation {
            h0,
            gate: gate.clone(),
            generator,
            rotation,
            energies,
            basis,
            gammas: Vec::new(),
            total_time,
        };
        let gammas = (0..plan.energies.len())
            .map(|n| {
                let end = gate.matrix() * plan.basis.column(n);
                geometric_phase(|s| plan.step2_hamiltonian_at(s), n, PHASE_STEPS, Some(&end))
            })
            .collect::<Result<Vec<_>>>()?;
        plan.gammas = gammas;
        Ok(plan)
    }

    /// `½(I + U(s)H0U(s)†)` at rotation parameter `s ∈ [0, 1]`.
    pub fn step2_hamiltonian_at(&self, s: f64) -> Matrix {
        let u = self.rotation.at(s);
        let d = self.h0.dim();
        (Matrix::identity(d, d) + &u * self.h0.matrix() * u.adjoint()).scale(0.5)
    }

    /// `G = Σ γ_n |n⟩⟨n|` in the `H0` eigenbasis.
    pub fn g_operator(&self) -> DenseOperator {
        let diag = Matrix::from_diagonal(&Vector::from_iterator(self.gammas.len(), self.gammas.iter().map(|&g| C64::new(g, 0.0))));
        DenseOperator::from_matrix_unchecked(&self.basis * diag * self.basis.adjoint())
    }

    /// `U(½(I − H0) + G/T)U†`.
    pub fn step4_hamiltonian(&self) -> DenseOperator {
        let d = self.h0.dim();
        let inner = (Matrix::identity(d, d) - self.h0.matrix()).scale(0.5) + self.g_operator().matrix().unscale(self.total_time);
        let u = self.gate.matrix();
        DenseOperator::from_matrix_unchecked(u * inner * u.adjoint())
    }

    pub fn phase_report(&self) -> PhaseReport {
        let levels = self
            .energies
            .iter()
            .zip(&self.gammas)
            .enumerate()
            .map(|(level, (&h, &geometric))| {
                let energy = 0.5 * (1.0 + h);
                let dynamical = -energy * self.total_time;
                LevelPhase { level, energy, dynamical, geometric, total: wrap_phase(dynamical + geometric) }
            })
            .collect();
        PhaseReport { total_time: self.total_time, levels }
    }

    /// Propagator of steps 2 and 4 together; step 2 is integrated with
    /// `steps` midpoint intervals along the given rate, step 4 is exact.
    pub fn propagator(&self, steps: usize, rate: Rate) -> Result<Matrix> {
        if steps == 0 {
            return Err(Error::OutOfRange("steps must be positive".into()));
        }
        let t = self.total_time;
        let rotate = propagate_with(|time| self.step2_hamiltonian_at(rate(time / t)), self.h0.dim(), t, steps);
        let hold = crate::operator::time_evolution(&self.step4_hamiltonian(), t)?;
        Ok(hold.matrix() * rotate)
    }

    pub fn run(&self, psi: &QuantumState, steps: usize, rate: Rate) -> Result<QuantumState> {
        if psi.dim() != self.h0.dim() {
            return Err(Error::DimensionMismatch { expected: self.h0.dim(), found: psi.dim() });
        }
        let u = self.propagator(steps, rate)?;
        Ok(QuantumState::from_vector_unchecked(u * psi.amplitudes()))
    }
}

/// `1 − |tr(A†B)|/d`, zero iff `A` and `B` agree up to a global phase.
pub fn gate_infidelity(a: &Matrix, b: &Matrix) -> f64 {
    1.0 - (a.adjoint() * b).trace().norm() / a.nrows() as f64
}

/// Path-ordered holonomy of a moving frame.
#[derive(Clone, Debug, Serialize)]
pub struct HolonomyFrame {
    pub dimension: usize,
    pub steps: usize,
    /// Largest `‖F†F − I‖` over the sampled frames.
    pub frame_defect: f64,
    pub unitary_defect: f64,
    /// Coefficients are carried as `c ↦ W c`, so the transported frame at the
    /// end is `F(1)·W`.
    #[serde(skip)]
    pub w: Matrix,
}

fn polar_unitary(m: &Matrix) -> Result<Matrix> {
    let svd = m.clone().svd(true, true);
    match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => Ok(u * v_t),
        _ => Err(Error::Singular("polar decomposition".into())),
    }
}

/// Wilczek–Zee holonomy of the frames `F(s)` (columns span the subspace),
/// as the ordered product of re-unitarized overlaps `polar(F_{k+1}†F_k)`.
pub fn wilczek_zee_holonomy<F>(frame: F, steps: usize) -> Result<HolonomyFrame>
where
    F: Fn(f64) -> Matrix,
{
    if steps == 0 {
        return Err(Error::OutOfRange("steps must be positive".into()));
    }
    let mut prev = frame(0.0);
    let k = prev.ncols();
    let eye = Matrix::identity(k, k);
    let mut defect = spectral_norm(&(prev.adjoint() * &prev - &eye));
    let mut w = eye.clone();
    for step in 1..=steps {
        let next = frame(step as f64 / steps as f64);
        if next.ncols() != k || next.nrows() != prev.nrows() {
            return Err(Error::DimensionMismatch { expected: k, found: next.ncols() });
        }
        defect = defect.max(spectral_norm(&(next.adjoint() * &next - &eye)));
        w = polar_unitary(&(next.adjoint() * &prev))? * w;
        prev = next;
    }
    let unitary_defect = spectral_norm(&(w.adjoint() * &w - eye));
    Ok(HolonomyFrame { dimension: k, steps, frame_defect: defect, unitary_defect, w })
}

/// Generator `X = [[A, B], [−B†, 0]]` of the holonomic CNOT on an ancilla
/// (qubit 3) plus two computational qubits.
pub fn holonomic_generator() -> Matrix {
    let i_pi = C64::new(0.0, PI);
    let a = Matrix::from_row_slice(4, 4, &[2.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0].map(|x| C64::new(x, 0.0))) * i_pi;
    let b = Matrix::from_row_slice(4, 4, &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0].map(|x| C64::new(x, 0.0)))
        * (i_pi / 2f64.sqrt());
    let mut x = Matrix::zeros(8, 8);
    x.view_mut((0, 0), (4, 4)).copy_from(&a);
    x.view_mut((0, 4), (4, 4)).copy_from(&b);
    x.view_mut((4, 0), (4, 4)).copy_from(&(-b.adjoint()));
    x
}

/// `exp(tX)` for the anti-Hermitian generator.
fn holonomic_rotation(x: &Matrix) -> Rotation {
    Rotation::new(&(x * C64::new(0.0, -1.0)))
}

pub fn cnot_matrix() -> Matrix {
    Matrix::from_row_slice(4, 4, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0].map(|x| C64::new(x, 0.0)))
}

/// Energies of the ancilla-ground and excited bands.
pub const E0: f64 = 0.0;
pub const E1: f64 = 1.0;

#[derive(Clone, Debug, Serialize)]
pub struct HolonomicCnotReport {
    pub total_time: f64,
    pub steps: usize,
    /// `|tr(W†·CNOT)|/4`.
    pub fidelity: f64,
    /// Norm lost from the computational band.
    pub leakage: f64,
    pub unitary: MatrixExport,
    #[serde(skip)]
    pub w: Matrix,
}

fn validate_generator(x: &Matrix) -> Result<()> {
    let defect = crate::operator::max_abs_diff(x, &(-x.adjoint()));
    if defect > 1e-12 {
        return Err(Error::Constraint(format!("generator is not anti-Hermitian (defect {defect})")));
    }
    Ok(())
}

/// Evolves under `H(t) = E₁ e^{tX}P₁e^{−tX} + E₀ e^{tX}P₀e^{−tX}` for physical
/// time `T` (`t = τ/T`) and returns the block `W = V₀†U(T)V₀` on the
/// ancilla-ground band, with `E₀ = 0` so no dynamical phase needs removing.
pub fn holonomic_cnot(total_time: f64, steps: usize) -> Result<HolonomicCnotReport> {
    if !(total_time > 0.0) || steps == 0 {
        return Err(Error::OutOfRange(format!("T = {total_time}, steps = {steps}")));
    }
    let x = holonomic_generator();
    validate_generator(&x)?;
    let band = Matrix::from_diagonal(&Vector::from_fn(8, |r, _| C64::new(if r < 4 { E0 } else { E1 }, 0.0)));
    let rot = holonomic_rotation(&x);
    let u = propagate_with(
        |tau| {
            let r = rot.at(tau / total_time);
            &r * &band * r.adjoint()
        },
        8,
        total_time,
        steps,
    );
    let w = u.view((0, 0), (4, 4)).into_owned();
    let leakage = 1.0 - (w.adjoint() * &w).trace().re / 4.0;
    let fidelity = (w.adjoint() * cnot_matrix()).trace().norm() / 4.0;
    Ok(HolonomicCnotReport { total_time, steps, fidelity, leakage, unitary: MatrixExport::from(&w), w })
}

/// The same block from the exact rotating-frame solution
/// `U(T) = e^{X} exp(−i(T·H(0) − iX))`.
pub fn holonomic_cnot_exact(total_time: f64) -> Matrix {
    let x = holonomic_generator();
    let band = Matrix::from_diagonal(&Vector::from_fn(8, |r, _| C64::new(if r < 4 { E0 } else { E1 }, 0.0)));
    let rotating = DenseOperator::from_matrix_unchecked(band * C64::new(total_time, 0.0) - &x * C64::new(0.0, 1.0));
    let u = holonomic_rotation(&x).at(1.0) * crate::operator::time_evolution(&rotating, 1.0).expect("Hermitian").into_matrix();
    u.view((0, 0), (4, 4)).into_owned()
}

/// Adiabatic-limit block from the Wilczek–Zee holonomy of the frame
/// `e^{tX}V₀`: `V₀†F(1)·W`.
pub fn holonomic_cnot_wilczek_zee(steps: usize) -> Result<(Matrix, HolonomyFrame)> {
    let x = holonomic_generator();
    validate_generator(&x)?;
    let rot = holonomic_rotation(&x);
    let frame = |t: f64| rot.at(t).columns(0, 4).into_owned();
    let h = wilczek_zee_holonomy(frame, steps)?;
    let end = frame(1.0);
    let w = end.rows(0, 4) * &h.w;
    Ok((w, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;
    use crate::operator::unitary_exp;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cone(theta: f64) -> impl Fn(f64) -> Matrix {
        move |s: f64| {
            let phi = 2.0 * PI * s;
            let (nx, ny, nz) = (theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
            // −n·σ: the ground state is aligned with the field.
            Matrix::from_row_slice(2, 2, &[C64::new(-nz, 0.0), C64::new(-nx, ny), C64::new(-nx, -ny), C64::new(nz, 0.0)])
        }
    }

    #[test]
    fn spin_half_cone_phase() {
        for theta in [0.3, 1.0, 2.0] {
            let gamma = geometric_phase(cone(theta), 0, 20000, None).unwrap();
            let solid = 2.0 * PI * (1.0 - f64::cos(theta));
            assert!(wrap_phase(gamma + solid / 2.0).abs() < 1e-6, "θ={theta}: {gamma}");
        }
    }

    #[test]
    fn phase_is_rate_independent() {
        let path = cone(0.8);
        let a = geometric_phase(|s| path(s), 0, 40000, None).unwrap();
        let b = geometric_phase(|s| path(smooth_rate(s)), 0, 40000, None).unwrap();
        let c = geometric_phase(|s| path(s * s), 0, 40000, None).unwrap();
        assert!(wrap_phase(a - b).abs() < 1e-8 && wrap_phase(a - c).abs() < 1e-8, "{a} {b} {c}");
    }

    #[test]
    fn real_path_phase_is_zero_or_pi() {
        let h = |s: f64| {
            let (c, sn) = ((PI * s).cos(), (PI * s).sin());
            Matrix::from_row_slice(2, 2, &[C64::new(c, 0.0), C64::new(sn, 0.0), C64::new(sn, 0.0), C64::new(-c, 0.0)])
        };
        let v0 = eigh(&h(0.0)).1.column(0).into_owned();
        // Rotating by π/2 about y carries the start to the end of the path.
        let end = Vector::from_vec(vec![-v0[1], v0[0]]);
        let g = geometric_phase(h, 0, 1000, Some(&end)).unwrap();
        assert!(g.abs() < 1e-9 || (g.abs() - PI).abs() < 1e-9, "{g}");
    }

    #[test]
    fn crossing_is_reported() {
        let h = |s: f64| Matrix::from_diagonal(&Vector::from_vec(vec![C64::new(s - 0.5, 0.0), C64::new(0.5 - s, 0.0)]));
        assert!(matches!(geometric_phase(h, 0, 10, None), Err(Error::LevelCrossing { .. })));
    }

    fn h0_pair() -> PauliSum {
        // Target of the gates is qubit 2 (CNOT 1 2).
        PauliSum::from_labels(&[(0.9, "IZ"), (0.1, "ZI")]).unwrap()
    }

    #[test]
    fn identity_gate_has_no_geometric_phase() {
        let plan = PhaseCancellation::new(&h0_pair(), &DenseOperator::identity(2), 7.0).unwrap();
        assert!(plan.gammas.iter().all(|g| g.abs() < 1e-12));
        let u = plan.propagator(200, linear_rate).unwrap();
        let expect = Matrix::identity(4, 4) * C64::from_polar(1.0, -7.0);
        assert!(crate::operator::max_abs_diff(&u, &expect) < 1e-10);
    }

    #[test]
    fn geometric_phases_match_generator_diagonal() {
        let gate = Gate::Cnot { control: 1, target: 2 }.lifted(2).unwrap();
        let plan = PhaseCancellation::new(&h0_pair(), &gate, 100.0).unwrap();
        for n in 0..4 {
            let v = plan.basis.column(n);
            let expect = -(v.adjoint() * plan.generator.matrix() * v)[(0, 0)].re;
            assert!(wrap_phase(plan.gammas[n] - expect).abs() < 1e-6, "{n}: {} vs {expect}", plan.gammas[n]);
        }
        let report = plan.phase_report();
        assert_eq!(report.levels.len(), 4);
    }

    #[test]
    fn phases_collapse_to_global() {
        let gate = Gate::Cnot { control: 1, target: 2 }.lifted(2).unwrap();
        let plan = PhaseCancellation::new(&h0_pair(), &gate, 3.0).unwrap();
        // Adiabatic phases of step 2 followed by the exact step-4 phases.
        let hold = crate::operator::time_evolution(&plan.step4_hamiltonian(), plan.total_time).unwrap();
        let mut phases = Vec::new();
        for (n, lp) in plan.phase_report().levels.iter().enumerate() {
            let rotated = gate.matrix() * plan.basis.column(n);
            let after = hold.matrix() * &rotated;
            let step4 = rotated.dotc(&after).arg();
            phases.push(wrap_phase(lp.dynamical + lp.geometric + step4));
        }
        assert!(phases.iter().all(|p| wrap_phase(p - phases[0]).abs() < 1e-8), "{phases:?}");
        assert!(wrap_phase(phases[0] + plan.total_time).abs() < 1e-8);
    }

    #[test]
    fn slow_cz_preserves_arbitrary_states() {
        let gate = Gate::Cz(1, 2).lifted(2).unwrap();
        let plan = PhaseCancellation::new(&h0_pair(), &gate, 50.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = crate::operator::random::state(2, &mut rng);
        let out = plan.run(&psi, 1000, smooth_rate).unwrap();
        let want = gate.apply(&psi).unwrap();
        assert!(out.fidelity(&want) > 1.0 - 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        let gate = DenseOperator::identity(2);
        let big = PauliSum::from_labels(&[(0.9, "IZ"), (0.3, "ZI")]).unwrap();
        assert!(PhaseCancellation::new(&big, &gate, 1.0).is_err());
        let degenerate = PauliSum::from_labels(&[(0.5, "IZ"), (0.5, "ZI")]).unwrap();
        assert!(matches!(PhaseCancellation::new(&degenerate, &gate, 1.0), Err(Error::DegenerateGround(_))));
        let two_local = PauliSum::from_labels(&[(0.5, "ZZ")]).unwrap();
        assert!(matches!(PhaseCancellation::new(&two_local, &gate, 1.0), Err(Error::Locality { .. })));
    }

    #[test]
    fn generator_structure() {
        let x = holonomic_generator();
        validate_generator(&x).unwrap();
        let rot = holonomic_rotation(&x);
        let e = rot.at(0.4);
        assert!(spectral_norm(&(e.adjoint() * &e - Matrix::identity(8, 8))) < 1e-12);
        assert!(crate::operator::max_abs_diff(&rot.at(0.0), &Matrix::identity(8, 8)) < 1e-14);
        // Adiabatic limit: V₀†e^X V₀ · e^{−A} is the CNOT.
        let a = x.view((0, 0), (4, 4)).into_owned();
        let e_minus_a = unitary_exp(&DenseOperator::from_matrix_unchecked(&a * C64::new(0.0, 1.0)), 1.0).unwrap();
        let limit = rot.at(1.0).view((0, 0), (4, 4)).into_owned() * e_minus_a.matrix();
        assert!(gate_infidelity(&limit, &cnot_matrix()) < 1e-12);
    }

    #[test]
    fn constant_subspace_has_trivial_holonomy() {
        let f = |_s: f64| Matrix::identity(4, 2);
        let h = wilczek_zee_holonomy(f, 50).unwrap();
        assert!(crate::operator::max_abs_diff(&h.w, &Matrix::identity(2, 2)) < 1e-14);
    }

    #[test]
    fn abelian_holonomy_is_the_geometric_phase() {
        let path = cone(1.1);
        let frame = |s: f64| {
            let (_, v) = eigh(&path(s));
            let v = v.column(0).into_owned();
            // Smooth gauge, single-valued on the loop.
            let phase = v[0].arg();
            Matrix::from_column_slice(2, 1, (v * C64::from_polar(1.0, -phase)).as_slice())
        };
        let h = wilczek_zee_holonomy(frame, 20000).unwrap();
        let gamma = geometric_phase(&path, 0, 20000, None).unwrap();
        assert!(wrap_phase(h.w[(0, 0)].arg() - gamma).abs() < 1e-6);
    }

    #[test]
    fn holonomy_reparametrization_invariant() {
        let (a, ha) = holonomic_cnot_wilczek_zee(4000).unwrap();
        let x = holonomic_generator();
        let rot = holonomic_rotation(&x);
        let hb = wilczek_zee_holonomy(|t| rot.at(smooth_rate(t)).columns(0, 4).into_owned(), 4000).unwrap();
        assert!(ha.unitary_defect < 1e-9 && ha.frame_defect < 1e-10);
        assert!(crate::operator::max_abs_diff(&ha.w, &hb.w) < 1e-6);
        assert!(gate_infidelity(&a, &cnot_matrix()) < 1e-6);
    }

    #[test]
    fn integrated_cnot_matches_exact_solution() {
        let r = holonomic_cnot(50.0, 5000).unwrap();
        let exact = holonomic_cnot_exact(50.0);
        assert!(crate::operator::max_abs_diff(&r.w, &exact) < 1e-4);
        assert!(r.fidelity > 0.99 && r.leakage >= -1e-12);
    }
}
