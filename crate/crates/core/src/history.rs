//! History-state Hamiltonians with a unary clock, and the adiabatic cycle that
//! runs a circuit forward into its history state and out again through the
//! reversed circuit.
//!
//! The computational register occupies the low qubits `1..=n` and the clock
//! the high qubits `n+1..=n+L`. Clock stage `l` is the unary string
//! `|1^l 0^{L−l}⟩` with clock qubit 1 written first, so stage `l` sets the
//! `l` lowest clock bits. No input term is included: any computational state
//! may start the computation, which keeps the ground space invariant under a
//! change of initial state.

use serde::Serialize;

use crate::circuit::{apply_gate, Circuit};
use crate::error::{Error, Result};
use crate::evolution::evolve_with;
use crate::operator::{eigh, eigvalsh, max_abs_diff, DenseOperator, Matrix, QuantumState, Vector};
use crate::C64;

/// Largest register (computational plus clock) built densely.
pub const MAX_QUBITS: usize = 8;

fn clock_projector(bit: usize) -> Matrix {
    let mut m = Matrix::zeros(2, 2);
    m[(bit, bit)] = C64::new(1.0, 0.0);
    m
}

fn kron_clock(clock: &Matrix, comp: &Matrix) -> Matrix {
    clock.kronecker(comp)
}

fn check_gate(u: &DenseOperator) -> Result<()> {
    u.require_unitary(&Default::default())?;
    if u.qubits() + 1 > MAX_QUBITS {
        return Err(Error::OutOfRange(format!("{} computational qubits", u.qubits())));
    }
    Ok(())
}

/// `H_ini = |1⟩⟨1|^c` and `H_out = ½(I⊗|0⟩⟨0| + I⊗|1⟩⟨1| − U⊗|1⟩⟨0| − U†⊗|0⟩⟨1|)`
/// for a single clock qubit above the gate's register.
pub fn single_gate_hamiltonians(u: &DenseOperator) -> Result<(DenseOperator, DenseOperator)> {
    check_gate(u)?;
    let d = u.dim();
    let eye = Matrix::identity(d, d);
    let h_ini = kron_clock(&clock_projector(1), &eye);
    let h_out = pqr_matrix(u.matrix(), PqrPoint { p: 1.0, q: 1.0, r: 1.0 });
    Ok((DenseOperator::from_matrix_unchecked(h_ini), DenseOperator::from_matrix_unchecked(h_out)))
}

/// Coefficients of the deformation family; `(0, 2, 0)` is `H_ini` and
/// `(1, 1, 1)` is `H_out`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PqrPoint {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl PqrPoint {
    /// Point on the ground-preserving arc `P = 2sin²φ, Q = 2cos²φ, R = sin 2φ`.
    pub fn on_arc(phi: f64) -> Self {
        PqrPoint { p: 2.0 * phi.sin().powi(2), q: 2.0 * phi.cos().powi(2), r: (2.0 * phi).sin() }
    }

    pub fn constraint_defect(&self) -> f64 {
        (self.p * self.q - self.r * self.r).abs()
    }
}

fn pqr_matrix(u: &Matrix, pt: PqrPoint) -> Matrix {
    let d = u.nrows();
    let eye = Matrix::identity(d, d);
    let mut up = Matrix::zeros(2, 2);
    up[(1, 0)] = C64::new(1.0, 0.0);
    let h = kron_clock(&clock_projector(0), &eye).scale(pt.p) + kron_clock(&clock_projector(1), &eye).scale(pt.q)
        - kron_clock(&up, u).scale(pt.r)
        - kron_clock(&up.adjoint(), &u.adjoint()).scale(pt.r);
    h.scale(0.5)
}

/// `½(P·I⊗|0⟩⟨0| + Q·I⊗|1⟩⟨1| − R·U⊗|1⟩⟨0| − R·U†⊗|0⟩⟨1|)`.
pub fn pqr_hamiltonian(u: &DenseOperator, pt: PqrPoint) -> Result<DenseOperator> {
    check_gate(u)?;
    if pt.p < 0.0 || pt.q < 0.0 || pt.r < 0.0 {
        return Err(Error::OutOfRange(format!("negative PQR coefficients {pt:?}")));
    }
    Ok(DenseOperator::from_matrix_unchecked(pqr_matrix(u.matrix(), pt)))
}

/// `(R·ψ⊗|0⟩ + P·Uψ⊗|1⟩)`, normalized: the zero-energy state on the arc.
pub fn pqr_ground(u: &DenseOperator, psi: &QuantumState, pt: PqrPoint) -> Result<QuantumState> {
    let low = psi.amplitudes() * C64::new(pt.r, 0.0);
    let high = u.matrix() * psi.amplitudes() * C64::new(pt.p, 0.0);
    let mut v = Vector::zeros(2 * psi.dim());
    v.rows_mut(0, psi.dim()).copy_from(&low);
    v.rows_mut(psi.dim(), psi.dim()).copy_from(&high);
    QuantumState::normalize(v)
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub total_time: f64,
    pub steps: usize,
    pub fidelity: f64,
    pub min_gap: f64,
    #[serde(skip)]
    pub final_state: QuantumState,
}

/// Lowest gap of `h` inside the invariant subspace spanned by `basis` columns.
fn restricted_gap(h: &Matrix, basis: &Matrix) -> f64 {
    let e = eigvalsh(&(basis.adjoint() * h * basis));
    e.get(1).map_or(f64::INFINITY, |e1| e1 - e[0])
}

fn orthonormal_pair(a: &Vector, b: &Vector) -> Matrix {
    Matrix::from_columns(&[a.clone(), b.clone()])
}

fn embed(psi: &QuantumState, clock: usize, clock_qubits: usize) -> Vector {
    let d = psi.dim();
    let mut v = Vector::zeros(d << clock_qubits);
    v.rows_mut(clock * d, d).copy_from(psi.amplitudes());
    v
}

/// Evolves `ψ⊗|0⟩^c` under `(1 − s)H_ini + s·H_out` for time `T`; the target
/// is `(ψ⊗|0⟩ + Uψ⊗|1⟩)/√2`.
pub fn single_gate_sweep(u: &DenseOperator, psi: &QuantumState, total_time: f64, steps: usize) -> Result<SweepReport> {
    let (h_ini, h_out) = single_gate_hamiltonians(u)?;
    check_state(psi, u)?;
    let start = QuantumState::from_vector_unchecked(embed(psi, 0, 1));
    let target = pqr_ground(u, psi, PqrPoint { p: 1.0, q: 1.0, r: 1.0 })?;
    let h = |s: f64| h_ini.matrix().scale(1.0 - s) + h_out.matrix().scale(s);
    let out = evolve_with(|t| h(t / total_time), &start, total_time, steps)?;
    let basis = orthonormal_pair(&embed(psi, 0, 1), &embed(&u.apply(psi)?, 1, 1));
    let min_gap = (0..=64).map(|k| restricted_gap(&h(k as f64 / 64.0), &basis)).fold(f64::INFINITY, f64::min);
    Ok(SweepReport { total_time, steps, fidelity: out.fidelity(&target), min_gap, final_state: out })
}

fn check_state(psi: &QuantumState, u: &DenseOperator) -> Result<()> {
    if psi.dim() != u.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), found: psi.dim() });
    }
    Ok(())
}

/// Second half of the single-gate cycle: from the history state at
/// `(1, 1, 1)` along `path(x)`, `x ∈ [0, 1]`, to `(2, 0, 0)`, whose ground
/// state is `Uψ⊗|1⟩^c`. Every sampled point must satisfy `PQ = R²`.
pub fn half_cycle_sweep<F>(u: &DenseOperator, psi: &QuantumState, path: F, total_time: f64, steps: usize) -> Result<SweepReport>
where
    F: Fn(f64) -> PqrPoint,
{
    check_gate(u)?;
    check_state(psi, u)?;
    let ends = [path(0.0), path(1.0)];
    let want = [PqrPoint { p: 1.0, q: 1.0, r: 1.0 }, PqrPoint { p: 2.0, q: 0.0, r: 0.0 }];
    for (got, want) in ends.iter().zip(&want) {
        if (got.p - want.p).abs() + (got.q - want.q).abs() + (got.r - want.r).abs() > 1e-10 {
            return Err(Error::Constraint(format!("path endpoint {got:?}, expected {want:?}")));
        }
    }
    for k in 0..=256 {
        let pt = path(k as f64 / 256.0);
        if pt.constraint_defect() > 1e-10 {
            return Err(Error::Constraint(format!("PQ − R² = {} at {pt:?}", pt.p * pt.q - pt.r * pt.r)));
        }
    }
    let start = pqr_ground(u, psi, want[0])?;
    let uphi = u.apply(psi)?;
    let target = QuantumState::from_vector_unchecked(embed(&uphi, 1, 1));
    let out = evolve_with(|t| pqr_matrix(u.matrix(), path(t / total_time)), &start, total_time, steps)?;
    let basis = orthonormal_pair(&embed(psi, 0, 1), &embed(&uphi, 1, 1));
    let min_gap = (0..=64)
        .map(|k| restricted_gap(&pqr_matrix(u.matrix(), path(k as f64 / 64.0)), &basis))
        .fold(f64::INFINITY, f64::min);
    Ok(SweepReport { total_time, steps, fidelity: out.fidelity(&target), min_gap, final_state: out })
}

/// The arc from `φ = π/4` to `φ = π/2`.
pub fn arc_path(x: f64) -> PqrPoint {
    use std::f64::consts::FRAC_PI_4;
    PqrPoint::on_arc(FRAC_PI_4 * (1.0 + x))
}

/// Basis index of clock stage `l` for an `L`-qubit unary clock above `n` qubits.
pub fn clock_offset(n: usize, stage: usize) -> usize {
    ((1usize << stage) - 1) << n
}

fn check_register(c: &Circuit) -> Result<()> {
    let total = c.qubits() + c.depth();
    if total > MAX_QUBITS {
        return Err(Error::OutOfRange(format!("{total} qubits exceeds the dense limit of {MAX_QUBITS}")));
    }
    Ok(())
}

/// `U_l … U_1 ψ` for `l = 0..=L`.
fn prefixes(c: &Circuit, psi: &QuantumState) -> Result<Vec<QuantumState>> {
    let mut out = vec![psi.clone()];
    let mut v = psi.amplitudes().clone();
    for g in c.gates() {
        apply_gate(&mut v, g);
        out.push(QuantumState::from_vector_unchecked(v.clone()));
    }
    Ok(out)
}

/// `(L+1)^{−1/2} Σ_l U_l … U_1 ψ ⊗ |1^l 0^{L−l}⟩`.
pub fn history_state_from(c: &Circuit, psi: &QuantumState) -> Result<QuantumState> {
    check_register(c)?;
    let n = c.qubits();
    if psi.qubits() != n {
        return Err(Error::DimensionMismatch { expected: 1 << n, found: psi.dim() });
    }
    let l = c.depth();
    let d = 1usize << n;
    let mut v = Vector::zeros(d << l);
    let w = C64::new(1.0 / ((l + 1) as f64).sqrt(), 0.0);
    for (stage, p) in prefixes(c, psi)?.iter().enumerate() {
        v.rows_mut(clock_offset(n, stage), d).copy_from(&(p.amplitudes() * w));
    }
    Ok(QuantumState::from_vector_unchecked(v))
}

pub fn history_state(c: &Circuit) -> Result<QuantumState> {
    history_state_from(c, &QuantumState::zero(c.qubits()))
}

/// Projector onto a pattern of clock bits (`Some(b)` fixes clock qubit `j`),
/// as a diagonal over the full register.
fn clock_pattern(n: usize, l: usize, pattern: &[(usize, usize)]) -> Vec<usize> {
    (0..(1usize << (n + l))).filter(|idx| pattern.iter().all(|&(j, b)| (idx >> (n + j - 1)) & 1 == b)).collect()
}

/// `H_i` and `H_f` for a circuit of depth `L` with an `L`-qubit unary clock.
///
/// Both contain the clock-validity penalty `Σ_j |0⟩⟨0|_j ⊗ |1⟩⟨1|_{j+1}`.
/// `H_i = |1⟩⟨1|` on clock qubit 1 plus the penalty; `H_f` adds for each gate
/// `½(|l−1⟩⟨l−1| + |l⟩⟨l| − U_l⊗|l⟩⟨l−1| − U_l†⊗|l−1⟩⟨l|)` with stage
/// projectors read off clock qubits `l−1, l, l+1`.
pub fn clock_hamiltonian(c: &Circuit) -> Result<(DenseOperator, DenseOperator)> {
    check_register(c)?;
    let n = c.qubits();
    let l = c.depth();
    if l == 0 {
        return Err(Error::OutOfRange("a clock needs at least one gate".into()));
    }
    let dim = 1usize << (n + l);
    let mut penalty = Matrix::zeros(dim, dim);
    for j in 1..l {
        for idx in clock_pattern(n, l, &[(j, 0), (j + 1, 1)]) {
            penalty[(idx, idx)] += C64::new(1.0, 0.0);
        }
    }
    let mut h_i = penalty.clone();
    for idx in clock_pattern(n, l, &[(1, 1)]) {
        h_i[(idx, idx)] += C64::new(1.0, 0.0);
    }
    let mut h_f = penalty;
    for (k, gate) in c.gates().iter().enumerate() {
        let stage = k + 1;
        let mut context = Vec::new();
        if stage > 1 {
            context.push((stage - 1, 1));
        }
        if stage < l {
            context.push((stage + 1, 0));
        }
        let before: Vec<_> = context.iter().copied().chain([(stage, 0)]).collect();
        let clock_bit = 1usize << (n + stage - 1);
        for idx in clock_pattern(n, l, &before) {
            let jdx = idx | clock_bit;
            h_f[(idx, idx)] += C64::new(0.5, 0.0);
            h_f[(jdx, jdx)] += C64::new(0.5, 0.0);
            // Column idx of U_l ⊗ |l⟩⟨l−1|, computed by applying the gate.
            let mut e = Vector::zeros(1 << n);
            e[idx & ((1 << n) - 1)] = C64::new(1.0, 0.0);
            apply_gate(&mut e, gate);
            let base = jdx & !((1 << n) - 1);
            for (r, amp) in e.iter().enumerate() {
                if *amp != C64::new(0.0, 0.0) {
                    h_f[(base | r, idx)] -= amp * 0.5;
                    h_f[(idx, base | r)] -= amp.conj() * 0.5;
                }
            }
        }
    }
    Ok((DenseOperator::from_matrix_unchecked(h_i), DenseOperator::from_matrix_unchecked(h_f)))
}

/// Lowest energy of `h` on states supported on illegal clock strings.
pub fn illegal_clock_floor(h: &DenseOperator, n: usize, l: usize) -> f64 {
    let legal: Vec<usize> = (0..=l).map(|s| clock_offset(n, s) >> n).collect();
    let illegal: Vec<usize> = (0..h.dim()).filter(|idx| !legal.contains(&(idx >> n))).collect();
    if illegal.is_empty() {
        return f64::INFINITY;
    }
    let block = Matrix::from_fn(illegal.len(), illegal.len(), |r, c| h.matrix()[(illegal[r], illegal[c])]);
    eigvalsh(&block)[0]
}

/// Clock relabeling: reverse the clock qubits and flip every clock bit, which
/// maps stage `l` to stage `L − l`. Returned as a permutation matrix.
pub fn clock_relabel(n: usize, l: usize) -> Matrix {
    let dim = 1usize << (n + l);
    let mut p = Matrix::zeros(dim, dim);
    for idx in 0..dim {
        let comp = idx & ((1 << n) - 1);
        let clock = idx >> n;
        let mut mapped = 0;
        for j in 0..l {
            let bit = (clock >> j) & 1;
            mapped |= (1 - bit) << (l - 1 - j);
        }
        p[((mapped << n) | comp, idx)] = C64::new(1.0, 0.0);
    }
    p
}

#[derive(Clone, Debug, Serialize)]
pub struct LegReport {
    pub name: String,
    /// Fidelity with the leg's target at the end of the leg.
    pub fidelity: f64,
    pub min_gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleReport {
    pub total_time: f64,
    pub steps_per_leg: usize,
    pub legs: Vec<LegReport>,
    /// `max |R·H_f(reverse)·R† − H_f|`, zero when the two history
    /// Hamiltonians agree up to relabeling.
    pub relabel_defect: f64,
    /// For each clock stage `l`, the stage it is relabeled to.
    pub relabel_map: Vec<usize>,
    /// Fidelity of the relabeled final state with `U_L…U_1|0⟩⊗|0…0⟩^c`.
    pub final_fidelity: f64,
}

/// Runs `H_i → H_f` and then `H_f′ → H_i′` (the reversed circuit's Hamiltonians
/// seen through the clock relabeling), each leg for time `T`, starting from
/// `|0⟩⊗|0…0⟩^c`.
pub fn full_holonomic_cycle(c: &Circuit, total_time: f64, steps_per_leg: usize) -> Result<CycleReport> {
    let (h_i, h_f) = clock_hamiltonian(c)?;
    let n = c.qubits();
    let l = c.depth();
    let rev = c.inverse()?;
    let (h_i_rev, h_f_rev) = clock_hamiltonian(&rev)?;
    let r = clock_relabel(n, l);
    let h_f_prime = &r * h_f_rev.matrix() * r.adjoint();
    let h_i_prime = &r * h_i_rev.matrix() * r.adjoint();
    let relabel_defect = max_abs_diff(&h_f_prime, h_f.matrix());

    let zero = QuantumState::zero(n);
    let stages = prefixes(c, &zero)?;
    let basis = Matrix::from_columns(&stages.iter().enumerate().map(|(s, p)| embed(p, (1 << s) - 1, l)).collect::<Vec<_>>());
    let gap_along = |a: &Matrix, b: &Matrix| {
        (0..=32)
            .map(|k| {
                let s = k as f64 / 32.0;
                restricted_gap(&(a.scale(1.0 - s) + b.scale(s)), &basis)
            })
            .fold(f64::INFINITY, f64::min)
    };

    let start = QuantumState::from_vector_unchecked(embed(&zero, 0, l));
    let leg = |a: &Matrix, b: &Matrix, psi: &QuantumState| {
        evolve_with(|t| a.scale(1.0 - t / total_time) + b.scale(t / total_time), psi, total_time, steps_per_leg)
    };
    let history = history_state(c)?;
    let mid = leg(h_i.matrix(), h_f.matrix(), &start)?;
    let end = leg(&h_f_prime, &h_i_prime, &mid)?;
    let done = &stages[l];
    let end_target = QuantumState::from_vector_unchecked(embed(done, (1 << l) - 1, l));
    let relabeled = QuantumState::from_vector_unchecked(&r * end.amplitudes());
    let final_target = QuantumState::from_vector_unchecked(embed(done, 0, l));
    let legs = vec![
        LegReport { name: "forward".into(), fidelity: mid.fidelity(&history), min_gap: gap_along(h_i.matrix(), h_f.matrix()) },
        LegReport { name: "reverse".into(), fidelity: end.fidelity(&end_target), min_gap: gap_along(&h_f_prime, &h_i_prime) },
    ];
    Ok(CycleReport {
        total_time,
        steps_per_leg,
        legs,
        relabel_defect,
        relabel_map: (0..=l).map(|s| l - s).collect(),
        final_fidelity: relabeled.fidelity(&final_target),
    })
}

/// Eigenvalues of `H_out`, which should all be 0 or 1.
pub fn output_spectrum(u: &DenseOperator) -> Result<Vec<f64>> {
    let (_, h_out) = single_gate_hamiltonians(u)?;
    Ok(eigh(h_out.matrix()).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{parse_circuit, Gate};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cnot() -> DenseOperator {
        Gate::Cnot { control: 2, target: 1 }.lifted(2).unwrap()
    }

    fn energy(h: &DenseOperator, psi: &QuantumState) -> f64 {
        (h.matrix() * psi.amplitudes()).norm()
    }

    #[test]
    fn single_gate_ground_spaces() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = cnot();
        let (h_ini, h_out) = single_gate_hamiltonians(&u).unwrap();
        for _ in 0..5 {
            let psi = crate::operator::random::state(2, &mut rng);
            let hist = pqr_ground(&u, &psi, PqrPoint { p: 1.0, q: 1.0, r: 1.0 }).unwrap();
            assert!(energy(&h_out, &hist) < 1e-12);
            let low = QuantumState::from_vector_unchecked(embed(&psi, 0, 1));
            assert!(energy(&h_ini, &low) < 1e-12);
        }
        let spec = output_spectrum(&u).unwrap();
        assert!(spec.iter().all(|e| e.abs() < 1e-10 || (e - 1.0).abs() < 1e-10));
        assert_eq!(spec.iter().filter(|e| e.abs() < 1e-10).count(), 4);
    }

    #[test]
    fn pqr_endpoints() {
        let u = cnot();
        let (h_ini, h_out) = single_gate_hamiltonians(&u).unwrap();
        assert!(pqr_hamiltonian(&u, PqrPoint { p: 1.0, q: 1.0, r: 1.0 }).unwrap().max_abs_diff(&h_out) < 1e-15);
        assert!(pqr_hamiltonian(&u, PqrPoint { p: 0.0, q: 2.0, r: 0.0 }).unwrap().max_abs_diff(&h_ini) < 1e-15);
        let end = pqr_hamiltonian(&u, PqrPoint { p: 2.0, q: 0.0, r: 0.0 }).unwrap();
        let psi = QuantumState::zero(2);
        let target = QuantumState::from_vector_unchecked(embed(&u.apply(&psi).unwrap(), 1, 1));
        assert!(energy(&end, &target) < 1e-15);
        assert!(pqr_hamiltonian(&u, PqrPoint { p: -1.0, q: 0.0, r: 0.0 }).is_err());
    }

    #[test]
    fn arc_states_are_annihilated() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = DenseOperator::unitary(crate::operator::random::unitary(4, &mut rng)).unwrap();
        for k in 0..=10 {
            let pt = arc_path(k as f64 / 10.0);
            assert!(pt.constraint_defect() < 1e-12);
            let psi = crate::operator::random::state(2, &mut rng);
            let h = pqr_hamiltonian(&u, pt).unwrap();
            assert!(energy(&h, &pqr_ground(&u, &psi, pt).unwrap()) < 1e-12);
        }
        // The algebraic family P = 1+t, Q = 1−t, R = √(1−t²) also satisfies PQ = R².
        for t in [0.0, 0.3, 0.9] {
            let pt = PqrPoint { p: 1.0 + t, q: 1.0 - t, r: f64::sqrt(1.0 - t * t) };
            assert!(pt.constraint_defect() < 1e-12);
        }
    }

    #[test]
    fn single_gate_interpolation() {
        let r = single_gate_sweep(&cnot(), &QuantumState::zero(2), 50.0, 2000).unwrap();
        assert!(r.fidelity >= 0.999, "{r:?}");
        assert!(r.min_gap > 0.1);
    }

    #[test]
    fn half_cycle_reaches_output() {
        let psi = QuantumState::ket("10").unwrap();
        let r = half_cycle_sweep(&cnot(), &psi, arc_path, 100.0, 4000).unwrap();
        assert!(r.fidelity >= 0.999, "{r:?}");
        assert!((r.min_gap - 1.0).abs() < 1e-9);
        let expect = QuantumState::ket("111").unwrap();
        assert!(r.final_state.fidelity(&expect) >= 0.999);
        let ident = half_cycle_sweep(&DenseOperator::identity(1), &QuantumState::zero(1), arc_path, 100.0, 4000).unwrap();
        assert!(ident.final_state.fidelity(&QuantumState::ket("10").unwrap()) >= 0.999);
    }

    #[test]
    fn half_cycle_rejects_bad_paths() {
        let line = |x: f64| PqrPoint { p: 1.0 + x, q: 1.0 - x, r: 1.0 - x };
        assert!(matches!(half_cycle_sweep(&cnot(), &QuantumState::zero(2), line, 1.0, 10), Err(Error::Constraint(_))));
    }

    #[test]
    fn history_states() {
        let empty = Circuit::new(1, vec![]).unwrap();
        let h = history_state(&empty).unwrap();
        assert_eq!(h.dim(), 2);
        assert!((h.amplitudes()[0].re - 1.0).abs() < 1e-15);
        let c = parse_circuit("qubits 2\nH 1\nX 2").unwrap();
        let h = history_state(&c).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let r = 1.0 / 2f64.sqrt();
        let mut expect = Vector::zeros(16);
        expect[0] = C64::new(s, 0.0);
        expect[4] = C64::new(s * r, 0.0);
        expect[5] = C64::new(s * r, 0.0);
        expect[12 + 2] = C64::new(s * r, 0.0);
        expect[12 + 3] = C64::new(s * r, 0.0);
        assert!((h.amplitudes() - expect).norm() < 1e-12);
    }

    #[test]
    fn one_gate_clock_matches_single_gate_form() {
        let c = Circuit::new(2, vec![Gate::Cnot { control: 2, target: 1 }]).unwrap();
        let (h_i, h_f) = clock_hamiltonian(&c).unwrap();
        let (h_ini, h_out) = single_gate_hamiltonians(&cnot()).unwrap();
        assert!(h_i.max_abs_diff(&h_ini) < 1e-15);
        assert!(h_f.max_abs_diff(&h_out) < 1e-15);
    }

    #[test]
    fn history_state_is_zero_energy_ground() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for text in ["qubits 2\nH 1\nCNOT 1 2", "qubits 2\nH 1\nX 2\nCZ 1 2", "qubits 3\nRy 1 0.3\nCNOT 1 3\nT 2"] {
            let c = parse_circuit(text).unwrap();
            let (_, h_f) = clock_hamiltonian(&c).unwrap();
            h_f.require_hermitian(&Default::default()).unwrap();
            let e = eigvalsh(h_f.matrix());
            assert!(e[0] > -1e-10);
            assert!(energy(&h_f, &history_state(&c).unwrap()) < 1e-9);
            let v = crate::operator::random::state(c.qubits(), &mut rng);
            assert!(energy(&h_f, &history_state_from(&c, &v).unwrap()) < 1e-9);
            assert!(illegal_clock_floor(&h_f, c.qubits(), c.depth()) > 0.1);
        }
    }

    #[test]
    fn relabel_maps_stages() {
        let (n, l) = (1, 3);
        let r = clock_relabel(n, l);
        for stage in 0..=l {
            let mut v = Vector::zeros(1 << (n + l));
            v[clock_offset(n, stage)] = C64::new(1.0, 0.0);
            let w = &r * v;
            assert!((w[clock_offset(n, l - stage)].re - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn bell_cycle() {
        let c = parse_circuit("qubits 2\nH 1\nCNOT 1 2").unwrap();
        let rep = full_holonomic_cycle(&c, 50.0, 2000).unwrap();
        assert!(rep.relabel_defect < 1e-12, "{rep:?}");
        assert!(rep.final_fidelity >= 0.99, "{rep:?}");
        assert!(rep.legs.iter().all(|l| l.fidelity >= 0.99 && l.min_gap > 0.05), "{rep:?}");
    }

    #[test]
    fn identity_cycle_returns_home() {
        let c = parse_circuit("qubits 1\nRz 1 0\nRz 1 0").unwrap();
        let rep = full_holonomic_cycle(&c, 40.0, 1600).unwrap();
        assert!(rep.final_fidelity >= 0.99, "{rep:?}");
    }

    #[test]
    fn one_gate_cycle_matches_half_sweep() {
        let c = Circuit::new(2, vec![Gate::Cnot { control: 2, target: 1 }]).unwrap();
        let rep = full_holonomic_cycle(&c, 50.0, 2000).unwrap();
        let half = half_cycle_sweep(&cnot(), &QuantumState::zero(2), arc_path, 50.0, 2000).unwrap();
        let relabeled = QuantumState::from_vector_unchecked(clock_relabel(2, 1) * half.final_state.amplitudes());
        let target = QuantumState::from_vector_unchecked(embed(&cnot().apply(&QuantumState::zero(2)).unwrap(), 0, 1));
        assert!(relabeled.fidelity(&target) >= 0.99 && rep.final_fidelity >= 0.99);
    }
}
