//! Entanglement constraints on ground states of k-local Hamiltonians.
//!
//! The central inequality: if `tr(ρH) = ⟨ψ|H|ψ⟩` then
//! `Σ_{j≥1} (E_j − E_0)·ρ_{j+1} ≤ (1 − F²)·E_tot`, where `F` is the overlap of
//! `ψ` with the ground space, `E_tot` the spectral width and `ρ_j` the
//! eigenvalues of `ρ` in descending order. A k-local `H` with `k < n` cannot
//! tell the GHZ state from the classical mixture of `|0…0⟩` and `|1…1⟩`, so a
//! GHZ ground state forces a degenerate ground level.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{
    eigh, eigvalsh, random, reduce_pure, validate_density, DenseOperator, Matrix, QuantumState, Tolerances, Vector,
};
use crate::pauli::{Pauli, PauliSum, PauliTerm};
use crate::C64;

/// Tolerance on `|tr(ρH) − ⟨ψ|H|ψ⟩|`.
pub const EXPECTATION_TOL: f64 = 1e-8;

/// `(H, ψ, ρ)` with matching energies.
#[derive(Clone, Debug)]
pub struct Theorem1Instance {
    h: DenseOperator,
    psi: QuantumState,
    rho: DenseOperator,
}

impl Theorem1Instance {
    pub fn new(h: DenseOperator, psi: QuantumState, rho: DenseOperator) -> Result<Self> {
        h.require_hermitian(&Tolerances::default())?;
        validate_density(&rho, &Tolerances::default())?;
        if psi.dim() != h.dim() || rho.dim() != h.dim() {
            return Err(Error::DimensionMismatch { expected: h.dim(), found: psi.dim().max(rho.dim()) });
        }
        let mismatch = (rho.mul(&h).trace().re - h.expectation(&psi)).abs();
        if mismatch > EXPECTATION_TOL * h.spectral_norm().max(1.0) {
            return Err(Error::ExpectationMismatch(mismatch));
        }
        Ok(Self { h, psi, rho })
    }

    /// Random instance: `ρ` is a random density matrix mixed with an extreme
    /// eigenprojector until its energy equals `⟨ψ|H|ψ⟩`.
    pub fn random<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> Result<Self> {
        let d = 1 << qubits;
        let h = DenseOperator::from_matrix_unchecked(random::hermitian(d, rng));
        let psi = random::state(qubits, rng);
        let (energies, vectors) = eigh(h.matrix());
        let target = h.expectation(&psi);
        let base = random::density(qubits, rng);
        let r = (&base * h.matrix()).trace().re;
        let (extreme, e) = if r > target { (0, energies[0]) } else { (d - 1, energies[d - 1]) };
        let p = if (r - e).abs() > 0.0 { (r - target) / (r - e) } else { 0.0 };
        let v = vectors.column(extreme);
        let rho = base.scale(1.0 - p) + (v * v.adjoint()).scale(p);
        Self::new(h, psi, DenseOperator::from_matrix_unchecked(crate::operator::hermitize(&rho)))
    }

    pub fn hamiltonian(&self) -> &DenseOperator {
        &self.h
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Theorem1Report {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// Squared overlap of `ψ` with the ground space.
    pub fidelity_sq: f64,
    pub e_tot: f64,
}

/// Evaluates both sides of the inequality. `ρ` eigenvalues are taken in
/// descending order against ascending energies, the pairing that makes the
/// left side the smallest value `tr(ρH) − E_0` can take over `ρ`'s orbit.
pub fn theorem1_check(inst: &Theorem1Instance) -> Theorem1Report {
    let (energies, vectors) = eigh(inst.h.matrix());
    let e0 = energies[0];
    let e_tot = energies[energies.len() - 1] - e0;
    let mut weights = eigvalsh(inst.rho.matrix());
    weights.reverse();
    let lhs: f64 = energies.iter().zip(&weights).skip(1).map(|(e, w)| (e - e0) * w).sum();
    let ground_dim = energies.iter().take_while(|&&e| e - e0 <= 1e-9 * e_tot.max(1.0)).count();
    let fidelity_sq = (vectors.columns(0, ground_dim).adjoint() * inst.psi.amplitudes()).norm_squared();
    let rhs = (1.0 - fidelity_sq) * e_tot;
    Theorem1Report { lhs, rhs, holds: lhs <= rhs + 1e-9, fidelity_sq, e_tot }
}

/// `½(|0…0⟩⟨0…0| + |1…1⟩⟨1…1|)`.
pub fn ghz_mixture(qubits: usize) -> DenseOperator {
    let d = 1 << qubits;
    let mut m = Matrix::zeros(d, d);
    m[(0, 0)] = C64::new(0.5, 0.0);
    m[(d - 1, d - 1)] = C64::new(0.5, 0.0);
    DenseOperator::from_matrix_unchecked(m)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GhzWitnessReport {
    pub qubits: usize,
    pub locality: usize,
    pub ghz_energy: f64,
    pub mixture_energy: f64,
    /// `⟨GHZ⁻|H|GHZ⁻⟩`, the orthogonal partner.
    pub partner_energy: f64,
    pub expectation_equal: bool,
    /// `‖(H − E)|GHZ⟩‖`.
    pub eigen_residual: f64,
    pub is_eigenstate: bool,
    pub is_ground: bool,
    pub partner_is_eigenstate: bool,
    pub ground_degeneracy: usize,
    /// `E₁ − E₀` of the full spectrum.
    pub gap: f64,
    /// A GHZ ground state came with a degenerate ground level.
    pub degeneracy_found: bool,
}

/// Compares `H` on GHZ against the classical mixture and inspects the spectrum.
pub fn ghz_witness(h: &PauliSum, n: usize) -> Result<GhzWitnessReport> {
    if h.qubits() != n {
        return Err(Error::DimensionMismatch { expected: n, found: h.qubits() });
    }
    let k = h.locality();
    if k >= n {
        return Err(Error::Locality { expected: n - 1, found: k });
    }
    let dense = h.to_dense();
    let ghz = QuantumState::ghz(n, true);
    let partner = QuantumState::ghz(n, false);
    let ghz_energy = dense.expectation(&ghz);
    let mixture_energy = ghz_mixture(n).mul(&dense).trace().re;
    let partner_energy = dense.expectation(&partner);
    let residual = |state: &QuantumState, e: f64| {
        (dense.matrix() * state.amplitudes() - state.amplitudes() * C64::new(e, 0.0)).norm()
    };
    let eigen_residual = residual(&ghz, ghz_energy);
    let (energies, _) = eigh(dense.matrix());
    let scale = dense.spectral_norm().max(1.0);
    let is_eigenstate = eigen_residual <= 1e-8 * scale;
    let is_ground = is_eigenstate && (ghz_energy - energies[0]).abs() <= 1e-8 * scale;
    let ground_degeneracy = energies.iter().take_while(|&&e| e - energies[0] <= 1e-8 * scale).count();
    Ok(GhzWitnessReport {
        qubits: n,
        locality: k,
        ghz_energy,
        mixture_energy,
        partner_energy,
        expectation_equal: (ghz_energy - mixture_energy).abs() <= 1e-10 * scale,
        eigen_residual,
        is_eigenstate,
        is_ground,
        partner_is_eigenstate: residual(&partner, partner_energy) <= 1e-8 * scale,
        ground_degeneracy,
        gap: energies[1] - energies[0],
        degeneracy_found: is_ground && ground_degeneracy >= 2,
    })
}

/// All Pauli strings of weight `1..=k` on `n` qubits.
pub fn pauli_basis(n: usize, k: usize) -> Vec<PauliTerm> {
    let mut out = Vec::new();
    for code in 1..(1usize << (2 * n)) {
        let letters: Vec<Pauli> = (0..n).map(|q| Pauli::ALL[(code >> (2 * q)) & 3]).collect();
        let t = PauliTerm { coefficient: 1.0, letters };
        if t.weight() <= k {
            out.push(t);
        }
    }
    out
}

/// Which states a generated Hamiltonian must keep as exact eigenstates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GhzConstraint {
    /// `|GHZ⟩` itself.
    Ghz,
    /// `|0…0⟩` and `|1…1⟩` separately and at equal energy, which makes GHZ⁺
    /// and GHZ⁻ degenerate.
    Branches,
}

/// Random k-local Hamiltonian with prescribed exact eigenstates, found by
/// projecting random coefficients onto the null space of
/// `c ↦ (1 − |v⟩⟨v|) H(c) |v⟩` for each pinned `v`. A ferromagnetic
/// `−μ Σ Z_iZ_j` is added on top; it keeps the pinned states eigenstates and
/// pushes the `|0…0⟩, |1…1⟩` pair to the bottom for large `μ`. The random part
/// has unit 2-norm in its coefficients.
///
/// With [`GhzConstraint::Ghz`] the GHZ state is an eigenstate but in general
/// not the ground state: the random part couples `|0…0⟩` and `|1…1⟩` to other
/// states with opposite signs, which lowers GHZ⁻ below it.
pub fn ghz_eigen_hamiltonian<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    constraint: GhzConstraint,
    ferro: f64,
    rng: &mut R,
) -> Result<PauliSum> {
    let basis = pauli_basis(n, k);
    let pinned: Vec<QuantumState> = match constraint {
        GhzConstraint::Ghz => vec![QuantumState::ghz(n, true)],
        GhzConstraint::Branches => vec![QuantumState::zero(n), QuantumState::basis(n, (1 << n) - 1)],
    };
    let d = 1usize << n;
    let block = 2 * d;
    // Zero rows pad the system to square so the SVD returns a full V.
    let equal_row = block * pinned.len();
    let rows = (equal_row + 1).max(basis.len());
    let mut m = DMatrix::<f64>::zeros(rows, basis.len());
    for (a, term) in basis.iter().enumerate() {
        let p = term.to_dense();
        for (b, state) in pinned.iter().enumerate() {
            let g = state.amplitudes();
            let pg = p.matrix() * g;
            let overlap = g.dotc(&pg);
            let orth: Vector = &pg - g * overlap;
            for r in 0..d {
                m[(b * block + r, a)] = orth[r].re;
                m[(b * block + d + r, a)] = orth[r].im;
            }
        }
        if constraint == GhzConstraint::Branches {
            // Equal energies on the two branches.
            m[(equal_row, a)] = p.matrix()[(0, 0)].re - p.matrix()[(d - 1, d - 1)].re;
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let tol = 1e-10 * svd.singular_values.iter().fold(1.0f64, |a, &b| a.max(b));
    let mut coeffs = vec![0.0; basis.len()];
    for (row, &sv) in svd.singular_values.iter().enumerate() {
        if sv <= tol {
            let w: f64 = rng.sample(rand_distr::StandardNormal);
            for (a, c) in coeffs.iter_mut().enumerate() {
                *c += w * v_t[(row, a)];
            }
        }
    }
    let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm > 0.0 {
        coeffs.iter_mut().for_each(|c| *c /= norm);
    }
    let mut terms: Vec<PauliTerm> =
        basis.into_iter().zip(coeffs).map(|(t, c)| PauliTerm { coefficient: c, ..t }).collect();
    if ferro != 0.0 {
        for i in 1..=n {
            for j in (i + 1)..=n {
                terms.push(PauliTerm::on(n, -ferro, &[(i, Pauli::Z), (j, Pauli::Z)])?);
            }
        }
    }
    let mut h = PauliSum::from_terms(n, terms)?;
    h.prune(1e-12);
    Ok(h)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AncillaReport {
    Applicable {
        /// Ancilla states `a` with `|GHZ⟩|a⟩` in the ground space.
        ancilla_multiplicity: usize,
        supplied_multiplicity: usize,
        ground_degeneracy: usize,
        /// `|0…0⟩|a_j⟩` and `|1…1⟩|a_j⟩` all lie in the ground space.
        branches_in_ground: bool,
        /// `ground_degeneracy ≥ 2 · ancilla_multiplicity`.
        holds: bool,
    },
    Inapplicable {
        reason: String,
    },
}

/// Ancilla extension: `H` acts on `n` system qubits (1..=n) plus ancillas.
/// If the ground space contains `|GHZ⟩|a_j⟩` for `m` orthogonal `a_j`, the
/// ground level must be at least `2m`-fold degenerate.
pub fn ancilla_witness(h: &PauliSum, n: usize, m: usize) -> Result<AncillaReport> {
    let total = h.qubits();
    if total < n {
        return Err(Error::DimensionMismatch { expected: n, found: total });
    }
    let system_weight =
        h.terms().iter().map(|t| t.letters[..n].iter().filter(|&&p| p != Pauli::I).count()).max().unwrap_or(0);
    if system_weight >= n {
        return Err(Error::Locality { expected: n - 1, found: system_weight });
    }
    let dense = h.to_dense();
    let (energies, vectors) = eigh(dense.matrix());
    let scale = dense.spectral_norm().max(1.0);
    let g = energies.iter().take_while(|&&e| e - energies[0] <= 1e-8 * scale).count();
    let ground = vectors.columns(0, g).into_owned();
    let a = total - n;
    let da = 1usize << a;
    let ds = 1usize << n;
    // Columns: |GHZ⟩ ⊗ |b⟩ for each ancilla basis state b (ancillas are high qubits).
    let h2 = std::f64::consts::FRAC_1_SQRT_2;
    let embed = |b: usize, sys: &[(usize, f64)]| {
        let mut v = Vector::zeros(ds * da);
        for &(idx, amp) in sys {
            v[b * ds + idx] = C64::new(amp, 0.0);
        }
        v
    };
    let ghz_cols = Matrix::from_columns(&(0..da).map(|b| embed(b, &[(0, h2), (ds - 1, h2)])).collect::<Vec<_>>());
    let overlap = ground.adjoint() * &ghz_cols;
    let compressed = overlap.adjoint() * &overlap;
    let (weights, anc_vecs) = eigh(&compressed);
    let hits: Vec<usize> = (0..da).filter(|&j| weights[j] > 1.0 - 1e-8).collect();
    if hits.is_empty() {
        return Ok(AncillaReport::Inapplicable { reason: "no ground state of the form |GHZ⟩|a⟩".into() });
    }
    let proj_weight = |v: &Vector| (ground.adjoint() * v).norm_squared();
    let zeros = Matrix::from_columns(&(0..da).map(|b| embed(b, &[(0, 1.0)])).collect::<Vec<_>>());
    let ones = Matrix::from_columns(&(0..da).map(|b| embed(b, &[(ds - 1, 1.0)])).collect::<Vec<_>>());
    let branches_in_ground = hits.iter().all(|&j| {
        let a_j = anc_vecs.column(j);
        proj_weight(&(&zeros * a_j)) > 1.0 - 1e-8 && proj_weight(&(&ones * a_j)) > 1.0 - 1e-8
    });
    Ok(AncillaReport::Applicable {
        ancilla_multiplicity: hits.len(),
        supplied_multiplicity: m,
        ground_degeneracy: g,
        branches_in_ground,
        holds: g >= 2 * hits.len(),
    })
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Normalized spectrum of `U (Σ Z) U†`: levels `j/n` with multiplicity `C(n, j)`.
pub fn conjugated_spectrum(n: usize) -> Vec<(f64, usize)> {
    (0..=n).map(|j| (j as f64 / n as f64, binomial(n, j))).collect()
}

/// Same spectrum measured numerically for a Haar-random `U`, rescaled so the
/// spectral width is 1, and grouped into levels.
pub fn conjugated_spectrum_numeric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<(f64, usize)> {
    let d = 1 << n;
    let mut h0 = PauliSum::new(n);
    for q in 1..=n {
        h0.add_placed(1.0, &[(q, Pauli::Z)]).expect("qubit in range");
    }
    let u = random::unitary(d, rng);
    let h = &u * h0.to_dense().matrix() * u.adjoint();
    let e = eigvalsh(&h);
    let (lo, hi) = (e[0], e[d - 1]);
    let mut levels: Vec<(f64, usize)> = Vec::new();
    for x in e.iter().map(|x| (x - lo) / (hi - lo)) {
        match levels.last_mut() {
            Some((v, c)) if (x - *v).abs() < 1e-6 => *c += 1,
            _ => levels.push((x, 1)),
        }
    }
    levels
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TensorGhzReport {
    pub qubits: usize,
    pub family_size: usize,
    /// Largest entry difference between any member's two-qubit marginal and
    /// the first member's.
    pub marginal_spread: f64,
    pub indistinguishable: bool,
    /// Transverse field of the candidate Hamiltonian.
    pub field: f64,
    /// `1 − F²` achieved by the candidate.
    pub delta: f64,
    pub e_tot: f64,
    /// Mean of `E_j − E_0` over the `r − 1` lowest excitations.
    pub average_gap: f64,
    /// `r/(r−1) · (1 − F²) · E_tot`.
    pub average_gap_bound: f64,
    pub holds: bool,
    pub theorem: Theorem1Report,
}

/// `⊗_b (|000⟩ + (−1)^{s_b}|111⟩)/√2` over `n/3` blocks, for every sign pattern.
pub fn tensor_ghz_family(n: usize) -> Result<Vec<QuantumState>> {
    if n == 0 || n % 3 != 0 {
        return Err(Error::OutOfRange(format!("n = {n} must be a positive multiple of 3")));
    }
    let blocks = n / 3;
    Ok((0..(1usize << blocks))
        .map(|signs| {
            (0..blocks).rev().fold(None::<QuantumState>, |acc, b| {
                let block = QuantumState::ghz(3, signs >> b & 1 == 0);
                Some(match acc {
                    None => block,
                    Some(high) => high.kron_above(&block),
                })
            })
            .expect("at least one block")
        })
        .collect())
}

/// Candidate 2-local Hamiltonian `−Σ_blocks Σ_pairs Z_iZ_j − g Σ X_i`.
pub fn tensor_ghz_candidate(n: usize, field: f64) -> Result<PauliSum> {
    let mut h = PauliSum::new(n);
    for b in 0..n / 3 {
        let q = 3 * b + 1;
        for (i, j) in [(q, q + 1), (q + 1, q + 2), (q, q + 2)] {
            h.add_placed(-1.0, &[(i, Pauli::Z), (j, Pauli::Z)])?;
        }
    }
    for i in 1..=n {
        h.add_placed(-field, &[(i, Pauli::X)])?;
    }
    h.normalize();
    Ok(h)
}

/// Builds the sign family, checks two-qubit indistinguishability, tunes the
/// candidate's field so `1 − F² = delta`, and evaluates the average-gap bound.
pub fn tensor_ghz_bound(n: usize, delta: f64) -> Result<TensorGhzReport> {
    if ![3, 6, 9].contains(&n) {
        return Err(Error::OutOfRange(format!("n = {n} not in {{3, 6, 9}}")));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::OutOfRange(format!("delta = {delta} not in (0, 0.5)")));
    }
    let family = tensor_ghz_family(n)?;
    let r = family.len();
    let mut spread = 0.0f64;
    for i in 1..=n {
        for j in (i + 1)..=n {
            let reference = reduce_pure(&family[0], &[i, j])?;
            for member in &family[1..] {
                spread = spread.max(reduce_pure(member, &[i, j])?.max_abs_diff(&reference));
            }
        }
    }
    let psi = &family[0];
    let infidelity = |g: f64| -> Result<f64> {
        let h = tensor_ghz_candidate(n, g)?.to_dense();
        let (_, v) = eigh(h.matrix());
        Ok(1.0 - v.column(0).dotc(psi.amplitudes()).norm_sqr())
    };
    // 1 − F² grows with the field; bisect for the requested value.
    let (mut lo, mut hi) = (1e-3, 2.0);
    if infidelity(hi)? < delta {
        return Err(Error::OutOfRange(format!("delta = {delta} not reachable")));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if infidelity(mid)? < delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let field = 0.5 * (lo + hi);
    let h = tensor_ghz_candidate(n, field)?.to_dense();
    let d = h.dim();
    let mut rho = Matrix::zeros(d, d);
    for member in &family {
        let v = member.amplitudes();
        rho += v * v.adjoint() / C64::new(r as f64, 0.0);
    }
    let inst = Theorem1Instance::new(h.clone(), psi.clone(), DenseOperator::from_matrix_unchecked(rho))?;
    let theorem = theorem1_check(&inst);
    let energies = eigvalsh(h.matrix());
    let e_tot = energies[d - 1] - energies[0];
    let average_gap = energies[1..r].iter().map(|e| e - energies[0]).sum::<f64>() / (r - 1) as f64;
    let achieved = 1.0 - theorem.fidelity_sq;
    let average_gap_bound = r as f64 / (r - 1) as f64 * achieved * e_tot;
    Ok(TensorGhzReport {
        qubits: n,
        family_size: r,
        marginal_spread: spread,
        indistinguishable: spread < 1e-12,
        field,
        delta: achieved,
        e_tot,
        average_gap,
        average_gap_bound,
        holds: average_gap <= average_gap_bound + 1e-9,
        theorem,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_ground_state_gives_zero_sides() {
        let h = PauliSum::from_labels(&[(1.0, "ZI"), (0.5, "IZ")]).unwrap().to_dense();
        let psi = QuantumState::ket("11").unwrap();
        let inst = Theorem1Instance::new(h, psi.clone(), psi.density()).unwrap();
        let r = theorem1_check(&inst);
        assert!(r.lhs.abs() < 1e-12 && r.rhs.abs() < 1e-12 && r.holds);
    }

    #[test]
    fn mismatched_expectation_is_rejected() {
        let h = PauliSum::from_labels(&[(1.0, "Z")]).unwrap().to_dense();
        let err = Theorem1Instance::new(h, QuantumState::ket("0").unwrap(), QuantumState::ket("1").unwrap().density());
        assert!(matches!(err, Err(Error::ExpectationMismatch(_))));
    }

    #[test]
    fn random_instances_never_violate() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..1000 {
            let n = 1 + trial % 4;
            let inst = Theorem1Instance::random(n, &mut rng).unwrap();
            let r = theorem1_check(&inst);
            assert!(r.holds, "trial {trial}: {r:?}");
        }
    }

    #[test]
    fn ghz_ground_forces_zero_gap() {
        let h = PauliSum::from_labels(&[(-1.0, "ZZI"), (-1.0, "IZZ"), (-1.0, "ZIZ")]).unwrap();
        let ghz = QuantumState::ghz(3, true);
        let inst = Theorem1Instance::new(h.to_dense(), ghz, ghz_mixture(3)).unwrap();
        let r = theorem1_check(&inst);
        // F = 1, so the weight-½ second level must sit at E₀.
        assert!(r.rhs.abs() < 1e-12 && r.lhs.abs() < 1e-12);
        let w = ghz_witness(&h, 3).unwrap();
        assert!(w.is_ground && w.degeneracy_found && w.gap.abs() < 1e-12);
    }

    #[test]
    fn witness_expectation_equality() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (n, k) in [(3, 2), (2, 1), (4, 3)] {
            let mut h = PauliSum::new(n);
            for t in pauli_basis(n, k) {
                h.push(PauliTerm { coefficient: rng.gen_range(-1.0..1.0), ..t }).unwrap();
            }
            let w = ghz_witness(&h, n).unwrap();
            assert!(w.expectation_equal, "n={n}");
            assert!((w.partner_energy - w.ghz_energy).abs() < 1e-10);
        }
        let full = PauliSum::from_labels(&[(1.0, "XXX")]).unwrap();
        assert!(matches!(ghz_witness(&full, 3), Err(Error::Locality { .. })));
    }

    #[test]
    fn projected_hamiltonians_keep_ghz_eigenstate() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let h = ghz_eigen_hamiltonian(3, 2, GhzConstraint::Ghz, 0.0, &mut rng).unwrap();
            let w = ghz_witness(&h, 3).unwrap();
            assert!(w.is_eigenstate, "residual {}", w.eigen_residual);
            assert!((w.partner_energy - w.ghz_energy).abs() < 1e-8);
        }
        let h = ghz_eigen_hamiltonian(4, 3, GhzConstraint::Ghz, 3.0, &mut rng).unwrap();
        let w = ghz_witness(&h, 4).unwrap();
        assert!(w.is_eigenstate && !w.is_ground, "{w:?}");
        let h = ghz_eigen_hamiltonian(4, 3, GhzConstraint::Branches, 3.0, &mut rng).unwrap();
        let w = ghz_witness(&h, 4).unwrap();
        assert!(w.is_ground && w.degeneracy_found, "{w:?}");
    }

    #[test]
    fn ancilla_extension() {
        let h = PauliSum::from_labels(&[(-1.0, "ZZII"), (-1.0, "IZZI"), (-1.0, "ZIZI"), (1.0, "IIIZ")]).unwrap();
        match ancilla_witness(&h, 3, 1).unwrap() {
            AncillaReport::Applicable { ancilla_multiplicity, ground_degeneracy, branches_in_ground, holds, .. } => {
                assert_eq!(ancilla_multiplicity, 1);
                assert_eq!(ground_degeneracy, 2);
                assert!(branches_in_ground && holds);
            }
            other => panic!("{other:?}"),
        }
        let free = PauliSum::from_labels(&[(-1.0, "ZZII"), (-1.0, "IZZI"), (-1.0, "ZIZI")]).unwrap();
        match ancilla_witness(&free, 3, 2).unwrap() {
            AncillaReport::Applicable { ancilla_multiplicity, ground_degeneracy, holds, .. } => {
                assert_eq!((ancilla_multiplicity, ground_degeneracy), (2, 4));
                assert!(holds);
            }
            other => panic!("{other:?}"),
        }
        let fields = PauliSum::from_labels(&[(1.0, "ZIII"), (1.0, "IZII"), (1.0, "IIZI")]).unwrap();
        assert!(matches!(ancilla_witness(&fields, 3, 1).unwrap(), AncillaReport::Inapplicable { .. }));
    }

    #[test]
    fn ancilla_witness_without_ancilla_matches_ghz_witness() {
        let h = PauliSum::from_labels(&[(-1.0, "ZZI"), (-1.0, "IZZ"), (-1.0, "ZIZ")]).unwrap();
        let w = ghz_witness(&h, 3).unwrap();
        match ancilla_witness(&h, 3, 1).unwrap() {
            AncillaReport::Applicable { ground_degeneracy, ancilla_multiplicity, .. } => {
                assert_eq!(ancilla_multiplicity, 1);
                assert_eq!(ground_degeneracy, w.ground_degeneracy);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn spectrum_counting() {
        assert_eq!(conjugated_spectrum(3).iter().map(|l| l.1).collect::<Vec<_>>(), vec![1, 3, 3, 1]);
        assert_eq!(conjugated_spectrum(1), vec![(0.0, 1), (1.0, 1)]);
        for n in 1..8 {
            assert_eq!(conjugated_spectrum(n).iter().map(|l| l.1).sum::<usize>(), 1 << n);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let numeric = conjugated_spectrum_numeric(5, &mut rng);
        let exact = conjugated_spectrum(5);
        assert_eq!(numeric.len(), exact.len());
        for ((a, ca), (b, cb)) in numeric.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-9);
            assert_eq!(ca, cb);
        }
    }

    #[test]
    fn tensor_family() {
        assert_eq!(tensor_ghz_family(3).unwrap().len(), 2);
        let r = tensor_ghz_bound(6, 0.05).unwrap();
        assert_eq!(r.family_size, 4);
        assert!(r.indistinguishable);
        assert!((r.delta - 0.05).abs() < 1e-6);
        assert!(r.holds && r.theorem.holds, "{r:?}");
    }
}
