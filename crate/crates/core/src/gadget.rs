//! Three-qubit perturbative gadgets: replacing 3-local terms by 2-local
//! couplings to penalized ancilla triples.
//!
//! Each 3-local term is first written as `Y − 6·B₁B₂B₃` with positive
//! semidefinite single-qubit factors ([`psd_triple_decompose`]). Every factor
//! triple gets three ancillas held in `span{|000⟩, |111⟩}` by
//!
//! ```text
//! H_anc = −δ⁻³/4 · (Z_aZ_b + Z_bZ_c + Z_aZ_c − 3)
//! ```
//!
//! and is coupled through
//!
//! ```text
//! V′ = Y + Σ_m [ δ⁻¹ (B̃₁² + B̃₂² + B̃₃²) − δ⁻² (B̃₁X_a + B̃₂X_b + B̃₃X_c) ].
//! ```
//!
//! Third-order perturbation theory in the ancilla gap `δ⁻³` then gives
//! `H_eff = Y − 6 Σ B̃₁B̃₂B̃₃ ⊗ X_aX_bX_c` on the low-energy subspace, whose
//! `XXX = +1` sector reproduces the original operator up to `O(δ)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{eigh, eigvalsh, reduce_pure, spectral_norm, DenseOperator, Matrix, QuantumState};
use crate::pauli::{psd_triple_decompose, recombine, GadgetTriple, Pauli, PauliSum, PauliTerm};
use crate::C64;

/// Largest register the dense gadget routines will build.
pub const MAX_QUBITS: usize = 12;

/// A 2-local Hamiltonian on computational qubits `1..=n_c` plus three
/// ancillas per triple; triple `m` (0-based) owns qubits `n_c + 3m + 1 ..= n_c + 3m + 3`.
#[derive(Clone, Debug, Serialize)]
pub struct GadgetizedHamiltonian {
    pub computational: usize,
    pub delta: f64,
    pub triples: Vec<GadgetTriple>,
    /// The ≤2-local remainder on the computational qubits.
    pub y: PauliSum,
    pub h_anc: PauliSum,
    pub v_prime: PauliSum,
}

impl GadgetizedHamiltonian {
    pub fn total_qubits(&self) -> usize {
        self.computational + 3 * self.triples.len()
    }

    /// Qubit index of ancilla `position ∈ {0,1,2}` of triple `m`.
    pub fn ancilla(&self, m: usize, position: usize) -> usize {
        self.computational + 3 * m + position + 1
    }

    /// `H̃ = H_anc + V′`.
    pub fn full(&self) -> PauliSum {
        self.h_anc.plus(&self.v_prime)
    }

    /// `Y ⊗ I − 6 Σ_m scale_m B₁B₂B₃ ⊗ X⊗X⊗X`.
    pub fn effective(&self) -> PauliSum {
        let n = self.total_qubits();
        let mut out = self.y.embed(n);
        for (m, t) in self.triples.iter().enumerate() {
            let xxx = [0, 1, 2].map(|j| (self.ancilla(m, j), Pauli::X));
            out = out.plus(&place(&t.product(self.computational).embed(n), &xxx).scaled(-6.0));
        }
        out
    }

    /// Basis indices of the `H_anc` ground space (every triple in 000 or 111)
    /// and of its complement.
    pub fn partition(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.total_qubits();
        let mut low = Vec::new();
        let mut high = Vec::new();
        for idx in 0..(1usize << n) {
            let ok = (0..self.triples.len()).all(|m| {
                let bits = (idx >> (self.computational + 3 * m)) & 7;
                bits == 0 || bits == 7
            });
            if ok {
                low.push(idx);
            } else {
                high.push(idx);
            }
        }
        (low, high)
    }

    /// `δ⁻³`, the ancilla gap.
    pub fn penalty_gap(&self) -> f64 {
        self.delta.powi(-3)
    }
}

/// Sets the given letters on every term of `sum` (the qubits must be identity there).
fn place(sum: &PauliSum, placed: &[(usize, Pauli)]) -> PauliSum {
    let terms = sum
        .terms()
        .iter()
        .map(|t| {
            let mut letters = t.letters.clone();
            for &(q, p) in placed {
                debug_assert_eq!(letters[q - 1], Pauli::I);
                letters[q - 1] = p;
            }
            PauliTerm { coefficient: t.coefficient, letters }
        })
        .collect();
    PauliSum::from_terms(sum.qubits(), terms).expect("sizes unchanged")
}

/// Assembles `H_anc` and `V′` from a triple decomposition of `v3`.
pub fn build_gadget(v3: &PauliSum, y: &PauliSum, triples: &[GadgetTriple], delta: f64) -> Result<GadgetizedHamiltonian> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::OutOfRange(format!("delta = {delta} not in (0, 1)")));
    }
    let nc = v3.qubits();
    if y.qubits() != nc {
        return Err(Error::DimensionMismatch { expected: nc, found: y.qubits() });
    }
    let mut residual = recombine(y, triples).plus(&v3.scaled(-1.0));
    residual.prune(1e-9);
    if !residual.is_empty() {
        return Err(Error::Constraint(format!("decomposition does not reproduce the input: {residual}")));
    }
    if y.locality() > 2 {
        return Err(Error::Locality { expected: 2, found: y.locality() });
    }
    let n = nc + 3 * triples.len();
    if n > MAX_QUBITS {
        return Err(Error::OutOfRange(format!("{n} qubits exceeds the dense limit of {MAX_QUBITS}")));
    }
    let mut g = GadgetizedHamiltonian {
        computational: nc,
        delta,
        triples: triples.to_vec(),
        y: y.clone(),
        h_anc: PauliSum::new(n),
        v_prime: y.embed(n),
    };
    let penalty = -delta.powi(-3) / 4.0;
    let mut h_anc = PauliSum::new(n);
    let mut v_prime = y.embed(n);
    for (m, t) in triples.iter().enumerate() {
        let [a, b, c] = [0, 1, 2].map(|j| g.ancilla(m, j));
        for (p, q) in [(a, b), (b, c), (a, c)] {
            h_anc.add_placed(penalty, &[(p, Pauli::Z), (q, Pauli::Z)])?;
        }
        h_anc.add_placed(-3.0 * penalty, &[])?;
        for j in 0..3 {
            // B̃ is a multiple of a projector, so B̃² = scale^{1/3} B̃.
            let bt = t.scaled_factor(j, nc).embed(n);
            v_prime = v_prime.plus(&bt.scaled(t.scale.cbrt() / delta));
            v_prime = v_prime.plus(&place(&bt, &[(g.ancilla(m, j), Pauli::X)]).scaled(-delta.powi(-2)));
        }
    }
    h_anc.normalize();
    g.h_anc = h_anc;
    g.v_prime = v_prime;
    Ok(g)
}

/// Decomposes `target` (locality exactly 3) and gadgetizes it.
pub fn gadgetize(target: &PauliSum, delta: f64) -> Result<GadgetizedHamiltonian> {
    let (y, triples) = psd_triple_decompose(target)?;
    build_gadget(target, &y, &triples, delta)
}

fn submatrix(m: &Matrix, rows: &[usize], cols: &[usize]) -> Matrix {
    Matrix::from_fn(rows.len(), cols.len(), |r, c| m[(rows[r], cols[c])])
}

#[derive(Clone, Debug, Serialize)]
pub struct SelfEnergyReport {
    pub z: f64,
    /// `Σ₋(z)` on the low subspace, in the order of [`GadgetizedHamiltonian::partition`].
    #[serde(skip)]
    pub sigma_minus: Matrix,
    /// `‖Σ₋(z) − H_eff‖` (operator norm) on the low subspace.
    pub deviation: f64,
}

/// Exact self-energy `Σ₋(z) = H₋₋ + H₋₊ (z − H₊₊)⁻¹ H₊₋`, which equals
/// `z − (P G(z) P)⁻¹` for the resolvent `G(z) = (z − H̃)⁻¹`.
pub fn self_energy_exact(g: &GadgetizedHamiltonian, z: f64) -> Result<SelfEnergyReport> {
    let h = g.full().to_dense();
    let (low, high) = g.partition();
    let hmm = submatrix(h.matrix(), &low, &low);
    let hmp = submatrix(h.matrix(), &low, &high);
    let hpp = submatrix(h.matrix(), &high, &high);
    let shifted = Matrix::identity(high.len(), high.len()) * C64::new(z, 0.0) - hpp;
    let solved = shifted.lu().solve(&hmp.adjoint()).ok_or_else(|| Error::Singular(format!("z = {z} is resonant")))?;
    let sigma = hmm + hmp * solved;
    let heff = submatrix(g.effective().to_dense().matrix(), &low, &low);
    let deviation = spectral_norm(&(&sigma - heff));
    Ok(SelfEnergyReport { z, sigma_minus: sigma, deviation })
}

/// `z − (P G(z) P)⁻¹`, the definition the Schur-complement form is checked against.
pub fn self_energy_by_resolvent(g: &GadgetizedHamiltonian, z: f64) -> Result<Matrix> {
    let h = g.full().to_dense();
    let d = h.dim();
    let (low, _) = g.partition();
    let resolvent = (Matrix::identity(d, d) * C64::new(z, 0.0) - h.matrix())
        .try_inverse()
        .ok_or_else(|| Error::Singular(format!("z = {z} is an eigenvalue")))?;
    let block = submatrix(&resolvent, &low, &low)
        .try_inverse()
        .ok_or_else(|| Error::Singular("restricted resolvent".into()))?;
    Ok(Matrix::identity(low.len(), low.len()) * C64::new(z, 0.0) - block)
}

/// Largest self-energy deviation over 9 probes evenly spaced on `[e0 − 1, e0 + 1]`.
pub fn self_energy_certificate(g: &GadgetizedHamiltonian, e0: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    for k in 0..9 {
        let z = e0 - 1.0 + 2.0 * k as f64 / 8.0;
        worst = worst.max(self_energy_exact(g, z)?.deviation);
    }
    Ok(worst)
}

/// Terms of the self-energy series, `terms[k−1]` being the order-`k`
/// contribution `V₋₊ (G₊V₊₊)^{k−2} G₊ V₊₋` (order 1 is `V₋₋`).
pub fn self_energy_terms(g: &GadgetizedHamiltonian, z: f64, order: usize) -> Result<Vec<Matrix>> {
    if !(1..=4).contains(&order) {
        return Err(Error::OutOfRange(format!("order {order} not in 1..=4")));
    }
    let v = g.v_prime.to_dense();
    let anc = g.h_anc.to_dense();
    let norm = v.spectral_norm();
    let gap = g.penalty_gap();
    if norm >= gap {
        return Err(Error::Divergent { norm, gap });
    }
    let (low, high) = g.partition();
    let vmm = submatrix(v.matrix(), &low, &low);
    let vmp = submatrix(v.matrix(), &low, &high);
    let vpp = submatrix(v.matrix(), &high, &high);
    // H_anc is diagonal in the computational basis.
    let g_plus = Matrix::from_fn(high.len(), high.len(), |r, c| {
        if r == c {
            C64::new(1.0 / (z - anc.matrix()[(high[r], high[r])].re), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mut terms = vec![vmm];
    let mut chain = &g_plus * vmp.adjoint();
    for _ in 2..=order {
        terms.push(&vmp * &chain);
        chain = &g_plus * &vpp * chain;
    }
    Ok(terms)
}

/// Partial sum of the self-energy series up to `order`.
pub fn self_energy_series(g: &GadgetizedHamiltonian, z: f64, order: usize) -> Result<Matrix> {
    let terms = self_energy_terms(g, z, order)?;
    let mut sum = terms[0].clone();
    for t in &terms[1..] {
        sum += t;
    }
    Ok(sum)
}

/// `−6 Σ B̃₁B̃₂B̃₃ ⊗ X⊗X⊗X` on the low subspace, the leading order-3 structure.
pub fn third_order_structure(g: &GadgetizedHamiltonian) -> Matrix {
    let n = g.total_qubits();
    let mut s = PauliSum::new(n);
    for (m, t) in g.triples.iter().enumerate() {
        let xxx = [0, 1, 2].map(|j| (g.ancilla(m, j), Pauli::X));
        s = s.plus(&place(&t.product(g.computational).embed(n), &xxx).scaled(-6.0));
    }
    let (low, _) = g.partition();
    submatrix(s.to_dense().matrix(), &low, &low)
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumComparison {
    pub delta: f64,
    pub target_levels: Vec<f64>,
    pub gadget_levels: Vec<f64>,
    pub max_deviation: f64,
    /// `⟨GHZ^{⊗M}|ρ_anc|GHZ^{⊗M}⟩` for the gadget ground state.
    pub ancilla_ghz_fidelity: f64,
    /// `⟨t₀|ρ_comp|t₀⟩` with `t₀` the target's ground state.
    pub computational_fidelity: f64,
}

/// Compares the lowest `k` levels of the gadget with those of the 3-local target.
pub fn compare_lower_spectra(target: &DenseOperator, g: &GadgetizedHamiltonian, k: usize) -> Result<SpectrumComparison> {
    if target.qubits() != g.computational {
        return Err(Error::DimensionMismatch { expected: g.computational, found: target.qubits() });
    }
    if k == 0 || k > target.dim() {
        return Err(Error::OutOfRange(format!("k = {k} levels")));
    }
    let (te, tv) = eigh(target.matrix());
    let h = g.full().to_dense();
    let (ge, gv) = eigh(h.matrix());
    let max_deviation = te.iter().zip(&ge).take(k).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let ground = QuantumState::from_vector_unchecked(gv.column(0).into_owned());
    let ancillas: Vec<usize> = (g.computational + 1..=g.total_qubits()).collect();
    let rho_anc = reduce_pure(&ground, &ancillas)?;
    let ghz = (0..g.triples.len()).fold(QuantumState::basis(0, 0), |acc, _| QuantumState::ghz(3, true).kron_above(&acc));
    let rho_comp = reduce_pure(&ground, &(1..=g.computational).collect::<Vec<_>>())?;
    let t0 = QuantumState::from_vector_unchecked(tv.column(0).into_owned());
    Ok(SpectrumComparison {
        delta: g.delta,
        target_levels: te[..k].to_vec(),
        gadget_levels: ge[..k].to_vec(),
        max_deviation,
        ancilla_ghz_fidelity: rho_anc.expectation(&ghz),
        computational_fidelity: rho_comp.expectation(&t0),
    })
}

/// The 3-local operator obtained by conjugating
/// `a(−Z₁ − ½Z₁X₂ − ¼X₂X₃ − ¾X₃)` with a CZ on qubits 1 and 2:
/// `a(−Z₁ − ½X₂ − ¼Z₁X₂X₃ − ¾X₃)`. All its terms commute, so both its ground
/// state and first excited state sit in the sector the gadget reproduces.
pub fn cz_step_target(a: f64) -> Result<PauliSum> {
    let before = PauliSum::from_labels(&[(-a, "ZII"), (-0.5 * a, "ZXI"), (-0.25 * a, "IXX"), (-0.75 * a, "IIX")])?;
    let cz = crate::circuit::Gate::Cz(1, 2).lifted(3)?;
    let mut after = crate::pauli::pauli_decompose(&before.to_dense().conjugate_by(&cz))?;
    after.prune(1e-12);
    Ok(after)
}

fn normalized_gap(h: &Matrix) -> f64 {
    let e = eigvalsh(h);
    (e[1] - e[0]) / (e[e.len() - 1] - e[0])
}

/// Normalized ground gaps `(E₁ − E₀)/(E_max − E₀)` of repeatedly gadgetized
/// Hamiltonians: level 0 is [`cz_step_target`]`(0.5)`; level `k+1` adds the
/// 3-local term `½ X₁X_aX₂` coupling the last ancilla of level `k` to two
/// computational qubits and gadgetizes the result (rescaled to unit spectral
/// width) again. (The variant `½ Z₁X_aZ₂` leaves an exact two-fold ground
/// degeneracy at the second level.)
pub fn repeated_gadget_gap(steps: usize, delta: f64) -> Result<Vec<f64>> {
    let mut current = cz_step_target(0.5)?;
    if current.qubits() + 3 * steps > MAX_QUBITS {
        return Err(Error::OutOfRange(format!("{steps} nested gadgets exceed {MAX_QUBITS} qubits")));
    }
    let mut gaps = vec![normalized_gap(current.to_dense().matrix())];
    for step in 0..steps {
        if step > 0 {
            let n = current.qubits();
            let mut extra = PauliSum::new(n);
            extra.add_placed(0.5, &[(1, Pauli::X), (n, Pauli::X), (2, Pauli::X)])?;
            current = current.plus(&extra);
        }
        let e = eigvalsh(current.to_dense().matrix());
        let span = e[e.len() - 1] - e[0];
        let g = gadgetize(&current.scaled(1.0 / span), delta)?;
        current = g.full().scaled(span);
        gaps.push(normalized_gap(current.to_dense().matrix()));
    }
    Ok(gaps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{eig_hermitian, max_abs_diff};

    fn single_triple(delta: f64) -> GadgetizedHamiltonian {
        gadgetize(&cz_step_target(0.5).unwrap(), delta).unwrap()
    }

    #[test]
    fn target_structure() {
        let t = cz_step_target(1.0).unwrap();
        for (label, c) in [("ZII", -1.0), ("IXI", -0.5), ("ZXX", -0.25), ("IIX", -0.75)] {
            assert!((t.coefficient(label) - c).abs() < 1e-12, "{label}");
        }
        assert_eq!(t.terms().len(), 4);
    }

    #[test]
    fn ancilla_penalty_levels() {
        let g = single_triple(0.1);
        let h = g.h_anc.to_dense();
        let e = |ket: usize| h.matrix()[(ket << 3, ket << 3)].re;
        assert!(e(0b000).abs() < 1e-9 && e(0b111).abs() < 1e-9);
        assert!((e(0b001) - 1000.0).abs() < 1e-9);
        let spec = eig_hermitian(&h).unwrap();
        let levels = spec.levels();
        assert_eq!(levels.len(), 2);
        assert_eq!(levels[0].1, 2 * 8);
        assert_eq!(levels[1].1, 6 * 8);
        assert!((levels[1].0 - 1000.0).abs() < 1e-9);
        assert_eq!(g.total_qubits(), 6);
        assert!(g.v_prime.locality() <= 2 && g.h_anc.locality() == 2);
    }

    #[test]
    fn rejects_bad_delta() {
        let t = cz_step_target(0.5).unwrap();
        assert!(gadgetize(&t, 0.0).is_err());
        assert!(gadgetize(&t, 1.0).is_err());
    }

    #[test]
    fn schur_complement_matches_resolvent_definition() {
        let g = single_triple(0.2);
        for z in [-2.3, -1.1, 0.4] {
            let a = self_energy_exact(&g, z).unwrap().sigma_minus;
            let b = self_energy_by_resolvent(&g, z).unwrap();
            assert!(max_abs_diff(&a, &b) < 1e-6 * spectral_norm(&a).max(1.0), "z={z}");
        }
    }

    #[test]
    fn zero_coupling_has_no_self_energy() {
        let mut g = single_triple(0.2);
        g.v_prime = PauliSum::new(g.total_qubits());
        g.y = PauliSum::new(g.computational);
        g.triples.iter_mut().for_each(|t| t.scale = 0.0);
        let r = self_energy_exact(&g, 0.0).unwrap();
        assert!(spectral_norm(&r.sigma_minus) < 1e-12);
        let terms = self_energy_terms(&g, 0.0, 4).unwrap();
        assert!(terms.iter().all(|t| spectral_norm(t) < 1e-12));
    }

    #[test]
    fn deviation_is_order_delta() {
        let e0 = eigvalsh(cz_step_target(0.5).unwrap().to_dense().matrix())[0];
        let mut ratios = Vec::new();
        for delta in [0.2, 0.1, 0.05] {
            let g = single_triple(delta);
            let at_zero = self_energy_exact(&g, 0.0).unwrap().deviation;
            assert!(at_zero <= 10.0 * delta, "δ={delta}: {at_zero}");
            ratios.push(self_energy_certificate(&g, e0).unwrap() / delta);
        }
        let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
        assert!(hi / lo < 2.0, "{ratios:?}");
    }

    #[test]
    fn series_first_order_and_convergence() {
        let g = single_triple(0.1);
        let z = -1.0;
        let terms = self_energy_terms(&g, z, 4).unwrap();
        let (low, _) = g.partition();
        let n = g.total_qubits();
        let mut diag = g.y.embed(n);
        for t in &g.triples {
            for j in 0..3 {
                diag = diag.plus(&t.scaled_factor(j, g.computational).embed(n).scaled(t.scale.cbrt() / g.delta));
            }
        }
        let expect = submatrix(diag.to_dense().matrix(), &low, &low);
        assert!(max_abs_diff(&terms[0], &expect) < 1e-9);
        let exact = self_energy_exact(&g, z).unwrap().sigma_minus;
        let errs: Vec<f64> = (1..=4).map(|k| spectral_norm(&(self_energy_series(&g, z, k).unwrap() - &exact))).collect();
        assert!(errs[3] < errs[0], "{errs:?}");
        // Order 4 misses terms of size ‖V‖⁵/Δ⁴.
        let v = g.v_prime.to_dense().spectral_norm();
        assert!(errs[3] <= 10.0 * v.powi(5) / g.penalty_gap().powi(4), "{errs:?}");
    }

    #[test]
    fn third_order_term_structure() {
        for delta in [0.1, 0.05] {
            let g = single_triple(delta);
            let terms = self_energy_terms(&g, 0.0, 3).unwrap();
            let diff = spectral_norm(&(&terms[2] - third_order_structure(&g)));
            assert!(diff <= 5.0 * delta, "δ={delta}: {diff}");
        }
    }

    #[test]
    fn divergence_is_detected() {
        let g = single_triple(0.9);
        assert!(matches!(self_energy_terms(&g, 0.0, 2), Err(Error::Divergent { .. })));
    }

    #[test]
    fn lower_spectrum_and_ancilla_state() {
        let target = cz_step_target(0.5).unwrap().to_dense();
        let g = single_triple(0.05);
        let c = compare_lower_spectra(&target, &g, 2).unwrap();
        assert!(c.max_deviation <= 1.0 * 0.05, "{c:?}");
        assert!(c.ancilla_ghz_fidelity >= 0.99, "{c:?}");
        assert!(c.computational_fidelity >= 0.99, "{c:?}");
    }

    #[test]
    fn two_local_target_stays_close() {
        // A negligible 3-local term: the gadget should reproduce the 2-local rest.
        let base = PauliSum::from_labels(&[(-0.5, "ZII"), (-0.3, "IXI"), (0.2, "IZZ")]).unwrap();
        let tiny = PauliSum::from_labels(&[(1e-9, "XXX")]).unwrap();
        let g = gadgetize(&base.plus(&tiny), 0.1).unwrap();
        let c = compare_lower_spectra(&base.to_dense(), &g, 2).unwrap();
        assert!(c.max_deviation <= 0.1 * base.l1_norm(), "{c:?}");
    }

    #[test]
    fn nested_gadget_gaps() {
        let g0 = repeated_gadget_gap(0, 0.3).unwrap();
        assert_eq!(g0.len(), 1);
        let eig = eigvalsh(cz_step_target(0.5).unwrap().to_dense().matrix());
        assert!((g0[0] - (eig[1] - eig[0]) / (eig[7] - eig[0])).abs() < 1e-12);
        let delta = 0.3f64;
        let g = repeated_gadget_gap(2, delta).unwrap();
        for k in 1..3 {
            let ratio = g[k] / (g[k - 1] * delta.powi(3));
            assert!((0.3..3.0).contains(&ratio), "{g:?}");
        }
        assert!(repeated_gadget_gap(4, 0.3).is_err());
    }
}
