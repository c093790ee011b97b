//! Weighted Pauli strings, locality, and the positive-semidefinite triple
//! decomposition of 3-local terms.
//!
//! Letter strings list qubit 1 first: `ZI` is `Z` on qubit 1, identity on
//! qubit 2. The text form is one term per line, `coeff LETTERS`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{DenseOperator, Matrix, Tolerances, ONE, ZERO};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Whether the letter flips the computational bit it acts on.
    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// Phase picked up by `σ|b⟩ = phase·|b'⟩`.
    fn phase(self, bit: usize) -> C64 {
        match (self, bit) {
            (Pauli::I, _) | (Pauli::X, _) | (Pauli::Z, 0) => ONE,
            (Pauli::Z, _) => -ONE,
            (Pauli::Y, 0) => C64::new(0.0, 1.0),
            (Pauli::Y, _) => C64::new(0.0, -1.0),
        }
    }

    pub fn matrix(self) -> Matrix {
        let mut m = Matrix::zeros(2, 2);
        for b in 0..2 {
            let out = if self.flips() { b ^ 1 } else { b };
            m[(out, b)] = self.phase(b);
        }
        m
    }
}

/// A real multiple of a Pauli string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub letters: Vec<Pauli>,
}

impl PauliTerm {
    pub fn new(coefficient: f64, letters: &str) -> Result<Self> {
        let letters = parse_letters(letters, 0)?;
        if !coefficient.is_finite() {
            return Err(Error::NonFinite("Pauli coefficient"));
        }
        Ok(Self { coefficient, letters })
    }

    /// Identity everywhere except the listed `(qubit, letter)` pairs.
    pub fn on(qubits: usize, coefficient: f64, placed: &[(usize, Pauli)]) -> Result<Self> {
        let mut letters = vec![Pauli::I; qubits];
        for &(q, p) in placed {
            if q == 0 || q > qubits {
                return Err(Error::QubitOutOfRange { index: q, qubits });
            }
            if letters[q - 1] != Pauli::I {
                return Err(Error::DuplicateQubit(q));
            }
            letters[q - 1] = p;
        }
        Ok(Self { coefficient, letters })
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Qubits (1-based) carrying a non-identity letter.
    pub fn support(&self) -> Vec<usize> {
        self.letters.iter().enumerate().filter(|(_, &p)| p != Pauli::I).map(|(i, _)| i + 1).collect()
    }

    pub fn label(&self) -> String {
        self.letters.iter().map(|p| p.as_char()).collect()
    }

    fn flip_mask(&self) -> usize {
        self.letters.iter().enumerate().filter(|(_, p)| p.flips()).map(|(i, _)| 1 << i).sum()
    }

    fn phase_at(&self, index: usize) -> C64 {
        self.letters.iter().enumerate().fold(ONE, |acc, (i, p)| acc * p.phase((index >> i) & 1))
    }

    /// Adds `coefficient · P` into a dense matrix.
    fn accumulate(&self, m: &mut Matrix) {
        let flip = self.flip_mask();
        for col in 0..m.ncols() {
            m[(col ^ flip, col)] += self.phase_at(col) * self.coefficient;
        }
    }

    pub fn to_dense(&self) -> DenseOperator {
        let d = 1 << self.letters.len();
        let mut m = Matrix::zeros(d, d);
        self.accumulate(&mut m);
        DenseOperator::from_matrix_unchecked(m)
    }
}

fn parse_letters(s: &str, line: usize) -> Result<Vec<Pauli>> {
    s.chars()
        .map(|c| {
            Pauli::from_char(c).ok_or_else(|| Error::Parse { line, message: format!("unknown Pauli letter `{c}`") })
        })
        .collect()
}

/// A Hermitian operator written as a real combination of Pauli strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliSum {
    qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn new(qubits: usize) -> Self {
        Self { qubits, terms: Vec::new() }
    }

    pub fn from_terms(qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        let mut sum = Self::new(qubits);
        for t in terms {
            sum.push(t)?;
        }
        sum.normalize();
        Ok(sum)
    }

    /// Convenience constructor from `(coefficient, letters)` pairs.
    pub fn from_labels(pairs: &[(f64, &str)]) -> Result<Self> {
        let qubits = pairs.first().map_or(0, |(_, l)| l.chars().count());
        let terms = pairs.iter().map(|&(c, l)| PauliTerm::new(c, l)).collect::<Result<Vec<_>>>()?;
        Self::from_terms(qubits, terms)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, term: PauliTerm) -> Result<()> {
        if term.letters.len() != self.qubits {
            return Err(Error::DimensionMismatch { expected: self.qubits, found: term.letters.len() });
        }
        if !term.coefficient.is_finite() {
            return Err(Error::NonFinite("Pauli coefficient"));
        }
        self.terms.push(term);
        Ok(())
    }

    /// Adds `coefficient` times the Pauli letters placed on the given qubits.
    pub fn add_placed(&mut self, coefficient: f64, placed: &[(usize, Pauli)]) -> Result<()> {
        let t = PauliTerm::on(self.qubits, coefficient, placed)?;
        self.push(t)
    }

    /// Merges duplicate strings, drops exact zeros and sorts by label.
    pub fn normalize(&mut self) {
        let mut merged: BTreeMap<Vec<Pauli>, f64> = BTreeMap::new();
        for t in self.terms.drain(..) {
            *merged.entry(t.letters).or_insert(0.0) += t.coefficient;
        }
        self.terms = merged
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(letters, coefficient)| PauliTerm { coefficient, letters })
            .collect();
    }

    /// Drops terms with `|c| ≤ tol`.
    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|t| t.coefficient.abs() > tol);
    }

    pub fn coefficient(&self, letters: &str) -> f64 {
        self.terms.iter().filter(|t| t.label() == letters).map(|t| t.coefficient).sum()
    }

    /// Largest term weight (0 for the empty sum or pure identity).
    pub fn locality(&self) -> usize {
        self.terms.iter().map(PauliTerm::weight).max().unwrap_or(0)
    }

    /// Terms of exactly the given weight.
    pub fn weight_part(&self, weight: usize) -> PauliSum {
        self.filter(|t| t.weight() == weight)
    }

    pub fn filter(&self, keep: impl Fn(&PauliTerm) -> bool) -> PauliSum {
        PauliSum { qubits: self.qubits, terms: self.terms.iter().filter(|t| keep(t)).cloned().collect() }
    }

    pub fn plus(&self, other: &PauliSum) -> PauliSum {
        assert_eq!(self.qubits, other.qubits, "Pauli sums on different registers");
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out.normalize();
        out
    }

    pub fn scaled(&self, c: f64) -> PauliSum {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coefficient *= c;
        }
        out.normalize();
        out
    }

    /// Pads every string with identities up to `qubits`.
    pub fn embed(&self, qubits: usize) -> PauliSum {
        assert!(qubits >= self.qubits);
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut letters = t.letters.clone();
                letters.resize(qubits, Pauli::I);
                PauliTerm { coefficient: t.coefficient, letters }
            })
            .collect();
        PauliSum { qubits, terms }
    }

    /// Sum of `|c|`, an upper bound on the operator norm.
    pub fn l1_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }

    pub fn to_dense(&self) -> DenseOperator {
        let d = 1 << self.qubits;
        let mut m = Matrix::zeros(d, d);
        for t in &self.terms {
            t.accumulate(&mut m);
        }
        DenseOperator::from_matrix_unchecked(m)
    }

    /// Parses the line format `coeff LETTERS`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut qubits = None;
        let mut terms = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(coef), Some(letters), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse { line: line_no, message: "expected `coeff LETTERS`".into() });
            };
            let coefficient: f64 = coef
                .replace('\u{2212}', "-")
                .parse()
                .map_err(|_| Error::Parse { line: line_no, message: format!("bad coefficient `{coef}`") })?;
            let letters = parse_letters(letters, line_no)?;
            match qubits {
                None => qubits = Some(letters.len()),
                Some(n) if n != letters.len() => {
                    return Err(Error::Parse { line: line_no, message: format!("expected {n} letters") })
                }
                _ => {}
            }
            terms.push(PauliTerm { coefficient, letters });
        }
        Self::from_terms(qubits.unwrap_or(0), terms)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terms {
            writeln!(f, "{} {}", t.coefficient, t.label())?;
        }
        Ok(())
    }
}

impl FromStr for PauliSum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// Expands a Hermitian operator in the Pauli basis, `c_P = tr(P·M)/2ⁿ`.
/// Coefficients below `1e-13` are dropped.
pub fn pauli_decompose(op: &DenseOperator) -> Result<PauliSum> {
    op.require_hermitian(&Tolerances::default())?;
    let n = op.qubits();
    let d = op.dim();
    let m = op.matrix();
    let mut terms = Vec::new();
    for code in 0..(1usize << (2 * n)) {
        let letters: Vec<Pauli> = (0..n).map(|q| Pauli::ALL[(code >> (2 * q)) & 3]).collect();
        let term = PauliTerm { coefficient: 1.0, letters };
        let flip = term.flip_mask();
        let mut tr = ZERO;
        for c in 0..d {
            tr += term.phase_at(c) * m[(c, c ^ flip)];
        }
        let coefficient = tr.re / d as f64;
        if coefficient.abs() > 1e-13 {
            terms.push(PauliTerm { coefficient, ..term });
        }
    }
    PauliSum::from_terms(n, terms)
}

/// Three commuting positive-semidefinite single-qubit factors
/// `B_j = (1 + s_j σ_j)/2` on distinct qubits, weighted by `scale`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GadgetTriple {
    pub qubits: [usize; 3],
    pub letters: [Pauli; 3],
    pub signs: [f64; 3],
    pub scale: f64,
}

impl GadgetTriple {
    /// `B_j` as a Pauli sum on an `n`-qubit register.
    pub fn factor(&self, j: usize, n: usize) -> PauliSum {
        let mut s = PauliSum::new(n);
        s.push(PauliTerm { coefficient: 0.5, letters: vec![Pauli::I; n] }).expect("sized");
        s.add_placed(0.5 * self.signs[j], &[(self.qubits[j], self.letters[j])]).expect("valid triple");
        s.normalize();
        s
    }

    /// `scale^{1/3} · B_j`, the factor that carries the weight symmetrically.
    pub fn scaled_factor(&self, j: usize, n: usize) -> PauliSum {
        self.factor(j, n).scaled(self.scale.cbrt())
    }

    /// `scale · B₁B₂B₃`.
    pub fn product(&self, n: usize) -> PauliSum {
        let mut s = PauliSum::new(n);
        for mask in 0..8usize {
            let mut placed = Vec::new();
            let mut c = self.scale / 8.0;
            for j in 0..3 {
                if mask >> j & 1 == 1 {
                    placed.push((self.qubits[j], self.letters[j]));
                    c *= self.signs[j];
                }
            }
            s.add_placed(c, &placed).expect("valid triple");
        }
        s.normalize();
        s
    }
}

/// Splits a 3-local operator into `Y − 6 Σ_m scale_m B_{m1}B_{m2}B_{m3}` with
/// `Y` at most 2-local, one triple per 3-local Pauli string.
///
/// A term `c·σσσ` with `c < 0` uses `B_j = (1+σ_j)/2` on all three qubits;
/// with `c > 0` the first qubit's factor is flipped to `(1−σ)/2`. In both cases
/// `scale = 4|c|/3`, and the lower-weight products are absorbed into `Y`.
pub fn psd_triple_decompose(v3: &PauliSum) -> Result<(PauliSum, Vec<GadgetTriple>)> {
    let found = v3.locality();
    if found != 3 {
        return Err(Error::Locality { expected: 3, found });
    }
    let n = v3.qubits();
    let mut y = v3.filter(|t| t.weight() < 3);
    let mut triples = Vec::new();
    for t in v3.terms().iter().filter(|t| t.weight() == 3) {
        let support = t.support();
        let qubits = [support[0], support[1], support[2]];
        let letters = qubits.map(|q| t.letters[q - 1]);
        let first = if t.coefficient > 0.0 { -1.0 } else { 1.0 };
        let triple = GadgetTriple { qubits, letters, signs: [first, 1.0, 1.0], scale: 4.0 * t.coefficient.abs() / 3.0 };
        // Y = v3 + 6·scale·B₁B₂B₃ − (the 3-local part, already represented by −6·scale·B₁B₂B₃).
        let lower = triple.product(n).filter(|p| p.weight() < 3).scaled(6.0);
        y = y.plus(&lower);
        triples.push(triple);
    }
    y.prune(1e-15);
    Ok((y, triples))
}

/// `Y − 6 Σ scale·B₁B₂B₃` as a Pauli sum.
pub fn recombine(y: &PauliSum, triples: &[GadgetTriple]) -> PauliSum {
    triples.iter().fold(y.clone(), |acc, t| acc.plus(&t.product(y.qubits()).scaled(-6.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{eig_hermitian, kron_lift, max_abs_diff, unitary_exp, random};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zz_decomposes_to_one_term() {
        let zz = PauliSum::from_labels(&[(1.0, "ZZ")]).unwrap().to_dense();
        let s = pauli_decompose(&zz).unwrap();
        assert_eq!(s.terms().len(), 1);
        assert!((s.coefficient("ZZ") - 1.0).abs() < 1e-15);
    }

    #[test]
    fn letters_follow_qubit_order() {
        let zi = PauliSum::from_labels(&[(1.0, "ZI")]).unwrap().to_dense();
        let z = DenseOperator::diagonal(&[1.0, -1.0]).unwrap();
        assert!(zi.max_abs_diff(&kron_lift(&z, &[1], 2).unwrap()) == 0.0);
        let y = PauliSum::from_labels(&[(1.0, "Y")]).unwrap().to_dense();
        assert_eq!(y.matrix()[(0, 1)], C64::new(0.0, -1.0));
        assert_eq!(y.matrix()[(1, 0)], C64::new(0.0, 1.0));
    }

    fn cnot_21() -> DenseOperator {
        // Control qubit 2, target qubit 1.
        let std = DenseOperator::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        kron_lift(&std, &[1, 2], 2).unwrap()
    }

    #[test]
    fn conjugated_term_at_half() {
        // Conjugating ZZ − ZI + IZ by exp(isK), K = −i log CNOT, and subtracting
        // the start value gives the interpolating difference V(½).
        let h0 = PauliSum::from_labels(&[(1.0, "ZZ"), (-1.0, "ZI"), (1.0, "IZ")]).unwrap().to_dense();
        let k = crate::operator::principal_log(&cnot_21()).unwrap();
        let u = unitary_exp(&k, 0.5).unwrap();
        let v = h0.conjugate_by(&u).sub(&h0);
        let s = pauli_decompose(&v).unwrap();
        for (label, c) in [("YI", 1.0), ("ZI", 1.0), ("YZ", -1.0), ("ZZ", -1.0)] {
            assert!((s.coefficient(label) - c).abs() < 1e-12, "{label}: {}", s.coefficient(label));
        }
        assert_eq!(s.terms().len(), 4);
        assert_eq!(s.locality(), 2);
    }

    #[test]
    fn locality_examples() {
        assert_eq!(PauliSum::from_labels(&[(1.0, "ZZ"), (-1.0, "ZI"), (1.0, "IZ")]).unwrap().locality(), 2);
        // X on qubit 3 paired with Z on qubit 2, conjugated by CZ on qubits 1,2.
        let h = PauliSum::from_labels(&[(1.0, "IXX")]).unwrap().to_dense();
        let cz = kron_lift(&DenseOperator::diagonal(&[1.0, 1.0, 1.0, -1.0]).unwrap(), &[1, 2], 3).unwrap();
        let s = pauli_decompose(&h.conjugate_by(&cz)).unwrap();
        assert_eq!(s.locality(), 3);
        assert!((s.coefficient("ZXX") - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_two_qubit_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random::hermitian(4, &mut rng);
        let op = DenseOperator::hermitian(m).unwrap();
        let s = pauli_decompose(&op).unwrap();
        assert!(s.to_dense().max_abs_diff(&op) < 1e-10);
    }

    #[test]
    fn text_round_trip() {
        let s = PauliSum::parse("# comment\n\u{2212}1.0 ZZI\n0.5 XIY # trailing\n").unwrap();
        assert_eq!(s.qubits(), 3);
        assert_eq!(PauliSum::parse(&s.to_string()).unwrap(), s);
        assert!(PauliSum::parse("1.0 ZQ").is_err());
        assert!(matches!(PauliSum::parse("1 ZZ\n1 Z"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn xxx_triple() {
        let v3 = PauliSum::from_labels(&[(-8.0, "XXX")]).unwrap();
        let (y, triples) = psd_triple_decompose(&v3).unwrap();
        assert_eq!(triples.len(), 1);
        assert_eq!(triples[0].signs, [1.0, 1.0, 1.0]);
        assert!(y.locality() <= 2);
        // Independent dense oracle: (1+X)⊗3/8 lifted by Kronecker products.
        let b = crate::operator::Matrix::from_fn(2, 2, |_, _| C64::new(0.5, 0.0));
        let bbb = b.kronecker(&b).kronecker(&b);
        let recon = y.to_dense().matrix() - bbb.scale(6.0 * triples[0].scale);
        assert!(max_abs_diff(&recon, v3.to_dense().matrix()) < 1e-12);
    }

    #[test]
    fn rejects_non_three_local() {
        let v = PauliSum::from_labels(&[(1.0, "ZZI")]).unwrap();
        assert!(matches!(psd_triple_decompose(&v), Err(Error::Locality { expected: 3, found: 2 })));
    }

    #[test]
    fn cz_step_three_local_part() {
        // h = XX on qubits 2,3 straddles a CZ on qubits 1,2.
        let h = PauliSum::from_labels(&[(1.0, "IXX")]).unwrap().to_dense();
        let cz = kron_lift(&DenseOperator::diagonal(&[1.0, 1.0, 1.0, -1.0]).unwrap(), &[1, 2], 3).unwrap();
        let k = crate::operator::principal_log(&cz).unwrap();
        let u = unitary_exp(&k, 1.0).unwrap();
        let v = pauli_decompose(&h.conjugate_by(&u).sub(&h)).unwrap();
        let v3 = v.weight_part(3);
        let (y, triples) = psd_triple_decompose(&v3).unwrap();
        assert!(recombine(&y, &triples).to_dense().max_abs_diff(&v3.to_dense()) < 1e-9);
    }

    fn random_three_local(n: usize) -> impl Strategy<Value = PauliSum> {
        let term = (proptest::collection::vec(0usize..4, n), -2.0f64..2.0);
        proptest::collection::vec(term, 1..6).prop_filter_map("needs a 3-local term", move |raw| {
            let terms: Vec<PauliTerm> = raw
                .into_iter()
                .map(|(codes, c)| {
                    let mut letters: Vec<Pauli> = codes.iter().map(|&k| Pauli::ALL[k]).collect();
                    // Cap the weight at 3 by clearing letters past the third.
                    let mut seen = 0;
                    for l in letters.iter_mut() {
                        if *l != Pauli::I {
                            seen += 1;
                            if seen > 3 {
                                *l = Pauli::I;
                            }
                        }
                    }
                    PauliTerm { coefficient: c, letters }
                })
                .collect();
            let s = PauliSum::from_terms(n, terms).ok()?;
            (s.locality() == 3).then_some(s)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn triple_reconstruction((n, v3) in (3usize..5).prop_flat_map(|n| (Just(n), random_three_local(n)))) {
            let (y, triples) = psd_triple_decompose(&v3).unwrap();
            prop_assert!(y.locality() <= 2);
            for t in &triples {
                prop_assert!(t.scale >= 0.0);
                let mut q = t.qubits.to_vec();
                q.dedup();
                prop_assert_eq!(q.len(), 3);
                for j in 0..3 {
                    let e = eig_hermitian(&t.factor(j, n).to_dense()).unwrap();
                    prop_assert!(e.eigenvalues[0] >= -1e-10);
                }
            }
            let diff = recombine(&y, &triples).to_dense().max_abs_diff(&v3.to_dense());
            prop_assert!(diff < 1e-9);
        }

        #[test]
        fn decompose_round_trip(coeffs in proptest::collection::vec(-3.0f64..3.0, 16)) {
            let labels: Vec<String> = (0..16).map(|k| {
                [Pauli::ALL[k & 3].as_char(), Pauli::ALL[k >> 2].as_char()].iter().collect()
            }).collect();
            let pairs: Vec<(f64, &str)> = coeffs.iter().zip(&labels).map(|(&c, l)| (c, l.as_str())).collect();
            let s = PauliSum::from_labels(&pairs).unwrap();
            let back = pauli_decompose(&s.to_dense()).unwrap();
            for t in s.terms() {
                prop_assert!((back.coefficient(&t.label()) - t.coefficient).abs() < 1e-10);
            }
        }
    }
}
