//! Gates, circuits, the circuit text format, and a state-vector simulator.
//!
//! Text format, one gate per line:
//!
//! ```text
//! qubits 3          # optional register size
//! H 1
//! CNOT 1 2          # control, target
//! RZ 3 0.25         # angle in radians; `pi`, `-pi/4` and `2*pi` also parse
//! U 1 2             # custom gate: 4 rows of 8 numbers (re im pairs)
//! 1 0  0 0  0 0  0 0
//! ...
//! ```
//!
//! Custom matrices use the textbook ordering in which the first listed qubit
//! is the most significant bit, so `U 1 2` with the usual CNOT matrix is the
//! same gate as `CNOT 1 2`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::operator::{kron_lift, local_index, spread_index, DenseOperator, Matrix, QuantumState, Vector, ONE, ZERO};
use crate::C64;

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Y(usize),
    Z(usize),
    S(usize),
    T(usize),
    Rx(usize, f64),
    Ry(usize, f64),
    Rz(usize, f64),
    Cnot { control: usize, target: usize },
    Cz(usize, usize),
    /// Textbook-ordered unitary on one or two qubits.
    Custom { targets: Vec<usize>, matrix: DenseOperator },
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn mat2(a: C64, b: C64, cc: C64, d: C64) -> Matrix {
    Matrix::from_row_slice(2, 2, &[a, b, cc, d])
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::X(_) => "X",
            Gate::Y(_) => "Y",
            Gate::Z(_) => "Z",
            Gate::S(_) => "S",
            Gate::T(_) => "T",
            Gate::Rx(..) => "RX",
            Gate::Ry(..) => "RY",
            Gate::Rz(..) => "RZ",
            Gate::Cnot { .. } => "CNOT",
            Gate::Cz(..) => "CZ",
            Gate::Custom { .. } => "U",
        }
    }

    /// Qubits acted on; bit `j` of [`Gate::local_matrix`] is `targets()[j]`.
    pub fn targets(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) | Gate::S(q) | Gate::T(q) => vec![*q],
            Gate::Rx(q, _) | Gate::Ry(q, _) | Gate::Rz(q, _) => vec![*q],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Cz(a, b) => vec![*a, *b],
            Gate::Custom { targets, .. } => targets.iter().rev().copied().collect(),
        }
    }

    /// The gate's matrix in its own little-endian frame (see [`Gate::targets`]).
    pub fn local_matrix(&self) -> Matrix {
        match self {
            Gate::H(_) => {
                let h = c(FRAC_1_SQRT_2, 0.0);
                mat2(h, h, h, -h)
            }
            Gate::X(_) => mat2(ZERO, ONE, ONE, ZERO),
            Gate::Y(_) => mat2(ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO),
            Gate::Z(_) => mat2(ONE, ZERO, ZERO, -ONE),
            Gate::S(_) => mat2(ONE, ZERO, ZERO, c(0.0, 1.0)),
            Gate::T(_) => mat2(ONE, ZERO, ZERO, C64::from_polar(1.0, PI / 4.0)),
            Gate::Rx(_, t) => {
                let (s, co) = (t / 2.0).sin_cos();
                mat2(c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0))
            }
            Gate::Ry(_, t) => {
                let (s, co) = (t / 2.0).sin_cos();
                mat2(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0))
            }
            Gate::Rz(_, t) => mat2(C64::from_polar(1.0, -t / 2.0), ZERO, ZERO, C64::from_polar(1.0, t / 2.0)),
            Gate::Cnot { .. } => {
                // Local bit 0 is the control, bit 1 the target.
                let mut m = Matrix::identity(4, 4);
                for (a, b) in [(1, 3), (3, 1)] {
                    m[(a, a)] = ZERO;
                    m[(b, a)] = ONE;
                }
                m
            }
            Gate::Cz(..) => {
                let mut m = Matrix::identity(4, 4);
                m[(3, 3)] = -ONE;
                m
            }
            Gate::Custom { matrix, .. } => matrix.matrix().clone(),
        }
    }

    pub fn lifted(&self, n: usize) -> Result<DenseOperator> {
        kron_lift(&DenseOperator::from_matrix_unchecked(self.local_matrix()), &self.targets(), n)
    }

    fn validate(&self, n: usize) -> Result<()> {
        let t = self.targets();
        for (i, &q) in t.iter().enumerate() {
            if q == 0 || q > n {
                return Err(Error::QubitOutOfRange { index: q, qubits: n });
            }
            if t[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        if let Gate::Custom { matrix, targets } = self {
            if matrix.qubits() != targets.len() || !(1..=2).contains(&targets.len()) {
                return Err(Error::DimensionMismatch { expected: 1 << targets.len(), found: matrix.dim() });
            }
            matrix.require_unitary(&Default::default())?;
        }
        Ok(())
    }

    /// Builds a custom gate from a textbook-ordered unitary.
    pub fn custom(targets: &[usize], matrix: Matrix) -> Result<Self> {
        Ok(Gate::Custom { targets: targets.to_vec(), matrix: DenseOperator::unitary(matrix)? })
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Rx(q, t) | Gate::Ry(q, t) | Gate::Rz(q, t) => write!(f, "{} {q} {t:?}", self.name()),
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
            Gate::Cz(a, b) => write!(f, "CZ {a} {b}"),
            Gate::Custom { targets, matrix } => {
                write!(f, "U")?;
                for q in targets {
                    write!(f, " {q}")?;
                }
                for r in 0..matrix.dim() {
                    writeln!(f)?;
                    let row: Vec<String> =
                        (0..matrix.dim()).map(|k| format!("{:?} {:?}", matrix.matrix()[(r, k)].re, matrix.matrix()[(r, k)].im)).collect();
                    write!(f, "{}", row.join("  "))?;
                }
                Ok(())
            }
            other => write!(f, "{} {}", other.name(), other.targets()[0]),
        }
    }
}

/// An ordered gate list `U_1, …, U_L` on `qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            g.validate(qubits)?;
        }
        Ok(Self { qubits, gates })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn depth(&self) -> usize {
        self.gates.len()
    }

    /// `U_L ⋯ U_1` as a dense matrix.
    pub fn unitary(&self) -> Result<DenseOperator> {
        let mut u = DenseOperator::identity(self.qubits);
        for g in &self.gates {
            u = g.lifted(self.qubits)?.mul(&u);
        }
        Ok(u)
    }

    /// The reversed circuit `U_1† ⋯ U_L†`.
    pub fn inverse(&self) -> Result<Circuit> {
        let gates = self
            .gates
            .iter()
            .rev()
            .map(|g| {
                // Listing the targets in reverse makes the local frame the textbook one.
                let t = g.targets();
                Gate::custom(&t.iter().rev().copied().collect::<Vec<_>>(), g.local_matrix().adjoint())
            })
            .collect::<Result<Vec<_>>>()?;
        Circuit::new(self.qubits, gates)
    }

    /// Hadamard on qubit 1 followed by a CNOT chain, preparing GHZ from `|0…0⟩`.
    pub fn ghz(n: usize) -> Result<Circuit> {
        let mut gates = vec![Gate::H(1)];
        for q in 1..n {
            gates.push(Gate::Cnot { control: q, target: q + 1 });
        }
        Circuit::new(n, gates)
    }

    /// Random circuit over the built-in gate set.
    pub fn random<R: Rng + ?Sized>(n: usize, len: usize, rng: &mut R) -> Result<Circuit> {
        let mut gates = Vec::with_capacity(len);
        for _ in 0..len {
            let q = rng.gen_range(1..=n);
            let kind = if n >= 2 { rng.gen_range(0..11) } else { rng.gen_range(0..9) };
            let theta = rng.gen_range(-PI..PI);
            let other = || rng_pick_other(q, n, theta);
            gates.push(match kind {
                0 => Gate::H(q),
                1 => Gate::X(q),
                2 => Gate::Y(q),
                3 => Gate::Z(q),
                4 => Gate::S(q),
                5 => Gate::T(q),
                6 => Gate::Rx(q, theta),
                7 => Gate::Ry(q, theta),
                8 => Gate::Rz(q, theta),
                9 => Gate::Cnot { control: q, target: other() },
                _ => Gate::Cz(q, other()),
            });
        }
        Circuit::new(n, gates)
    }
}

fn rng_pick_other(q: usize, n: usize, theta: f64) -> usize {
    // Derive the partner qubit from the already-drawn angle so the stream of
    // random draws does not depend on the gate kind.
    let span = n - 1;
    let k = (((theta + PI) / (2.0 * PI)) * span as f64).floor() as usize % span;
    let others: Vec<usize> = (1..=n).filter(|&p| p != q).collect();
    others[k]
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.qubits)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

fn parse_angle(tok: &str, line: usize) -> Result<f64> {
    let t = tok.replace('\u{2212}', "-").to_ascii_lowercase();
    let bad = || Error::Parse { line, message: format!("bad angle `{tok}`") };
    if let Ok(v) = t.parse::<f64>() {
        return if v.is_finite() { Ok(v) } else { Err(bad()) };
    }
    let (sign, rest) = match t.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, t.as_str()),
    };
    let (num, den) = match rest.split_once('/') {
        Some((a, b)) => (a, b.parse::<f64>().map_err(|_| bad())?),
        None => (rest, 1.0),
    };
    let factor = match num {
        "pi" => 1.0,
        other => other.strip_suffix("*pi").ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(sign * factor * PI / den)
}

fn parse_qubit(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>()
        .ok()
        .filter(|&q| q >= 1)
        .ok_or_else(|| Error::Parse { line, message: format!("bad qubit index `{tok}`") })
}

/// Parses the circuit text format. Without a `qubits` directive the register
/// size is the largest index used.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let lines: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, toks)| !toks.is_empty())
        .collect();
    let mut declared = None;
    let mut gates: Vec<(usize, Gate)> = Vec::new();
    let mut it = lines.into_iter();
    while let Some((line, toks)) = it.next() {
        let name = toks[0].to_ascii_uppercase();
        let args = &toks[1..];
        let arity = |want: usize| -> Result<()> {
            if args.len() == want {
                Ok(())
            } else {
                Err(Error::Parse { line, message: format!("{name} takes {want} argument(s), got {}", args.len()) })
            }
        };
        let gate = match name.as_str() {
            "QUBITS" => {
                arity(1)?;
                if declared.is_some() || !gates.is_empty() {
                    return Err(Error::Parse { line, message: "`qubits` must come first".into() });
                }
                declared = Some(parse_qubit(args[0], line)?);
                continue;
            }
            "H" | "X" | "Y" | "Z" | "S" | "T" => {
                arity(1)?;
                let q = parse_qubit(args[0], line)?;
                match name.as_str() {
                    "H" => Gate::H(q),
                    "X" => Gate::X(q),
                    "Y" => Gate::Y(q),
                    "Z" => Gate::Z(q),
                    "S" => Gate::S(q),
                    _ => Gate::T(q),
                }
            }
            "RX" | "RY" | "RZ" => {
                arity(2)?;
                let q = parse_qubit(args[0], line)?;
                let t = parse_angle(args[1], line)?;
                match name.as_str() {
                    "RX" => Gate::Rx(q, t),
                    "RY" => Gate::Ry(q, t),
                    _ => Gate::Rz(q, t),
                }
            }
            "CNOT" | "CX" => {
                arity(2)?;
                Gate::Cnot { control: parse_qubit(args[0], line)?, target: parse_qubit(args[1], line)? }
            }
            "CZ" => {
                arity(2)?;
                Gate::Cz(parse_qubit(args[0], line)?, parse_qubit(args[1], line)?)
            }
            "U" => {
                if !(1..=2).contains(&args.len()) {
                    return Err(Error::Parse { line, message: "U takes 1 or 2 qubits".into() });
                }
                let targets = args.iter().map(|a| parse_qubit(a, line)).collect::<Result<Vec<_>>>()?;
                let d = 1 << targets.len();
                let mut m = Matrix::zeros(d, d);
                for r in 0..d {
                    let (row_line, row) = it
                        .next()
                        .ok_or_else(|| Error::Parse { line, message: format!("U needs {d} matrix rows") })?;
                    if row.len() != 2 * d {
                        return Err(Error::Parse { line: row_line, message: format!("expected {} numbers", 2 * d) });
                    }
                    for k in 0..d {
                        let num = |s: &str| {
                            s.replace('\u{2212}', "-")
                                .parse::<f64>()
                                .map_err(|_| Error::Parse { line: row_line, message: format!("bad number `{s}`") })
                        };
                        m[(r, k)] = c(num(row[2 * k])?, num(row[2 * k + 1])?);
                    }
                }
                Gate::custom(&targets, m).map_err(|e| Error::Parse { line, message: e.to_string() })?
            }
            other => return Err(Error::Parse { line, message: format!("unknown gate `{other}`") }),
        };
        gates.push((line, gate));
    }
    let used = gates.iter().flat_map(|(_, g)| g.targets()).max().unwrap_or(0);
    let n = declared.unwrap_or(used.max(1));
    for (line, g) in &gates {
        g.validate(n).map_err(|e| Error::Parse { line: *line, message: e.to_string() })?;
    }
    Circuit::new(n, gates.into_iter().map(|(_, g)| g).collect())
}

/// Applies one gate to amplitudes in place.
pub(crate) fn apply_gate(amps: &mut Vector, gate: &Gate) {
    let targets = gate.targets();
    let local = gate.local_matrix();
    let k = targets.len();
    let dl = 1 << k;
    let mask: usize = targets.iter().map(|&t| 1 << (t - 1)).sum();
    let mut buf = vec![ZERO; dl];
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        for (l, b) in buf.iter_mut().enumerate() {
            *b = amps[base | spread_index(l, &targets)];
        }
        for r in 0..dl {
            let mut acc = ZERO;
            for (l, b) in buf.iter().enumerate() {
                acc += local[(r, l)] * b;
            }
            amps[base | spread_index(r, &targets)] = acc;
        }
    }
    debug_assert_eq!(local_index(mask, &targets), dl - 1);
}

/// `U_L ⋯ U_1 |ψ⟩` by direct state-vector simulation.
pub fn apply_circuit(circuit: &Circuit, psi: &QuantumState) -> Result<QuantumState> {
    if psi.qubits() != circuit.qubits() {
        return Err(Error::DimensionMismatch { expected: 1 << circuit.qubits(), found: psi.dim() });
    }
    let mut amps = psi.amplitudes().clone();
    for g in circuit.gates() {
        apply_gate(&mut amps, g);
    }
    Ok(QuantumState::from_vector_unchecked(amps))
}
