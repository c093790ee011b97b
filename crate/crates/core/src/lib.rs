//! Circuit-to-adiabatic compilation and certification.
//!
//! A quantum circuit `U_L … U_1` is turned into a piecewise time-dependent
//! Hamiltonian by conjugating an initial Hamiltonian with the interpolants
//! `exp(isK_i)`, `K_i = −i log U_i`. Around that core the crate provides the
//! tools used to analyse such schedules:
//!
//! * [`operator`]: dense complex linear algebra (Hermitian eigensystems,
//!   unitary exponential and principal logarithm, qubit lifts, partial traces).
//! * [`pauli`]: Pauli-string sums, locality, and the positive-semidefinite
//!   triple decomposition used by the three-qubit gadget.
//! * [`circuit`]: gates, circuit text format and a reference state-vector
//!   simulator.
//! * [`direct_map`]: the gate-by-gate conjugated schedule and its gap profile.
//! * [`evolution`]: Schrödinger integration and adiabatic error estimates.
//! * [`locality`]: ground-state entanglement constraints on k-local Hamiltonians.
//! * [`gadget`]: 3→2-local perturbative gadgets and self-energy certificates.
//! * [`holonomy`]: geometric phases, phase cancellation and the holonomic CNOT.
//! * [`history`]: history-state Hamiltonians and holonomic clock cycles.
//! * [`harness`]: seeded experiment suites with JSON reports.
//!
//! # Qubit ordering
//!
//! Qubits are numbered from 1. Basis indices are little-endian: qubit 1 is the
//! least-significant bit, so the ket `|10⟩` (qubit 2 = 1, qubit 1 = 0) has
//! index 2. Pauli strings are written with qubit 1 first, so `ZI` is a `Z` on
//! qubit 1. With these two rules `ZZ − ZI + IZ` has ground state `|10⟩`.

pub mod circuit;
pub mod direct_map;
pub mod error;
pub mod evolution;
pub mod gadget;
pub mod harness;
pub mod history;
pub mod holonomy;
pub mod locality;
pub mod operator;
pub mod pauli;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
