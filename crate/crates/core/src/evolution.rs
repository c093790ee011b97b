//! Schrödinger integration over schedules and adiabatic error estimates.
//!
//! The integrator is the piecewise-constant midpoint exponential: each step
//! applies `exp(−i H(t_k + dt/2) dt)` exactly. It is second order in `dt` and
//! unitary to rounding error regardless of step size.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::direct_map::Schedule;
use crate::error::{Error, Result};
use crate::operator::{propagator, DenseOperator, Matrix, QuantumState, Tolerances, Vector};

/// Minimum number of steps accepted by [`evolve`].
pub const MIN_STEPS: usize = 100;

/// Number of evenly spaced points recorded in a fidelity trace.
const TRACE_POINTS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    pub t: f64,
    pub s: f64,
    pub gap: f64,
    pub fidelity: f64,
}

#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub final_state: QuantumState,
    pub trace: Vec<TracePoint>,
    pub total_time: f64,
    pub steps: usize,
    /// Largest `| ‖ψ(t)‖ − 1 |` seen at the recorded points.
    pub max_norm_drift: f64,
}

impl EvolutionResult {
    /// `|⟨ground(T)|ψ(T)⟩|²`.
    pub fn final_fidelity(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |p| p.fidelity)
    }

    /// Writes the trace as CSV with columns `t,s,gap,fidelity`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for p in &self.trace {
            w.serialize(p).map_err(|e| Error::Io(std::io::Error::other(e)))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_inputs(psi0: &QuantumState, dim: usize, total_time: f64, steps: usize) -> Result<()> {
    if psi0.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: psi0.dim() });
    }
    let drift = (psi0.norm() - 1.0).abs();
    if drift > Tolerances::default().normalization {
        return Err(Error::NotNormalized(psi0.norm()));
    }
    if !(total_time > 0.0 && total_time.is_finite()) {
        return Err(Error::OutOfRange(format!("total time {total_time} must be positive")));
    }
    if steps < MIN_STEPS {
        return Err(Error::OutOfRange(format!("{steps} steps, need at least {MIN_STEPS}")));
    }
    Ok(())
}

/// Evolves `psi0` under the schedule for total time `T` in `steps` midpoint steps.
pub fn evolve(schedule: &Schedule, psi0: &QuantumState, total_time: f64, steps: usize) -> Result<EvolutionResult> {
    check_inputs(psi0, 1 << schedule.qubits(), total_time, steps)?;
    let dt = total_time / steps as f64;
    let every = (steps / TRACE_POINTS).max(1);
    let mut psi = psi0.amplitudes().clone();
    let mut trace = Vec::with_capacity(TRACE_POINTS + 2);
    let mut drift = 0.0f64;
    let mut record = |k: usize, psi: &Vector, trace: &mut Vec<TracePoint>| {
        let s = k as f64 / steps as f64;
        let energies = schedule.level_energies(s);
        let mut sorted = energies.clone();
        sorted.sort_by(f64::total_cmp);
        let gap = sorted.get(1).map_or(0.0, |e1| e1 - sorted[0]);
        let ground = schedule.ground_state(s);
        let fidelity = ground.amplitudes().dotc(psi).norm_sqr().min(1.0);
        drift = drift.max((psi.norm() - 1.0).abs());
        trace.push(TracePoint { t: s * total_time, s, gap, fidelity });
    };
    record(0, &psi, &mut trace);
    for k in 0..steps {
        let s_mid = (k as f64 + 0.5) / steps as f64;
        psi = schedule.propagator(s_mid, dt) * psi;
        if (k + 1) % every == 0 || k + 1 == steps {
            record(k + 1, &psi, &mut trace);
        }
    }
    Ok(EvolutionResult {
        final_state: QuantumState::from_vector_unchecked(psi),
        trace,
        total_time,
        steps,
        max_norm_drift: drift,
    })
}

/// Runs [`evolve`] at `steps` and `2·steps` and fails if the final states
/// differ by more than `tolerance` in 2-norm.
pub fn evolve_checked(
    schedule: &Schedule,
    psi0: &QuantumState,
    total_time: f64,
    steps: usize,
    tolerance: f64,
) -> Result<EvolutionResult> {
    let (coarse, fine) = rayon::join(
        || evolve(schedule, psi0, total_time, steps),
        || evolve(schedule, psi0, total_time, 2 * steps),
    );
    let (coarse, fine) = (coarse?, fine?);
    let change = (coarse.final_state.amplitudes() - fine.final_state.amplitudes()).norm();
    if change > tolerance {
        return Err(Error::StepDoubling { change, tolerance });
    }
    Ok(fine)
}

/// Midpoint-exponential integration of a general `H(t)`, `t ∈ [0, T]`.
pub fn evolve_with<F>(hamiltonian: F, psi0: &QuantumState, total_time: f64, steps: usize) -> Result<QuantumState>
where
    F: Fn(f64) -> Matrix,
{
    check_inputs(psi0, psi0.dim(), total_time, steps)?;
    let dt = total_time / steps as f64;
    let mut psi = psi0.amplitudes().clone();
    for k in 0..steps {
        let h = hamiltonian((k as f64 + 0.5) * dt);
        psi = propagator(&h, dt) * psi;
    }
    Ok(QuantumState::from_vector_unchecked(psi))
}

/// Full propagator `U(T)` of a general `H(t)` by midpoint steps.
pub fn propagate_with<F>(hamiltonian: F, dim: usize, total_time: f64, steps: usize) -> Matrix
where
    F: Fn(f64) -> Matrix,
{
    let dt = total_time / steps as f64;
    let mut u = Matrix::identity(dim, dim);
    for k in 0..steps {
        let h = hamiltonian((k as f64 + 0.5) * dt);
        u = propagator(&h, dt) * u;
    }
    u
}

/// Final infidelity `1 − |⟨ground(1)|ψ(T)⟩|²` averaged over several total
/// times, which washes out the oscillating part of the non-adiabatic error.
pub fn mean_final_infidelity(
    schedule: &Schedule,
    psi0: &QuantumState,
    times: &[f64],
    steps_per_unit_time: f64,
) -> Result<f64> {
    let values = times
        .par_iter()
        .map(|&t| {
            let steps = ((t * steps_per_unit_time).ceil() as usize).max(MIN_STEPS);
            evolve(schedule, psi0, t, steps).map(|r| 1.0 - r.final_fidelity())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Coupling of the ground state to one excited level through `K_i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LevelAmplitude {
    /// `E_m − E_0`.
    pub gap: f64,
    /// `‖P_m K_i |0⟩‖`, the basis-independent form of `|⟨m|K_i|0⟩|`.
    pub amplitude: f64,
    pub multiplicity: usize,
}

/// Adiabatic error figures for one segment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorEstimate {
    pub segment: usize,
    pub per_level_amplitudes: Vec<LevelAmplitude>,
    /// `α·T` bound: the spectral norm of `K_i`.
    pub alpha_bound_t: f64,
    pub min_gap: f64,
}

impl ErrorEstimate {
    /// Bound on `α` for a segment traversed in time `t`.
    pub fn alpha_bound(&self, t: f64) -> f64 {
        self.alpha_bound_t / t
    }

    /// `|α / (E_m − E_0)|²` at the smallest gap, for segment time `t`.
    pub fn transition_bound(&self, t: f64) -> f64 {
        (self.alpha_bound(t) / self.min_gap).powi(2)
    }

    /// Largest `|⟨m|K|0⟩| / (E_m − E_0)`, squared, for segment time `t`.
    pub fn leading_transition(&self, t: f64) -> f64 {
        self.per_level_amplitudes
            .iter()
            .map(|l| (l.amplitude / (t * l.gap)).powi(2))
            .fold(0.0, f64::max)
    }
}

/// Error estimate for segment `i`, evaluated in the `s = 0` eigenframe.
pub fn adiabatic_error(schedule: &Schedule, segment: usize) -> Result<ErrorEstimate> {
    let seg = schedule
        .segments()
        .get(segment)
        .ok_or_else(|| Error::OutOfRange(format!("segment {segment} of {}", schedule.segments().len())))?;
    let spec = crate::operator::eig_hermitian_with(&seg.base, &Tolerances { hermitian: 1e-9, ..Default::default() })?;
    if spec.ground_degeneracy() > 1 {
        return Err(Error::DegenerateGround(spec.level_gap()));
    }
    let k0 = seg.generator.matrix() * spec.eigenvectors.column(0);
    let mut per_level = Vec::new();
    let mut idx = 1;
    for (energy, mult) in spec.levels().into_iter().skip(1) {
        let block = spec.eigenvectors.columns(idx, mult);
        let amplitude = (block.adjoint() * &k0).norm();
        per_level.push(LevelAmplitude { gap: energy - spec.eigenvalues[0], amplitude, multiplicity: mult });
        idx += mult;
    }
    Ok(ErrorEstimate {
        segment,
        per_level_amplitudes: per_level,
        alpha_bound_t: seg.generator.spectral_norm(),
        min_gap: spec.level_gap(),
    })
}

/// Finite-difference `‖P_m(s) d/ds |0, s⟩‖` per excited level of segment `i`.
pub fn derivative_couplings(schedule: &Schedule, segment: usize, s: f64, h: f64) -> Result<Vec<f64>> {
    let seg = &schedule.segments()[segment];
    let tol = Tolerances { hermitian: 1e-9, ..Default::default() };
    let at = |x: f64| -> Result<crate::operator::SpectrumReport> {
        let u = seg.interpolant(x);
        let hm = &u * seg.base.matrix() * u.adjoint();
        crate::operator::eig_hermitian_with(&DenseOperator::from_matrix_unchecked(hm), &tol)
    };
    let (mid, lo, hi) = (at(s)?, at(s - h)?, at(s + h)?);
    let g = mid.eigenvectors.column(0).into_owned();
    let align = |v: Vector| {
        let ph = v.dotc(&g);
        v * (ph / ph.norm())
    };
    let dg = (align(hi.eigenvectors.column(0).into_owned()) - align(lo.eigenvectors.column(0).into_owned())) / crate::C64::new(2.0 * h, 0.0);
    let mut out = Vec::new();
    let mut idx = 1;
    for (_, mult) in mid.levels().into_iter().skip(1) {
        out.push((mid.eigenvectors.columns(idx, mult).adjoint() * &dg).norm());
        idx += mult;
    }
    Ok(out)
}

/// Order-of-magnitude scalings for an `L`-gate computation at total error `ε`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RuntimeBound {
    /// `ε / L²`.
    pub per_step_error: f64,
    /// `ε³ / L⁶`.
    pub gap_scale: f64,
    /// `L¹² / ε⁶`.
    pub time_scale: f64,
}

pub fn runtime_bound(gates: usize, eps: f64) -> Result<RuntimeBound> {
    if gates == 0 || !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::OutOfRange(format!("need L ≥ 1 and 0 < ε ≤ 1, got L={gates}, ε={eps}")));
    }
    let l = gates as f64;
    Ok(RuntimeBound { per_step_error: eps / l.powi(2), gap_scale: eps.powi(3) / l.powi(6), time_scale: l.powi(12) / eps.powi(6) })
}
