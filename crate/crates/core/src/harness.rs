//! Seeded experiment suites producing versioned JSON reports.
//!
//! Every randomized trial draws from a ChaCha stream derived from the single
//! configured seed (stream `i` for trial `i`), so a parallel run produces the
//! same numbers as a serial one, and reports are byte-identical across runs.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::circuit::{parse_circuit, Circuit, Gate};
use crate::error::{Error, Result};
use crate::gadget::{compare_lower_spectra, cz_step_target, gadgetize, repeated_gadget_gap, self_energy_certificate, self_energy_terms, third_order_structure};
use crate::history::{arc_path, full_holonomic_cycle, half_cycle_sweep, single_gate_sweep};
use crate::holonomy::{gate_infidelity, holonomic_cnot, holonomic_cnot_wilczek_zee, linear_rate, smooth_rate, PhaseCancellation, Rate};
use crate::locality::{ghz_eigen_hamiltonian, ghz_witness, theorem1_check, GhzConstraint, Theorem1Instance};
use crate::operator::{eigvalsh, random, spectral_norm, QuantumState};
use crate::pauli::PauliSum;

pub const SCHEMA_VERSION: u32 = 1;
pub const SUITES: [&str; 4] = ["theorem1", "gadget", "holonomy", "history"];

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Theorem1Config {
    pub instances: usize,
    pub max_qubits: usize,
    pub ghz_instances: usize,
}

impl Default for Theorem1Config {
    fn default() -> Self {
        Theorem1Config { instances: 10_000, max_qubits: 5, ghz_instances: 100 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct GadgetConfig {
    pub deltas: Vec<f64>,
    /// Overall scale `a` of the CZ-step target.
    pub scale: f64,
    pub deviation_constant: f64,
    pub max_ratio_variation: f64,
    pub min_ancilla_fidelity: f64,
    pub nested_steps: usize,
    pub nested_delta: f64,
}

impl Default for GadgetConfig {
    fn default() -> Self {
        GadgetConfig {
            deltas: vec![0.2, 0.1, 0.05],
            scale: 0.02,
            deviation_constant: 1.0,
            max_ratio_variation: 0.5,
            min_ancilla_fidelity: 0.99,
            nested_steps: 2,
            nested_delta: 0.3,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct HolonomyConfig {
    pub phase_time: f64,
    pub phase_dt: f64,
    pub states: usize,
    pub max_phase_infidelity: f64,
    pub cnot_times: Vec<f64>,
    pub cnot_dt: f64,
    pub min_cnot_fidelity: f64,
    pub max_holonomy_mismatch: f64,
}

impl Default for HolonomyConfig {
    fn default() -> Self {
        HolonomyConfig {
            phase_time: 6000.0,
            phase_dt: 0.05,
            states: 20,
            max_phase_infidelity: 1e-6,
            cnot_times: vec![50.0, 200.0, 800.0],
            cnot_dt: 0.02,
            min_cnot_fidelity: 0.99,
            max_holonomy_mismatch: 1e-3,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct HistoryConfig {
    pub single_time: f64,
    pub sweep_time: f64,
    pub cycle_time: f64,
    pub dt: f64,
    pub cycle_circuit: String,
    pub min_sweep_fidelity: f64,
    pub min_cycle_fidelity: f64,
}

impl Default for HistoryConfig {
    fn default() -> Self {
        HistoryConfig {
            single_time: 50.0,
            sweep_time: 100.0,
            cycle_time: 50.0,
            dt: 0.025,
            cycle_circuit: "qubits 2\nH 1\nCNOT 1 2\n".into(),
            min_sweep_fidelity: 0.999,
            min_cycle_fidelity: 0.99,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveConfig {
    pub total_time: f64,
    pub steps: usize,
    pub min_fidelity: f64,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig { total_time: 200.0, steps: 20_000, min_fidelity: 0.999 }
    }
}

/// Parameters for every command; read from JSON with missing fields defaulted.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub evolve: EvolveConfig,
    pub theorem1: Theorem1Config,
    pub gadget: GadgetConfig,
    pub holonomy: HolonomyConfig,
    pub history: HistoryConfig,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("{name} = {v} must be positive")))
    }
}

fn unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("{name} = {v} must lie in (0, 1]")))
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let e = &self.evolve;
        positive("evolve.total_time", e.total_time)?;
        unit("evolve.min_fidelity", e.min_fidelity)?;
        if e.steps == 0 {
            return Err(Error::OutOfRange("evolve.steps must be positive".into()));
        }
        let t = &self.theorem1;
        if t.max_qubits == 0 || t.max_qubits > 8 {
            return Err(Error::OutOfRange(format!("theorem1.max_qubits = {} not in 1..=8", t.max_qubits)));
        }
        let g = &self.gadget;
        if g.deltas.is_empty() || g.deltas.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
            return Err(Error::OutOfRange(format!("gadget.deltas {:?} must lie in (0, 1)", g.deltas)));
        }
        positive("gadget.scale", g.scale)?;
        positive("gadget.deviation_constant", g.deviation_constant)?;
        unit("gadget.max_ratio_variation", g.max_ratio_variation)?;
        unit("gadget.min_ancilla_fidelity", g.min_ancilla_fidelity)?;
        if !(g.nested_delta > 0.0 && g.nested_delta < 1.0) {
            return Err(Error::OutOfRange(format!("gadget.nested_delta = {}", g.nested_delta)));
        }
        let h = &self.holonomy;
        positive("holonomy.phase_time", h.phase_time)?;
        positive("holonomy.phase_dt", h.phase_dt)?;
        positive("holonomy.max_phase_infidelity", h.max_phase_infidelity)?;
        positive("holonomy.cnot_dt", h.cnot_dt)?;
        unit("holonomy.min_cnot_fidelity", h.min_cnot_fidelity)?;
        positive("holonomy.max_holonomy_mismatch", h.max_holonomy_mismatch)?;
        if h.cnot_times.is_empty() {
            return Err(Error::OutOfRange("holonomy.cnot_times is empty".into()));
        }
        for &t in &h.cnot_times {
            positive("holonomy.cnot_times", t)?;
        }
        let s = &self.history;
        positive("history.single_time", s.single_time)?;
        positive("history.sweep_time", s.sweep_time)?;
        positive("history.cycle_time", s.cycle_time)?;
        positive("history.dt", s.dt)?;
        unit("history.min_sweep_fidelity", s.min_sweep_fidelity)?;
        unit("history.min_cycle_fidelity", s.min_cycle_fidelity)?;
        parse_circuit(&s.cycle_circuit)?;
        Ok(())
    }
}

/// One pass/fail line of a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    /// `"<="` or `">="`.
    pub relation: String,
    pub threshold: f64,
}

impl Check {
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Check { name: name.into(), passed: value <= threshold, value, relation: "<=".into(), threshold }
    }

    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Check { name: name.into(), passed: value >= threshold, value, relation: ">=".into(), threshold }
    }

    /// A yes/no property, recorded as 1 (holds) or 0.
    pub fn holds(name: &str, ok: bool) -> Self {
        Check::at_least(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub data: BTreeMap<String, Value>,
}

impl SuiteReport {
    fn new(suite: &str, seed: u64, mut checks: Vec<Check>, data: BTreeMap<String, Value>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let passed = checks.iter().all(|c| c.passed);
        SuiteReport { schema_version: SCHEMA_VERSION, suite: suite.into(), seed, passed, checks, data }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn run_suite(name: &str, cfg: &ExperimentConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    match name {
        "theorem1" => theorem1_suite(cfg),
        "gadget" => gadget_suite(cfg),
        "holonomy" => holonomy_suite(cfg),
        "history" => history_suite(cfg),
        other => Err(Error::UnknownSuite(other.into())),
    }
}

pub fn theorem1_suite(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let c = &cfg.theorem1;
    let reports = (0..c.instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(cfg.seed, i as u64);
            let n = rng.gen_range(1..=c.max_qubits);
            Ok((n, theorem1_check(&Theorem1Instance::random(n, &mut rng)?)))
        })
        .collect::<Result<Vec<_>>>()?;
    let violations = reports.iter().filter(|(_, r)| !r.holds).count();
    let tightest = reports.iter().map(|(_, r)| r.lhs - r.rhs).fold(f64::NEG_INFINITY, f64::max);
    let mut per_size = BTreeMap::new();
    for (n, _) in &reports {
        *per_size.entry(n.to_string()).or_insert(0usize) += 1;
    }

    // GHZ₃ eigenstates of 2-local Hamiltonians: the GHZ⁻ partner always has
    // the same energy, since no 2-local term connects |000⟩ and |111⟩.
    let offset = c.instances as u64;
    let ghz = (0..c.ghz_instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(cfg.seed, offset + i as u64);
            let h = ghz_eigen_hamiltonian(3, 2, GhzConstraint::Ghz, 0.0, &mut rng)?;
            ghz_witness(&h, 3)
        })
        .collect::<Result<Vec<_>>>()?;
    let max_split = ghz.iter().map(|w| (w.ghz_energy - w.partner_energy).abs()).fold(0.0, f64::max);
    let eigen = ghz.iter().filter(|w| w.is_eigenstate).count();
    let partner_eigen = ghz.iter().filter(|w| w.partner_is_eigenstate).count();

    let offset = offset + c.ghz_instances as u64;
    let ground = (0..c.ghz_instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(cfg.seed, offset + i as u64);
            let h = ghz_eigen_hamiltonian(3, 2, GhzConstraint::Branches, 3.0, &mut rng)?;
            ghz_witness(&h, 3)
        })
        .collect::<Result<Vec<_>>>()?;
    let ground_cases = ground.iter().filter(|w| w.is_ground).count();
    let degenerate = ground.iter().filter(|w| w.degeneracy_found).count();

    let checks = vec![
        Check::at_most("theorem1.violations", violations as f64, 0.0),
        Check::at_most("ghz.max_energy_split", max_split, 1e-8),
        Check::at_least("ghz.eigenstate_instances", eigen as f64, c.ghz_instances as f64),
        Check::holds("ghz.ground_always_degenerate", degenerate == ground_cases),
    ];
    let mut data = BTreeMap::new();
    data.insert("instances_per_size".into(), json!(per_size));
    data.insert("max_lhs_minus_rhs".into(), json!(tightest));
    data.insert("ghz_partner_eigenstates".into(), json!(partner_eigen));
    data.insert("ghz_ground_instances".into(), json!(ground_cases));
    data.insert("ghz_degenerate_ground_instances".into(), json!(degenerate));
    Ok(SuiteReport::new("theorem1", cfg.seed, checks, data))
}

/// `(max − min)/max` of positive values.
pub fn relative_variation(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    (max - min) / max
}

#[derive(Clone, Debug, Serialize)]
struct GadgetRow {
    delta: f64,
    eigen_deviation: f64,
    eigen_ratio: f64,
    certificate: f64,
    certificate_ratio: f64,
    third_order_deviation: f64,
    ancilla_ghz_fidelity: f64,
    computational_fidelity: f64,
}

fn gadget_rows(scale: f64, deltas: &[f64]) -> Result<Vec<GadgetRow>> {
    let target = cz_step_target(scale)?;
    let dense = target.to_dense();
    let e0 = eigvalsh(dense.matrix())[0];
    deltas
        .par_iter()
        .map(|&delta| {
            let g = gadgetize(&target, delta)?;
            let cmp = compare_lower_spectra(&dense, &g, 2)?;
            let certificate = self_energy_certificate(&g, e0)?;
            let terms = self_energy_terms(&g, e0, 3)?;
            let third = spectral_norm(&(&terms[2] - third_order_structure(&g)));
            Ok(GadgetRow {
                delta,
                eigen_deviation: cmp.max_deviation,
                eigen_ratio: cmp.max_deviation / delta,
                certificate,
                certificate_ratio: certificate / delta,
                third_order_deviation: third,
                ancilla_ghz_fidelity: cmp.ancilla_ghz_fidelity,
                computational_fidelity: cmp.computational_fidelity,
            })
        })
        .collect()
}

pub fn gadget_suite(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let c = &cfg.gadget;
    let rows = gadget_rows(c.scale, &c.deltas)?;
    let ratios: Vec<f64> = rows.iter().map(|r| r.eigen_ratio).collect();
    let worst_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let mut by_delta: Vec<&GadgetRow> = rows.iter().collect();
    by_delta.sort_by(|a, b| a.delta.total_cmp(&b.delta));
    let monotone = by_delta.windows(2).all(|w| w[0].eigen_deviation <= w[1].eigen_deviation);
    let smallest = by_delta[0];
    // The third-order term must approach −6·B₁B₂B₃⊗XXX linearly: its
    // mismatch divided by δ may not grow as δ shrinks.
    let third_ratios: Vec<f64> = by_delta.iter().map(|r| r.third_order_deviation / r.delta).collect();
    let third_bounded = third_ratios.windows(2).all(|w| w[0] <= w[1] * (1.0 + c.max_ratio_variation));
    let target_norm = cz_step_target(c.scale)?.l1_norm();
    let nested = repeated_gadget_gap(c.nested_steps, c.nested_delta)?;
    let large = gadget_rows(0.5, &c.deltas)?;

    let checks = vec![
        Check::at_most("gadget.eigen_deviation_over_delta", worst_ratio, c.deviation_constant),
        Check::at_most("gadget.ratio_variation", relative_variation(&ratios), c.max_ratio_variation),
        Check::holds("gadget.deviation_monotone_in_delta", monotone),
        Check::at_least("gadget.ancilla_ghz_fidelity", smallest.ancilla_ghz_fidelity, c.min_ancilla_fidelity),
        Check::at_most("gadget.third_order_over_delta", third_ratios.iter().copied().fold(0.0, f64::max), c.deviation_constant),
        Check::holds("gadget.third_order_linear_in_delta", third_bounded),
    ];
    let mut data = BTreeMap::new();
    data.insert("scale".into(), json!(c.scale));
    data.insert("target_l1_norm".into(), json!(target_norm));
    data.insert("rows".into(), serde_json::to_value(&rows)?);
    data.insert("rows_at_scale_0.5".into(), serde_json::to_value(&large)?);
    data.insert("nested_normalized_gaps".into(), json!(nested));
    data.insert("nested_delta".into(), json!(c.nested_delta));
    Ok(SuiteReport::new("gadget", cfg.seed, checks, data))
}

/// `0.9·Z` on the target plus `0.1·Z` on the control of a two-qubit gate.
pub fn phase_h0() -> PauliSum {
    PauliSum::from_labels(&[(0.1, "ZI"), (0.9, "IZ")]).expect("valid labels")
}

#[derive(Clone, Debug, Serialize)]
struct PhaseRow {
    gate: String,
    rate: String,
    worst_infidelity: f64,
    gate_infidelity: f64,
}

pub fn holonomy_suite(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let c = &cfg.holonomy;
    let steps = (c.phase_time / c.phase_dt).ceil() as usize;
    let gates = [("CNOT 1 2", Gate::Cnot { control: 1, target: 2 }), ("CZ 1 2", Gate::Cz(1, 2))];
    let rates: [(&str, Rate); 2] = [("linear", linear_rate), ("smooth", smooth_rate)];
    let h0 = phase_h0();
    let states: Vec<QuantumState> = (0..c.states)
        .map(|i| {
            let mut rng = trial_rng(cfg.seed, i as u64);
            // H0 is diagonal, so its eigenstates are basis states; redraw
            // until the state is far from all of them.
            loop {
                let psi = random::state(2, &mut rng);
                let max_overlap = (0..4).map(|k| psi.amplitudes()[k].norm_sqr()).fold(0.0, f64::max);
                if max_overlap < 0.9 {
                    break psi;
                }
            }
        })
        .collect();
    let jobs: Vec<(usize, usize)> = (0..gates.len()).flat_map(|g| (0..rates.len()).map(move |r| (g, r))).collect();
    let phase_rows = jobs
        .par_iter()
        .map(|&(gi, ri)| {
            let (label, gate) = &gates[gi];
            let u = gate.lifted(2)?;
            let plan = PhaseCancellation::new(&h0, &u, c.phase_time)?;
            let prop = plan.propagator(steps, rates[ri].1)?;
            let worst = states
                .iter()
                .map(|psi| {
                    let out = QuantumState::normalize(&prop * psi.amplitudes())?;
                    Ok(1.0 - out.fidelity(&u.apply(psi)?))
                })
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            Ok(PhaseRow {
                gate: label.to_string(),
                rate: rates[ri].0.into(),
                worst_infidelity: worst,
                gate_infidelity: gate_infidelity(&prop, u.matrix()),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let cnot_runs = c
        .cnot_times
        .par_iter()
        .map(|&t| holonomic_cnot(t, (t / c.cnot_dt).ceil() as usize))
        .collect::<Result<Vec<_>>>()?;
    let fidelities: Vec<f64> = cnot_runs.iter().map(|r| r.fidelity).collect();
    let monotone = fidelities.windows(2).all(|w| w[1] > w[0]);
    let longest = cnot_runs
        .iter()
        .max_by(|a, b| a.total_time.total_cmp(&b.total_time))
        .expect("at least one time");
    let (w_wz, frame) = holonomic_cnot_wilczek_zee(longest.steps)?;
    let mismatch = gate_infidelity(&longest.w, &w_wz);

    let mut checks = Vec::new();
    for label in ["CNOT", "CZ"] {
        let worst = phase_rows.iter().filter(|r| r.gate.starts_with(label)).map(|r| r.worst_infidelity).fold(0.0, f64::max);
        checks.push(Check::at_most(&format!("phase_cancellation.{}.worst_infidelity", label.to_lowercase()), worst, c.max_phase_infidelity));
    }
    checks.push(Check::at_least("holonomic_cnot.fidelity_at_longest_time", longest.fidelity, c.min_cnot_fidelity));
    checks.push(Check::holds("holonomic_cnot.monotone_in_time", monotone));
    checks.push(Check::at_most("holonomic_cnot.wilczek_zee_mismatch", mismatch, c.max_holonomy_mismatch));
    checks.push(Check::at_most("holonomic_cnot.holonomy_unitarity", frame.unitary_defect, 1e-9));

    let mut data = BTreeMap::new();
    data.insert("phase_cancellation".into(), serde_json::to_value(&phase_rows)?);
    data.insert("phase_steps".into(), json!(steps));
    data.insert(
        "holonomic_cnot".into(),
        json!(cnot_runs.iter().map(|r| json!({"total_time": r.total_time, "steps": r.steps, "fidelity": r.fidelity, "leakage": r.leakage})).collect::<Vec<_>>()),
    );
    data.insert("holonomic_cnot_unitary".into(), serde_json::to_value(&longest.unitary)?);
    data.insert("wilczek_zee_steps".into(), json!(frame.steps));
    Ok(SuiteReport::new("holonomy", cfg.seed, checks, data))
}

pub fn history_suite(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let c = &cfg.history;
    let cnot = Gate::Cnot { control: 2, target: 1 }.lifted(2)?;
    let zero = QuantumState::zero(2);
    let steps = |t: f64| (t / c.dt).ceil() as usize;
    let single = single_gate_sweep(&cnot, &zero, c.single_time, steps(c.single_time))?;
    let half = half_cycle_sweep(&cnot, &zero, arc_path, c.sweep_time, steps(c.sweep_time))?;
    let circuit: Circuit = parse_circuit(&c.cycle_circuit)?;
    let cycle = full_holonomic_cycle(&circuit, c.cycle_time, steps(c.cycle_time))?;
    let checks = vec![
        Check::at_least("history.single_gate_fidelity", single.fidelity, c.min_sweep_fidelity),
        Check::at_least("history.half_cycle_fidelity", half.fidelity, c.min_sweep_fidelity),
        Check::at_least("history.cycle_final_fidelity", cycle.final_fidelity, c.min_cycle_fidelity),
        Check::at_most("history.relabel_defect", cycle.relabel_defect, 1e-12),
    ];
    let mut data = BTreeMap::new();
    data.insert("single_gate".into(), serde_json::to_value(&single)?);
    data.insert("half_cycle".into(), serde_json::to_value(&half)?);
    data.insert("cycle".into(), serde_json::to_value(&cycle)?);
    data.insert("cycle_circuit".into(), json!(circuit.to_string()));
    Ok(SuiteReport::new("history", cfg.seed, checks, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.theorem1.instances = 200;
        cfg.theorem1.ghz_instances = 10;
        cfg.holonomy.phase_time = 500.0;
        cfg.holonomy.max_phase_infidelity = 1e-3;
        cfg.holonomy.cnot_times = vec![20.0, 50.0];
        cfg.holonomy.min_cnot_fidelity = 0.9;
        cfg.holonomy.max_holonomy_mismatch = 0.05;
        cfg.holonomy.states = 4;
        cfg
    }

    #[test]
    fn config_defaults_and_validation() {
        let cfg = ExperimentConfig::from_json("{}").unwrap();
        assert_eq!(cfg.theorem1.instances, 10_000);
        assert_eq!(cfg.gadget.deltas, vec![0.2, 0.1, 0.05]);
        let cfg = ExperimentConfig::from_json(r#"{"seed": 7, "gadget": {"deltas": [0.1]}}"#).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.gadget.scale, 0.02);
        assert!(ExperimentConfig::from_json(r#"{"gadget": {"deltas": [1.5]}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"holonomy": {"phase_dt": -1}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(run_suite("nope", &ExperimentConfig::default()), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn theorem1_report_is_deterministic() {
        let cfg = small();
        let a = run_suite("theorem1", &cfg).unwrap();
        let b = run_suite("theorem1", &cfg).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert!(a.passed, "{a:?}");
        assert_eq!(a.schema_version, SCHEMA_VERSION);
        let mut other = cfg.clone();
        other.seed = 1;
        assert_ne!(run_suite("theorem1", &other).unwrap().to_json().unwrap(), a.to_json().unwrap());
    }

    #[test]
    fn checks_are_sorted() {
        let r = run_suite("history", &small()).unwrap();
        let names: Vec<_> = r.checks.iter().map(|c| c.name.clone()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn small_holonomy_suite_runs() {
        let r = run_suite("holonomy", &small()).unwrap();
        assert!(r.passed, "{:#?}", r.checks);
    }

    #[test]
    fn variation() {
        assert!((relative_variation(&[1.0, 2.0, 1.5]) - 0.5).abs() < 1e-15);
    }
}
