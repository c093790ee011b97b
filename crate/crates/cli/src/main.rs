//! `adiabatic`: compile circuits into adiabatic schedules, evolve them, and
//! run the experiment suites.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adiabatic_core::circuit::{parse_circuit, Circuit};
use adiabatic_core::direct_map::{assemble_schedule, gap_profile, locality_growth};
use adiabatic_core::evolution::evolve;
use adiabatic_core::harness::{run_suite, ExperimentConfig, SuiteReport, SCHEMA_VERSION};
use adiabatic_core::pauli::{Pauli, PauliSum};
use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "adiabatic", version, about = "Circuit-to-adiabatic compiler and experiment runner")]
struct Cli {
    /// JSON experiment configuration; missing fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for reports and traces.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the conjugated schedule of a circuit and write schedule.json.
    Compile {
        circuit: PathBuf,
        /// Initial Hamiltonian: a file of "coeff LETTERS" lines, or the same
        /// terms inline separated by ';'. Defaults to −ΣZ.
        #[arg(long)]
        h0: Option<String>,
    },
    /// Integrate the schedule and write trace.csv and evolve.json.
    Evolve {
        circuit: PathBuf,
        #[arg(long)]
        h0: Option<String>,
        #[arg(long)]
        time: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        /// Exit with status 1 below this final ground-state fidelity.
        #[arg(long)]
        min_fidelity: Option<f64>,
    },
    /// Run one suite: theorem1, gadget, holonomy or history.
    Suite { name: String },
    /// Gadget suite, optionally with its own list of δ values.
    Gadget {
        #[arg(long = "delta")]
        deltas: Vec<f64>,
    },
    /// Holonomy suite, optionally with its own holonomic-CNOT times.
    Holonomy {
        #[arg(long = "time")]
        times: Vec<f64>,
    },
    /// History suite, optionally with its own cycle time.
    History {
        #[arg(long)]
        time: Option<f64>,
    },
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::from_json(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn read_circuit(path: &Path) -> Result<Circuit> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_circuit(&text).with_context(|| format!("in {}", path.display()))
}

fn initial_hamiltonian(spec: Option<&str>, qubits: usize) -> Result<PauliSum> {
    let h0 = match spec {
        None => {
            let mut h = PauliSum::new(qubits);
            for q in 1..=qubits {
                h.add_placed(-1.0, &[(q, Pauli::Z)])?;
            }
            h
        }
        Some(s) if Path::new(s).is_file() => PauliSum::parse(&fs::read_to_string(s)?)?,
        Some(s) => PauliSum::parse(&s.replace(';', "\n"))?,
    };
    if h0.qubits() != qubits {
        bail!("H0 acts on {} qubits but the circuit has {qubits}", h0.qubits());
    }
    Ok(h0)
}

fn write(out: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn emit_suite(out: &Path, report: &SuiteReport) -> Result<ExitCode> {
    let text = report.to_json()?;
    write(out, &format!("{}.json", report.suite), &text)?;
    for c in &report.checks {
        eprintln!("{} {} = {:e} ({} {:e})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.relation, c.threshold);
    }
    print!("{text}");
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut cfg = load_config(&cli)?;
    match &cli.command {
        Command::Compile { circuit, h0 } => {
            let c = read_circuit(circuit)?;
            let h0 = initial_hamiltonian(h0.as_deref(), c.qubits())?;
            let schedule = assemble_schedule(&c, &h0)?;
            let gaps = gap_profile(&schedule, 9)?;
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "circuit": c.to_string(),
                "qubits": c.qubits(),
                "depth": c.depth(),
                "schedule": schedule.export()?,
                "locality_growth": locality_growth(&schedule)?,
                "gap": { "min": gaps.min, "max": gaps.max },
            });
            let text = serde_json::to_string_pretty(&report)? + "\n";
            write(&cli.out, "schedule.json", &text)?;
            print!("{text}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Evolve { circuit, h0, time, steps, min_fidelity } => {
            let e = &mut cfg.evolve;
            e.total_time = time.unwrap_or(e.total_time);
            e.steps = steps.unwrap_or(e.steps);
            e.min_fidelity = min_fidelity.unwrap_or(e.min_fidelity);
            cfg.validate()?;
            let c = read_circuit(circuit)?;
            let h0 = initial_hamiltonian(h0.as_deref(), c.qubits())?;
            let schedule = assemble_schedule(&c, &h0)?;
            let result = evolve(&schedule, &schedule.initial_ground_state(), cfg.evolve.total_time, cfg.evolve.steps)?;
            fs::create_dir_all(&cli.out)?;
            result.write_csv(fs::File::create(cli.out.join("trace.csv"))?)?;
            let fidelity = result.final_fidelity();
            let passed = fidelity >= cfg.evolve.min_fidelity;
            let summary = json!({
                "schema_version": SCHEMA_VERSION,
                "total_time": result.total_time,
                "steps": result.steps,
                "final_fidelity": fidelity,
                "min_fidelity": cfg.evolve.min_fidelity,
                "max_norm_drift": result.max_norm_drift,
                "passed": passed,
            });
            let text = serde_json::to_string_pretty(&summary)? + "\n";
            write(&cli.out, "evolve.json", &text)?;
            print!("{text}");
            Ok(if passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Suite { name } => emit_suite(&cli.out, &run_suite(name, &cfg)?),
        Command::Gadget { deltas } => {
            if !deltas.is_empty() {
                cfg.gadget.deltas = deltas.clone();
            }
            emit_suite(&cli.out, &run_suite("gadget", &cfg)?)
        }
        Command::Holonomy { times } => {
            if !times.is_empty() {
                cfg.holonomy.cnot_times = times.clone();
            }
            emit_suite(&cli.out, &run_suite("holonomy", &cfg)?)
        }
        Command::History { time } => {
            if let Some(t) = time {
                cfg.history.cycle_time = *t;
            }
            emit_suite(&cli.out, &run_suite("history", &cfg)?)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
