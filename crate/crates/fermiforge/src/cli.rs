//! Command-line driver. Exit codes: 0 success, 1 invalid input or usage,
//! 2 failure while running a valid request.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use fermiforge_core::fragment::{
    format_key, max_complete_order, mi_increments, mi_recombine, run_oniom, FragmentError,
    IncrementTable,
};
use fermiforge_core::mapping::{Mapping, MappingConfig};
use fermiforge_core::measurement::{
    expectations_from_histograms, get_measurement_estimate, group_qwc, plan_measurements,
    plan_total_shots,
};
use fermiforge_core::num_complex::Complex64;
use fermiforge_core::postprocess::bootstrap::energy_from_histograms;
use fermiforge_core::postprocess::{
    bootstrap_energy, mcweeny_purify_2rdm, rdm_words, rdms_from_expectations, BootstrapOptions,
    PostprocessError,
};
use fermiforge_core::rng;
use fermiforge_core::simulator::{
    append_measurement_basis, backend_info, get_expectation_value, simulate,
};
use fermiforge_core::vqe::VqeSolver;
use fermiforge_core::{BackendConfig, Circuit, NoiseModel, QubitOperator};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{load_oniom, load_vqe_config, Experiment};
use crate::formats::{
    read_fermion_operator, read_json, read_qubit_operator, read_text, write_text, FormatError,
};
use crate::qasm::{from_qasm, to_qasm};
use crate::solvers::registry;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

fn invalid(e: impl Display) -> CliError {
    CliError::Validation(e.to_string())
}

fn failed(e: impl Display) -> CliError {
    CliError::Runtime(e.to_string())
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> CliError {
        invalid(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CircuitFormat {
    Qasm,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "fermiforge",
    version,
    about = "Quantum chemistry circuits, simulation and VQE workflows"
)]
pub struct Cli {
    /// Master seed, expanded into per-stage streams.
    #[arg(long, global = true, env = "FERMIFORGE_SEED")]
    pub seed: Option<u64>,
    /// Shots per circuit; 0 or absent means exact probabilities.
    #[arg(long, global = true)]
    pub shots: Option<u64>,
    /// Noise model JSON: {"<GATE>": [{"channel": "depol", "probability": p}]}.
    #[arg(long, global = true)]
    pub noise: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a circuit and print its outcome histogram.
    Simulate {
        circuit: PathBuf,
        /// Also print the final statevector (noiseless only).
        #[arg(long)]
        statevector: bool,
    },
    /// Expectation value of a qubit operator on the state a circuit prepares.
    Expval { circuit: PathBuf, operator: PathBuf },
    /// Run a VQE configuration and report the energy and resources.
    Vqe {
        config: PathBuf,
        /// Write the optimised circuit (JSON) here.
        #[arg(long)]
        save_circuit: Option<PathBuf>,
    },
    /// Group operator terms into qubit-wise commuting measurement bases.
    Group { operator: PathBuf },
    /// Shots per term for a target number of significant digits.
    EstimateShots {
        operator: PathBuf,
        #[arg(long, default_value_t = 3)]
        digits: u32,
        /// Per-basis plan over the QWC grouping instead of per-term counts.
        #[arg(long)]
        plan: bool,
    },
    /// Convert a circuit between JSON and OpenQASM 2.0.
    Translate {
        circuit: PathBuf,
        #[arg(long, value_enum)]
        to: CircuitFormat,
    },
    /// ONIOM energy from a fragment specification.
    Oniom { spec: PathBuf },
    /// Method-of-increments recombination of a correlation-energy table.
    Mi {
        table: PathBuf,
        /// Truncation order; defaults to the highest complete order.
        #[arg(long)]
        order: Option<usize>,
    },
    /// Bootstrap the RDM energy pipeline over a measured experiment.
    Bootstrap {
        experiment: PathBuf,
        /// Fermion Hamiltonian text file.
        hamiltonian: PathBuf,
        #[arg(long, default_value_t = 100)]
        resamples: usize,
        /// McWeeny convergence threshold; no purification when absent.
        #[arg(long)]
        purify: Option<f64>,
        /// Include the per-resample energies.
        #[arg(long)]
        series: bool,
        /// Write the RDMs of the measured data (purified when requested).
        #[arg(long)]
        save_rdm: Option<PathBuf>,
    },
    /// Measure every basis needed for the RDMs and write an experiment file.
    Measure {
        circuit: PathBuf,
        #[arg(long, default_value = "jw")]
        mapping: String,
        #[arg(long)]
        n_spinorbitals: usize,
        #[arg(long)]
        n_electrons: usize,
        /// N_alpha - N_beta.
        #[arg(long, default_value_t = 0)]
        spin: i64,
        #[arg(long)]
        up_then_down: bool,
    },
    /// Split a circuit into independent qubit clusters.
    Split { circuit: PathBuf },
    /// Place circuits side by side on disjoint qubits.
    Stack {
        #[arg(required = true)]
        circuits: Vec<PathBuf>,
    },
    /// Inverse of a circuit.
    Inverse { circuit: PathBuf },
    /// Ordering conventions, caps and gate set of the backend.
    BackendInfo,
}

/// Result of a command before rendering.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Json(Value),
    Circuit(Circuit),
    Raw(String),
}

impl Output {
    pub fn render(&self, format: OutputFormat) -> Result<String, CliError> {
        let mut s = match (self, format) {
            (Output::Raw(s), _) => return Ok(s.clone()),
            (Output::Json(v), OutputFormat::Json) => {
                serde_json::to_string_pretty(v).map_err(failed)?
            }
            (Output::Json(v), OutputFormat::Text) => {
                let mut lines = Vec::new();
                text_lines(v, "", &mut lines);
                lines.join("\n")
            }
            (Output::Circuit(c), OutputFormat::Json) => {
                serde_json::to_string_pretty(c).map_err(failed)?
            }
            (Output::Circuit(c), OutputFormat::Text) => c.to_string(),
        };
        if !s.ends_with('\n') {
            s.push('\n');
        }
        Ok(s)
    }
}

/// `key: value` lines, nested keys joined with '.'.
fn text_lines(v: &Value, prefix: &str, out: &mut Vec<String>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                text_lines(x, &join(k), out);
            }
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = items.iter().map(Value::to_string).collect();
            out.push(format!("{prefix}: {}", parts.join(" ")));
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                text_lines(x, &join(&i.to_string()), out);
            }
        }
        Value::String(s) => out.push(format!("{prefix}: {s}")),
        other => out.push(format!("{prefix}: {other}")),
    }
}

fn to_value(v: &impl Serialize) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(failed)
}

/// Reads a circuit from JSON or, when the text starts with `OPENQASM`, QASM.
pub fn read_circuit(path: &Path) -> Result<Circuit, CliError> {
    let text = read_text(path)?;
    let at = |e: &dyn Display| invalid(format!("{}: {e}", path.display()));
    if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(|e| at(&e))
    } else {
        from_qasm(&text).map_err(|e| at(&e))
    }
}

fn coefficient_value(c: Complex64) -> Value {
    if c.im == 0.0 {
        json!(c.re)
    } else {
        json!([c.re, c.im])
    }
}

fn operator_value(op: &QubitOperator) -> Value {
    let map: serde_json::Map<String, Value> = op
        .iter()
        .map(|(w, c)| (w.to_string(), coefficient_value(*c)))
        .collect();
    Value::Object(map)
}

fn postprocess_error(e: PostprocessError) -> CliError {
    match e {
        PostprocessError::NoConvergence { .. } => failed(e),
        other => invalid(other),
    }
}

impl Cli {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn noise_model(&self) -> Result<Option<NoiseModel>, CliError> {
        self.noise
            .as_deref()
            .map(read_json::<NoiseModel>)
            .transpose()
            .map_err(invalid)
    }

    /// Backend from the global flags: exact unless `--shots` is positive.
    pub fn backend(&self) -> Result<BackendConfig, CliError> {
        let mut cfg = match self.shots {
            None | Some(0) => BackendConfig::exact(),
            Some(n) => BackendConfig::shots(n, self.seed()),
        };
        cfg.seed = Some(self.seed());
        cfg.noise_model = self.noise_model()?;
        Ok(cfg)
    }

    pub fn run(&self) -> Result<Output, CliError> {
        match &self.command {
            Command::Simulate {
                circuit,
                statevector,
            } => {
                let c = read_circuit(circuit)?;
                let (hist, state) =
                    simulate(&c, &self.backend()?, None, *statevector).map_err(invalid)?;
                if !*statevector {
                    return Ok(Output::Json(to_value(&hist)?));
                }
                let amps: Vec<[f64; 2]> = state
                    .map(|s| s.amplitudes().iter().map(|a| [a.re, a.im]).collect())
                    .unwrap_or_default();
                Ok(Output::Json(
                    json!({ "histogram": hist, "statevector": amps }),
                ))
            }
            Command::Expval { circuit, operator } => {
                let c = read_circuit(circuit)?;
                let op = read_qubit_operator(operator)?;
                let e = get_expectation_value(&op, &c, &self.backend()?).map_err(invalid)?;
                Ok(Output::Json(json!({ "expectation": e })))
            }
            Command::Vqe {
                config,
                save_circuit,
            } => self.vqe(config, save_circuit.as_deref()),
            Command::Group { operator } => {
                let op = read_qubit_operator(operator)?;
                let groups: serde_json::Map<String, Value> = group_qwc(&op, self.seed())
                    .iter()
                    .map(|(b, members)| (b.to_string(), operator_value(members)))
                    .collect();
                Ok(Output::Json(Value::Object(groups)))
            }
            Command::EstimateShots {
                operator,
                digits,
                plan,
            } => {
                let op = read_qubit_operator(operator)?;
                if *plan {
                    let p = plan_measurements(&op, self.seed(), *digits);
                    return Ok(Output::Json(
                        json!({ "plan": p, "total": plan_total_shots(&p) }),
                    ));
                }
                Ok(Output::Json(to_value(&get_measurement_estimate(
                    &op, *digits,
                ))?))
            }
            Command::Translate { circuit, to } => {
                let c = read_circuit(circuit)?;
                match to {
                    CircuitFormat::Qasm => Ok(Output::Raw(to_qasm(&c).map_err(invalid)?)),
                    CircuitFormat::Json => Ok(Output::Circuit(c)),
                }
            }
            Command::Oniom { spec } => {
                let (g, fragments) = load_oniom(spec)?;
                let result = run_oniom(&g, &fragments, &registry(spec)).map_err(|e| match e {
                    FragmentError::Solver { .. } => failed(e),
                    other => invalid(other),
                })?;
                let mut v = to_value(&result)?;
                v["resources"] = to_value(&result.resources())?;
                Ok(Output::Json(v))
            }
            Command::Mi { table, order } => {
                let table: IncrementTable = read_json(table)?;
                let increments = mi_increments(&table).map_err(invalid)?;
                let order = order.unwrap_or_else(|| max_complete_order(&table));
                let r = mi_recombine(&increments, order);
                let inc: BTreeMap<String, f64> = increments
                    .iter()
                    .map(|(k, v)| (format_key(k), *v))
                    .collect();
                let mut v = to_value(&r)?;
                v["increments"] = to_value(&inc)?;
                Ok(Output::Json(v))
            }
            Command::Bootstrap {
                experiment,
                hamiltonian,
                resamples,
                purify,
                series,
                save_rdm,
            } => {
                let exp: Experiment = read_json(experiment)?;
                let h = read_fermion_operator(hamiltonian)?;
                let point = energy_from_histograms(&h, &exp.mapping, &exp.histograms, *purify)
                    .map_err(postprocess_error)?;
                let opts = BootstrapOptions {
                    n_resamples: *resamples,
                    seed: self.seed(),
                    purify: *purify,
                };
                let mut report =
                    bootstrap_energy(&h, &exp.mapping, &exp.histograms, exp.n_shots, &opts)
                        .map_err(postprocess_error)?;
                if !*series {
                    report.series.clear();
                }
                if let Some(path) = save_rdm {
                    self.save_rdm(&exp, *purify, path)?;
                }
                let mut v = to_value(&report)?;
                v["energy"] = json!(point);
                Ok(Output::Json(v))
            }
            Command::Measure {
                circuit,
                mapping,
                n_spinorbitals,
                n_electrons,
                spin,
                up_then_down,
            } => {
                let mapping = MappingConfig {
                    mapping: mapping.parse::<Mapping>().map_err(invalid)?,
                    n_spinorbitals: *n_spinorbitals,
                    n_electrons: Some(*n_electrons),
                    spin: *spin,
                    up_then_down: *up_then_down,
                };
                self.measure(&read_circuit(circuit)?, mapping)
            }
            Command::Split { circuit } => {
                let split = read_circuit(circuit)?.split();
                Ok(Output::Json(
                    json!({ "parts": split.parts, "qubit_map": split.qubit_map }),
                ))
            }
            Command::Stack { circuits } => {
                let list: Vec<Circuit> = circuits
                    .iter()
                    .map(|p| read_circuit(p))
                    .collect::<Result<_, _>>()?;
                Ok(Output::Circuit(Circuit::stack(&list)))
            }
            Command::Inverse { circuit } => Ok(Output::Circuit(
                read_circuit(circuit)?.inverse().map_err(invalid)?,
            )),
            Command::BackendInfo => Ok(Output::Json(to_value(&backend_info(&self.backend()?))?)),
        }
    }

    fn vqe(&self, path: &Path, save_circuit: Option<&Path>) -> Result<Output, CliError> {
        let mut cfg = load_vqe_config(path)?;
        if let Some(shots) = self.shots {
            cfg.backend.n_shots = (shots > 0).then_some(shots);
        }
        if let Some(seed) = self.seed {
            cfg.backend.seed = Some(seed);
            cfg.optimizer.seed = seed;
        }
        if let Some(noise) = self.noise_model()? {
            cfg.backend.noise_model = Some(noise);
        }
        let mut solver = VqeSolver::new(cfg);
        solver.build().map_err(invalid)?;
        let energy = solver.simulate().map_err(failed)?;
        let resources = solver.get_resources().map_err(failed)?;
        let result = solver
            .result()
            .cloned()
            .ok_or_else(|| failed("optimizer produced no result"))?;
        if let Some(p) = save_circuit {
            let c = solver.circuit().map_err(failed)?;
            write_text(
                p,
                &(serde_json::to_string_pretty(&c).map_err(failed)? + "\n"),
            )
            .map_err(failed)?;
        }
        let mut v = json!({
            "energy": energy,
            "params": result.params,
            "evaluations": result.evaluations,
            "converged": result.converged,
            "reference": solver.reference().map_err(failed)?,
            "resources": resources,
        });
        if let Some(set) = solver.generators() {
            v["generators"] = to_value(set)?;
        }
        Ok(Output::Json(v))
    }

    fn measure(&self, circuit: &Circuit, mapping: MappingConfig) -> Result<Output, CliError> {
        let n_shots = match self.shots {
            Some(n) if n > 0 => n,
            _ => return Err(invalid("measure needs --shots > 0")),
        };
        let noise = self.noise_model()?;
        let words = rdm_words(&mapping).map_err(invalid)?;
        let op = QubitOperator::from_terms(words.into_iter().map(|w| (w, 1.0)));
        let mut histograms = BTreeMap::new();
        for (i, basis) in group_qwc(&op, self.seed()).keys().enumerate() {
            let mut backend =
                BackendConfig::shots(n_shots, rng::stream_seed(self.seed(), "measure", i as u64));
            backend.noise_model = noise.clone();
            let c = append_measurement_basis(circuit, basis);
            let (hist, _) = simulate(&c, &backend, None, false).map_err(invalid)?;
            histograms.insert(basis.clone(), hist);
        }
        let exp = Experiment {
            mapping,
            n_shots,
            seed: self.seed(),
            noise,
            histograms,
        };
        Ok(Output::Json(to_value(&exp)?))
    }

    fn save_rdm(&self, exp: &Experiment, purify: Option<f64>, path: &Path) -> Result<(), CliError> {
        let words = rdm_words(&exp.mapping).map_err(invalid)?;
        let ex =
            expectations_from_histograms(words.iter(), &exp.histograms, None).map_err(invalid)?;
        let mut rdm = rdms_from_expectations(&exp.mapping, &ex).map_err(postprocess_error)?;
        if let Some(conv) = purify {
            rdm = mcweeny_purify_2rdm(&rdm, conv)
                .map_err(postprocess_error)?
                .value;
        }
        let mut buf = Vec::new();
        crate::formats::write_rdm(&mut buf, &rdm).map_err(failed)?;
        std::fs::write(path, buf).map_err(|e| failed(format!("{}: {e}", path.display())))
    }
}

/// Parses `args`, runs the command and writes the result. Returns the exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = cli.run().and_then(|out| out.render(cli.format));
    match result {
        Ok(text) => {
            let written = match &cli.output {
                Some(p) => {
                    std::fs::write(p, &text).map_err(|e| failed(format!("{}: {e}", p.display())))
                }
                None => stdout.write_all(text.as_bytes()).map_err(failed),
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
