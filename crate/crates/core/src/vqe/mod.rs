//! Variational quantum eigensolver with build / simulate / get_resources lifecycle.

pub mod ansatz;
pub mod optimizer;
pub mod qcc;

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CircuitError};
use crate::linalg::CompiledOperator;
use crate::mapping::{
    fermion_to_qubit_mapping, hartree_fock_bitstring, MappingConfig, MappingError,
};
use crate::operator::{FermionOperator, QubitOperator};
use crate::rng;
use crate::simulator::{
    get_expectation_value_from, run_statevector, BackendConfig, SimulatorError, Statevector,
};

pub use ansatz::Entangler;
pub use optimizer::{Method, OptimizationResult, OptimizerConfig};
pub use qcc::QccGeneratorSet;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VqeError {
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error(transparent)]
    Simulator(#[from] SimulatorError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("invalid VQE configuration: {0}")]
    Config(String),
    #[error("empty generator set: no QCC candidate reaches |dE/dτ| >= {threshold:e}")]
    EmptyGeneratorSet { threshold: f64 },
    #[error("solver has not been built")]
    NotBuilt,
    #[error("expected {expected} variational parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Hamiltonian {
    Qubit(QubitOperator),
    Fermion {
        operator: FermionOperator,
        mapping: MappingConfig,
    },
}

fn default_layers() -> usize {
    2
}

fn default_rotations() -> Vec<String> {
    vec!["RY".to_string()]
}

fn default_entangler() -> Entangler {
    Entangler::Linear
}

fn default_tau_guess() -> f64 {
    1e-2
}

fn default_threshold() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AnsatzSpec {
    Hea {
        #[serde(default = "default_layers")]
        layers: usize,
        #[serde(default = "default_rotations")]
        rotations: Vec<String>,
        #[serde(default = "default_entangler")]
        entangler: Entangler,
    },
    Qcc {
        #[serde(default = "default_tau_guess")]
        tau_guess: f64,
        /// Minimum |dE/dτ| (Hartree/radian) for a candidate set to be kept.
        #[serde(default = "default_threshold")]
        threshold: f64,
        #[serde(default)]
        max_generators: Option<usize>,
        #[serde(default)]
        bloch_layer: bool,
    },
    Custom {
        circuit: Circuit,
    },
}

impl AnsatzSpec {
    pub fn hea(layers: usize) -> AnsatzSpec {
        AnsatzSpec::Hea {
            layers,
            rotations: default_rotations(),
            entangler: default_entangler(),
        }
    }

    pub fn qcc(threshold: f64) -> AnsatzSpec {
        AnsatzSpec::Qcc {
            tau_guess: default_tau_guess(),
            threshold,
            max_generators: None,
            bloch_layer: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialParams {
    Zeros,
    Random,
    #[serde(untagged)]
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeConfig {
    pub hamiltonian: Hamiltonian,
    pub ansatz: AnsatzSpec,
    /// Occupation bitstring of the reference state (character `i` = qubit `i`).
    /// Derived from the electron count for fermionic input when absent.
    pub reference: Option<String>,
    pub n_electrons: Option<usize>,
    pub initial_params: InitialParams,
    pub optimizer: OptimizerConfig,
    pub backend: BackendConfig,
}

impl VqeConfig {
    pub fn new(hamiltonian: Hamiltonian, ansatz: AnsatzSpec) -> VqeConfig {
        VqeConfig {
            hamiltonian,
            ansatz,
            reference: None,
            n_electrons: None,
            initial_params: InitialParams::Zeros,
            optimizer: OptimizerConfig::default(),
            backend: BackendConfig::exact(),
        }
    }
}

/// Resource summary with the six reported quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub qubit_hamiltonian_terms: usize,
    pub circuit_width: usize,
    pub circuit_gates: usize,
    pub circuit_2qubit_gates: usize,
    pub circuit_var_gates: usize,
    pub vqe_variational_parameters: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeResult {
    pub energy: f64,
    pub params: Vec<f64>,
    pub evaluations: usize,
    /// False when the optimizer ran out of evaluations.
    pub converged: bool,
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone)]
struct Built {
    hamiltonian: QubitOperator,
    compiled: CompiledOperator,
    n_qubits: usize,
    reference: String,
    ansatz: Circuit,
    params: Vec<f64>,
    generators: Option<QccGeneratorSet>,
}

#[derive(Debug, Clone)]
pub struct VqeSolver {
    config: VqeConfig,
    built: Option<Built>,
    result: Option<VqeResult>,
}

impl VqeSolver {
    pub fn new(config: VqeConfig) -> VqeSolver {
        VqeSolver {
            config,
            built: None,
            result: None,
        }
    }

    pub fn config(&self) -> &VqeConfig {
        &self.config
    }

    /// Maps the Hamiltonian, prepares the reference and the ansatz and sets the
    /// initial parameters. Nothing is simulated except the QCC screening, which
    /// reads the reference statevector.
    pub fn build(&mut self) -> Result<(), VqeError> {
        let cfg = &self.config;
        let (hamiltonian, reference) = match &cfg.hamiltonian {
            Hamiltonian::Qubit(op) => {
                let reference = cfg.reference.clone().ok_or_else(|| {
                    VqeError::Config(
                        "a qubit Hamiltonian needs an explicit reference bitstring".into(),
                    )
                })?;
                (op.clone(), reference)
            }
            Hamiltonian::Fermion { operator, mapping } => {
                let op = fermion_to_qubit_mapping(operator, mapping)?.compress(1e-12);
                let reference = match (&cfg.reference, cfg.n_electrons.or(mapping.n_electrons)) {
                    (Some(r), _) => r.clone(),
                    (None, Some(n)) => hartree_fock_bitstring(n, mapping)?,
                    (None, None) => {
                        return Err(VqeError::Config(
                            "need a reference bitstring or an electron count".into(),
                        ))
                    }
                };
                if reference.len() != mapping.n_qubits() {
                    return Err(VqeError::Config(alloc::format!(
                        "reference has {} qubits but the mapped Hamiltonian uses {}",
                        reference.len(),
                        mapping.n_qubits()
                    )));
                }
                (op, reference)
            }
        };
        if reference.chars().any(|c| c != '0' && c != '1') {
            return Err(VqeError::Config(alloc::format!(
                "bad reference bitstring '{reference}'"
            )));
        }
        if !hamiltonian.is_hermitian(1e-10) {
            return Err(VqeError::Config(
                "Hamiltonian has complex coefficients".into(),
            ));
        }
        let n_qubits = reference.len().max(hamiltonian.n_qubits());
        if hamiltonian.n_qubits() > reference.len() {
            return Err(VqeError::Config(alloc::format!(
                "reference covers {} qubits but the Hamiltonian acts on {}",
                reference.len(),
                hamiltonian.n_qubits()
            )));
        }

        let mut generators = None;
        let mut random_range = core::f64::consts::PI;
        let ansatz = match &cfg.ansatz {
            AnsatzSpec::Hea {
                layers,
                rotations,
                entangler,
            } => {
                if *layers == 0 || rotations.is_empty() {
                    return Err(VqeError::Config(
                        "HEA needs at least one layer and one rotation axis".into(),
                    ));
                }
                for r in rotations {
                    if !matches!(r.to_uppercase().as_str(), "RX" | "RY" | "RZ") {
                        return Err(VqeError::Config(alloc::format!(
                            "unsupported HEA rotation '{r}'"
                        )));
                    }
                }
                let rot: Vec<String> = rotations.iter().map(|r| r.to_uppercase()).collect();
                ansatz::hea_circuit(n_qubits, *layers, &rot, *entangler)
            }
            AnsatzSpec::Qcc {
                tau_guess,
                threshold,
                max_generators,
                bloch_layer,
            } => {
                if *threshold <= 0.0 {
                    return Err(VqeError::Config("QCC threshold must be positive".into()));
                }
                random_range = *tau_guess;
                let start = Statevector::from_bitstring(&reference)?;
                let set =
                    qcc::qcc_screen_generators(&hamiltonian, &start, *threshold, *max_generators);
                if set.is_empty() {
                    return Err(VqeError::EmptyGeneratorSet {
                        threshold: *threshold,
                    });
                }
                let c = qcc::qcc_circuit(&set.generators, n_qubits, *bloch_layer);
                generators = Some(set);
                c
            }
            AnsatzSpec::Custom { circuit } => {
                if !circuit.is_variational() {
                    return Err(VqeError::Config(
                        "custom ansatz has no variational gates".into(),
                    ));
                }
                if circuit.width() > n_qubits {
                    return Err(VqeError::Config(
                        "custom ansatz is wider than the reference".into(),
                    ));
                }
                circuit.clone()
            }
        };

        let n_params = ansatz.variational_gates().len();
        let params = match &cfg.initial_params {
            InitialParams::Zeros => vec![0.0; n_params],
            InitialParams::Random => {
                let mut r = rng::stream(cfg.optimizer.seed, "initial_params", 0);
                (0..n_params)
                    .map(|_| r.gen_range(-random_range..=random_range))
                    .collect()
            }
            InitialParams::Explicit(v) => {
                if v.len() != n_params {
                    return Err(VqeError::ParameterCount {
                        expected: n_params,
                        got: v.len(),
                    });
                }
                v.clone()
            }
        };

        let compiled = CompiledOperator::new(&hamiltonian);
        self.built = Some(Built {
            hamiltonian,
            compiled,
            n_qubits,
            reference,
            ansatz,
            params,
            generators,
        });
        self.result = None;
        Ok(())
    }

    fn built(&self) -> Result<&Built, VqeError> {
        self.built.as_ref().ok_or(VqeError::NotBuilt)
    }

    pub fn qubit_hamiltonian(&self) -> Result<&QubitOperator, VqeError> {
        Ok(&self.built()?.hamiltonian)
    }

    pub fn reference(&self) -> Result<&str, VqeError> {
        Ok(&self.built()?.reference)
    }

    pub fn generators(&self) -> Option<&QccGeneratorSet> {
        self.built.as_ref().and_then(|b| b.generators.as_ref())
    }

    pub fn params(&self) -> Result<&[f64], VqeError> {
        Ok(&self.built()?.params)
    }

    pub fn result(&self) -> Option<&VqeResult> {
        self.result.as_ref()
    }

    /// Reference X layer followed by the ansatz, bound to `params`.
    pub fn circuit_with(&self, params: &[f64]) -> Result<Circuit, VqeError> {
        let b = self.built()?;
        let mut ansatz = b.ansatz.clone();
        let n = ansatz.variational_gates().len();
        if params.len() != n {
            return Err(VqeError::ParameterCount {
                expected: n,
                got: params.len(),
            });
        }
        ansatz.bind_parameters(params)?;
        let mut c = ansatz::reference_circuit(&b.reference) + ansatz;
        c.set_declared_width(Some(b.n_qubits));
        Ok(c)
    }

    /// Current circuit with the current parameters.
    pub fn circuit(&self) -> Result<Circuit, VqeError> {
        self.circuit_with(&self.built()?.params)
    }

    /// Final state for `params` (noiseless).
    pub fn state(&self, params: &[f64]) -> Result<Statevector, VqeError> {
        let c = self.circuit_with(params)?;
        Ok(run_statevector(
            &c,
            None,
            self.config.backend.max_exact_qubits,
        )?)
    }

    /// <H> for `params` on the configured backend.
    pub fn energy_estimation(&self, params: &[f64]) -> Result<f64, VqeError> {
        let b = self.built()?;
        let c = self.circuit_with(params)?;
        let backend = &self.config.backend;
        if backend.n_shots.is_none() {
            let state = run_statevector(&c, None, backend.max_exact_qubits)?;
            return Ok(b.compiled.expectation(state.amplitudes()).re);
        }
        Ok(get_expectation_value_from(
            &b.hamiltonian,
            &c,
            backend,
            None,
        )?)
    }

    /// Minimises the energy over the variational parameters starting from the
    /// current ones, then stores the optimum.
    pub fn simulate(&mut self) -> Result<f64, VqeError> {
        let start = self.built()?.params.clone();
        let opt = self.config.optimizer.clone();
        let mut f = |x: &[f64]| self.energy_estimation(x);
        let r = optimizer::minimize(&mut f, &start, &opt)?;
        let energy = r.value;
        if let Some(b) = self.built.as_mut() {
            b.params = r.x.clone();
        }
        self.result = Some(VqeResult {
            energy,
            params: r.x,
            evaluations: r.evaluations,
            converged: r.converged,
            trace: r.trace,
        });
        Ok(energy)
    }

    pub fn get_resources(&self) -> Result<ResourceReport, VqeError> {
        let b = self.built()?;
        let c = self.circuit()?;
        Ok(ResourceReport {
            qubit_hamiltonian_terms: b.hamiltonian.len(),
            circuit_width: c.width(),
            circuit_gates: c.size(),
            circuit_2qubit_gates: c.two_qubit_gate_count(),
            circuit_var_gates: c.variational_gates().len(),
            vqe_variational_parameters: b.params.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::PauliWord;

    fn z0() -> QubitOperator {
        QubitOperator::term(PauliWord::parse("Z0").unwrap(), 1.0)
    }

    fn toy(reference: &str) -> VqeConfig {
        let mut cfg = VqeConfig::new(Hamiltonian::Qubit(z0()), AnsatzSpec::hea(1));
        cfg.reference = Some(reference.into());
        cfg.optimizer.tolerance = 1e-14;
        cfg
    }

    #[test]
    fn lifecycle_and_resources() {
        let mut s = VqeSolver::new(toy("1"));
        assert_eq!(s.get_resources(), Err(VqeError::NotBuilt));
        s.build().unwrap();
        let r = s.get_resources().unwrap();
        let expected = ResourceReport {
            qubit_hamiltonian_terms: 1,
            circuit_width: 1,
            circuit_gates: 2,
            circuit_2qubit_gates: 0,
            circuit_var_gates: 1,
            vqe_variational_parameters: 1,
        };
        assert_eq!(r, expected);
    }

    #[test]
    fn one_parameter_minimum() {
        let mut s = VqeSolver::new(toy("0"));
        s.build().unwrap();
        // RY(0)|0> is the maximum; start slightly off
        let e = {
            s.built.as_mut().unwrap().params = vec![0.3];
            s.simulate().unwrap()
        };
        assert!((e + 1.0).abs() < 1e-8, "{e}");
        let r = s.result().unwrap();
        assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
        let again = s.energy_estimation(&r.params.clone()).unwrap();
        assert_eq!(again, e);
    }

    #[test]
    fn qcc_threshold_too_large() {
        let h = QubitOperator::term(PauliWord::parse("X0 X1").unwrap(), 0.5);
        let mut cfg = VqeConfig::new(Hamiltonian::Qubit(h), AnsatzSpec::qcc(10.0));
        cfg.reference = Some("10".into());
        let mut s = VqeSolver::new(cfg);
        let err = s.build().unwrap_err();
        assert!(err.to_string().contains("empty generator set"));
    }

    #[test]
    fn qcc_two_qubit_resources() {
        let h = QubitOperator::from_terms([
            (PauliWord::parse("X0 X1").unwrap(), 0.5),
            (PauliWord::parse("Z0").unwrap(), 0.3),
        ]);
        let mut cfg = VqeConfig::new(Hamiltonian::Qubit(h), AnsatzSpec::qcc(1e-3));
        cfg.reference = Some("10".into());
        cfg.initial_params = InitialParams::Random;
        let mut s = VqeSolver::new(cfg);
        s.build().unwrap();
        let r = s.get_resources().unwrap();
        assert_eq!(r.circuit_width, 2);
        assert_eq!(r.circuit_2qubit_gates, 2);
        assert_eq!(r.vqe_variational_parameters, 1);
        assert!(s.params().unwrap()[0].abs() <= 1e-2);
    }

    #[test]
    fn explicit_params_checked() {
        let mut cfg = toy("0");
        cfg.initial_params = InitialParams::Explicit(vec![0.1, 0.2]);
        assert!(matches!(
            VqeSolver::new(cfg).build(),
            Err(VqeError::ParameterCount {
                expected: 1,
                got: 2
            })
        ));
    }
}
