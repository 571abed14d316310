//! Fragment solvers backed by Hamiltonian files. There is no integral engine
//! here, so these solvers read a precomputed Hamiltonian named in their
//! options instead of building one from the fragment geometry.

use std::path::{Path, PathBuf};

use fermiforge_core::fragment::{
    FragmentEnergy, FragmentError, FragmentSolver, Geometry, SolverRegistry,
};
use fermiforge_core::linalg::{exact_ground_energy, restricted_ground_energy};
use fermiforge_core::mapping::{fermion_to_qubit_mapping, Mapping};
use fermiforge_core::vqe::VqeSolver;
use serde_json::Value;

use crate::config::{load_vqe_config, HamiltonianFile};
use crate::formats::{read_fermion_operator, read_qubit_operator, resolve};

fn failure(solver: &str, message: impl ToString) -> FragmentError {
    FragmentError::Solver {
        solver: solver.to_string(),
        message: message.to_string(),
    }
}

/// Lowest eigenvalue of the Hamiltonian in `{"hamiltonian": {...}}`. For a
/// Jordan-Wigner fermion Hamiltonian with `n_electrons` set in its mapping the
/// search is restricted to that particle number.
#[derive(Debug, Clone)]
pub struct ExactDiagSolver {
    anchor: PathBuf,
}

impl ExactDiagSolver {
    pub fn new(anchor: &Path) -> ExactDiagSolver {
        ExactDiagSolver {
            anchor: anchor.to_path_buf(),
        }
    }
}

impl FragmentSolver for ExactDiagSolver {
    fn solve(
        &self,
        _geometry: &Geometry,
        options: &Value,
    ) -> Result<FragmentEnergy, FragmentError> {
        let block = options
            .get("hamiltonian")
            .ok_or_else(|| failure("exact_diag", "options need 'hamiltonian'"))?;
        let file: HamiltonianFile =
            serde_json::from_value(block.clone()).map_err(|e| failure("exact_diag", e))?;
        let energy = match file {
            HamiltonianFile::Qubit { path } => {
                let op = read_qubit_operator(&resolve(&self.anchor, &path))
                    .map_err(|e| failure("exact_diag", e))?;
                exact_ground_energy(&op, op.n_qubits())
            }
            HamiltonianFile::Fermion { path, mapping } => {
                let f = read_fermion_operator(&resolve(&self.anchor, &path))
                    .map_err(|e| failure("exact_diag", e))?;
                let op =
                    fermion_to_qubit_mapping(&f, &mapping).map_err(|e| failure("exact_diag", e))?;
                let n = mapping.n_qubits();
                match (mapping.mapping, mapping.n_electrons) {
                    (Mapping::JW, Some(ne)) => {
                        restricted_ground_energy(&op, n, |b| b.count_ones() as usize == ne)
                    }
                    _ => exact_ground_energy(&op, n),
                }
            }
        };
        energy
            .map(FragmentEnergy::classical)
            .map_err(|e| failure("exact_diag", e))
    }
}

/// Runs the VQE configuration named by `{"config": "<file>"}` and reports its
/// energy with the resource summary.
#[derive(Debug, Clone)]
pub struct VqeFragmentSolver {
    anchor: PathBuf,
}

impl VqeFragmentSolver {
    pub fn new(anchor: &Path) -> VqeFragmentSolver {
        VqeFragmentSolver {
            anchor: anchor.to_path_buf(),
        }
    }
}

impl FragmentSolver for VqeFragmentSolver {
    fn solve(
        &self,
        _geometry: &Geometry,
        options: &Value,
    ) -> Result<FragmentEnergy, FragmentError> {
        let path = options
            .get("config")
            .and_then(Value::as_str)
            .ok_or_else(|| failure("vqe", "options need 'config' (path to a VQE configuration)"))?;
        let cfg = load_vqe_config(&resolve(&self.anchor, Path::new(path)))
            .map_err(|e| failure("vqe", e))?;
        let mut solver = VqeSolver::new(cfg);
        solver.build().map_err(|e| failure("vqe", e))?;
        let energy = solver.simulate().map_err(|e| failure("vqe", e))?;
        let resources = solver.get_resources().map_err(|e| failure("vqe", e))?;
        Ok(FragmentEnergy {
            energy,
            resources: Some(resources),
        })
    }
}

/// "stub", "exact_diag" and "vqe", with file paths resolved against `anchor`.
pub fn registry(anchor: &Path) -> SolverRegistry {
    let mut r = SolverRegistry::default();
    r.register("exact_diag", ExactDiagSolver::new(anchor));
    r.register("vqe", VqeFragmentSolver::new(anchor));
    r
}
