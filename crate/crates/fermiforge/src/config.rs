//! JSON input files: VQE configurations, ONIOM specifications and measured
//! experiments. Paths inside a file are relative to that file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use fermiforge_core::fragment::{parse_xyz, FragmentSpec, Geometry};
use fermiforge_core::mapping::MappingConfig;
use fermiforge_core::vqe::{AnsatzSpec, Hamiltonian, InitialParams, OptimizerConfig, VqeConfig};
use fermiforge_core::{BackendConfig, Histogram, NoiseModel, PauliWord};
use serde::{Deserialize, Serialize};

use crate::formats::{
    read_fermion_operator, read_json, read_qubit_operator, read_text, resolve, FormatError,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum HamiltonianFile {
    /// Qubit operator text file.
    Qubit { path: PathBuf },
    /// Fermion operator text file and the mapping to apply.
    Fermion {
        path: PathBuf,
        mapping: MappingConfig,
    },
}

fn zeros() -> InitialParams {
    InitialParams::Zeros
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VqeConfigFile {
    pub hamiltonian: HamiltonianFile,
    pub ansatz: AnsatzSpec,
    #[serde(default)]
    pub reference: Option<String>,
    #[serde(default)]
    pub n_electrons: Option<usize>,
    #[serde(default = "zeros")]
    pub initial_params: InitialParams,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub backend: BackendConfig,
}

impl VqeConfigFile {
    /// Reads the Hamiltonian file (relative to `anchor`) and assembles the config.
    pub fn into_config(self, anchor: &Path) -> Result<VqeConfig, FormatError> {
        let hamiltonian = match self.hamiltonian {
            HamiltonianFile::Qubit { path } => {
                Hamiltonian::Qubit(read_qubit_operator(&resolve(anchor, &path))?)
            }
            HamiltonianFile::Fermion { path, mapping } => Hamiltonian::Fermion {
                operator: read_fermion_operator(&resolve(anchor, &path))?,
                mapping,
            },
        };
        let mut cfg = VqeConfig::new(hamiltonian, self.ansatz);
        cfg.reference = self.reference;
        cfg.n_electrons = self.n_electrons;
        cfg.initial_params = self.initial_params;
        cfg.optimizer = self.optimizer;
        cfg.backend = self.backend;
        Ok(cfg)
    }
}

pub fn load_vqe_config(path: &Path) -> Result<VqeConfig, FormatError> {
    read_json::<VqeConfigFile>(path)?.into_config(path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OniomFile {
    /// XYZ file path.
    pub geometry: PathBuf,
    #[serde(default)]
    pub charge: i64,
    #[serde(default)]
    pub spin: i64,
    pub fragments: Vec<FragmentSpec>,
}

pub fn load_oniom(path: &Path) -> Result<(Geometry, Vec<FragmentSpec>), FormatError> {
    let spec: OniomFile = read_json(path)?;
    let xyz = resolve(path, &spec.geometry);
    let mut g = parse_xyz(&read_text(&xyz)?)
        .map_err(|e| FormatError::Invalid(format!("{}: {e}", xyz.display())))?;
    g.charge = spec.charge;
    g.spin = spec.spin;
    Ok((g, spec.fragments))
}

/// Histograms measured in a set of Pauli bases, with what is needed to turn
/// them into RDMs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub mapping: MappingConfig,
    /// Shots per basis.
    pub n_shots: u64,
    pub seed: u64,
    #[serde(default)]
    pub noise: Option<NoiseModel>,
    pub histograms: BTreeMap<PauliWord, Histogram>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamiltonian_block_shapes() {
        let q: HamiltonianFile =
            serde_json::from_str(r#"{"kind":"qubit","path":"h.txt"}"#).unwrap();
        assert_eq!(
            q,
            HamiltonianFile::Qubit {
                path: "h.txt".into()
            }
        );
        let f: HamiltonianFile = serde_json::from_str(
            r#"{"kind":"fermion","path":"f.txt","mapping":{"mapping":"scBK","n_spinorbitals":4,"n_electrons":2,"up_then_down":true}}"#,
        )
        .unwrap();
        assert!(matches!(f, HamiltonianFile::Fermion { .. }));
    }

    #[test]
    fn unknown_keys_rejected() {
        let text =
            r#"{"hamiltonian":{"kind":"qubit","path":"h.txt"},"ansatz":{"kind":"hea"},"layrs":3}"#;
        assert!(serde_json::from_str::<VqeConfigFile>(text).is_err());
    }
}
