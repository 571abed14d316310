//! Physical quantities from measurement data: RDM assembly, McWeeny
//! purification, bootstrap statistics and zero-noise extrapolation helpers.

pub mod bootstrap;
pub mod mcweeny;
pub mod mitigation;
pub mod rdm;

use alloc::string::String;

use crate::circuit::CircuitError;
use crate::mapping::MappingError;
use crate::operator::PauliWord;
use crate::simulator::SimulatorError;

pub use bootstrap::{
    bootstrap_energy, resample_frequencies, series_stats, BootstrapOptions, BootstrapReport,
};
pub use mcweeny::{mcweeny_purify_2rdm, mcweeny_purify_matrix, Purified};
pub use mitigation::{fold_gates, richardson_extrapolate};
pub use rdm::{energy_from_rdms, rdm_terms, rdm_words, rdms_from_expectations, RdmPair};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PostprocessError {
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error(transparent)]
    Simulator(#[from] SimulatorError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("no expectation value for Pauli word {0}")]
    MissingExpectation(PauliWord),
    #[error("term [{0}] is not a constant, one-body or normal-ordered two-body term")]
    UnsupportedTerm(String),
    #[error("McWeeny purification needs exactly 2 electrons, got {0}")]
    ElectronCount(usize),
    #[error("McWeeny purification did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("standard deviation needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("{0}")]
    Invalid(String),
}
