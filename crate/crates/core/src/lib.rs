//! Algorithmic core of fermiforge.
//!
//! Everything in this crate is `no_std` and only needs an allocator: the gate and
//! circuit IR, Pauli and fermionic operator algebra with the fermion-to-qubit
//! mappings, a statevector simulator with shot sampling and stochastic Pauli noise,
//! measurement grouping, the VQE engine with the QCC ansatz, RDM post-processing and
//! the fragment energy recombination schemes. File formats, translation and the
//! command-line tool live in the `fermiforge` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod circuit;
pub mod fragment;
pub mod linalg;
pub mod mapping;
pub mod measurement;
pub mod operator;
pub mod postprocess;
pub mod rng;
pub mod simulator;
pub mod vqe;

pub use circuit::{Circuit, Gate, Parameter};
pub use num_complex;
pub use operator::{FermionOperator, Ladder, Pauli, PauliWord, QubitOperator};
pub use simulator::{BackendConfig, Histogram, NoiseModel, Simulator, Statevector};
