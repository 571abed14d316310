//! Geometry handling, ONIOM recombination with link atoms and the method of
//! increments.

pub mod geometry;
pub mod increments;
pub mod oniom;

use alloc::string::String;
use alloc::vec::Vec;

pub use geometry::{parse_xyz, Atom, Geometry};
pub use increments::{
    format_key, max_complete_order, mi_increments, mi_recombine, parse_key, IncrementTable,
    MiRecombination,
};
pub use oniom::{
    build_capped_fragment, oniom_energy, run_oniom, FragmentEnergy, FragmentResult, FragmentSolver,
    FragmentSpec, Link, OniomResult, SolverRegistry, SolverSpec, StubSolver,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FragmentError {
    #[error("line {line}: {message}")]
    Xyz { line: usize, message: String },
    #[error("unknown element symbol '{0}'")]
    UnknownElement(String),
    #[error("non-finite coordinate for atom {0}")]
    NonFinite(usize),
    #[error("atom index {index} out of range for {n_atoms} atoms")]
    AtomIndex { index: usize, n_atoms: usize },
    #[error("atom {0} selected twice")]
    DuplicateAtom(usize),
    #[error("invalid link {staying}-{leaving}: {message}")]
    InvalidLink {
        staying: usize,
        leaving: usize,
        message: String,
    },
    #[error("expected exactly one whole-system fragment, found {0}")]
    WholeSystemCount(usize),
    #[error("fragment {0} has no high-level solver")]
    MissingHighSolver(usize),
    #[error("solver '{0}' is not registered")]
    UnknownSolver(String),
    #[error("no energy for fragment: {0}")]
    MissingEnergy(String),
    #[error("solver '{solver}' failed: {message}")]
    Solver { solver: String, message: String },
    #[error("increment table is missing subset {0:?}")]
    MissingSubset(Vec<usize>),
    #[error("bad increment key '{0}'")]
    BadKey(String),
}
