//! Standard-library companion to `fermiforge-core`: operator and RDM file
//! formats, OpenQASM 2.0 translation, file-backed fragment solvers and the
//! `fermiforge` command-line tool.

pub mod cli;
pub mod config;
pub mod formats;
pub mod qasm;
pub mod solvers;

pub use fermiforge_core as core;
