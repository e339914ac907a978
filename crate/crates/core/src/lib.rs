//! Numerical core for particle-conserving quantum East chains.
//!
//! Hard-core bosons hop between neighbouring sites only when facilitated by
//! an occupied site at most `r` sites to their left. The crate builds the
//! constrained sectors, assembles the Hamiltonian, and provides the spectral,
//! entanglement, dynamical and classical-automaton analyses built on top.

pub mod automaton;
pub mod basis;
pub mod dynamics;
pub mod entanglement;
pub mod fit;
pub mod linalg;
pub mod spectral;
pub mod error;
pub mod fragmentation;
pub mod hamiltonian;
pub mod parallel;

pub use basis::{FockState, SectorBasis};
pub use error::{Error, Result};
pub use hamiltonian::{build_hamiltonian, AssemblyMode, ModelSpec, SparseOperator};
