//! Z_N symmetry-protected edge chains: operator construction, exact
//! diagonalization, and checks against compact-boson and group-cohomology
//! predictions.

pub mod cft_oracle;
pub mod cli;
pub mod clock_algebra;
pub mod cocycle;
pub mod error;
pub mod hamiltonian;
pub mod hilbert;
pub mod spectra;
pub mod symmetry;

pub use error::{Error, Result};
