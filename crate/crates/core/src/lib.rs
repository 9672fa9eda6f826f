//! Quantum Car-Parrinello molecular dynamics with classical-shadow forces.
//!
//! The crate simulates the electronic problem on a dense statevector, so
//! every "measurement" is a seeded draw from the exact Born distribution.
//! Nuclear forces are Hellmann-Feynman expectations of a finite-difference
//! `dH/dR` observable; they can be estimated from a single batch of
//! random-basis snapshots, from per-term direct measurements, or exactly.
//!
//! Module map:
//!
//! - [`pauli`]: Pauli words, observables, exact expectations and the dense
//!   diagonalization oracle.
//! - [`statevector`]: ansatz preparation, basis rotations, sampling.
//! - [`shadow`]: snapshots, median-of-means and direct estimators.
//! - [`hamiltonian`]: the tabulated `H(R)` and its force observable.
//! - [`dynamics`]: the integrator, force estimators and sample accounting.
//! - [`vqe`]: BFGS ground-state preparation.
//! - [`runner`]: run configuration, experiment presets and output files.

pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod pauli;
pub mod rng;
pub mod runner;
pub mod shadow;
pub mod statevector;
pub mod units;
pub mod vqe;

pub use error::{Error, Result};
