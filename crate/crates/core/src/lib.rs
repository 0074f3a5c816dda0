//! Gate-network simulator for 1→2 optimal cloning of two pairs of orthogonal
//! qubit states.
//!
//! The crate builds the cloning network (rotation preparation stage followed by
//! a three-CNOT copy stage) on a three-qubit register, runs it as a dense
//! statevector simulation and checks the closed-form results for the cloning
//! map, the preparation angles, the angle-error fidelity and the partial
//! transpose spectrum of the clone pair against direct numerical computation.
//!
//! Qubit 0 (`a1`, the original) is the most significant bit of every basis
//! index, so `|x y z⟩` lives at index `4x + 2y + z`.
//!
//! - [`qlin`]: dense complex linear algebra for 1-3 qubit registers.
//! - [`gates`]: rotation, CNOT and classical-field gates.
//! - [`cloner`]: machine parameters, preparation and copy circuits, ideal map.
//! - [`analysis`]: fidelity under angle errors, clone-pair density matrices,
//!   partial transpose spectra and the separability verdict.
//! - [`sweep`]: grid evaluation, parallel when the `parallel` feature is on.
//! - [`verify`]: the invariant suite behind `qclone verify`.
//! - [`cli`]: argument parsing and output formatting for the `qclone` binary.

pub mod analysis;
pub mod cli;
pub mod cloner;
mod error;
pub mod gates;
pub mod qlin;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
