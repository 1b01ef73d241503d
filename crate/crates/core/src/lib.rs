//! Simulation and analysis of SWAP and SWITCH tests for telling two quantum
//! evolutions apart.
//!
//! The crate evolves each interferometric test circuit exactly, evaluates the
//! closed-form pass probabilities and fidelities, samples ancilla outcomes
//! and turns them into discrimination verdicts.
//!
//! Module map:
//!
//! - [`qmath`]: dense complex matrices, validated unitaries and states.
//! - [`gates`]: named gates and controlled constructions.
//! - [`circuits`]: exact simulation of each test circuit.
//! - [`analytic`]: closed-form probabilities and fidelities.
//! - [`probes`]: probe-state families.
//! - [`protocol`]: seeded sampling, verdicts and claim checks.
//! - [`cli`]: the command-line front end and result envelopes.

pub mod analytic;
pub mod circuits;
pub mod cli;
pub mod error;
pub mod gates;
pub mod probes;
pub mod protocol;
pub mod qmath;

pub use error::{Error, Result};
pub use qmath::{ComplexMatrix, QuantumState, UnitaryOp, C64};
