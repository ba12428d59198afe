//! Dispersive circuit-QED toolbox.
//!
//! A truncated single-mode cavity, optionally coupled to a two-level ancilla in the
//! strong-dispersive regime. The crate covers:
//!
//! * [`fock`]: Fock-space states and operators (ladder, parity, displacement, cats);
//! * [`composite`]: qubit ⊗ cavity protocols (parity measurement, cat preparation);
//! * [`channel`]: photon loss as an exact Kraus map and as quantum-jump trajectories;
//! * [`wigner`]: Wigner functions via displaced parity, with independent oracles;
//! * [`catcode`]: cat-code error correction with mod-4 parity-jump tracking;
//! * [`cli`]: the scenario runner behind the `cqed` binary.
//!
//! Units: ħ = 1, and phase space is the complex amplitude plane β = β_R + iβ_I.

pub mod catcode;
pub mod channel;
pub mod cli;
pub mod composite;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod wigner;

pub use error::{Error, Result};
pub use fock::{FockDim, Parity, Tolerances};
