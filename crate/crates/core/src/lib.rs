//! Quantized electromagnetic field on a discrete mode grid.
//!
//! Photons are labelled by direction, polarization and frequency (1D) or by
//! wave vector and polarization (3D). States live in a truncated multimode
//! Fock space; the field Hamiltonian is diagonal there and the electric and
//! magnetic field operators are linear in the ladder operators. The
//! [`verify`] module turns the consistency requirements of the construction
//! into numerical checks: expectation values obey Maxwell's equations,
//! Heisenberg evolution agrees with finite-difference time derivatives, and
//! the spatial energy integral of the field operators reproduces the photon
//! number Hamiltonian.

// `!(x > 0.0)` is used deliberately so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod fock;
pub mod hamiltonian;
pub mod maxwell3d;
pub mod medium;
pub mod modes;
pub mod numfmt;
pub mod observables;
pub mod verify;

pub use error::{QfieldError, Result};
pub use fock::{MultiModeState, Occupation};
pub use medium::Medium;
pub use modes::{Direction, FrequencyGrid, ModeId, ModeUniverse, Polarization};
