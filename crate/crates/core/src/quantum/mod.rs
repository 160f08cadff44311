//! Dense finite-dimensional states and operations: Bell and GHZ states,
//! the four-qubit bound entangled state, partial trace and transpose,
//! purification, Born-rule measurement into [`JointDistribution`]s, and
//! the quantum counterparts of the classical protocols.
//!
//! Subsystems are named; index order is big-endian in label order, so the
//! first label is the most significant digit.
//!
//! [`JointDistribution`]: crate::dist::JointDistribution

mod measure;
mod ops;
mod protocols;
mod state;

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::DistError;

pub use measure::{
    bell_measure, computational_basis, measure, measure_density, purify, purify_ensemble, smolin_ensemble,
    smolin_eve_basis, BasisSpec, BellBranch, MeasurementBasis, Measured,
};
pub use ops::{
    bell_state, fidelity, ghz_state, is_ppt, pauli, plus_state, smolin_pauli_form, smolin_state, KrausChannel,
};
pub use protocols::{
    ghz_extend, quantum_superactivation, quantum_teleport, quantum_unlock, quantum_unlock_branches, GhzBranch,
    GhzReport, QBranch, SuperBranch, SuperactivationReport, TeleportBranch,
};
pub use state::{DensityOperator, OperatorJson, StateVector};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Tolerance for constructing states and channels.
pub const BUILD_TOL: f64 = 1e-12;
/// Tolerance for assertions about results.
pub const CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("index {0} out of range")]
    Index(usize),
    #[error("label error: {0}")]
    Label(String),
    #[error("basis error: {0}")]
    Basis(String),
    #[error("eigenvalues are ambiguous: {0}")]
    NumericalRank(String),
    #[error("invalid state or operator: {0}")]
    Invalid(String),
    #[error(transparent)]
    Dist(#[from] DistError),
}

pub type Result<T, E = QuantumError> = std::result::Result<T, E>;

/// A named tensor factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subsystem {
    pub name: String,
    pub dim: usize,
}

impl Subsystem {
    pub fn new(name: &str, dim: usize) -> Self {
        Subsystem {
            name: name.to_string(),
            dim,
        }
    }

    pub fn qubit(name: &str) -> Self {
        Self::new(name, 2)
    }
}

pub fn qubits(names: &[&str]) -> Vec<Subsystem> {
    names.iter().map(|n| Subsystem::qubit(n)).collect()
}

pub(crate) fn c(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

#[cfg(test)]
mod tests;

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
