//! Numerical toolkit for the asymmetric quantum Rabi model (AQRM): a qubit
//! coupled to a single bosonic mode with a symmetry-breaking bias and an
//! anisotropy interpolating between the Jaynes-Cummings and Rabi limits.
//!
//! The crate diagonalizes the truncated Hamiltonian, reduces eigenstates to
//! the qubit and boson subsystems, and evaluates non-stabilizerness
//! ("magic") quantifiers on the reduced states:
//!
//! - [`model`] — operators in the truncated Fock ⊗ qubit basis, plus
//!   closed-form oracles (decoupled limit, Jaynes-Cummings doublets,
//!   polaron frame) used for testing.
//! - [`spectral`] — dense Hermitian eigendecomposition with deterministic
//!   ordering, truncation-convergence flags, and parity labels.
//! - [`reduction`] — partial traces to 2×2 and boson density matrices,
//!   Bloch vectors, mean boson number.
//! - [`qudit`] — discrete Heisenberg-Weyl displacements, discrete Wigner
//!   tables, sum negativity, mana, the Dai-Fu-Luo witness, von Neumann
//!   entropy.
//! - [`cv`] — continuous Wigner functions of boson-reduced states on a
//!   phase-space grid and the Wigner logarithmic negativity (bosonic mana).
//! - [`sweep`] — parallel spectrum scans and 2-D parameter maps.
//! - [`output`] — CSV/JSON/metadata/SVG emission.
//!
//! All quantities are reported in units of the boson frequency ω.

use thiserror::Error;

mod eigh;

pub mod cv;
pub mod model;
pub mod output;
pub mod qudit;
pub mod reduction;
pub mod spectral;
pub mod sweep;

pub use model::{HermitianOp, ModelParams, Spin, TruncatedBasis};
pub use qudit::MagicReport;
pub use reduction::{BlochVector, BosonDensity, QubitDensity};
pub use spectral::EigenSolution;
pub use sweep::{ResultRecord, SweepConfig, SweepTable};

/// Dense complex matrix used for all operators and states.
pub type CMat = nalgebra::DMatrix<num_complex::Complex64>;
/// Dense complex vector (eigenvector storage).
pub type CVec = nalgebra::DVector<num_complex::Complex64>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("matrix is not Hermitian (max entrywise deviation {max_dev:.3e})")]
    NotHermitian { max_dev: f64 },
    #[error("operation requires xi = {required}, got {got}")]
    AnisotropyMismatch { required: f64, got: f64 },
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
    #[error("state is not normalized (|‖ψ‖ − 1| = {dev:.3e})")]
    NotNormalized { dev: f64 },
    #[error("not a valid density matrix: {0}")]
    InvalidDensity(String),
    #[error("dimension must be 2 or an odd prime, got {0}")]
    UnsupportedDimension(usize),
    #[error("displacement index ({k}, {l}) outside Z_{d} × Z_{d}")]
    IndexOutOfRange { d: usize, k: usize, l: usize },
    #[error("invalid phase-space grid: {0}")]
    InvalidGrid(String),
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
