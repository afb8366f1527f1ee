//! Two two-level atoms coupled to a single cavity mode whose frequency is
//! modulated by a parametric (two-photon) pump. The pump squeezes the mode:
//! in the Bogoliubov frame the atom-cavity coupling is amplified by factors
//! cosh(r_p) and sinh(r_p), which exponentially enhances the cavity-mediated
//! dipole-dipole exchange between the atoms.
//!
//! Modules:
//! - [`fock_algebra`]: truncated Fock space, operator and state containers,
//!   Hermitian eigendecomposition.
//! - [`model`]: system and reservoir parameters, lab/squeezed-frame and
//!   effective Hamiltonians, squeezed-noise coefficients.
//! - [`resonance`]: exchange-resonance solver, effective coupling strengths,
//!   avoided-crossing scans.
//! - [`evolve`]: unitary and Lindblad propagation, oscillation-period
//!   extraction.
//!
//! Conventions: hbar = 1. All frequencies are in units of the first atom's
//! bare coupling g1 unless stated otherwise. The composite basis is ordered
//! atom1 x atom2 x cavity with the cavity index varying fastest.

pub mod evolve;
pub mod fock_algebra;
mod integrate;
pub mod model;
pub mod resonance;

pub use integrate::RkOptions;
pub use num_complex::Complex64 as C64;

/// Errors surfaced by construction, validation, and propagation routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{context}: dimension mismatch, expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("operator is not Hermitian (max |H - H^dag| element = {deviation:.3e})")]
    NonHermitian { deviation: f64 },

    #[error("pump too strong: |Omega_p / Delta_c| = {alpha:.6} must be < 1")]
    PumpTooStrong { alpha: f64 },

    #[error("interaction picture requires theta_p = 0, got {theta_p}")]
    PumpPhaseNotZero { theta_p: f64 },

    #[error("effective model undefined: detuning {name} is zero")]
    ZeroDetuning { name: &'static str },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "level tracking ambiguous at grid index {index} (best overlap {overlap:.3}); \
         refine the grid"
    )]
    TrackingAmbiguous { index: usize, overlap: f64 },

    #[error("state norm drifted by {drift:.3e} at t = {t:.6} (limit 1e-6)")]
    NormDrift { t: f64, drift: f64 },

    #[error("density-matrix trace drifted by {drift:.3e} at t = {t:.6} (limit 1e-5)")]
    TraceDrift { t: f64, drift: f64 },

    #[error("density matrix lost positivity at t = {t:.6} (min eigenvalue {eigenvalue:.3e})")]
    PositivityLost { t: f64, eigenvalue: f64 },

    #[error("did not converge: {0}")]
    Convergence(String),

    #[error("fewer than two oscillation maxima found ({found}); cannot extract a period")]
    InsufficientOscillation { found: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
