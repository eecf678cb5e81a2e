//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Fock truncation must satisfy n_max >= 2, got {0}")]
    FockTooSmall(usize),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian (relative deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("unstable oscillator: omega_o^2 + 4 c_a2 g omega_o = {0:.6} GHz^2 <= 0")]
    UnstableOscillator(f64),
    #[error("bias current |{i_b}| nA at or beyond critical current {i_cm} nA")]
    CriticalCurrentExceeded { i_b: f64, i_cm: f64 },
    #[error("invalid junction currents: require i_cm > i_p > 0 and i_zpf >= 0")]
    InvalidCurrents,
    #[error("potential wells merged at n_phi_q = {0}: only one minimum found")]
    WellsMerged(f64),
    #[error("flux bias n_phi_q = {0} outside the two-well validity window")]
    OutsideValidityWindow(f64),
    #[error("non-positive Josephson inductance at the {0} junction")]
    NonPositiveInductance(&'static str),
    #[error("no parity crossing of levels 2 and 3 in g range [{0}, {1}] GHz")]
    NoCrossingInRange(f64, f64),
    #[error("eigenstate index {index} out of range ({available} levels computed)")]
    IndexOutOfRange { index: usize, available: usize },
    #[error("insufficient levels for thermal state: smallest included Boltzmann weight is {0:.3e} of the largest (need < 1e-12)")]
    InsufficientLevels(f64),
    #[error("phase-space grid too small: boundary mass {0:.3e} exceeds 1% of unity")]
    GridTooSmall(f64),
    #[error("population inversion: depth ratio {0} >= 1 has no thermal temperature")]
    PopulationInversion(f64),
    #[error("dip set is not identifiable: {0}")]
    NotIdentifiable(String),
    #[error("optimizer did not converge: {0}")]
    NoConvergence(String),
    #[error("quadrature did not converge (refinement delta {0:.3e})")]
    QuadratureNonConvergence(f64),
    #[error("qubit mixing angle is undefined for delta = epsilon = 0")]
    ZeroMixingInputs,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("{path}:{line}: {msg}")]
    MalformedCsv {
        path: String,
        line: usize,
        msg: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("failed to parse JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for usage/input problems, 3 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_)
            | Error::Json(_)
            | Error::MalformedCsv { .. }
            | Error::InvalidParams(_)
            | Error::FockTooSmall(_)
            | Error::DimensionMismatch { .. }
            | Error::IndexOutOfRange { .. } => 2,
            _ => 3,
        }
    }
}
