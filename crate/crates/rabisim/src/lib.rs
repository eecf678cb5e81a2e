//! Simulation and fitting toolkit for a superconducting flux qubit
//! inductively coupled to a lumped-element LC oscillator, in the regime
//! where the coupling rate rivals the oscillator frequency.
//!
//! The crate diagonalizes the qubit-oscillator Hamiltonian in a truncated
//! Fock basis and builds everything downstream of the spectrum:
//!
//! - transition frequencies, matrix elements, and selection rules across a
//!   flux-bias sweep ([`spectrum`]);
//! - displaced-branch superposition states and their fidelities against
//!   exact eigenstates ([`states`]);
//! - ground-state and thermal qubit-oscillator entanglement
//!   ([`entanglement`]);
//! - Wigner functions of reduced oscillator states ([`wigner`]);
//! - the Josephson circuit model behind the tunable coupler ([`circuit`]);
//! - synthetic transmission spectra and a global (delta, omega_o, g) fit
//!   ([`specfit`]).
//!
//! See the `examples/` directory for one runnable example per capability,
//! and the `rabisim` binary for file-oriented pipelines.

pub mod circuit;
pub mod consts;
pub mod entanglement;
pub mod error;
pub mod fock;
pub mod presets;
pub mod rabi;
pub mod report;
pub mod specfit;
pub mod spectrum;
pub mod states;
pub mod wigner;

pub use error::{Error, Result};
pub use fock::{CMatrix, CVector, FockSpace, JointState};
pub use rabi::{NonlinearCoupling, RabiParams};
pub use spectrum::EigenSystem;
