//! Physical constants in the unit system used throughout the crate
//! (GHz, nA, pH, fF, mK).

/// Planck constant, J s.
pub const PLANCK_JS: f64 = 6.62607015e-34;

/// Reduced Planck constant, J s.
pub const HBAR_JS: f64 = PLANCK_JS / (2.0 * std::f64::consts::PI);

/// Superconducting flux quantum h/2e, Wb.
pub const FLUX_QUANTUM_WB: f64 = 2.067834e-15;

/// Boltzmann constant divided by Planck constant, GHz per kelvin.
pub const BOLTZMANN_GHZ_PER_K: f64 = 20.836619;
